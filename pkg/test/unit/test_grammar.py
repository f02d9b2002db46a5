#!/usr/bin/env python3
"""
Unit tests for the input grammar.
"""

import pytest

from errors import GrammarError, HomomorphismError, UnsupportedInputError
from grammar import ModuleSpec, RawMap, parse_inputs, parse_text, parse_value, parse_word
from group_model import GroupKind, GroupSpec, Word


@pytest.mark.unit
class TestGroupValues:
    """Test group literals."""

    def test_cyclic(self):
        group = parse_value("cyclic:4")
        assert group.kind == GroupKind.CYCLIC
        assert group.order == 4
        assert group.generators == ("t",)

    def test_free_with_names(self):
        group = parse_value("free{gens=x,y}")
        assert group.kind == GroupKind.FREE
        assert group.generators == ("x", "y")

    def test_named_families(self):
        assert parse_value("surface:2").rank == 4
        assert len(parse_value("bs:1,2").relators) == 1
        assert parse_value("trivial").is_trivial

    def test_finitely_presented(self):
        group = parse_value("fp{gens=a,b; rels=[a b a^-1 b^-1]}")
        assert group.relators == (Word(((0, 1), (1, 1), (0, -1), (1, -1))),)

    def test_unknown_group(self):
        with pytest.raises(GrammarError, match="unknown group 'klein'"):
            parse_value("klein:4")

    def test_invalid_order_reported_as_syntax_error(self):
        with pytest.raises(GrammarError):
            parse_value("cyclic:0")


@pytest.mark.unit
class TestHomValues:
    """Test homomorphism literals."""

    def test_multiplier_form(self):
        hom = parse_value("hom{dom=cyclic:16; cod=cyclic:4; images=[mult:1]}")
        assert hom.multiplier == 1
        assert hom.describe() == "Z/16 -> Z/4, t -> s^1"

    def test_word_images(self, torus_group):
        hom = parse_value("hom{dom=fp{gens=a,b; rels=[a b a^-1 b^-1]}; cod=cyclic:2; images=[t, 1]}")
        assert hom.domain.relators == torus_group.relators
        assert hom.images == (Word.generator(0), Word())

    def test_multiplier_needs_cyclic_groups(self):
        with pytest.raises(GrammarError, match="mult:d"):
            parse_value("hom{dom=free:1; cod=cyclic:2; images=[mult:1]}")

    def test_unknown_generator(self):
        with pytest.raises(GrammarError, match="unknown generator 'u'"):
            parse_value("hom{dom=cyclic:4; cod=cyclic:2; images=[u]}")

    def test_ill_defined_hom(self):
        with pytest.raises(HomomorphismError):
            parse_value("hom{dom=cyclic:5; cod=cyclic:3; images=[mult:1]}")


@pytest.mark.unit
class TestFiles:
    """Test whole input texts and files."""

    def test_comments_and_blank_lines(self):
        inputs = parse_text("# sample\n\ngroup = cyclic:16  # domain\nmodule = module{rels=[[16]]; action=[[3]]}\n")
        assert set(inputs.values) == {"group", "module"}
        assert isinstance(inputs.values["module"], ModuleSpec)
        module = inputs.module()
        assert module.order == 16
        assert module.rank == 1

    def test_group_defaults_to_hom_codomain(self):
        inputs = parse_text("hom = hom{dom=cyclic:16; cod=cyclic:4; images=[mult:1]}")
        assert inputs.group.order == 4

    def test_error_position(self):
        with pytest.raises(GrammarError) as excinfo:
            parse_text("g = cyclic:4\nh = cyclic 4\n", source="sample.grp")
        assert (excinfo.value.line, excinfo.value.column) == (2, 12)
        assert str(excinfo.value).startswith("sample.grp:2:12: expected ':'")

    def test_duplicate_names(self):
        with pytest.raises(GrammarError, match="defined twice"):
            parse_text("g = cyclic:4\ng = cyclic:2\n")

    def test_trailing_garbage(self):
        with pytest.raises(GrammarError, match="after value"):
            parse_text("g = cyclic:4 }\n")

    def test_module_shape_checked(self):
        with pytest.raises(GrammarError, match="square"):
            parse_text("module = module{rels=[]; action=[[1, 0]]}")

    def test_module_action_checked_on_binding(self):
        inputs = parse_text("group = cyclic:4\nmodule = module{rels=[[7]]; action=[[3]]}\n")
        with pytest.raises(UnsupportedInputError):
            inputs.module()

    def test_factorization_maps(self):
        inputs = parse_text(
            "hom = hom{dom=fp{gens=a,b; rels=[a b a^-1 b^-1]}; cod=cyclic:2; images=[t, 1]}\n"
            "q = map{cod=free{gens=x}; images=[x, 1]}\n"
            "r = map{images=[t]}\n"
        )
        assert isinstance(inputs.values["q"], RawMap)
        q_images, r_images, rank = inputs.factorization_maps()
        assert rank == 1
        assert q_images == [Word.generator(0), Word()]
        assert r_images == [Word.generator(0)]

    def test_factorization_needs_free_codomain_for_q(self):
        inputs = parse_text(
            "hom = hom{dom=cyclic:4; cod=cyclic:2; images=[mult:1]}\n"
            "q = map{images=[t]}\n"
            "r = map{images=[t]}\n"
        )
        with pytest.raises(UnsupportedInputError):
            inputs.factorization_maps()

    def test_parse_inputs(self, tmp_path):
        first = tmp_path / "a.grp"
        second = tmp_path / "b.grp"
        first.write_text("hom = hom{dom=cyclic:16; cod=cyclic:4; images=[mult:1]}\n")
        second.write_text("group = cyclic:4\n")
        inputs = parse_inputs([first, second])
        assert inputs.hom.multiplier == 1
        assert inputs.texts["group"][1] == str(second)

    def test_parse_inputs_rejects_redefinition(self, tmp_path):
        first = tmp_path / "a.grp"
        first.write_text("group = cyclic:4\n")
        with pytest.raises(UnsupportedInputError):
            parse_inputs([first, first])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_inputs([tmp_path / "missing.grp"])

    def test_sample_inputs_parse(self, inputs_path):
        inputs = parse_inputs(sorted(inputs_path.glob("z*.grp"))[:1])
        assert inputs.hom is not None or inputs.group is not None


@pytest.mark.unit
class TestWords:
    """Test word parsing against a group's generators."""

    def test_exponents(self):
        group = GroupSpec.free(2, ["a", "b"])
        assert parse_word("a b^-2", group) == Word(((0, 1), (1, -2)))

    def test_free_reduction(self):
        group = GroupSpec.free(2, ["a", "b"])
        assert parse_word("a b b^-1 a^-1", group).is_identity

    def test_identity(self):
        assert parse_word("1", GroupSpec.cyclic(3)) == Word()
