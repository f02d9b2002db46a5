#!/usr/bin/env python3
"""
Integration tests for the command-line runner.

Commands run against the sample inputs and the shipped configuration; emitted
certificates are written to disk and re-verified from there.
"""

import json

import pytest

from certificates import load_certificate, save_certificate
from certify import LowerBoundEngine
from cli import CAT_BRIDGING_NOTE, EXIT_CERTIFIED, EXIT_ERROR, EXIT_REFUTED, RunConfig
from config_loader import EngineConfig
from errors import UnsupportedInputError
from group_model import make_cyclic_hom


@pytest.mark.integration
class TestCohomologyCommands:
    """Test cohomology and induced."""

    def test_cohomology_with_input_module(self, run, inputs_path):
        report = run("cohomology", [inputs_path / "z16_twisted.grp"], degree=0)
        assert report.table["module"].tolist() == ["M"]
        assert report.table["cohomology"].tolist() == ["Z/2"]

    def test_cohomology_named_family(self, run, inputs_path):
        report = run("cohomology", [inputs_path / "z16_z4.grp"], degree=2, modules="trivial_only")
        assert report.table["module"].tolist() == ["Z", "Z/4"]
        assert report.table["cohomology"].tolist() == ["Z/4", "Z/4"]

    def test_cohomology_family_file(self, run, inputs_path, tmp_path):
        family = tmp_path / "family.yml"
        family.write_text("modules:\n  - kind: group_ring\n")
        report = run("cohomology", [inputs_path / "z16_z4.grp"], degree=1, modules=str(family))
        assert report.table["cohomology"].tolist() == ["0"]

    def test_induced(self, run, inputs_path):
        report = run("induced", [inputs_path / "z16_z4.grp"], degree=2, modules="trivial_only")
        rows = report.table.to_dict(orient="records")
        assert [r["module"] for r in rows] == ["Z", "Z/4"]
        assert rows[0]["source"] == "Z/4"
        assert rows[0]["target"] == "Z/16"
        assert not rows[0]["zero"]


@pytest.mark.integration
class TestCdCommands:
    """Test cd-bounds, chain-homotopy and bs-pullback."""

    def test_cd_bounds_writes_certificate(self, run, inputs_path, test_output_dir):
        out = test_output_dir / "z16_z4.json"
        report = run("cd-bounds", [inputs_path / "z16_z4.grp"], out=out)
        assert report.exit_status == EXIT_CERTIFIED
        assert (report.results["cd_lower"], report.results["cd_upper"]) == (2, 2)
        assert report.summary == ["cd = 2 (exact)"]
        assert report.certificates == [str(out)]
        assert load_certificate(out).claims == {"cd": 2}

    def test_cd_bounds_z27_z9(self, run, inputs_path):
        report = run("cd-bounds", [inputs_path / "z27_z9.grp"])
        assert report.summary == ["cd = 4 (exact)"]
        witness = report.results["certificate"]["payload"]["lower"]["witness"]
        assert witness["source"] == "module_family"

    def test_chain_homotopy_infeasible(self, run, inputs_path):
        report = run("chain-homotopy", [inputs_path / "z16_z4.grp"], degree=1)
        assert report.exit_status == EXIT_REFUTED
        assert report.results["feasible"] is False
        assert report.results["infeasible_degree"] == 2

    def test_chain_homotopy_feasible(self, run, inputs_path):
        report = run("chain-homotopy", [inputs_path / "z16_z4.grp"], degree=2)
        assert report.exit_status == EXIT_CERTIFIED
        assert report.results["homotopy"][:2] == [[-3, -2, -1, 0], [1, 0, 0, 0]]
        assert report.results["certificate"]["kind"] == "cd_upper"

    def test_chain_homotopy_needs_degree(self, run, inputs_path):
        with pytest.raises(UnsupportedInputError):
            run("chain-homotopy", [inputs_path / "z16_z4.grp"])

    def test_bs_pullback(self, run, inputs_path):
        report = run("bs-pullback", [inputs_path / "z16_z4.grp"], degree=2)
        assert report.results["nonzero"] is True
        assert report.results["certificate"]["claims"] == {"cd_lower": 2}

    def test_bs_pullback_needs_a_hom(self, run, inputs_path):
        with pytest.raises(UnsupportedInputError):
            run("bs-pullback", [inputs_path / "z16_twisted.grp"], degree=1)

    def test_bs_pullback_degree_zero_is_not_defaulted(self, run, inputs_path):
        with pytest.raises(UnsupportedInputError, match="got 0"):
            run("bs-pullback", [inputs_path / "z16_z4.grp"], degree=0)


@pytest.mark.integration
class TestCatCommands:
    """Test ktheory, cat-infinite and verify-factorization."""

    def test_ktheory(self, run, inputs_path):
        report = run("ktheory", [inputs_path / "z16_z4.grp"])
        assert report.results["exponent"] == 4
        assert report.results["cyclotomic_residue"] == [-1, 0, 0, 0, 1]
        assert report.results["powers_nonzero_through"] == 32
        assert len(report.discrepancies) == 2
        assert report.discrepancies[0].startswith("mod 2:")

    def test_cat_infinite(self, run, inputs_path):
        report = run("cat-infinite", [inputs_path / "z6_z3.grp"])
        assert report.exit_status == EXIT_CERTIFIED
        assert report.summary == [CAT_BRIDGING_NOTE]
        assert report.results["certificate"]["claims"] == {"cat": "infinite"}

    def test_verify_factorization(self, run, inputs_path):
        report = run("verify-factorization", [inputs_path / "torus_z2.grp"])
        assert report.exit_status == EXIT_CERTIFIED
        assert report.summary == ["cat = cd = 1 via F1"]

    def test_verify_factorization_rejected(self, run, grp_file):
        path = grp_file(
            "hom = hom{dom=fp{gens=a,b; rels=[a b a^-1 b^-1]}; cod=cyclic:2; images=[t, 1]}\n"
            "q = map{cod=free{gens=x}; images=[x^2, 1]}\n"
            "r = map{images=[t]}\n"
        )
        report = run("verify-factorization", [path])
        assert report.exit_status == EXIT_REFUTED
        assert report.results["failed_condition"] == "q not surjective"


@pytest.mark.integration
class TestCertificates:
    """Test verify-cert and eg-report over certificates on disk."""

    @pytest.fixture
    def exact_path(self, run, inputs_path, test_output_dir):
        out = test_output_dir / "exact.json"
        run("cd-bounds", [inputs_path / "z16_z4.grp"], out=out)
        return out

    @pytest.fixture
    def factorization_path(self, run, inputs_path, test_output_dir):
        out = test_output_dir / "factorization.json"
        run("verify-factorization", [inputs_path / "torus_z2.grp"], out=out)
        return out

    def test_verify_cert(self, run, exact_path):
        report = run("verify-cert", [exact_path])
        assert report.exit_status == EXIT_CERTIFIED
        assert report.results[str(exact_path)]["passed"] is True

    def test_verify_cert_tampered(self, run, exact_path):
        data = json.loads(exact_path.read_text())
        data["claims"]["cd"] = 3
        exact_path.write_text(json.dumps(data))
        report = run("verify-cert", [exact_path])
        assert report.exit_status == EXIT_REFUTED
        assert report.results[str(exact_path)]["failed_check"] == "lower: witness degree"

    def test_eg_report_case_one(self, run, factorization_path):
        report = run("eg-report", facts=[factorization_path])
        assert report.results["verdict"] == "cat=cd=1 (Case 1)"
        assert report.exit_status == EXIT_CERTIFIED

    def test_eg_report_case_two(self, run, exact_path):
        report = run("eg-report", facts=[exact_path], declare_one_relator=True)
        assert report.results["verdict"] == "cat=cd=2 (Case 2)"
        assert report.results["one_relator_check"]["holds"] is True
        assert "domain declared one-relator by the user" in report.results["assumptions"]

    def test_eg_report_needs_declaration(self, run, exact_path):
        report = run("eg-report", facts=[exact_path])
        assert report.results["verdict"] == "undetermined"
        assert report.exit_status == EXIT_REFUTED

    def test_eg_report_mixed_homomorphisms(self, run, exact_path, factorization_path):
        report = run("eg-report", facts=[exact_path, factorization_path], declare_one_relator=True)
        assert "facts concern different homomorphisms" in report.discrepancies
        assert report.results["verdict"] == "undetermined"

    def test_eg_report_lower_bound_above_two(self, run, test_output_dir):
        """A verified cd >= 3 contradicts the declared one-relator bound."""
        engine = LowerBoundEngine(EngineConfig(max_bar_degree=3), metrics=False)
        certificate = engine.cd_lower_bound(make_cyclic_hom(2, 2, 1), 3)
        assert certificate.claims == {"cd_lower": 3}
        path = save_certificate(certificate, test_output_dir / "lower3.json")

        report = run("eg-report", facts=[path], declare_one_relator=True)
        assert report.results["verdict"] == "undetermined"
        assert report.exit_status == EXIT_REFUTED
        assert "certified cd >= 3 contradicts the one-relator bound cd <= 2" in report.discrepancies


@pytest.mark.integration
@pytest.mark.slow
class TestSurvey:
    """Test the corpus survey against known cd values."""

    def test_corpus(self, run, known_cd):
        report = run("survey", max_bar_degree=3)
        rows = {(r["n"], r["m"], r["d"]): r for r in report.table.to_dict(orient="records")}
        assert len(rows) == 8
        for key, (lower, upper) in known_cd.items():
            assert (rows[key]["cd_lower"], rows[key]["cd_upper"]) == (lower, upper)
        assert rows[(6, 3, 2)]["cd_upper"] is None
        assert rows[(6, 3, 2)]["cat_infinite"]
        assert report.discrepancies == []


@pytest.mark.integration
class TestMain:
    """Test argument parsing, exit codes and rendering."""

    def test_cd_bounds(self, cli, inputs_path):
        status, out = cli("cd-bounds", "-i", str(inputs_path / "z16_z4.grp"), "--max-bar-degree", "2")
        assert status == EXIT_CERTIFIED
        assert "cd = 2 (exact)" in out

    def test_json_output(self, cli, inputs_path):
        status, out = cli("chain-homotopy", "-i", str(inputs_path / "z16_z4.grp"), "-k", "1", "--json")
        assert status == EXIT_REFUTED
        assert '"exit_status": 2' in out

    def test_table_rendered(self, cli, inputs_path):
        status, out = cli("cohomology", "-i", str(inputs_path / "z16_z4.grp"), "-k", "2", "--modules", "trivial_only")
        assert status == EXIT_CERTIFIED
        assert "Z/4" in out

    def test_missing_input(self, cli, tmp_path):
        status, out = cli("cd-bounds", "-i", str(tmp_path / "missing.grp"))
        assert status == EXIT_ERROR
        assert "FileNotFoundError" in out

    def test_syntax_error(self, cli, grp_file):
        status, out = cli("cd-bounds", "-i", str(grp_file("hom = hom{dom=cyclic 16}\n")))
        assert status == EXIT_ERROR
        assert "GrammarError" in out

    def test_unknown_command(self, cli):
        with pytest.raises(SystemExit):
            cli("integrate")

    def test_run_config_rejects_bad_caps(self):
        with pytest.raises(UnsupportedInputError):
            RunConfig(command="cd-bounds", max_degree=0)
