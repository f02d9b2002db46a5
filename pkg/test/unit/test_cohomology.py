#!/usr/bin/env python3
"""
Unit tests for cochain complexes, cohomology groups, induced maps and cup products.
"""

import random

import pytest

from cohomology import (
    CohomologyClass,
    berstein_schwarz_class,
    bs_power_pullback,
    class_coordinates,
    cochain_complex,
    cohomology_group,
    cohomology_table,
    cup_power,
    cup_product,
    family_pullback,
    induced_hom_summary,
    induced_on_cohomology,
    integral_pullback,
    is_coboundary,
    to_resolution,
)
from errors import GroupMismatchError, ResourceLimitError, UnsupportedInputError
from group_model import (
    GroupSpec,
    augmentation_ideal,
    compose_homs,
    group_ring_module,
    make_cyclic_hom,
    module_family,
    trivial_module,
    twisted_cyclic_module,
)
from resolutions import bar_resolution, induced_chain_map, periodic_resolution


def h(group, module, degree):
    return str(cohomology_group(periodic_resolution(group, degree + 1), module, degree).invariants)


@pytest.mark.unit
class TestCohomologyGroups:
    """Test H^k(Z/n; M) on the periodic resolution against the textbook values."""

    @pytest.mark.parametrize("degree,expected", [(0, "Z"), (1, "0"), (2, "Z/4"), (3, "0"), (4, "Z/4")])
    def test_integral(self, z4, degree, expected):
        assert h(z4, trivial_module(z4), degree) == expected

    @pytest.mark.parametrize("degree", range(5))
    def test_mod_n_coefficients(self, z4, degree):
        assert h(z4, trivial_module(z4, 4), degree) == "Z/4"

    @pytest.mark.parametrize("degree,expected", [(0, "Z"), (1, "0"), (2, "0"), (3, "0")])
    def test_group_ring_is_acyclic(self, z4, degree, expected):
        assert h(z4, group_ring_module(z4), degree) == expected

    @pytest.mark.parametrize("degree,expected", [(0, "0"), (1, "Z/4"), (2, "0"), (3, "Z/4")])
    def test_augmentation_ideal(self, z4, degree, expected):
        assert h(z4, augmentation_ideal(z4), degree) == expected

    def test_twisted_coefficients(self, z4):
        # Z/16 with t acting by 5: invariants 4Z/16; N acts by 12, so ker N = im(t - 1)
        module = twisted_cyclic_module(z4, 16, 5)
        assert h(z4, module, 0) == "Z/4"
        assert h(z4, module, 1) == "0"
        assert h(z4, module, 2) == "0"

    def test_trivial_group(self, trivial_group):
        assert h(trivial_group, trivial_module(trivial_group), 0) == "Z"

    @pytest.mark.parametrize("n", range(2, 9))
    def test_group_ring_vanishes_in_positive_degrees(self, n):
        group = GroupSpec.cyclic(n)
        resolution = periodic_resolution(group, 5)
        for degree in range(1, 5):
            assert cohomology_group(resolution, group_ring_module(group), degree).invariants.is_trivial

    def test_degree_needs_next_differential(self, z4):
        with pytest.raises(UnsupportedInputError):
            cohomology_group(periodic_resolution(z4, 2), trivial_module(z4), 2)

    def test_module_must_match_group(self, z4, z16):
        with pytest.raises(GroupMismatchError):
            cochain_complex(periodic_resolution(z4, 2), trivial_module(z16))

    def test_representatives_have_the_right_orders(self, z4):
        group = cohomology_group(periodic_resolution(z4, 3), trivial_module(z4), 2)
        assert group.orders == (4,)
        complex_ = group.complex
        rep = group.representatives[0]
        assert complex_.is_cocycle(2, rep)
        assert not complex_.is_coboundary(2, rep)
        assert complex_.is_coboundary(2, tuple(4 * x for x in rep))

    def test_coordinates_of_multiples(self, z4):
        group = cohomology_group(periodic_resolution(z4, 3), trivial_module(z4), 2)
        rep = group.representatives[0]
        assert group.coordinates(tuple(3 * x for x in rep)) == (3,)
        assert group.coordinates(tuple(5 * x for x in rep)) == (1,)

    def test_table(self, z4):
        table = cohomology_table(z4, module_family(z4), 3)
        assert len(table) == 5 * 4
        assert list(table.columns) == ["group", "module", "degree", "cohomology", "free_rank", "torsion"]
        row = table[(table["module"] == "Z") & (table["degree"] == 2)].iloc[0]
        assert row["cohomology"] == "Z/4"


@pytest.mark.unit
class TestInducedMaps:
    """Test phi^* on cohomology."""

    def test_integral_degree_two_nonzero(self, z16_z4):
        induced = induced_hom_summary(z16_z4, trivial_module(z16_z4.codomain), 2)
        assert str(induced.source.invariants) == "Z/4"
        assert str(induced.target.invariants) == "Z/16"
        assert not induced.is_zero
        assert induced.matrix[0, 0] % 16 in (4, 12)

    def test_integral_degree_four_zero(self, z16_z4):
        assert induced_hom_summary(z16_z4, trivial_module(z16_z4.codomain), 4).is_zero

    def test_identity_is_injective(self, z2_identity):
        induced = induced_hom_summary(z2_identity, trivial_module(z2_identity.codomain), 2)
        assert not induced.is_zero
        assert induced.matrix[0, 0] % 2 == 1

    @pytest.mark.parametrize(
        "make_module",
        [
            trivial_module,
            lambda g: trivial_module(g, 2),
            lambda g: trivial_module(g, 4),
            group_ring_module,
            augmentation_ideal,
            lambda g: twisted_cyclic_module(g, 16, 3),
        ],
        ids=["Z", "Z/2", "Z/4", "Z[Z/4]", "I(Z/4)", "Z/16(x3)"],
    )
    def test_degree_three_vanishes_along_z16_z4(self, z16_z4, make_module):
        """Every class of H^3(Z/4; M) pulls back to a coboundary on Z/16."""
        induced = induced_hom_summary(z16_z4, make_module(z16_z4.codomain), 3)
        assert induced.is_zero
        for representative in induced.source.representatives:
            image = induced.cochain_map.apply(representative)
            assert induced.target.complex.is_coboundary(3, image)

    def test_degree_three_source_is_not_trivial(self, z16_z4):
        induced = induced_hom_summary(z16_z4, augmentation_ideal(z16_z4.codomain), 3)
        assert str(induced.source.invariants) == "Z/4"


@pytest.mark.unit
class TestCupProducts:
    """Test the Berstein-Schwarz class and its powers."""

    def test_beta_generates_h1(self, z4):
        beta = berstein_schwarz_class(z4, periodic_resolution(z4, 2))
        assert class_coordinates(beta) in ((1,), (3,))

    def test_beta_on_bar_matches_periodic(self, z4):
        beta_bar = berstein_schwarz_class(z4, bar_resolution(z4, 2))
        moved = to_resolution(beta_bar, periodic_resolution(z4, 2))
        assert not moved.is_zero()

    def test_beta_squared_nonzero_for_z2(self):
        group = GroupSpec.cyclic(2)
        bar = bar_resolution(group, 3)
        square = cup_power(berstein_schwarz_class(group, bar), 2, bar)
        assert square.degree == 2
        assert not square.is_zero()

    def test_cup_power_degree_checked(self, z4):
        with pytest.raises(UnsupportedInputError):
            cup_power(berstein_schwarz_class(z4), 0)


@pytest.mark.unit
class TestFunctoriality:
    """(phi o rho)^* = rho^* o phi^* on cohomology, checked by coboundary membership."""

    @pytest.mark.parametrize(
        "rho,phi",
        [((16, 8, 1), (8, 4, 1)), ((8, 8, 3), (8, 4, 1)), ((12, 6, 1), (6, 3, 2))],
    )
    @pytest.mark.parametrize("degree", range(5))
    def test_composite_pullback(self, rho, phi, degree):
        rho, phi = make_cyclic_hom(*rho), make_cyclic_hom(*phi)
        composite = compose_homs(phi, rho)
        top = degree + 1
        first = periodic_resolution(rho.domain, top)
        middle = periodic_resolution(phi.domain, top)
        last = periodic_resolution(phi.codomain, top)

        for module in (trivial_module(phi.codomain), trivial_module(phi.codomain, 3), augmentation_ideal(phi.codomain)):
            outer = induced_on_cohomology(induced_chain_map(phi, middle, last), module, degree)
            inner = induced_on_cohomology(induced_chain_map(rho, first, middle), module.pullback(phi), degree)
            direct = induced_on_cohomology(induced_chain_map(composite, first, last), module, degree)
            for representative in outer.source.representatives:
                stepwise = inner.cochain_map.apply(outer.cochain_map.apply(representative))
                at_once = direct.cochain_map.apply(representative)
                difference = tuple(a - b for a, b in zip(stepwise, at_once))
                assert direct.target.complex.is_coboundary(degree, difference)


@pytest.mark.unit
class TestCupProductLaws:
    """Unit, bilinearity and graded commutativity for Z/3 on the bar resolution."""

    @pytest.fixture(scope="class")
    def z3(self):
        return GroupSpec.cyclic(3)

    @pytest.fixture(scope="class")
    def bar(self, z3):
        return bar_resolution(z3, 3)

    @staticmethod
    def random_class(rng, resolution, module, degree):
        """Random combination of generators plus a random coboundary."""
        group = cohomology_group(resolution, module, degree)
        cocycle = [0] * group.complex.dimension(degree)
        for representative in group.representatives:
            c = rng.randint(-4, 4)
            cocycle = [a + c * b for a, b in zip(cocycle, representative)]
        if degree:
            noise = [rng.randint(-2, 2) for _ in range(group.complex.dimension(degree - 1))]
            cocycle = [a + b for a, b in zip(cocycle, group.complex.delta(degree - 1).apply(noise))]
        return CohomologyClass(resolution, module, degree, tuple(cocycle))

    @pytest.mark.parametrize("seed", range(5))
    def test_unit(self, z3, bar, seed):
        rng = random.Random(seed)
        one = CohomologyClass(bar, trivial_module(z3), 0, (1,))
        for module, degree in ((trivial_module(z3), 2), (augmentation_ideal(z3), 1), (group_ring_module(z3), 2)):
            x = self.random_class(rng, bar, module, degree)
            assert cup_product(one, x, bar).cocycle == x.cocycle
            assert cup_product(x, one, bar).cocycle == x.cocycle

    @pytest.mark.parametrize("seed", range(10))
    def test_bilinear(self, z3, bar, seed):
        rng = random.Random(seed)
        ideal = augmentation_ideal(z3)
        x1, x2 = self.random_class(rng, bar, ideal, 1), self.random_class(rng, bar, ideal, 1)
        y1, y2 = self.random_class(rng, bar, trivial_module(z3), 2), self.random_class(rng, bar, trivial_module(z3), 2)
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)

        def combine(u, v):
            return CohomologyClass(bar, u.module, u.degree, tuple(a * p + b * q for p, q in zip(u.cocycle, v.cocycle)))

        left = cup_product(combine(x1, x2), y1, bar).cocycle
        expected = combine(cup_product(x1, y1, bar), cup_product(x2, y1, bar)).cocycle
        assert left == expected

        right = cup_product(x1, combine(y1, y2), bar).cocycle
        expected = combine(cup_product(x1, y1, bar), cup_product(x1, y2, bar)).cocycle
        assert right == expected

    @pytest.mark.parametrize("seed", range(5))
    def test_commutes_with_even_degree(self, z3, bar, seed):
        rng = random.Random(seed)
        x = self.random_class(rng, bar, augmentation_ideal(z3), 1)
        y = self.random_class(rng, bar, trivial_module(z3), 2)
        xy, yx = cup_product(x, y, bar), cup_product(y, x, bar)
        difference = tuple(a - b for a, b in zip(xy.cocycle, yx.cocycle))
        assert is_coboundary(bar, xy.module, 3, difference)

    @pytest.mark.parametrize("seed", range(5))
    def test_anticommutes_in_degree_one(self, z3, bar, seed):
        rng = random.Random(seed)
        ideal = augmentation_ideal(z3)
        x, y = self.random_class(rng, bar, ideal, 1), self.random_class(rng, bar, ideal, 1)
        xy, yx = cup_product(x, y, bar), cup_product(y, x, bar)
        g = ideal.rank
        # swap the tensor factors inside each cell block
        swapped = []
        for start in range(0, len(yx.cocycle), g * g):
            block = yx.cocycle[start:start + g * g]
            swapped.extend(block[j * g + i] for i in range(g) for j in range(g))
        total = tuple(a + b for a, b in zip(xy.cocycle, swapped))
        assert is_coboundary(bar, xy.module, 2, total)

    def test_beta_squared_nonzero(self, z3, bar):
        beta = berstein_schwarz_class(z3, bar)
        assert not cup_product(beta, beta, bar).is_zero()


@pytest.mark.unit
class TestPullbacks:
    """Test pulled-back classes used as cd lower-bound witnesses."""

    def test_beta_powers_along_z16_z4(self, z16_z4):
        assert bs_power_pullback(z16_z4, 1).nonzero
        assert bs_power_pullback(z16_z4, 2).nonzero

    @pytest.mark.slow
    def test_beta_cubed_vanishes_along_z16_z4(self, z16_z4):
        witness = bs_power_pullback(z16_z4, 3, max_bar_rank=27)
        assert not witness.nonzero

    def test_bar_rank_bound(self, z16_z4):
        with pytest.raises(ResourceLimitError):
            bs_power_pullback(z16_z4, 3, max_bar_rank=26)

    def test_trivial_codomain_never_nonzero(self):
        witness = bs_power_pullback(make_cyclic_hom(4, 1, 0), 1)
        assert not witness.nonzero

    def test_witness_is_reusable(self, z16_z4):
        witness = bs_power_pullback(z16_z4, 1)
        assert witness.source == "berstein_schwarz"
        assert len(witness.chain_elements) == 2
        assert not witness.gamma_class().is_zero()

    def test_family_pullback_degree_two(self, z16_z4):
        witness = family_pullback(z16_z4, trivial_module(z16_z4.codomain), 2)
        assert witness is not None
        assert witness.source == "module_family"

    def test_family_pullback_vanishes_at_four(self, z16_z4):
        assert family_pullback(z16_z4, trivial_module(z16_z4.codomain), 4) is None

    def test_family_pullback_module_group_checked(self, z16_z4):
        with pytest.raises(GroupMismatchError):
            family_pullback(z16_z4, trivial_module(z16_z4.domain), 2)

    def test_integral_pullback(self, z16_z4):
        assert integral_pullback(z16_z4, 2) is not None
        assert integral_pullback(z16_z4, 4) is None


# Bar cochains grow like ((n - 1)^(k + 1)) * rank(M); larger n stop at lower degrees.
BAR_ORACLE_CASES = (
    [(n, k) for n in (2, 3, 4) for k in range(4)]
    + [(6, k) for k in range(3)]
    + [(8, k) for k in range(2)]
)


@pytest.mark.unit
@pytest.mark.slow
class TestBarOracle:
    """Cohomology on the bar resolution agrees with the periodic resolution in low degrees."""

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("degree", [0, 1, 2])
    def test_trivial_coefficients(self, n, degree):
        group = GroupSpec.cyclic(n)
        for module in (trivial_module(group), trivial_module(group, n)):
            bar = cohomology_group(bar_resolution(group, 3), module, degree)
            periodic = cohomology_group(periodic_resolution(group, 3), module, degree)
            assert bar.invariants == periodic.invariants

    @pytest.mark.parametrize("n,degree", BAR_ORACLE_CASES)
    @pytest.mark.parametrize("index", range(5))
    def test_module_family(self, n, degree, index):
        """Same presentation, and the same zero verdict for Z/n^2 -> Z/n pulled back."""
        group = GroupSpec.cyclic(n)
        module = module_family(group)[index]
        bar = bar_resolution(group, degree + 1)
        periodic = periodic_resolution(group, degree + 1)
        assert cohomology_group(bar, module, degree).invariants == cohomology_group(periodic, module, degree).invariants

        hom = make_cyclic_hom(n * n, n, 1)
        domain = periodic_resolution(hom.domain, degree + 1)
        via_bar = induced_on_cohomology(induced_chain_map(hom, domain, bar, degree), module, degree)
        via_periodic = induced_on_cohomology(induced_chain_map(hom, domain, periodic, degree), module, degree)
        assert via_bar.is_zero == via_periodic.is_zero
        assert via_bar.source.invariants == via_periodic.source.invariants
