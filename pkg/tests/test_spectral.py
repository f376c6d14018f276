from fractions import Fraction

import numpy as np
import pytest
import sympy

from eisgen import spectral
from eisgen.bun import BunFun
from eisgen.curve import l_ratio
from eisgen.errors import InputError
from eisgen.exact import Q, Q_HALF, RatFun, parse_expr

from .const import KERNEL


def _a(n):
    return RatFun.monomial(n)


class TestEisenstein:
    def test_k_zero(self):
        value = spectral.eis(0)
        assert value == 1 + parse_expr(KERNEL)
        assert value.constant_term() == 1 + Q

    @pytest.mark.parametrize("k", range(6))
    def test_functional_equation(self, k):
        spectral.check_eis_functional_equation(k)

    def test_eigenrelation(self):
        spectral.check_eigenrelation(10)

    def test_eigenvalue(self):
        assert spectral.laplace_eigenvalue() == Q_HALF * (_a(1) + _a(-1))

    def test_negative_k(self):
        with pytest.raises(InputError):
            spectral.eis(-1)

    @pytest.mark.parametrize(
        ("k", "n_max", "table"),
        [(0, 2, {0: 3, 1: 0, 2: 6}), (1, 1, {-1: 1, 0: 0, 1: 4})],
    )
    def test_section_counts(self, k, n_max, table):
        assert spectral.section_count_check(2, k, n_max) == table


class TestConstantTerm:
    def test_k_zero(self):
        assert spectral.constant_term(0) == (1 + parse_expr(KERNEL)) / Q

    @pytest.mark.parametrize("k", range(5))
    def test_matches_the_function_form(self, k):
        family = spectral.eis_family(4)
        assert spectral.constant_term(k) == spectral.ct_of_function(family, k)

    def test_callable(self):
        assert spectral.ct_of_function(lambda k: k + 1, 0) == 1 / Q
        assert spectral.ct_of_function(BunFun.delta(1, Q), -1) == Q

    def test_domain(self):
        with pytest.raises(spectral.DomainError):
            spectral.ct_of_function(BunFun.delta(0), -2)
        with pytest.raises(spectral.DomainError):
            spectral.ct_transpose({-3: 1})

    def test_adjoint(self):
        phi = {0: 1, 2: Q, -1: 3}
        g = BunFun({0: 1, 1: 2, 2: Q_HALF})
        assert spectral.check_ct_adjoint(phi, g) == (
            1 / (Q * (Q - 1)) + 6 / (Q - 1) + Q_HALF / (Q**2 * (Q - 1))
        )


class TestProjector:
    @pytest.mark.parametrize("n", range(-8, 9))
    def test_projective_line(self, n):
        spectral.check_projector(_a(n))

    @pytest.mark.parametrize("n", range(-3, 4))
    def test_elliptic_curve(self, n, elliptic_curve):
        spectral.check_projector(_a(n), elliptic_curve)

    def test_complement_is_killed(self):
        ratio = parse_expr(KERNEL)
        omega = _a(3) + 2
        assert spectral.sigma(omega - ratio * omega.inverted()) == 0

    def test_symmetric_input(self):
        omega = _a(2) + _a(-2)
        assert spectral.sigma(omega) == (1 + parse_expr(KERNEL)) * omega

    def test_general_curve_ratio(self, elliptic_curve):
        assert spectral.sigma(RatFun.constant(1), elliptic_curve) == 1 + l_ratio(
            elliptic_curve
        )


class TestPseudoEisenstein:
    def test_constant(self):
        assert spectral.pseudo_eis(RatFun.constant(1)) == BunFun.delta(0, 1 + Q)

    def test_triangular(self):
        assert spectral.pseudo_eis(_a(3)) == BunFun(
            {1: Q_HALF * (Q**2 - 1), 3: Q_HALF**3 * Q}
        )

    def test_linear(self):
        left = spectral.pseudo_eis(_a(1) + 2 * _a(-2))
        assert left == spectral.pseudo_eis(_a(1)) + spectral.pseudo_eis(_a(-2)).scale(2)

    def test_needs_laurent_polynomial(self):
        with pytest.raises(InputError):
            spectral.pseudo_eis(1 / (1 - _a(1)))

    def test_contour_shift(self):
        pieces = spectral.pseudo_eis_split(RatFun.constant(1))
        assert pieces[0].circle == 1 + 1 / Q
        assert pieces[0].residues == Q - 1 / Q
        assert pieces[0].total == 1 + Q

    @pytest.mark.parametrize("omega", ["a^2 + a^-1", "a^-3 - q*a", "1 + a^4"])
    def test_contour_shift_identity(self, omega):
        spectral.pseudo_eis_split(parse_expr(omega))


class TestPairing:
    @pytest.mark.parametrize("i", range(-2, 3))
    @pytest.mark.parametrize("j", range(-2, 3))
    def test_three_way(self, i, j):
        report = spectral.three_way_pairing(_a(i), _a(j))
        assert report.holds
        assert spectral.pairing_norm(_a(j), _a(i)) == report.residue_form

    def test_trivial(self):
        assert spectral.pairing_norm(RatFun.constant(1), RatFun.constant(1)) == (
            (1 + Q) / (Q * (Q - 1))
        )

    def test_torus_constant(self):
        report = spectral.three_way_pairing(_a(1), _a(1))
        assert report.torus_constant.fraction_at(2) == Fraction(-1, 2)

    @pytest.mark.slow
    @pytest.mark.parametrize("i", range(-5, 6))
    def test_three_way_through_degree_five(self, i):
        for j in range(-5, 6):
            assert spectral.three_way_pairing(_a(i), _a(j)).holds


class TestSpectralSplit:
    def test_kernel_residue(self):
        for sign in (1, -1):
            assert spectral.kernel_residue(sign) == (Q - 1 / Q) / 2
        assert spectral.kernel_residue().fraction_at(2) == Fraction(3, 4)
        assert spectral.numeric_kernel_residue(2) == sympy.Rational(3, 4)

    def test_constant(self):
        split = spectral.spectral_split(RatFun.constant(1))
        assert split.total == spectral.pairing_norm(RatFun.constant(1), RatFun.constant(1))
        assert split.discrete_plus == (Q + 1) / (2 * Q**2)
        assert split.discrete_minus == split.discrete_plus
        assert split.weight_plus.is_positive_for_q_gt_1()
        assert split.weight_minus.is_positive_for_q_gt_1()

    def test_vanishing_at_the_residual_points(self):
        split = spectral.spectral_split(_a(2) - Q)
        assert split.discrete_plus == 0
        assert split.discrete_minus == 0

    def test_additive(self):
        split = spectral.spectral_split(_a(1) + _a(-1))
        assert set(split.to_json()) == {
            "continuous",
            "discrete_plus",
            "discrete_minus",
            "weight_plus",
            "weight_minus",
            "total",
        }


class TestSpectrum:
    def test_residual_eigenvalues(self):
        result = spectral.spectrum(2)
        assert result["discrete"] == ["3", "-3"]
        assert result["continuous"]["upper"] == result["continuous"]["bound"]
        assert len(result["poles_outside_unit_circle"]) == 2

    def test_pole_census(self):
        census = spectral.pole_census()
        assert [place.exponent for place in census] == [Fraction(1, 2)] * 2

    def test_invalid_q(self):
        with pytest.raises(InputError):
            spectral.spectrum(1)

    @pytest.mark.parametrize("q", [2, 3])
    def test_gram(self, q):
        matrix = spectral.gram_matrix(q)
        assert matrix.shape == (9, 9)
        assert np.allclose(matrix, matrix.T)
        assert spectral.gram_is_psd(q)
