import pytest

from eisgen import kchar
from eisgen.errors import InputError
from eisgen.exact import Q, RatFun
from eisgen.genus import BoxClass


class TestAffineCharacter:
    def test_outer_expansion(self):
        tail = kchar.affine_expansion(1, outer=True, order=4)
        assert tail.leading_exponent == 0
        assert tail.coefficients == (1, 1, 1, 1)

    def test_inner_expansion(self):
        tail = kchar.affine_expansion(2, outer=False, order=3)
        assert tail.leading_exponent == 2
        assert tail.coefficients == (1, 2, 3)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_expansions_describe_one_function(self, n):
        z = RatFun.monomial(1, "z")
        assert kchar.char_affine(n) * (z - 1) ** n == z**n

    def test_positive_dimension(self):
        with pytest.raises(InputError):
            kchar.char_affine(0)


class TestProjectiveEuler:
    @pytest.mark.parametrize("m", range(0, 6))
    def test_binary_forms(self, m):
        assert kchar.chi_projective(2, m) == m + 1

    @pytest.mark.parametrize("n", range(1, 5))
    def test_structure_sheaf(self, n):
        assert kchar.chi_projective(n, 0) == 1

    @pytest.mark.parametrize(("n", "m", "expected"), [(2, -2, -1), (2, -1, 0), (3, -2, 0), (3, -5, 6)])
    def test_negative_degrees(self, n, m, expected):
        assert kchar.chi_projective(n, m) == expected


class TestScissor:
    @pytest.mark.parametrize(
        ("n", "m", "outer", "middle", "inner"),
        [(1, 0, 1, 1, 0), (2, 3, 4, 4, 0), (3, -5, 0, 6, -6)],
    )
    def test_worked_cases(self, n, m, outer, middle, inner):
        result = kchar.scissor_check(n, m)
        assert (result.outer, result.middle, result.inner) == (outer, middle, inner)
        assert result.holds

    @pytest.mark.parametrize("n", range(1, 5))
    @pytest.mark.parametrize("m", range(-6, 7))
    def test_identity(self, n, m):
        assert kchar.scissor_check(n, m).holds

    def test_regular_flag_integrand(self):
        for m in range(-3, 4):
            assert kchar.flag_integrand_is_regular(BoxClass.parse(1, RatFun.monomial(m)))

    def test_pole_on_the_unit_circle(self):
        a = RatFun.monomial(1)
        assert not kchar.flag_integrand_is_regular(BoxClass.parse(1, 1 / (1 - a)))


class TestQGamma:
    def test_first_terms(self):
        assert kchar.q_gamma(2) == (1, 1 / (1 - Q))

    def test_coefficients(self):
        coefficients = kchar.q_gamma(5)
        product = 1
        for d, c in enumerate(coefficients):
            if d:
                product *= 1 - Q**d
            assert c * product == 1

    def test_residual_vanishes(self):
        assert all(c == 0 for c in kchar.q_gamma_residual(6))

    def test_residual_catches_a_wrong_coefficient(self, monkeypatch):
        q_gamma = kchar.q_gamma

        def _wrong(order):
            coefficients = list(q_gamma(order))
            coefficients[2] = coefficients[1]
            return tuple(coefficients)

        monkeypatch.setattr(kchar, "q_gamma", _wrong)
        residual = kchar.q_gamma_residual(4)
        assert residual[0] == 0
        assert residual[1] == 0
        assert residual[2] == Q**2 / (1 - Q)

    def test_order(self):
        with pytest.raises(InputError):
            kchar.q_gamma(0)
