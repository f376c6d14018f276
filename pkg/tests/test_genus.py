import pytest

from eisgen import curve, genus
from eisgen.exact import Q, Q_HALF, RatFun, parse_expr
from eisgen.models import RepDescriptor

from .const import REP_DESCRIPTOR


def _a(n):
    return RatFun.monomial(n)


class TestRepData:
    def test_unpaired(self):
        with pytest.raises(genus.UnpairedData):
            genus.RepData((0,), ())

    def test_trivial_uses_traces(self, elliptic_curve):
        rep = genus.RepData.trivial(elliptic_curve)
        assert rep == genus.RepData((0,), (1,), (1,))
        assert rep.h1_pairs == 1

    def test_trivial_without_rational_traces(self):
        data = curve.from_numerator(2, 2, (1, 0, 1, 0, 4), strict=True)
        assert data.traces is None
        rep = genus.RepData.trivial(data)
        assert rep.h1_pairs == 2
        assert rep.h1_polynomial() == 1 + _a(2) + Q**2 * _a(4)

    def test_dual_swaps_h0_and_h2(self):
        rep = genus.RepData((0, 1), (0, -1), (2,))
        assert rep.dual() == genus.RepData((1, 2), (1, 0), (2,))
        assert rep.dual().dual() == rep

    def test_from_descriptor(self):
        rep = genus.RepData.from_descriptor(RepDescriptor.parse_obj(REP_DESCRIPTOR))
        assert rep == genus.RepData((0,), (1,), (1,))


class TestLHat:
    def test_empty(self):
        assert genus.lhat(genus.RepData()) == 1

    def test_projective_line(self, projective_line):
        rep = genus.RepData.trivial(projective_line)
        expected = parse_expr("q^(1/2)*a/((q*a - 1)*(a - 1))")
        assert genus.check_lhat_functional_equation(rep) == expected

    def test_h1_factor(self):
        rep = genus.RepData((), (), (3,))
        assert genus.lhat(rep) == Q_HALF * _a(1) + 1 / (Q_HALF * _a(1)) - 3 / Q_HALF

    @pytest.mark.parametrize(
        "rep",
        [
            genus.RepData((0,), (0,)),
            genus.RepData((0, 2), (1, -1), (1, -2)),
            genus.RepData((), (), (0, 0, 3)),
        ],
    )
    def test_functional_equation(self, rep):
        genus.check_lhat_functional_equation(rep)

    def test_functional_equation_of_curves(self, weil_curve):
        genus.check_lhat_functional_equation(genus.RepData.trivial(weil_curve))

    def test_multiplicative(self, elliptic_curve, projective_line):
        first = genus.RepData.trivial(elliptic_curve)
        second = genus.RepData((0,), (0,), (2,))
        assert genus.lhat(first + second) == genus.lhat(first) * genus.lhat(second)
        line = genus.RepData.trivial(projective_line)
        assert genus.lhat(line + line) == genus.lhat(line) ** 2

    def test_sum_with_numerator(self):
        data = curve.from_numerator(2, 2, (1, 0, 1, 0, 4))
        first = genus.RepData.trivial(data)
        second = genus.RepData((), (), (1,))
        assert genus.lhat(first + second) == genus.lhat(first) * genus.lhat(second)


class TestXiPairWeight:
    def test_projective_line(self, projective_line):
        assert genus.xi_pair_weight(projective_line) == -Q_HALF

    def test_supersingular(self):
        t = RatFun.monomial(1, "t")
        data = curve.from_traces(3, (0,))
        assert genus.xi_pair_weight(data) == -(1 + Q * t**2) / t

    def test_symmetric(self, weil_curve):
        weight = genus.xi_pair_weight(weil_curve)
        assert weight.is_laurent_polynomial()


class TestFlagIntegral:
    @pytest.mark.parametrize("m", range(-8, 9))
    def test_invariants(self, m):
        box = genus.BoxClass.parse(1, _a(m))
        assert genus.integrate_flag(box) == genus.flag_invariants(m)

    @pytest.mark.parametrize(("m", "expected"), [(0, 1), (1, 0), (2, 1), (-1, 0), (-2, -1)])
    def test_oracle_values(self, m, expected):
        assert genus.flag_invariants(m) == expected

    def test_linear_in_the_first_factor(self):
        box = genus.BoxClass.parse(Q + 2, _a(4))
        assert genus.integrate_flag(box) == Q + 2

    def test_conjugate_second(self):
        box = genus.BoxClass.parse(1, _a(3))
        assert box.conjugate_second() == genus.BoxClass(RatFun.constant(1), _a(-3))


class TestCotangentIntegral:
    def test_trivial_box(self):
        assert genus.integrate_cotangent(genus.BoxClass.parse(1, 1)) == 0

    def test_shifted_box(self):
        box = genus.BoxClass.parse(_a(2), 1)
        assert genus.integrate_cotangent(box) == -(1 + Q) / Q


class TestTorusIntegral:
    def test_trivial_box(self, projective_line):
        box = genus.BoxClass.parse(1, 1)
        assert genus.integrate_T(box, projective_line) == (1 - Q) * (1 + Q)
        assert genus.integrate_T(box) == (1 - Q) * (1 + Q)

    def test_default_is_the_symbolic_line(self, monkeypatch):
        def _no_curve(*args, **kwargs):
            raise AssertionError("curve data built for the default line")

        monkeypatch.setattr(curve, "xi", _no_curve)
        box = genus.BoxClass.parse(_a(1), _a(-1))
        assert genus.integrate_T(box) == genus.integrate_T_euler(box)

    @pytest.mark.parametrize("i", range(-2, 3))
    @pytest.mark.parametrize("j", range(-2, 4))
    def test_euler_class_agrees(self, i, j):
        box = genus.BoxClass.parse(_a(i), _a(j))
        assert genus.integrate_T_euler(box) == genus.integrate_T(box)

    def test_general_curve(self, elliptic_curve):
        box = genus.BoxClass.parse(1, 1)
        ratio = curve.l_ratio(elliptic_curve)
        assert genus.integrate_T(box, elliptic_curve) == (1 - Q) * (
            1 + ratio.constant_term()
        )
