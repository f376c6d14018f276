import logging

import pytest
import sympy

from eisgen import curve
from eisgen.errors import CheckFailed, InputError
from eisgen.exact import Q, Q_HALF, RatFun, parse_expr
from eisgen.models import CurveDescriptor

from .const import (
    CURVE_DESCRIPTOR_BAD_COUNTS,
    CURVE_DESCRIPTOR_COUNTS,
    CURVE_DESCRIPTOR_NUMERATOR,
    KERNEL,
)


class TestProjectiveLine:
    def test_zeta(self, projective_line):
        t = RatFun.monomial(1, "t")
        assert curve.zeta(projective_line) == 1 / ((1 - t) * (1 - Q * t))

    def test_counts(self, projective_line):
        assert curve.point_counts(projective_line, 4) == [3, 5, 9, 17]
        assert curve.closed_point_counts(projective_line, 4) == [3, 1, 2, 3]
        assert curve.class_number(projective_line) == 1

    def test_l_ratio(self, projective_line):
        assert curve.l_ratio(projective_line) == parse_expr(KERNEL)

    @pytest.mark.parametrize("q", [2, 3, 4, 7])
    def test_l_ratio_without_a_curve(self, q):
        assert curve.l_ratio() == curve.l_ratio(curve.projective_line(q))

    def test_no_hints(self, projective_line):
        assert curve.weil_hints(projective_line) == ()


class TestConstructors:
    def test_from_counts(self):
        data = curve.zeta_from_counts(2, 1, [2])
        assert data.numerator == (1, -1, 2)
        assert data.traces == (1,)

    def test_from_traces(self, elliptic_curve):
        assert elliptic_curve.numerator == (1, -1, 2)
        assert curve.point_counts(elliptic_curve, 2) == [2, 8]
        assert curve.class_number(elliptic_curve) == 2

    def test_genus_two_traces(self):
        data = curve.from_traces(2, (1, 2))
        # (1 − t + 2t²)(1 − 2t + 2t²)
        assert data.numerator == (1, -3, 6, -6, 4)
        assert data.traces == (1, 2)

    def test_non_integral_counts(self):
        with pytest.raises(curve.Inconsistent):
            curve.zeta_from_counts(2, 2, [3, 4])

    def test_functional_equation_of_numerator(self):
        with pytest.raises(curve.Inconsistent):
            curve.CurveData(2, 1, (1, 0, 3))
        with pytest.raises(InputError):
            curve.CurveData(2, 1, (1, 0))

    def test_weil_violation_strict(self):
        with pytest.raises(curve.WeilViolation) as err:
            curve.from_numerator(2, 1, (1, 5, 2), strict=True)
        assert isinstance(err.value, CheckFailed)

    def test_weil_violation_warns(self, caplog):
        with caplog.at_level(logging.WARNING):
            data = curve.from_numerator(2, 1, (1, 5, 2))
        assert not data.weil_ok
        assert "violates the Weil bound" in caplog.text

    def test_weil_deviation(self):
        assert curve.weil_deviation(2, (1, -1, 2)) < 1e-9
        assert curve.weil_deviation(2, (1,)) == 0.0


class TestDescriptors:
    def test_counts(self):
        data = curve.from_descriptor(CurveDescriptor.parse_obj(CURVE_DESCRIPTOR_COUNTS))
        assert data.numerator == (1, -1, 2)

    def test_numerator_with_counts(self):
        data = curve.from_descriptor(
            CurveDescriptor.parse_obj(CURVE_DESCRIPTOR_NUMERATOR)
        )
        assert data.numerator == (1, 0, 3)
        assert data.to_json()["g"] == 1

    def test_counts_disagree(self):
        with pytest.raises(curve.Inconsistent):
            curve.from_descriptor(CurveDescriptor.parse_obj(CURVE_DESCRIPTOR_BAD_COUNTS))

    def test_wrong_number_of_traces(self):
        descriptor = CurveDescriptor.parse_obj({"q": 2, "g": 2, "traces": [1]})
        with pytest.raises(InputError):
            curve.from_descriptor(descriptor)

    def test_genus_zero(self):
        descriptor = CurveDescriptor.parse_obj({"q": 3, "g": 0})
        assert curve.from_descriptor(descriptor) == curve.projective_line(3)


class TestPlaneModels:
    def test_conic(self):
        x, y, z = sympy.symbols("x y z")
        data = curve.curve_from_plane_model(x * z - y**2, 3, 0)
        assert data.numerator == (1,)
        assert data.counts == (4,)

    def test_elliptic(self):
        x, y, z = sympy.symbols("x y z")
        data = curve.curve_from_plane_model(y**2 * z - x**3 + x * z**2, 3, 1)
        assert data.numerator == (1, 0, 3)
        assert data.counts == (4, 16)

    def test_wrong_genus(self):
        x, y, z = sympy.symbols("x y z")
        with pytest.raises(curve.Inconsistent):
            curve.curve_from_plane_model(y**2 * z - x**3 + x * z**2, 3, 2)


class TestCompletedZeta:
    def test_functional_equation(self, weil_curve):
        completed = curve.check_functional_equation(weil_curve)
        assert completed == curve.xi(weil_curve)

    def test_xi_of_projective_line(self, projective_line):
        t = RatFun.monomial(1, "t")
        assert curve.xi(projective_line) == Q_HALF * t / ((1 - t) * (1 - Q * t))

    def test_l_ratio_is_reciprocal_under_inversion(self, weil_curve):
        ratio = curve.l_ratio(weil_curve)
        assert ratio * ratio.inverted() == 1

    def test_hints_classify_numerator_zeros(self, weil_curve):
        hints = curve.weil_hints(weil_curve)
        assert [exponent for _, exponent in hints] == [-0.25, 0.25]
