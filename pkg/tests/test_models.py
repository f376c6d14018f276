from pydantic import ValidationError
import pytest

from eisgen.models import (
    ChiClass,
    CurveDescriptor,
    GradedCharModel,
    LaurentTailModel,
    RatFunModel,
    RepDescriptor,
    ScalarQModel,
)

from .const import CURVE_DESCRIPTOR_COUNTS, CURVE_DESCRIPTOR_NUMERATOR, REP_DESCRIPTOR


class TestCurveDescriptor:
    def test_alias(self):
        parsed = CurveDescriptor.parse_obj(CURVE_DESCRIPTOR_NUMERATOR)
        assert parsed.genus == 1
        assert parsed.numerator == [1, 0, 3]
        assert CurveDescriptor(q=3, genus=0).genus == 0

    def test_counts_only(self):
        parsed = CurveDescriptor.parse_obj(CURVE_DESCRIPTOR_COUNTS)
        assert parsed.counts == [2]
        assert parsed.numerator is None

    @pytest.mark.parametrize(
        "payload",
        [
            {"q": 1, "g": 0},
            {"q": 2, "g": -1},
            {"q": 3, "g": 1, "numerator": [2, 0, 3]},
            {"q": 3, "g": 1, "numerator": [1, 0]},
            {"q": 2, "g": 1, "counts": [-1]},
            {"q": 2, "g": 1},
            {"g": 0},
        ],
    )
    def test_invalid(self, payload):
        with pytest.raises(ValidationError):
            CurveDescriptor.parse_obj(payload)

    def test_from_file(self, curve_file):
        parsed = CurveDescriptor.from_file(curve_file)
        assert parsed.q == 3
        assert parsed.counts == [4, 16]


class TestRepDescriptor:
    def test_parse(self):
        parsed = RepDescriptor.parse_obj(REP_DESCRIPTOR)
        assert (parsed.h0, parsed.h1, parsed.h2) == ([0], [1], [1])
        assert parsed.curve is None

    def test_nested_curve(self):
        parsed = RepDescriptor.parse_obj({"curve": CURVE_DESCRIPTOR_NUMERATOR})
        assert parsed.curve.q == 3

    def test_unpaired(self):
        with pytest.raises(ValidationError):
            RepDescriptor.parse_obj({"h0": [0, 1], "h2": [1]})


class TestScalarQModel:
    def test_num(self):
        parsed = ScalarQModel.parse_obj({"num": {"1": 2}, "half_q": 1})
        assert parsed.num == {1: 2}
        assert parsed.den == {0: 1}

    def test_sum(self):
        parsed = ScalarQModel.parse_obj({"sum": [{"num": {0: 1}}, {"num": {0: 1}, "half_q": 1}]})
        assert len(parsed.sum) == 2

    @pytest.mark.parametrize(
        "payload",
        [
            {"num": {0: 1}, "half_q": 2},
            {"num": {0: 1}, "den": {0: 0}},
            {},
            {"num": {0: 1}, "sum": []},
        ],
    )
    def test_invalid(self, payload):
        with pytest.raises(ValidationError):
            ScalarQModel.parse_obj(payload)


class TestRatFunModel:
    def test_parse(self):
        parsed = RatFunModel.parse_obj(
            {"var": "t", "num": {"0": {"num": {0: 1}}}, "den": {"1": {"num": {0: 1}}}}
        )
        assert parsed.var == "t"

    @pytest.mark.parametrize(
        "payload",
        [
            {"var": "x", "num": {}, "den": {"0": {"num": {0: 1}}}},
            {"num": {"-1": {"num": {0: 1}}}, "den": {"0": {"num": {0: 1}}}},
            {"num": {"0": {"num": {0: 1}}}, "den": {}},
            {"num": {"0": {"half_q": 1}}, "den": {"0": {"num": {0: 1}}}},
        ],
    )
    def test_invalid(self, payload):
        with pytest.raises(ValidationError):
            RatFunModel.parse_obj(payload)


class TestLaurentTailModel:
    def test_expansion_point(self):
        payload = {
            "leading_exponent": 0,
            "order": 1,
            "exact": True,
            "coefficients": [{"num": {0: 1}}],
        }
        assert LaurentTailModel.parse_obj({"at": "inf", **payload}).at == "inf"
        with pytest.raises(ValidationError):
            LaurentTailModel.parse_obj({"at": "1", **payload})


class TestChiClass:
    @pytest.mark.parametrize(
        ("chi", "delta"),
        [(ChiClass.trivial, 1), (ChiClass.two_torsion, 1), (ChiClass.generic, 0)],
    )
    def test_delta(self, chi, delta):
        assert chi.delta == delta

    def test_value(self):
        assert ChiClass("two_torsion_nontrivial") is ChiClass.two_torsion

    @pytest.mark.parametrize(
        ("chi", "squared"),
        [
            (ChiClass.trivial, ChiClass.trivial),
            (ChiClass.two_torsion, ChiClass.trivial),
            (ChiClass.generic, ChiClass.generic),
        ],
    )
    def test_squared(self, chi, squared):
        assert chi.squared is squared


class TestGradedCharModel:
    def test_zero_multiplicity(self):
        with pytest.raises(ValidationError):
            GradedCharModel.parse_obj(
                {"terms": [{"a": 0, "degree": 0, "weight2": 0, "mult": 0}]}
            )

    def test_default_symbol(self):
        parsed = GradedCharModel.parse_obj(
            {"terms": [{"a": 1, "degree": 2, "weight2": 2, "mult": 3}]}
        )
        assert parsed.terms[0].symbol == ""
