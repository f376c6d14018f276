"""Global fixtures for eisgen."""

import json

from hypothesis import HealthCheck, settings
import pytest

from eisgen import curve
from eisgen.gf import field_for_q

from .const import CURVE_DESCRIPTOR_NUMERATOR, REP_DESCRIPTOR, WEIL_TRACES

settings.register_profile(
    "eisgen",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("eisgen")


@pytest.fixture
def projective_line():
    """P¹ over F_2."""
    return curve.projective_line(2)


@pytest.fixture
def elliptic_curve():
    """Genus one curve over F_2 with trace 1."""
    return curve.from_traces(2, (1,), strict=True)


@pytest.fixture(params=WEIL_TRACES, ids=lambda p: f"q{p[0]}-{'_'.join(map(str, p[1]))}")
def weil_curve(request):
    """Synthetic curves that satisfy the Weil bound."""
    q, traces = request.param
    return curve.from_traces(q, traces, strict=True)


@pytest.fixture
def f4():
    """The field with four elements."""
    return field_for_q(4)


@pytest.fixture
def curve_file(tmp_path):
    """Descriptor of y² = x³ − x over F_3 on disk."""
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(CURVE_DESCRIPTOR_NUMERATOR))
    return path


@pytest.fixture
def rep_file(tmp_path):
    """Rep descriptor with one H¹ pair on disk."""
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(REP_DESCRIPTOR))
    return path
