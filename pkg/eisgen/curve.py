"""Weil data of curves over F_q: zeta and xi functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import logging
from typing import Any

import numpy as np
import sympy
from sympy.ntheory import mobius

from .const import WEIL_TOLERANCE
from .errors import CheckFailed, InputError
from .exact import Q, Q_HALF, RatFun, ScalarQ, WeilHint
from .gf import count_projective_zeros, field_for_q
from .models import CurveDescriptor

_LOGGER = logging.getLogger(__name__)


class Inconsistent(InputError):
    """Exception when point counts admit no integral zeta numerator."""


class WeilViolation(CheckFailed):
    """Exception when numerator roots leave the circle |t| = q^{-1/2}."""


@dataclass(frozen=True)
class CurveData:
    """q, genus and the zeta numerator P(t), coefficients low to high."""

    q: int
    genus: int
    numerator: tuple[int, ...]
    counts: tuple[int, ...] | None = None
    traces: tuple[int, ...] | None = None
    weil_ok: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        """Validate the functional equation of the numerator."""
        if len(self.numerator) != 2 * self.genus + 1 or self.numerator[0] != 1:
            raise InputError("numerator must have degree 2g and constant term 1")
        g = self.genus
        for i in range(g):
            if self.numerator[2 * g - i] != self.q ** (g - i) * self.numerator[i]:
                raise Inconsistent(
                    f"coefficient {2 * g - i} breaks the functional equation"
                )

    @property
    def is_projective_line(self) -> bool:
        """True for genus 0."""
        return self.genus == 0

    def to_json(self) -> dict[str, Any]:
        """Curve descriptor payload."""
        payload: dict[str, Any] = {
            "q": self.q,
            "g": self.genus,
            "numerator": list(self.numerator),
        }
        if self.counts is not None:
            payload["counts"] = list(self.counts)
        if self.traces is not None:
            payload["traces"] = list(self.traces)
        return payload


def _extract_traces(q: int, numerator: tuple[int, ...]) -> tuple[int, ...] | None:
    """Traces s_i when P factors over Q into 1 − s_i t + q t²."""
    if len(numerator) == 1:
        return ()
    t = sympy.Symbol("t")
    _, factors = sympy.factor_list(
        sum(c * t**i for i, c in enumerate(numerator)), t
    )
    traces = []
    for factor, multiplicity in factors:
        coeffs = sympy.Poly(factor, t).all_coeffs()
        if coeffs[0] < 0:
            coeffs = [-c for c in coeffs]
        if len(coeffs) != 3 or coeffs[0] != q or coeffs[2] != 1:
            return None
        traces.extend([int(-coeffs[1])] * multiplicity)
    return tuple(sorted(traces))


def weil_deviation(q: int, numerator: tuple[int, ...]) -> float:
    """Largest deviation of a root modulus from q^{-1/2}."""
    if len(numerator) == 1:
        return 0.0
    roots = np.roots(list(reversed(numerator)))
    return float(np.max(np.abs(np.abs(roots) - q**-0.5)))


def _build(
    q: int,
    genus: int,
    numerator: tuple[int, ...],
    counts: tuple[int, ...] | None,
    strict: bool,
) -> CurveData:
    deviation = weil_deviation(q, numerator)
    weil_ok = deviation <= WEIL_TOLERANCE
    if not weil_ok:
        if strict:
            raise WeilViolation(
                f"numerator roots deviate from q^(-1/2) by {deviation:.3g}",
                numerator,
            )
        _LOGGER.warning(
            "Curve data over F_%s violates the Weil bound by %.3g", q, deviation
        )
    return CurveData(
        q,
        genus,
        numerator,
        counts,
        _extract_traces(q, numerator),
        weil_ok,
    )


def _lift(q: int, genus: int, lower: list[int]) -> tuple[int, ...]:
    """Complete c_0..c_g to the full numerator with c_{2g−i} = q^{g−i}·c_i."""
    upper = [q ** (genus - i) * lower[i] for i in reversed(range(genus))]
    return (*lower, *upper)


def zeta_from_counts(
    q: int, genus: int, counts: list[int] | tuple[int, ...], strict: bool = False
) -> CurveData:
    """Numerator from N_1..N_g via Newton's identities."""
    if len(counts) != genus:
        raise InputError(f"genus {genus} needs exactly {genus} point counts")
    if any(n < 0 for n in counts):
        raise InputError("point counts must be nonnegative")
    power_sums = [q**n + 1 - counts[n - 1] for n in range(1, genus + 1)]
    elementary = [Fraction(1)]
    for n in range(1, genus + 1):
        acc = sum(
            (-1) ** (i - 1) * elementary[n - i] * power_sums[i - 1]
            for i in range(1, n + 1)
        )
        elementary.append(Fraction(acc, n))
    if any(e.denominator != 1 for e in elementary):
        raise Inconsistent(f"counts {list(counts)} give a non-integral numerator")
    lower = [(-1) ** j * int(e) for j, e in enumerate(elementary)]
    return _build(q, genus, _lift(q, genus, lower), tuple(counts), strict)


def from_numerator(
    q: int, genus: int, numerator: list[int] | tuple[int, ...], strict: bool = False
) -> CurveData:
    """Curve data from a supplied numerator."""
    return _build(q, genus, tuple(numerator), None, strict)


def from_traces(q: int, traces: list[int] | tuple[int, ...], strict: bool = False) -> CurveData:
    """Curve data with P(t) = ∏(1 − s_i t + q t²)."""
    t = sympy.Symbol("t")
    product = sympy.Poly(1, t)
    for s in traces:
        product *= sympy.Poly(1 - s * t + q * t**2, t)
    numerator = tuple(int(c) for c in reversed(product.all_coeffs()))
    return _build(q, len(traces), numerator, None, strict)


def projective_line(q: int) -> CurveData:
    """P¹ over F_q."""
    return CurveData(q, 0, (1,), None, ())


def from_descriptor(descriptor: CurveDescriptor, strict: bool = False) -> CurveData:
    """Curve data from a parsed JSON descriptor."""
    q, genus = descriptor.q, descriptor.genus
    if descriptor.numerator is not None:
        curve = from_numerator(q, genus, descriptor.numerator, strict)
    elif descriptor.traces is not None:
        if len(descriptor.traces) != genus:
            raise InputError("one trace per genus is required")
        curve = from_traces(q, descriptor.traces, strict)
    elif descriptor.counts is not None:
        return zeta_from_counts(q, genus, descriptor.counts[:genus], strict)
    else:
        curve = projective_line(q)
    if descriptor.counts is not None:
        predicted = point_counts(curve, len(descriptor.counts))
        if predicted != list(descriptor.counts):
            raise Inconsistent(
                f"counts {descriptor.counts} disagree with numerator ({predicted})"
            )
    return curve


def point_counts(curve: CurveData, n_max: int) -> list[int]:
    """N_1..N_{n_max} recovered from the numerator."""
    g, q = curve.genus, curve.q
    elementary = [(-1) ** j * c for j, c in enumerate(curve.numerator)]
    power_sums: list[int] = []
    for n in range(1, n_max + 1):
        acc = sum(
            (-1) ** (i - 1) * (elementary[i] if i <= 2 * g else 0) * power_sums[n - i - 1]
            for i in range(1, n)
        )
        acc += (-1) ** (n - 1) * n * (elementary[n] if n <= 2 * g else 0)
        power_sums.append(acc)
    return [q**n + 1 - p for n, p in enumerate(power_sums, start=1)]


def closed_point_counts(curve: CurveData, n_max: int) -> list[int]:
    """Number of closed points of each degree 1..n_max (Möbius inversion)."""
    counts = point_counts(curve, n_max)
    result = []
    for n in range(1, n_max + 1):
        total = sum(
            mobius(n // d) * counts[d - 1] for d in sympy.divisors(n)
        )
        result.append(int(total // n))
    return result


def class_number(curve: CurveData) -> int:
    """P(1), the number of degree-0 line bundles."""
    return sum(curve.numerator)


def curve_from_plane_model(
    f_hom: Any, q: int, genus: int, strict: bool = False
) -> CurveData:
    """Curve data from point counts of a plane model over F_{q^n}."""
    base = field_for_q(q)
    horizon = max(2 * genus, 1)
    counts = [count_projective_zeros(f_hom, base, n) for n in range(1, horizon + 1)]
    curve = zeta_from_counts(q, genus, counts[:genus], strict)
    predicted = point_counts(curve, horizon)
    if predicted != counts:
        raise Inconsistent(
            f"plane model counts {counts} do not fit genus {genus} ({predicted})"
        )
    return CurveData(
        curve.q, curve.genus, curve.numerator, tuple(counts), curve.traces, curve.weil_ok
    )


# Rational functions


def numerator_function(curve: CurveData, var: str = "t") -> RatFun:
    """P with its upper half written as q^{g−i}·c_i, so it is exact in q."""
    g = curve.genus
    terms: dict[int, Any] = {i: curve.numerator[i] for i in range(g + 1)}
    for i in range(g):
        terms[2 * g - i] = Q ** (g - i) * curve.numerator[i]
    return RatFun.laurent_polynomial(terms, var)


def reciprocal_numerator_function(curve: CurveData, var: str = "t") -> RatFun:
    """t^{2g}·P(1/t)."""
    return numerator_function(curve, var).inverted() * RatFun.monomial(
        2 * curve.genus, var
    )


def zeta(curve: CurveData, var: str = "t") -> RatFun:
    """ζ_C(t) = P(t)/((1−t)(1−qt))."""
    t = RatFun.monomial(1, var)
    return numerator_function(curve, var) / ((1 - t) * (1 - Q * t))


def xi(curve: CurveData, var: str = "t") -> RatFun:
    """ξ_C(t) = (q^{1/2}t)^{1−g}·ζ_C(t)."""
    prefactor = RatFun.monomial(1 - curve.genus, var, Q_HALF ** (1 - curve.genus))
    return prefactor * zeta(curve, var)


def check_functional_equation(curve: CurveData) -> RatFun:
    """ξ_C(1/(qt)) = ξ_C(t); returns ξ_C."""
    completed = xi(curve)
    mirrored = completed.substitute(invert=True, shift=-2)
    if mirrored != completed:
        raise CheckFailed("ξ_C(1/(qt)) ≠ ξ_C(t)", mirrored - completed)
    return completed


def l_ratio(curve: CurveData | None = None) -> RatFun:
    """L(a) = ξ_C(a⁻²)/ξ_C(a²); P¹ with q left symbolic when no curve is given."""
    if curve is None:
        a = RatFun.monomial(1)
        return (Q * a**2 - 1) / (a**2 - Q)
    completed = xi(curve)
    return completed.compose_power(-2, "a") / completed.compose_power(2, "a")


def weil_hints(curve: CurveData) -> tuple[WeilHint, ...]:
    """Zeros of P(a²) sit on |a| = q^{-1/4}, those of the reciprocal on q^{1/4}."""
    if curve.genus == 0:
        return ()
    return (
        (numerator_function(curve, "t").compose_power(2, "a"), Fraction(-1, 4)),
        (reciprocal_numerator_function(curve, "t").compose_power(2, "a"), Fraction(1, 4)),
    )


def value_at(value: ScalarQ, curve: CurveData) -> Any:
    """Concrete value of a scalar at the curve's q."""
    return value.at(curve.q)
