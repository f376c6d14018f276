"""Completed L-genera and the three equivariant integrals in rank one."""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Any

from .const import UNIT_CIRCLE
from .curve import CurveData, l_ratio, numerator_function, xi
from .errors import CheckFailed, InputError
from .exact import Q, Q_HALF, RatFun, ScalarQ, WeilHint, circle_integral, q_power
from .models import RepDescriptor

_LOGGER = logging.getLogger(__name__)


class UnpairedData(InputError):
    """Exception when H⁰ and H² eigenvalues cannot be paired."""


@dataclass(frozen=True)
class RepData:
    """Frobenius data of a rank-1 local system.

    h0 and h2 hold q-exponents of eigenvalues, h1 the traces s of the dual
    pairs (β, q/β). h1_numerator replaces h1 by ∏(1 − s·a + q·a²) when the
    traces are not rational.
    """

    h0: tuple[int, ...] = ()
    h2: tuple[int, ...] = ()
    h1: tuple[int, ...] = ()
    h1_numerator: RatFun | None = field(default=None, compare=False)
    curve: CurveData | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        """Reject unpaired H⁰/H² data."""
        if len(self.h0) != len(self.h2):
            raise UnpairedData(
                f"{len(self.h0)} H⁰ eigenvalues against {len(self.h2)} on H²"
            )

    @property
    def h1_pairs(self) -> int:
        """Number of dual pairs on H¹."""
        if self.h1_numerator is not None:
            return max(self.h1_numerator.num.degree(self.h1_numerator.symbol), 0) // 2
        return len(self.h1)

    @classmethod
    def trivial(cls, curve: CurveData) -> RepData:
        """The constant sheaf: H⁰ = 1, H² = q and H¹ from the zeta numerator."""
        if curve.traces is not None:
            return cls((0,), (1,), curve.traces, None, curve)
        return cls((0,), (1,), (), numerator_function(curve, "a"), curve)

    @classmethod
    def from_descriptor(cls, descriptor: RepDescriptor) -> RepData:
        """RepData from a parsed JSON descriptor."""
        return cls(tuple(descriptor.h0), tuple(descriptor.h2), tuple(descriptor.h1))

    def __add__(self, other: RepData) -> RepData:
        """Direct sum concatenates the data."""
        if self.h1_numerator is not None or other.h1_numerator is not None:
            left = self.h1_polynomial()
            right = other.h1_polynomial()
            return RepData(
                self.h0 + other.h0, self.h2 + other.h2, (), left * right, self.curve
            )
        return RepData(
            self.h0 + other.h0, self.h2 + other.h2, self.h1 + other.h1, None, self.curve
        )

    def dual(self) -> RepData:
        """π*: eigenvalue β ↦ q/β, so H⁰ and H² swap."""
        return RepData(
            tuple(1 - e for e in self.h2),
            tuple(1 - e for e in self.h0),
            self.h1,
            self.h1_numerator,
            self.curve,
        )

    def h1_polynomial(self) -> RatFun:
        """∏(1 − s·a + q·a²)."""
        if self.h1_numerator is not None:
            return self.h1_numerator
        a = RatFun.monomial(1)
        product = RatFun.constant(1)
        for s in self.h1:
            product = product * (1 - s * a + Q * a * a)
        return product


def _pair_factor(e0: int, e2: int) -> RatFun:
    """(a^{1/2}β₀^{1/2} − a^{−1/2}β₀^{−1/2})(a^{1/2}β₂^{1/2} − a^{−1/2}β₂^{−1/2})."""
    return RatFun.laurent_polynomial(
        {
            1: q_power(e0 + e2),
            0: -(q_power(e0 - e2) + q_power(e2 - e0)),
            -1: q_power(-e0 - e2),
        }
    )


def lhat(rep: RepData) -> RatFun:
    """L̂(π, a) with H¹ in the numerator; only integer powers of a appear."""
    result = RatFun.constant(1)
    for e0, e2 in zip(rep.h0, rep.h2):
        result = result / _pair_factor(e0, e2)
    pairs = rep.h1_pairs
    if pairs:
        scale = RatFun.monomial(-pairs, "a", Q_HALF**-pairs)
        result = result * rep.h1_polynomial() * scale
    return result


def check_lhat_functional_equation(rep: RepData) -> RatFun:
    """L̂(π, a) = L̂(π*, 1/(qa))."""
    value = lhat(rep)
    mirrored = lhat(rep.dual()).substitute(invert=True, shift=-2)
    if value != mirrored:
        raise CheckFailed("L̂(π, a) ≠ L̂(π*, 1/(qa))", value - mirrored)
    return value


def xi_pair_weight(curve: CurveData) -> RatFun:
    """W(t) = ξ_C(t)·(1 − t⁻¹)(1 − qt), a Laurent polynomial fixed by t ↦ 1/(qt)."""
    t = RatFun.monomial(1, "t")
    weight = xi(curve, "t") * (1 - t**-1) * (1 - Q * t)
    if not weight.is_laurent_polynomial():
        raise CheckFailed("ξ pair weight is not a Laurent polynomial", weight)
    if weight.substitute(invert=True, shift=-2) != weight:
        raise CheckFailed("ξ pair weight is not symmetric under t ↦ 1/(qt)", weight)
    return weight


@dataclass(frozen=True)
class BoxClass:
    """ω₁ ⊠ ω₂ in the two-sided character ring."""

    omega1: RatFun
    omega2: RatFun

    @classmethod
    def parse(cls, omega1: Any, omega2: Any) -> BoxClass:
        """Coerce scalars and functions into a box class."""
        return cls(_as_function(omega1), _as_function(omega2))

    def conjugate_second(self) -> BoxClass:
        """ω₁ ⊠ ω₂* with ω*(a) = ω(a⁻¹)."""
        return BoxClass(self.omega1, self.omega2.inverted())


def _as_function(value: Any) -> RatFun:
    if isinstance(value, RatFun):
        return value
    return RatFun.constant(value)


def flag_integrand(box: BoxClass) -> RatFun:
    """ω₁(a)·Σ_w w[ω₂(a)/(1 − a⁻²)]."""
    a = RatFun.monomial(1)
    omega2 = box.omega2
    return box.omega1 * (
        omega2 / (1 - a**-2) + omega2.inverted() / (1 - a**2)
    )


def integrate_flag(box: BoxClass, hints: tuple[WeilHint, ...] = ()) -> ScalarQ:
    """∫ over P¹ as a unit-circle integral of the Weyl-symmetrized integrand."""
    return circle_integral(flag_integrand(box), UNIT_CIRCLE, hints)


def flag_invariants(m: int) -> int:
    """SL(2)-invariants in χ(P¹, O(m)), with the Serre duality sign."""
    if m >= 0:
        return 1 if m % 2 == 0 else 0
    if m == -1:
        return 0
    return -flag_invariants(-m - 2)


def cotangent_integrand(box: BoxClass) -> RatFun:
    """ω₁[ω₂(a)/((1−a⁻²)(1−qa²)) + ω₂(a⁻¹)/((1−a²)(1−qa⁻²))]."""
    a = RatFun.monomial(1)
    omega2 = box.omega2
    return box.omega1 * (
        omega2 / ((1 - a**-2) * (1 - Q * a**2))
        + omega2.inverted() / ((1 - a**2) * (1 - Q * a**-2))
    )


def integrate_cotangent(box: BoxClass) -> ScalarQ:
    """∫ over the cotangent bundle, from the expansion at |a| ≫ 1."""
    return cotangent_integrand(box).constant_term()


def integrate_T(box: BoxClass, curve: CurveData | None = None) -> ScalarQ:
    """(1−q)·∮_{|a|≫1}[ω₁ω₂ + L·ω₁(a)ω₂(a⁻¹)] with L = ξ_C(a⁻²)/ξ_C(a²)."""
    ratio = l_ratio(curve)
    integrand = box.omega1 * box.omega2 + ratio * box.omega1 * box.omega2.inverted()
    return (1 - Q) * integrand.constant_term()


def integrate_T_euler(box: BoxClass) -> ScalarQ:
    """∫_T for P¹ from the Euler class (1−q)(1−qa²)(1−a⁻²) and the Weyl sum."""
    a = RatFun.monomial(1)
    euler = (1 - Q * a**2) * (1 - a**-2)
    kernel = box.omega2 / euler
    symmetrized = kernel + kernel.inverted()
    return (1 - Q) * (box.omega1 * euler * symmetrized).constant_term()
