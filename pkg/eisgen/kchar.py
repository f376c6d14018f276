"""Equivariant characters of C^n, scissor relations and the q-Gamma series."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
import logging

from .const import EPSILON_INNER, EPSILON_OUTER, UNIT_CIRCLE
from .errors import CheckFailed, InputError
from .exact import (
    AT_INFINITY,
    AT_ZERO,
    ONE,
    ZERO,
    LaurentTail,
    Q,
    RatFun,
    ScalarQ,
    circle_integral,
    places,
)
from .genus import BoxClass, flag_integrand

_LOGGER = logging.getLogger(__name__)


def char_affine(n: int) -> RatFun:
    """(1 − z⁻¹)^{−n}, the character of C^n with weight-one scaling."""
    if n < 1:
        raise InputError("n must be positive")
    z = RatFun.monomial(1, "z")
    return (1 - z**-1) ** -n


def affine_expansion(n: int, outer: bool = True, order: int = 8) -> LaurentTail:
    """The |z| > 1 series (at ∞) or the |z| < 1 series (at 0)."""
    return char_affine(n).laurent(AT_INFINITY if outer else AT_ZERO, order)


def chi_projective(n: int, m: int) -> int:
    """χ(P^{n−1}, O(m)) from the signed binomial formula."""
    if n < 1:
        raise InputError("n must be positive")
    if m >= 0:
        return comb(m + n - 1, n - 1)
    if m > -n:
        return 0
    return (-1) ** (n - 1) * comb(-m - 1, n - 1)


@dataclass(frozen=True)
class ScissorResult:
    """Both sides of ∮_{+ε} = χ(P^{n−1}, O(m)) + ∮_{−ε}."""

    n: int
    m: int
    outer: ScalarQ
    middle: int
    inner: ScalarQ

    @property
    def holds(self) -> bool:
        """True when the three-term identity is exact."""
        return self.outer == self.inner + self.middle


def scissor_check(n: int, m: int) -> ScissorResult:
    """Move the contour across |z| = 1 and compare with the binomial oracle."""
    integrand = RatFun.monomial(m, "z") * char_affine(n)
    result = ScissorResult(
        n,
        m,
        circle_integral(integrand, EPSILON_OUTER),
        chi_projective(n, m),
        circle_integral(integrand, EPSILON_INNER),
    )
    if not result.holds:
        raise CheckFailed(f"scissor identity fails for n={n}, m={m}", result)
    return result


def flag_integrand_is_regular(box: BoxClass) -> bool:
    """The symmetrized flag integrand has no pole on |a| = 1."""
    return all(
        place.is_origin or place.exponent != UNIT_CIRCLE
        for place in places(flag_integrand(box))
    )


def q_gamma(order: int) -> tuple[ScalarQ, ...]:
    """Coefficients of Γ_q(z) = Σ z^d/((1 − q)···(1 − q^d)) through z^{order−1}."""
    if order < 1:
        raise InputError("order must be positive")
    coefficients = []
    for d in range(order):
        pochhammer = ONE
        for i in range(1, d + 1):
            pochhammer = pochhammer * (1 - Q**i)
        coefficients.append(1 / pochhammer)
    return tuple(coefficients)


def q_gamma_residual(order: int) -> tuple[ScalarQ, ...]:
    """Coefficients of Γ_q(qz) − (1 − z)Γ_q(z) through z^{order−1}, on the truncated series."""
    series = RatFun.laurent_polynomial(dict(enumerate(q_gamma(order))), "z")
    z = RatFun.monomial(1, "z")
    terms = (series.substitute(shift=2) - (1 - z) * series).laurent_terms()
    return tuple(terms.get(d, ZERO) for d in range(order))
