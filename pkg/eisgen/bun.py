"""Functions on Bun_{PGL(2)}(P¹) and brute-force section counts."""
from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
import logging
from typing import Any, Union

import sympy

from .curve import CurveData, closed_point_counts
from .errors import CheckFailed, InputError
from .exact import SQRT_Q, SYMBOLS, Q, Q_HALF, RatFun, ScalarQ
from .gf import (
    common_factor_count,
    enumerate_coprime_form_pairs,
    field_for_q,
    normalized_forms,
    sieve_check,
)

_LOGGER = logging.getLogger(__name__)

CHI0 = sympy.Symbol("chi0")

Value = Union[ScalarQ, RatFun]


@dataclass(frozen=True)
class BundleClass:
    """P_k = P(O(k) ⊕ O) over P¹(F_q)."""

    k: int
    q: int

    def __post_init__(self) -> None:
        """Only k ≥ 0 labels a class."""
        if self.k < 0:
            raise InputError("bundle classes are labelled by k ≥ 0")

    @property
    def aut_order(self) -> int:
        """|Aut(P_k)|."""
        return aut_order(self.k, self.q)


def aut_order(k: int, q: int) -> int:
    """q(q²−1) for k = 0, q^{k+1}(q−1) for k > 0."""
    if k < 0:
        raise InputError("k must be nonnegative")
    if k == 0:
        return q * (q * q - 1)
    return q ** (k + 1) * (q - 1)


def aut_order_symbolic(k: int) -> ScalarQ:
    """|Aut(P_k)| as a function of q."""
    if k < 0:
        raise InputError("k must be nonnegative")
    if k == 0:
        return Q * (Q * Q - 1)
    return Q ** (k + 1) * (Q - 1)


def count_sections(
    q: int, k: int, n: int, budget: int | None = None, jobs: int = 1
) -> int:
    """Sections of P_k of degree n: s_∞ at n = −k plus coprime pairs at n = k + 2d′."""
    if k < 0:
        raise InputError("k must be nonnegative")
    at_infinity = 1 if n == -k else 0
    if (n - k) % 2 or n < k:
        return at_infinity
    reduced = (n - k) // 2
    field = field_for_q(q)
    pairs = enumerate_coprime_form_pairs(field, k + reduced, reduced, budget, jobs)
    return at_infinity + pairs


@dataclass(frozen=True)
class QuasisectionCount:
    """Enumerated and closed-form quasisection counts at (q, k, d)."""

    q: int
    k: int
    d: int
    pairs: int
    pairs_closed_form: int
    common_factors: int
    common_factors_closed_form: int

    @property
    def holds(self) -> bool:
        """Both counts agree with their closed forms."""
        return (
            self.pairs == self.pairs_closed_form
            and self.common_factors == self.common_factors_closed_form
        )


def count_quasisections(
    q: int, k: int, d: int, budget: int | None = None
) -> QuasisectionCount:
    """Pairs (F, G ≠ 0) of degrees (k+d, d) up to scalar, sieved through coprime pairs."""
    if d < 0 or k < 0:
        raise InputError("k and d must be nonnegative")
    field = field_for_q(q)
    pairs, _ = sieve_check(field, k + d, d, budget)
    common = sum(1 for _ in normalized_forms(field, d))
    result = QuasisectionCount(
        q,
        k,
        d,
        pairs,
        (q ** (2 * d + k + 2) - q ** (d + k + 1)) // (q - 1),
        common,
        common_factor_count(q, d),
    )
    if not result.holds:
        raise CheckFailed(f"quasisection counts disagree at (q={q}, k={k}, d={d})", result)
    return result


class BunFun:
    """Finitely supported function k ↦ value on the classes P_k."""

    __slots__ = ("values",)

    def __init__(self, values: Mapping[int, Any] | None = None) -> None:
        """Drop zero values and reject negative labels."""
        cleaned: dict[int, Value] = {}
        for k, value in (values or {}).items():
            if k < 0:
                raise InputError("bundle functions live on k ≥ 0")
            if not isinstance(value, (ScalarQ, RatFun)):
                value = ScalarQ(value)
            if not value.is_zero():
                cleaned[k] = value
        self.values = cleaned

    @classmethod
    def delta(cls, k: int, value: Any = 1) -> BunFun:
        """value·𝟙_{P_k}."""
        return cls({k: value})

    @classmethod
    def from_function(cls, func: Callable[[int], Any], support: Iterable[int]) -> BunFun:
        """Tabulate func on a finite support."""
        return cls({k: func(k) for k in support})

    def __getitem__(self, k: int) -> Value | int:
        if k == -1:
            return self[1]
        return self.values.get(k, 0)

    @property
    def support(self) -> list[int]:
        """Sorted support."""
        return sorted(self.values)

    def __add__(self, other: BunFun) -> BunFun:
        keys = set(self.values) | set(other.values)
        return BunFun({k: self[k] + other[k] for k in keys})

    def __sub__(self, other: BunFun) -> BunFun:
        return self + other.scale(-1)

    def scale(self, factor: Any) -> BunFun:
        """factor·f."""
        return BunFun({k: factor * v for k, v in self.values.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BunFun):
            return NotImplemented
        return self.values == other.values

    def __repr__(self) -> str:
        return f"BunFun({ {k: str(v) for k, v in sorted(self.values.items())} })"

    def to_json(self) -> dict[str, Any]:
        """k ↦ serialized value."""
        return {str(k): v.to_json() for k, v in sorted(self.values.items())}


def hecke_delta(f: BunFun) -> BunFun:
    """(Δf)(k) = q·f(k−1) + f(k+1) with f(−1) := f(1)."""
    keys = {k + s for k in f.values for s in (-1, 1) if k + s >= 0}
    return BunFun({k: Q * f[k - 1] + f[k + 1] for k in keys})


def _conjugate(value: Value | int) -> Value | int:
    if isinstance(value, RatFun):
        return value.inverted()
    return value


def inner_product(f: BunFun, g: BunFun) -> Value:
    """Σ_k f(k)·conj(g(k))/|Aut(P_k)|, conjugation acting as a ↦ a⁻¹."""
    total: Value | int = 0
    for k in set(f.values) & set(g.values):
        total = total + f[k] * _conjugate(g[k]) / aut_order_symbolic(k)
    return total if not isinstance(total, int) else ScalarQ(total)


def hecke_eigenvalue(
    degree: int,
    chi0: Any = 1,
    curve: CurveData | None = None,
    trace: bool = False,
) -> RatFun | sympy.Expr:
    """λ = q^{deg/2}(χ₀·a^{−deg} + χ₀⁻¹·a^{deg}); a RatFun when χ₀ = 1.

    With a curve, x must be a closed point of that degree on it. trace sums λ
    over all of them, which needs χ₀ = 1.
    """
    if degree < 1:
        raise InputError("points have positive degree")
    points = None
    if curve is not None:
        points = closed_point_counts(curve, degree)[-1]
        if not points:
            raise InputError(f"the curve has no closed points of degree {degree}")
    if trace and (points is None or chi0 != 1):
        raise InputError("the trace needs a curve and χ₀ = 1")
    if chi0 == 1:
        value = RatFun.laurent_polynomial(
            {degree: Q_HALF**degree, -degree: Q_HALF**degree}
        )
        return value * points if trace else value
    a = SYMBOLS["a"]
    return SQRT_Q**degree * (chi0 * a**-degree + a**degree / chi0)


def check_self_adjoint(f: BunFun, g: BunFun) -> Value:
    """⟨Δf, g⟩ = ⟨f, Δg⟩."""
    left = inner_product(hecke_delta(f), g)
    right = inner_product(f, hecke_delta(g))
    if left != right:
        raise CheckFailed("Δ is not self-adjoint on the given pair", (left, right))
    return left
