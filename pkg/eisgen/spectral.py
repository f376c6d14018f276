"""Eisenstein series and the spectral decomposition for PGL(2) over P¹."""
from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
import logging
from typing import Any

import numpy as np
import sympy
from sympy import Poly

from .bun import BunFun, Value, aut_order_symbolic, count_sections, hecke_delta, inner_product
from .const import NUMERIC_TOLERANCE, UNIT_CIRCLE
from .curve import CurveData, l_ratio, weil_hints
from .errors import CheckFailed, InputError
from .exact import (
    QS,
    SYMBOLS,
    Place,
    Q,
    Q_HALF,
    RatFun,
    ScalarQ,
    circle_integral,
    places,
    residue,
)
from .genus import BoxClass, integrate_T

_LOGGER = logging.getLogger(__name__)


class DomainError(InputError):
    """Exception when a closed form is used outside its range."""


def _ratio(curve: CurveData | None) -> RatFun:
    return l_ratio(curve)


def eis(k: int, curve: CurveData | None = None) -> RatFun:
    """Eis(P_k, a) = (q^{1/2}a)^k + L(a)·(q^{1/2}a⁻¹)^k."""
    if k < 0:
        raise InputError("k must be nonnegative")
    return RatFun.monomial(k, "a", Q_HALF**k) + _ratio(curve) * RatFun.monomial(
        -k, "a", Q_HALF**k
    )


def eis_family(k_max: int) -> BunFun:
    """k ↦ Eis(P_k, a) for 0 ≤ k ≤ k_max."""
    return BunFun({k: eis(k) for k in range(k_max + 1)})


def laplace_eigenvalue() -> RatFun:
    """λ(a) = q^{1/2}(a + a⁻¹)."""
    return RatFun.laurent_polynomial({1: Q_HALF, -1: Q_HALF})


def check_eigenrelation(k_max: int) -> None:
    """Δ Eis = λ(a)·Eis for 0 ≤ k ≤ k_max, including the reflected k = 0."""
    family = eis_family(k_max + 1)
    applied = hecke_delta(family)
    eigenvalue = laplace_eigenvalue()
    for k in range(k_max + 1):
        if applied[k] != eigenvalue * family[k]:
            raise CheckFailed(f"Δ Eis ≠ λ·Eis at k = {k}", applied[k])


def check_eis_functional_equation(k: int) -> None:
    """Eis(k, a⁻¹) = ((a² − q)/(qa² − 1))·Eis(k, a)."""
    value = eis(k)
    if value.inverted() != value / _ratio(None):
        raise CheckFailed(f"Eis functional equation fails at k = {k}", value)


def section_count_check(
    q: int, k: int, n_max: int, budget: int | None = None, jobs: int = 1
) -> dict[int, int]:
    """count_sections(q, k, n) against q^{n/2}·[a^{−n}]Eis(P_k, a) for n ≤ n_max."""
    series = eis(k)
    table = {}
    for n in range(-k, n_max + 1):
        expected = (series.coefficient(-n) * Q_HALF**n).fraction_at(q)
        counted = count_sections(q, k, n, budget, jobs)
        if counted != expected:
            raise CheckFailed(
                f"section count {counted} ≠ Eisenstein coefficient {expected}",
                (q, k, n),
            )
        table[n] = counted
    return table


def constant_term(k: int, curve: CurveData | None = None) -> RatFun:
    """CT(Eis)(O(k)) = (1/q)[(q^{-1/2}a)^k + L·(q^{-1/2}a⁻¹)^k]."""
    return (
        RatFun.monomial(k, "a", Q_HALF**-k)
        + _ratio(curve) * RatFun.monomial(-k, "a", Q_HALF**-k)
    ) / Q


def ct_of_function(phi: BunFun | Callable[[int], Any], m: int) -> Value:
    """CT(φ)(M) = φ(M ⊕ O)/q^{deg M + 1} for deg M ≥ −1."""
    if m < -1:
        raise DomainError("the constant term closed form needs deg M ≥ −1")
    value = phi[abs(m)] if isinstance(phi, BunFun) else phi(abs(m))
    if isinstance(value, int):
        value = ScalarQ(value)
    return value / Q ** (m + 1)


def ct_transpose(phi: Mapping[int, Any]) -> BunFun:
    """Eisenstein pull-push of φ on Bun_M = Z, the transpose of CT."""
    values: dict[int, Any] = {}
    for m, value in phi.items():
        if m < -1:
            raise DomainError("the constant term closed form needs deg M ≥ −1")
        k = abs(m)
        term = aut_order_symbolic(k) * value / (Q ** (m + 1) * (Q - 1))
        values[k] = values[k] + term if k in values else term
    return BunFun(values)


def levi_inner_product(phi: Mapping[int, Any], psi: Mapping[int, Any]) -> ScalarQ:
    """Σ_m φ(m)·ψ(m)/|Aut(M)| on Bun_M = Z."""
    total = ScalarQ(0)
    for m in set(phi) & set(psi):
        total += ScalarQ(phi[m]) * ScalarQ(psi[m]) / (Q - 1)
    return total


def check_ct_adjoint(phi: Mapping[int, Any], g: BunFun) -> ScalarQ:
    """⟨E φ, g⟩ on Bun_G equals ⟨φ, CT g⟩ on Bun_M."""
    left = inner_product(ct_transpose(phi), g)
    right = levi_inner_product(phi, {m: ct_of_function(g, m) for m in phi})
    if left != right:
        raise CheckFailed("constant term is not the transpose of Eisenstein", (left, right))
    return right


def sigma(omega: RatFun, curve: CurveData | None = None) -> RatFun:
    """Σω(a) = ω(a) + L(a)·ω(a⁻¹)."""
    return omega + _ratio(curve) * omega.inverted()


def check_projector(omega: RatFun, curve: CurveData | None = None) -> None:
    """Σ∘Σ = 2Σ."""
    once = sigma(omega, curve)
    if sigma(once, curve) != 2 * once:
        raise CheckFailed("Σ² ≠ 2Σ", omega)


def _exponent_window(omega: RatFun) -> tuple[int, int]:
    terms = omega.laurent_terms()
    if not terms:
        return 0, 0
    return min(terms), max(terms)


def pseudo_eis(omega: RatFun) -> BunFun:
    """Eis_ω(k) = CT_∞(Eis(k, a)·ω(a)); the support is checked to be finite."""
    if not omega.is_laurent_polynomial():
        raise InputError("pseudo-Eisenstein series need a Laurent polynomial")
    low, high = _exponent_window(omega)
    bound = max(high, -low, 0)
    values = {k: (eis(k) * omega).constant_term() for k in range(bound + 1)}
    for k in (bound + 1, bound + 2):
        if not (eis(k) * omega).constant_term().is_zero():
            raise CheckFailed(f"pseudo-Eisenstein series is nonzero at k = {k}", omega)
    return BunFun(values)


def _linear_place(root: ScalarQ) -> Place:
    a = SYMBOLS["a"]
    return Place(Poly(a - root.to_expr(), a, domain=QS), None)


def kernel_residue(sign: int = 1) -> ScalarQ:
    """Res_{a=±q^{1/2}} of L(a)·da/a; equal to (q − q⁻¹)/2."""
    return residue(_ratio(None), _linear_place(sign * Q_HALF))


def pairing_norm(omega1: RatFun, omega2: RatFun) -> ScalarQ:
    """(1/(q(q−1)))·CT_∞[ω₁·Σ(ω₂*)] with ω*(a) = ω(a⁻¹)."""
    return (omega1 * sigma(omega2.inverted())).constant_term() / (Q * (Q - 1))


def pairing_via_torus(omega1: RatFun, omega2: RatFun) -> ScalarQ:
    """−∫_T(ω₁ ⊠ ω₂*)/(q(q−1)²)."""
    return -integrate_T(BoxClass(omega1, omega2).conjugate_second()) / (
        Q * (Q - 1) ** 2
    )


def pairing_brute(omega1: RatFun, omega2: RatFun) -> ScalarQ:
    """L² product of the two pseudo-Eisenstein series on Bun_G."""
    return inner_product(pseudo_eis(omega1), pseudo_eis(omega2))


@dataclass(frozen=True)
class PairingReport:
    """The three evaluations of ⟨Eis_ω₁, Eis_ω₂⟩."""

    brute: ScalarQ
    residue_form: ScalarQ
    torus: ScalarQ

    @property
    def holds(self) -> bool:
        """All three agree."""
        return self.brute == self.residue_form == self.torus

    @property
    def torus_constant(self) -> ScalarQ:
        """The proportionality constant between ∫_T and the pairing."""
        return -1 / (Q * (Q - 1) ** 2)


def three_way_pairing(omega1: RatFun, omega2: RatFun) -> PairingReport:
    """Brute-force L², residue formula and ∫_T on the same inputs."""
    report = PairingReport(
        pairing_brute(omega1, omega2),
        pairing_norm(omega1, omega2),
        pairing_via_torus(omega1, omega2),
    )
    if not report.holds:
        raise CheckFailed("pairing evaluations disagree", report)
    return report


@dataclass(frozen=True)
class SpectralSplit:
    """Continuous and discrete parts of ‖Eis_ω‖²."""

    continuous: ScalarQ
    discrete_plus: ScalarQ
    discrete_minus: ScalarQ
    weight_plus: ScalarQ
    weight_minus: ScalarQ

    @property
    def total(self) -> ScalarQ:
        """Sum of the three parts."""
        return self.continuous + self.discrete_plus + self.discrete_minus

    def to_json(self) -> dict[str, Any]:
        """Serialized parts."""
        return {
            "continuous": self.continuous.to_json(),
            "discrete_plus": self.discrete_plus.to_json(),
            "discrete_minus": self.discrete_minus.to_json(),
            "weight_plus": self.weight_plus.to_json(),
            "weight_minus": self.weight_minus.to_json(),
            "total": self.total.to_json(),
        }


def spectral_split(omega: RatFun) -> SpectralSplit:
    """Unit-circle part plus the residues at a = ±q^{1/2}; sums to pairing_norm(ω, ω)."""
    projected = sigma(omega.inverted())
    continuous = circle_integral(projected * projected.inverted(), UNIT_CIRCLE) / (
        2 * Q * (Q - 1)
    )
    weights = [kernel_residue(sign) / (Q * (Q - 1)) for sign in (1, -1)]
    discrete = [
        weight * omega.evaluate(sign * Q_HALF) ** 2
        for weight, sign in zip(weights, (1, -1))
    ]
    split = SpectralSplit(continuous, discrete[0], discrete[1], weights[0], weights[1])
    norm = pairing_norm(omega, omega)
    if split.total != norm:
        raise CheckFailed("spectral parts do not sum to the norm", (split.total, norm))
    return split


@dataclass(frozen=True)
class PseudoEisSplit:
    """Eis_ω(k) as a unit-circle integral plus the residues at ±q^{1/2}."""

    k: int
    circle: ScalarQ
    residues: ScalarQ

    @property
    def total(self) -> ScalarQ:
        """Sum of both pieces."""
        return self.circle + self.residues


def pseudo_eis_split(omega: RatFun) -> dict[int, PseudoEisSplit]:
    """Move the Eis_ω contour from |a| ≫ 1 to |a| = 1 for every k in the support."""
    direct = pseudo_eis(omega)
    half_difference = (Q - 1 / Q) / 2
    result = {}
    low, high = _exponent_window(omega)
    for k in range(max(high, -low, 0) + 1):
        circle = circle_integral(eis(k) * omega, UNIT_CIRCLE)
        residues = half_difference * (
            omega.evaluate(Q_HALF) + (-1) ** k * omega.evaluate(-Q_HALF)
        )
        piece = PseudoEisSplit(k, circle, residues)
        if piece.total != direct[k]:
            raise CheckFailed(f"contour shift for Eis_ω fails at k = {k}", piece)
        result[k] = piece
    return result


def pole_census(curve: CurveData | None = None) -> list[Place]:
    """Places of L with |a| > 1."""
    hints = weil_hints(curve) if curve else ()
    return [
        place
        for place in places(_ratio(curve), hints)
        if not place.is_origin and place.exponent > 0
    ]


def spectrum(q: int) -> dict[str, Any]:
    """Spectrum of Δ on L²(Bun_{PGL(2)}(P¹))."""
    if q < 2:
        raise InputError("q must exceed 1")
    root = sympy.sqrt(q)
    census = [str(place.poly.as_expr()) for place in pole_census()]
    eigenvalue = laplace_eigenvalue()
    discrete = [eigenvalue.evaluate(Q_HALF), eigenvalue.evaluate(-Q_HALF)]
    return {
        "q": q,
        "continuous": {
            "lower": str(eigenvalue.evaluate(-1).at(q)),
            "upper": str(eigenvalue.evaluate(1).at(q)),
            "bound": str(2 * root),
        },
        "discrete": [str(value.at(q)) for value in discrete],
        "poles_outside_unit_circle": census,
        "dual_group": "unramified characters a ∈ C^× of the torus modulo a ↦ a⁻¹; "
        "|a| = 1 gives the continuous part, a = ±q^{1/2} the residual part",
    }


def gram_matrix(q: int, span: int = 4) -> np.ndarray:
    """[pairing_norm(a^i, a^j)] for |i|, |j| ≤ span at a concrete q."""
    exponents = range(-span, span + 1)
    monomials = [RatFun.monomial(i) for i in exponents]
    return np.array(
        [
            [float(pairing_norm(left, right).fraction_at(q)) for right in monomials]
            for left in monomials
        ]
    )


def gram_is_psd(q: int, span: int = 4) -> bool:
    """Smallest Gram eigenvalue is ≥ −tolerance."""
    eigenvalues = np.linalg.eigvalsh(gram_matrix(q, span))
    _LOGGER.debug("Gram eigenvalues at q=%s: %s", q, eigenvalues)
    return bool(eigenvalues.min() >= -NUMERIC_TOLERANCE)


def numeric_kernel_residue(q: int) -> sympy.Expr:
    """Independent residue of L(a)/a at a = √q via sympy."""
    a = sympy.Symbol("a")
    root = sympy.sqrt(q)
    expr = (q * a**2 - 1) / ((a**2 - q) * a)
    return sympy.nsimplify(sympy.residue(expr, a, root))
