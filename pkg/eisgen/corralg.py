"""Stable-range sl(2) modules, Clifford characters and the weight ledger.

Elements of Λ(α₁..α_{2g}) ⊗ Q[η] are dicts (mask, k) ↦ int, where bit i of
mask is the odd generator α_i and k the power of η. The generators come in
pairs γ_i = α_{2i}, γ_i^∨ = α_{2i+1} with ⟨γ_i, γ_i^∨⟩ = 1 = −⟨γ_i^∨, γ_i⟩.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
import itertools
from math import comb
import logging
from secrets import token_hex
from typing import Any

from .errors import CheckFailed, InputError
from .models import CharTermModel, ChiClass, GradedCharModel

_LOGGER = logging.getLogger(__name__)

Element = dict[tuple[int, int], int]


class OutOfStableRange(InputError):
    """Exception when a component falls outside the stable range."""


class RelationViolation(CheckFailed):
    """Exception when an operator relation fails on a basis element."""


class LedgerMismatch(CheckFailed):
    """Exception when the two weight ledgers disagree."""


class CharacterMismatch(CheckFailed):
    """Exception when two graded characters differ."""


# Exterior algebra over Q[η]


def pairing(i: int, j: int) -> int:
    """⟨α_i, α_j⟩."""
    if j != i ^ 1:
        return 0
    return 1 if i % 2 == 0 else -1


def _sign_before(mask: int, j: int) -> int:
    return -1 if (mask & ((1 << j) - 1)).bit_count() % 2 else 1


def _collect(terms: Iterable[tuple[tuple[int, int], int]]) -> Element:
    result: Element = {}
    for key, coeff in terms:
        value = result.get(key, 0) + coeff
        if value:
            result[key] = value
        else:
            result.pop(key, None)
    return result


def add(*elements: Element) -> Element:
    """Sum of elements."""
    return _collect(itertools.chain.from_iterable(e.items() for e in elements))


def scale(element: Element, factor: int) -> Element:
    """factor·x."""
    return _collect((key, factor * c) for key, c in element.items())


def eta(element: Element, power: int = 1) -> Element:
    """η^power·x."""
    return {(mask, k + power): c for (mask, k), c in element.items()}


def wedge(j: int, element: Element) -> Element:
    """α_j ∧ x."""
    return _collect(
        ((mask | 1 << j, k), _sign_before(mask, j) * c)
        for (mask, k), c in element.items()
        if not mask >> j & 1
    )


def contract(j: int, element: Element) -> Element:
    """∂_{α_j}, the odd derivation with ∂_{α_j}(α_i) = ⟨α_j, α_i⟩."""
    partner = j ^ 1
    sign = pairing(j, partner)
    return _collect(
        ((mask & ~(1 << partner), k), sign * _sign_before(mask, partner) * c)
        for (mask, k), c in element.items()
        if mask >> partner & 1
    )


def theta_mask(indices: Iterable[int]) -> int:
    """Mask of θ_S = ∏_{i∈S} γ_iγ_i^∨."""
    return sum(3 << (2 * i) for i in indices)


def cohomological_degree(key: tuple[int, int]) -> int:
    """|mask| + 2k."""
    mask, k = key
    return mask.bit_count() + 2 * k


# Stable modules


@dataclass(frozen=True)
class Operator:
    """One of e, f, h attached to the point class p or to an odd class α_index."""

    kind: str
    index: int | None = None

    @property
    def d_shift(self) -> int:
        """Shift of the component label d."""
        return {"e": -1, "f": 1, "h": 0}[self.kind]

    @property
    def degree_shift(self) -> int:
        """Shift of the centered cohomological degree."""
        return 2 if self.index is None else 1

    def __str__(self) -> str:
        target = "p" if self.index is None else f"α{self.index}"
        return f"{self.kind}<{target}>"


E_P = Operator("e")
F_P = Operator("f")
H_P = Operator("h")


def chern_relation(genus: int, rank: int) -> Element:
    """C(η) = η^{N−g}·∏(η − 2θ_i) = Σ_S (−2)^{|S|}·θ_S·η^{N−|S|}."""
    return {
        (theta_mask(subset), rank - size): (-2) ** size
        for size in range(genus + 1)
        for subset in itertools.combinations(range(genus), size)
    }


@dataclass
class StableModule:
    """Components R_d = Λ(2g)[η]/(C_d) for the d in a window, with the sl(2) operators."""

    genus: int
    m: int
    degrees: tuple[int, ...]
    literal_sign: bool = False
    _cache: dict[tuple[Operator, tuple[int, int], int], Element] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        """Reject components outside the stable range."""
        floor = max(1, self.genus)
        for d in self.degrees:
            if self.rank(d) < floor:
                raise OutOfStableRange(
                    f"N_{d} = {self.rank(d)} < {floor} for g={self.genus}, m={self.m}"
                )
        self._corrections = [
            (theta_mask(subset), size, -((-2) ** size))
            for size in range(1, self.genus + 1)
            for subset in itertools.combinations(range(self.genus), size)
        ]

    @property
    def odd_count(self) -> int:
        """2g."""
        return 2 * self.genus

    def rank(self, d: int) -> int:
        """N_d = m − 2d + 2 − 2g."""
        return self.m - 2 * d + 2 - 2 * self.genus

    def dimension(self, d: int) -> int:
        """2^{2g}·N_d."""
        return 2**self.odd_count * self.rank(d)

    def basis(self, d: int) -> list[tuple[int, int]]:
        """Normal-form monomials mask·η^k with k < N_d."""
        return [
            (mask, k) for k in range(self.rank(d)) for mask in range(1 << self.odd_count)
        ]

    def centered_degree(self, key: tuple[int, int], d: int) -> int:
        """Cohomological degree after the centering ⟪−2d + g − 1⟫."""
        return cohomological_degree(key) + 2 * d - self.genus + 1

    def reduce(self, element: Element, d: int) -> Element:
        """Normal form modulo C_d."""
        rank = self.rank(d)
        pending = dict(element)
        result: Element = {}
        while pending:
            (mask, k), c = pending.popitem()
            if k < rank:
                value = result.get((mask, k), 0) + c
                if value:
                    result[(mask, k)] = value
                else:
                    result.pop((mask, k), None)
                continue
            for theta, size, coeff in self._corrections:
                if mask & theta:
                    continue
                key = (mask | theta, k - size)
                value = pending.get(key, 0) + coeff * c
                if value:
                    pending[key] = value
                else:
                    pending.pop(key, None)
        return result

    def _lift(self, op: Operator, element: Element) -> Element:
        """Operator on a representative in the free algebra."""
        if op.index is None:
            if op.kind == "f":
                return scale(element, -1)
            if op.kind == "e":
                return eta(element, 2)
            return scale(eta(element), 2)
        j = op.index
        if op.kind == "f":
            return scale(contract(j, element), -1)
        if op.kind == "h":
            return scale(wedge(j, element), 2)
        value = add(scale(eta(contract(j, element), 2), -1), scale(eta(wedge(j, element)), 2))
        return scale(value, -1) if self.literal_sign else value

    def act(self, op: Operator, element: Element, d: int) -> tuple[Element, int]:
        """Apply op to an element of R_d; returns the image and its component."""
        target = d + op.d_shift
        if target not in self.degrees:
            raise InputError(f"{op} leaves the window at d = {d}")
        result: Element = {}
        for key, c in element.items():
            cached = self._cache.get((op, key, d))
            if cached is None:
                cached = self.reduce(self._lift(op, {key: 1}), target)
                self._cache[(op, key, d)] = cached
            result = add(result, scale(cached, c))
        return result, target

    def operators(self) -> list[Operator]:
        """e, f, h for p and for every odd class."""
        ops = [E_P, F_P, H_P]
        for j in range(self.odd_count):
            ops.extend(Operator(kind, j) for kind in "efh")
        return ops


def default_window(genus: int, m: int, length: int = 6) -> tuple[int, ...]:
    """The `length` largest d in the stable range."""
    top = (m + 2 - 2 * genus - max(1, genus)) // 2
    return tuple(range(top - length + 1, top + 1))


def build_stable_module(
    genus: int,
    m: int,
    degrees: Iterable[int] | None = None,
    literal_sign: bool = False,
) -> StableModule:
    """Stable module on a window of components, default window of length 6."""
    if genus < 0:
        raise InputError("genus must be nonnegative")
    window = tuple(sorted(degrees)) if degrees is not None else default_window(genus, m)
    if not window:
        raise InputError("the degree window is empty")
    return StableModule(genus, m, window, literal_sign)


Word = tuple[Operator, ...]


def _relations(module: StableModule) -> list[tuple[str, list[tuple[int, Word]]]]:
    """Named relations Σ c·(word) = 0, words in operator-product order."""
    odd = range(module.odd_count)
    e_a = [Operator("e", j) for j in odd]
    f_a = [Operator("f", j) for j in odd]
    h_a = [Operator("h", j) for j in odd]
    relations: list[tuple[str, list[tuple[int, Word]]]] = [
        ("4ef + h² = 0", [(4, (E_P, F_P)), (1, (H_P, H_P))]),
        ("[e<p>, f<p>] = 0", [(1, (E_P, F_P)), (-1, (F_P, E_P))]),
    ]
    for i in odd:
        relations += [
            (
                f"2e<p>f<α{i}> + 2f<p>e<α{i}> + h<p>h<α{i}> = 0",
                [(2, (E_P, f_a[i])), (2, (F_P, e_a[i])), (1, (H_P, h_a[i]))],
            ),
            (f"[e<p>, f<α{i}>] = 0", [(1, (E_P, f_a[i])), (-1, (f_a[i], E_P))]),
            (f"[e<α{i}>, f<p>] = 0", [(1, (e_a[i], F_P)), (-1, (F_P, e_a[i]))]),
        ]
    for op in module.operators():
        if op != H_P:
            relations.append((f"[h<p>, {op}] = 0", [(1, (H_P, op)), (-1, (op, H_P))]))
    for i, j in itertools.product(odd, repeat=2):
        form = pairing(i, j)
        relations += [
            (
                f"{{e<α{i}>, f<α{j}>}} = ⟨α{i},α{j}⟩h<p>",
                [(1, (e_a[i], f_a[j])), (1, (f_a[j], e_a[i])), (-form, (H_P,))],
            ),
            (f"{{e<α{i}>, e<α{j}>}} = 0", [(1, (e_a[i], e_a[j])), (1, (e_a[j], e_a[i]))]),
            (f"{{f<α{i}>, f<α{j}>}} = 0", [(1, (f_a[i], f_a[j])), (1, (f_a[j], f_a[i]))]),
            (
                f"{{h<α{i}>, e<α{j}>}} = 2⟨α{i},α{j}⟩e<p>",
                [(1, (h_a[i], e_a[j])), (1, (e_a[j], h_a[i])), (-2 * form, (E_P,))],
            ),
            (
                f"{{h<α{i}>, f<α{j}>}} = −2⟨α{i},α{j}⟩f<p>",
                [(1, (h_a[i], f_a[j])), (1, (f_a[j], h_a[i])), (2 * form, (F_P,))],
            ),
        ]
    return relations


def _apply_word(
    module: StableModule, word: Word, element: Element, d: int
) -> tuple[Element, int] | None:
    for op in reversed(word):
        if d + op.d_shift not in module.degrees:
            return None
        element, d = module.act(op, element, d)
    return element, d


def _check_component(module: StableModule, d: int) -> int:
    checked = 0
    relations = _relations(module)
    for key in module.basis(d):
        for name, terms in relations:
            images = [_apply_word(module, word, {key: 1}, d) for _, word in terms]
            if any(image is None for image in images):
                continue
            total = add(*(scale(image[0], c) for (c, _), image in zip(terms, images)))
            if total:
                raise RelationViolation(
                    f"{name} fails on R_{d}",
                    {"d": d, "basis": key, "residue": sorted(total.items())},
                )
            checked += 1
    for op in module.operators():
        if d + op.d_shift not in module.degrees:
            continue
        for key in module.basis(d):
            image, target = module.act(op, {key: 1}, d)
            expected = module.centered_degree(key, d) + op.degree_shift
            for out in image:
                if module.centered_degree(out, target) != expected:
                    raise RelationViolation(
                        f"{op} breaks the grading on R_{d}", {"d": d, "basis": key}
                    )
    return checked


def _component_task(genus: int, m: int, degrees: tuple[int, ...], literal: bool, d: int) -> int:
    return _check_component(StableModule(genus, m, degrees, literal), d)


@dataclass(frozen=True)
class RelationReport:
    """Outcome of check_relations."""

    genus: int
    m: int
    degrees: tuple[int, ...]
    checked: int

    def to_json(self) -> dict[str, Any]:
        """Serialized report."""
        return {
            "genus": self.genus,
            "m": self.m,
            "degrees": list(self.degrees),
            "checked": self.checked,
            "passed": True,
        }


def check_relations(module: StableModule, jobs: int = 1) -> RelationReport:
    """Every sl(2) and Clifford relation on every basis element of every component."""
    log_id = token_hex(2)
    _LOGGER.debug(
        "[%s] Checking relations for g=%s, m=%s on %s",
        log_id,
        module.genus,
        module.m,
        module.degrees,
    )
    if jobs > 1:
        task = partial(
            _component_task, module.genus, module.m, module.degrees, module.literal_sign
        )
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(task, module.degrees))
    else:
        counts = [_check_component(module, d) for d in module.degrees]
    _LOGGER.debug("[%s] %s relation instances hold", log_id, sum(counts))
    return RelationReport(module.genus, module.m, module.degrees, sum(counts))


# Fixed-locus model


@dataclass(frozen=True)
class FixedLocusModel:
    """Free Λ(2g)[η] with f⁰<p> = −1, e⁰<p> = −η, f⁰<α> = −∂_α, e⁰<α> = η∂_α − α."""

    genus: int
    eta_bound: int = 4

    def basis(self) -> list[tuple[int, int]]:
        """Monomials up to the η bound."""
        return [
            (mask, k) for k in range(self.eta_bound) for mask in range(1 << 2 * self.genus)
        ]

    def f_p(self, x: Element) -> Element:
        """f⁰<p>."""
        return scale(x, -1)

    def e_p(self, x: Element) -> Element:
        """e⁰<p>."""
        return scale(eta(x), -1)

    def f_a(self, j: int, x: Element) -> Element:
        """f⁰<α_j>."""
        return scale(contract(j, x), -1)

    def e_a(self, j: int, x: Element) -> Element:
        """e⁰<α_j>."""
        return add(eta(contract(j, x)), scale(wedge(j, x), -1))


def fixed_locus_model(genus: int, eta_bound: int = 4) -> FixedLocusModel:
    """Heisenberg–Clifford model with its relations and the composite formulas checked."""
    model = FixedLocusModel(genus, eta_bound)
    stable = StableModule(genus, 0, ())
    odd = range(2 * genus)
    for key in model.basis():
        x = {key: 1}
        witness = {"basis": key}
        if add(model.e_p(model.f_p(x)), scale(eta(x), -1)):
            raise RelationViolation("e⁰<p>f⁰<p> ≠ η", witness)
        if add(stable._lift(E_P, x), eta(model.e_p(x))):
            raise RelationViolation("e<p> ≠ −η·e⁰<p>", witness)
        for j in odd:
            mixed = add(model.e_p(model.f_a(j, x)), model.e_a(j, model.f_p(x)))
            if add(mixed, scale(wedge(j, x), -1)):
                raise RelationViolation(f"e⁰<p>f⁰<α{j}> + e⁰<α{j}>f⁰<p> ≠ α{j}", witness)
            composite = scale(add(eta(model.e_a(j, x)), wedge(j, model.e_p(x))), -1)
            if add(stable._lift(Operator("e", j), x), scale(composite, -1)):
                raise RelationViolation(f"e<α{j}> ≠ −(η·e⁰<α{j}> + α{j}·e⁰<p>)", witness)
            for i in odd:
                bracket = add(model.e_a(i, model.f_a(j, x)), model.f_a(j, model.e_a(i, x)))
                if add(bracket, scale(x, pairing(i, j))):
                    raise RelationViolation(
                        f"{{e⁰<α{i}>, f⁰<α{j}>}} is not the scalar −⟨α{i},α{j}⟩", witness
                    )
    return model


def cogeneration_check(genus: int, n: int = 0) -> Element:
    """∏_i e<γ_i>e<γ_i^∨> on η^n·top equals (−1)^g·η^{n+3g}·∏(η − 2θ_i) in the free lift."""
    if n < 0:
        raise InputError("n must be nonnegative")
    module = StableModule(genus, 0, ())
    top = (1 << 2 * genus) - 1
    element: Element = {(top, n): 1}
    for i in range(genus):
        element = module._lift(Operator("e", 2 * i + 1), element)
        element = module._lift(Operator("e", 2 * i), element)
    expected = scale(eta(chern_relation(genus, genus), n + 3 * genus), (-1) ** genus)
    if element != expected:
        raise RelationViolation(
            "e<α> products do not regenerate the Chern relation",
            {"genus": genus, "n": n, "got": sorted(element.items())},
        )
    # At g = 0, n = 0 the relation is 1 and the component is zero.
    if n + 4 * genus < max(1, genus):
        return element
    reduced = StableModule(genus, n + 6 * genus - 2, (0,)).reduce(element, 0)
    if reduced:
        raise RelationViolation("cogenerated class survives in R_d", sorted(reduced.items()))
    return element


# Graded characters


@dataclass(frozen=True, order=True)
class Weight:
    """a-degree, cohomological degree, twice the Tate weight and a torsion symbol."""

    a: int
    degree: int
    weight2: int
    symbol: str = ""

    def tate(self, n: int) -> Weight:
        """⟪n⟫ = [n](n/2)."""
        return Weight(self.a, self.degree - n, self.weight2 - n, self.symbol)


class GradedChar:
    """Finite formal sum of weights with integer multiplicities."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[Weight, int]] | None = None) -> None:
        """Collect terms, dropping zero multiplicities."""
        collected: dict[Weight, int] = {}
        for weight, mult in terms or ():
            value = collected.get(weight, 0) + mult
            if value:
                collected[weight] = value
            else:
                collected.pop(weight, None)
        self.terms = collected

    def __add__(self, other: GradedChar) -> GradedChar:
        return GradedChar(itertools.chain(self.terms.items(), other.terms.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedChar):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"GradedChar({len(self.terms)} weights)"

    def tate(self, n: int) -> GradedChar:
        """Apply ⟪n⟫ to every weight."""
        return GradedChar((w.tate(n), c) for w, c in self.terms.items())

    def shift_a(self, s: int) -> GradedChar:
        """Multiply by a^s."""
        return GradedChar(
            (Weight(w.a + s, w.degree, w.weight2, w.symbol), c) for w, c in self.terms.items()
        )

    def restrict_a(self, allowed: Iterable[int]) -> GradedChar:
        """Keep the listed a-degrees."""
        keep = set(allowed)
        return GradedChar((w, c) for w, c in self.terms.items() if w.a in keep)

    def a_degrees(self) -> list[int]:
        """Sorted a-degrees in the support."""
        return sorted({w.a for w in self.terms})

    def dimension(self) -> int:
        """Sum of multiplicities."""
        return sum(self.terms.values())

    def first_difference(self, other: GradedChar) -> Weight | None:
        """Smallest weight where the multiplicities differ."""
        for weight in sorted(set(self.terms) | set(other.terms)):
            if self.terms.get(weight, 0) != other.terms.get(weight, 0):
                return weight
        return None

    def to_model(self) -> GradedCharModel:
        """pydantic payload."""
        return GradedCharModel(
            terms=[
                CharTermModel(a=w.a, degree=w.degree, weight2=w.weight2, symbol=w.symbol, mult=c)
                for w, c in sorted(self.terms.items())
            ]
        )

    def to_json(self) -> dict[str, Any]:
        """JSON payload."""
        return self.to_model().dict()

    @classmethod
    def from_json(cls, payload: Any) -> GradedChar:
        """Inverse of to_json."""
        model = GradedCharModel.parse_obj(payload)
        return cls(
            (Weight(t.a, t.degree, t.weight2, t.symbol), t.mult) for t in model.terms
        )


def assert_equal_characters(left: GradedChar, right: GradedChar) -> None:
    """Raise CharacterMismatch at the first differing weight."""
    weight = left.first_difference(right)
    if weight is not None:
        raise CharacterMismatch(
            f"characters differ at {weight}",
            {
                "weight": weight,
                "left": left.terms.get(weight, 0),
                "right": right.terms.get(weight, 0),
            },
        )


def symmetric_product_character(genus: int, d_max: int, chi: ChiClass) -> GradedChar:
    """Cohomology of S^dC with coefficients in χ for d ≤ d_max; a-degree carries d.

    Trivial χ: (1 + xt)^{2g}/((1 − x)(1 − xt²)); otherwise (1 + xt)^{2g−2}.
    """
    if d_max < 0:
        raise InputError("d_max must be nonnegative")
    terms = []
    if chi is ChiClass.trivial:
        for d in range(d_max + 1):
            for odd in range(min(d, 2 * genus) + 1):
                for pairs in range(d - odd + 1):
                    degree = odd + 2 * pairs
                    terms.append((Weight(d, degree, degree), comb(2 * genus, odd)))
        return GradedChar(terms)
    if genus == 0:
        raise InputError("P¹ has no nontrivial characters")
    for d in range(min(d_max, 2 * genus - 2) + 1):
        terms.append((Weight(d, d, d), comb(2 * genus - 2, d)))
    return GradedChar(terms)


@dataclass(frozen=True)
class LocalCohomology:
    """H¹_L(O(m)) on T*P¹ as the extension of the L₀ piece by the L_∞ piece."""

    m: int
    sub: GradedChar
    quot: GradedChar

    @property
    def total(self) -> GradedChar:
        """Character of the whole module."""
        return self.sub + self.quot


def local_cohomology_character(m: int, a_min: int, twist: int = 0) -> LocalCohomology:
    """Monomials with a-degree ≥ a_min; twist translates the a-degree of both pieces.

    sub: a^{−m−2i−2j}·q^i and quot: a^{m−2i−2j}·q^{−j} for i ≥ 0, j ≥ 1, all in
    cohomological degree 1.
    """
    sub, quot = [], []
    for total in itertools.count(1):
        a_sub = -m - 2 * total + twist
        a_quot = m - 2 * total + twist
        if max(a_sub, a_quot) < a_min:
            break
        for i in range(total):
            if a_sub >= a_min:
                sub.append((Weight(a_sub, 1, 2 * i), 1))
            if a_quot >= a_min:
                quot.append((Weight(a_quot, 1, -2 * (total - i)), 1))
    return LocalCohomology(m, GradedChar(sub), GradedChar(quot))


def _support_weight(weight: Weight, delta: int = 1) -> Weight:
    """Dual weight of a local-cohomology monomial, then Ô_vir = Spin⟪−δ⟫."""
    degree = -weight.weight2
    return Weight(weight.a, degree, degree).tate(-delta)


def moduli_character_g0(m: int, d_max: int, centering_shift: int = 0) -> GradedChar:
    """Ĥ(QMN) at g = 0 with the centering ⟪−2d − 1 + shift⟫, d from min(1, m+1) down to −d_max."""
    d_top = min(1, m + 1)
    d_high = min(d_top, (m + 1) // 2)
    degrees = range(-d_max, d_high + 1)
    terms = []
    if len(degrees):
        module = build_stable_module(0, m, degrees)
        for d in module.degrees:
            a = 2 * d - m - 2
            for key in module.basis(d):
                degree = module.centered_degree(key, d) - centering_shift
                terms.append((Weight(a, degree, degree), 1))
    return GradedChar(terms)


def thm2_character_check_g0(m: int, d_max: int, centering_shift: int = 0) -> GradedChar:
    """Moduli side against the support side with the same a-degrees."""
    if d_max < 0:
        raise InputError("d_max must be nonnegative")
    d_top = min(1, m + 1)
    window = [2 * d - m - 2 for d in range(-d_max, d_top + 1)]
    moduli = moduli_character_g0(m, d_max, centering_shift)
    support = GradedChar()
    if window:
        support_raw = local_cohomology_character(m, min(window)).total.restrict_a(window)
        support = GradedChar((_support_weight(w), c) for w, c in support_raw.terms.items())
    assert_equal_characters(moduli, support)
    return moduli


# Weight ledger


@dataclass(frozen=True)
class LedgerWeight:
    """χ(M)^{m_exp}·χ(K_C)^{k_exp}·χ^{chi_exp}⟪tate⟫."""

    m_exp: int = 0
    k_exp: int = 0
    chi_exp: int = 0
    tate: int = 0

    def __add__(self, other: LedgerWeight) -> LedgerWeight:
        return LedgerWeight(
            self.m_exp + other.m_exp,
            self.k_exp + other.k_exp,
            self.chi_exp + other.chi_exp,
            self.tate + other.tate,
        )

    def expand(self, genus: int, deg_m: int, chi: ChiClass) -> Weight:
        """χ(L) = (q^{1/2}a)^{−deg L}·χ₀(L), ⟪n⟫ = [n](n/2)."""
        degree_line = self.m_exp * deg_m + self.k_exp * (2 * genus - 2)
        return Weight(
            -degree_line,
            -self.tate,
            -degree_line - self.tate,
            _torsion_symbol(chi, self),
        )

    def __str__(self) -> str:
        return f"χ(M)^{self.m_exp}·χ(K)^{self.k_exp}·χ^{self.chi_exp}⟪{self.tate}⟫"


def _torsion_symbol(chi: ChiClass, weight: LedgerWeight) -> str:
    if chi is ChiClass.trivial:
        return ""
    parts = []
    for name, exponent in (
        ("chi0(M)", weight.m_exp),
        ("chi0(K)", weight.k_exp),
        ("chi", weight.chi_exp),
    ):
        if chi is ChiClass.two_torsion:
            exponent %= 2
        if exponent:
            parts.append(f"{name}^{exponent}")
    return "*".join(parts)


def cohomology_dimensions(genus: int, chi: ChiClass) -> tuple[int, int, int]:
    """dim H^i(C, χ) for i = 0, 1, 2."""
    if chi is ChiClass.trivial:
        return 1, 2 * genus, 1
    if genus == 0:
        raise InputError("P¹ has no nontrivial characters")
    return 0, 2 * genus - 2, 0


def determinant_twist(genus: int, chi: ChiClass) -> LedgerWeight:
    """Λ^top H•(C, χ): Tate part Σ(−1)^{i+1}·dim H^i·(−i), one factor χ(K_C) from duality."""
    dims = cohomology_dimensions(genus, chi)
    tate = sum((-1) ** (i + 1) * dim * (-i) for i, dim in enumerate(dims))
    result = LedgerWeight(k_exp=1, tate=tate)
    if result != LedgerWeight(k_exp=1, tate=2 - 2 * genus):
        raise LedgerMismatch("determinant twist is not χ(K_C)⟪2−2g⟫", result)
    return result


Row = tuple[str, LedgerWeight]


@dataclass(frozen=True)
class LedgerReport:
    """Generator weights of the submodule and the quotient, computed twice."""

    genus: int
    deg_m: int
    chi: ChiClass
    moduli_sub: tuple[Row, ...]
    moduli_quot: tuple[Row, ...]
    spinor_sub: tuple[Row, ...]
    spinor_quot: tuple[Row, ...]
    target_sub: LedgerWeight
    target_quot: LedgerWeight

    @staticmethod
    def total(rows: Sequence[Row]) -> LedgerWeight:
        """Sum of a column."""
        result = LedgerWeight()
        for _, weight in rows:
            result = result + weight
        return result

    def to_json(self) -> dict[str, Any]:
        """Two-column report with expanded weights."""

        def _column(rows: Sequence[Row]) -> list[dict[str, str]]:
            return [{"row": label, "weight": str(weight)} for label, weight in rows]

        def _expanded(weight: LedgerWeight) -> dict[str, Any]:
            w = weight.expand(self.genus, self.deg_m, self.chi)
            return {"a": w.a, "degree": w.degree, "weight2": w.weight2, "symbol": w.symbol}

        return {
            "genus": self.genus,
            "deg_M": self.deg_m,
            "chi": self.chi.value,
            "sub": {
                "moduli": _column(self.moduli_sub),
                "spinor": _column(self.spinor_sub),
                "target": str(self.target_sub),
                "expanded": _expanded(self.target_sub),
            },
            "quot": {
                "moduli": _column(self.moduli_quot),
                "spinor": _column(self.spinor_quot),
                "target": str(self.target_quot),
                "expanded": _expanded(self.target_quot),
            },
            "verdict": "equal",
        }


def _generator_degree(genus: int, chi: ChiClass) -> int:
    """deg D of the generators: the lowest symmetric power carrying H•(S^nC, χ²)."""
    return symmetric_product_character(genus, 0, chi.squared).a_degrees()[0]


def _moduli_rows(
    genus: int, deg_m: int, chi: ChiClass, deg_d: int
) -> tuple[tuple[Row, ...], tuple[Row, ...]]:
    """Rows for Ĥ(QMN) over the fixed loci QM(∞) and QM(0) at a divisor of degree deg_d."""
    h0, h1, _ = cohomology_dimensions(genus, ChiClass.trivial)
    # rk N_{Attr(0)} = −χ(C, M) by Riemann–Roch
    attracting_rank = -(deg_m + h0 - h1 // 2)
    det = determinant_twist(genus, chi.squared)
    canonical = LedgerWeight(k_exp=-det.k_exp, tate=-det.tate // 2)
    sub = (
        ("Attr(∞) normal bundle", LedgerWeight(tate=-2 * deg_d)),
        ("O(M) on the section", LedgerWeight(m_exp=1)),
        ("centering at deg L = −deg D", LedgerWeight(tate=2 * deg_d)),
        ("(Λ^top H•(C, χ²))^{−1/2}", canonical),
    )
    quot = (
        ("Attr(0) normal bundle", LedgerWeight(tate=-2 * attracting_rank)),
        ("O(M) on the section", LedgerWeight(m_exp=-1)),
        ("centering at deg L = deg M − deg D", LedgerWeight(tate=-2 * (deg_m - deg_d))),
        ("(Λ^top H•(C, χ²))^{−1/2}", canonical),
    )
    return sub, quot


def _half_top_h1(genus: int, chi: ChiClass) -> LedgerWeight:
    """(Λ^top H¹(C, χ²))^{1/2}: the determinant with H⁰ and H² split off."""
    dims = cohomology_dimensions(genus, chi.squared)
    det = determinant_twist(genus, chi.squared)
    return LedgerWeight(
        k_exp=det.k_exp,
        chi_exp=dims[0] + dims[2],
        tate=(det.tate - 2 * dims[2]) // 2,
    )


def _local_generators(m: int) -> tuple[Weight, Weight]:
    """Highest weights of the L_∞ and L₀ pieces of H¹_L(O(m))."""
    pieces = local_cohomology_character(m, -abs(m) - 2)
    return max(pieces.sub.terms), max(pieces.quot.terms)


def _spinor_rows(genus: int, chi: ChiClass) -> tuple[tuple[Row, ...], tuple[Row, ...]]:
    """Rows for σ_*(Ô_vir ⊗ O(M)): 1 ∈ Cliff for the sub, ∏ f<α_i> for the quotient."""
    delta = cohomology_dimensions(genus, chi.squared)[0]
    half = _half_top_h1(genus, chi)
    sub_0, quot_0 = _local_generators(0)
    sub_1, quot_1 = _local_generators(1)
    virtual = LedgerWeight(tate=-delta)
    sub = (
        ("Spin", LedgerWeight(k_exp=-half.k_exp, chi_exp=-half.chi_exp, tate=-half.tate)),
        ("Ô_vir = Spin⟪−δ⟫", virtual),
        ("O(M)", LedgerWeight(m_exp=sub_0.a - sub_1.a)),
        ("local cohomology", LedgerWeight(chi_exp=2 * delta, tate=-delta * sub_0.weight2)),
    )
    quot = (
        ("Spin", LedgerWeight(k_exp=-half.k_exp, chi_exp=-half.chi_exp, tate=half.tate)),
        ("Ô_vir = Spin⟪−δ⟫", virtual),
        ("O(M)", LedgerWeight(m_exp=quot_0.a - quot_1.a)),
        ("local cohomology", LedgerWeight(chi_exp=2 * delta, tate=-delta * quot_0.weight2)),
    )
    return sub, quot


def thm2_weight_ledger(genus: int, deg_m: int, chi: ChiClass) -> LedgerReport:
    """Moduli-side and spinor-side generator weights against χ(M⊗K⁻¹)⟪g−1⟫ and χ(M⁻¹⊗K⁻¹)⟪1−g⟫."""
    if genus < 0:
        raise InputError("genus must be nonnegative")
    if genus == 0 and chi is not ChiClass.trivial:
        raise InputError("P¹ has no nontrivial characters")
    moduli_sub, moduli_quot = _moduli_rows(genus, deg_m, chi, _generator_degree(genus, chi))
    spinor_sub, spinor_quot = _spinor_rows(genus, chi)
    report = LedgerReport(
        genus,
        deg_m,
        chi,
        moduli_sub,
        moduli_quot,
        spinor_sub,
        spinor_quot,
        LedgerWeight(m_exp=1, k_exp=-1, tate=genus - 1),
        LedgerWeight(m_exp=-1, k_exp=-1, tate=1 - genus),
    )
    for side, target in (("sub", report.target_sub), ("quot", report.target_quot)):
        for column in ("moduli", "spinor"):
            rows = getattr(report, f"{column}_{side}")
            got = LedgerReport.total(rows).expand(genus, deg_m, chi)
            want = target.expand(genus, deg_m, chi)
            if got != want:
                raise LedgerMismatch(
                    f"{column} {side} generator weight {got} differs from {want}",
                    {
                        "rows": [(label, str(weight)) for label, weight in rows],
                        "got": got,
                        "want": want,
                    },
                )
    return report


def _clifford_top(genus: int, chi: ChiClass) -> Weight | None:
    """Top weight of H•(S^•C, χ²), None when the module is not finite."""
    bound = 2 * genus
    character = symmetric_product_character(genus, bound, chi.squared)
    if character != symmetric_product_character(genus, bound + 1, chi.squared):
        return None
    return max(character.terms)


def exception_scan(
    g_max: int, span: int | None = None, chi: ChiClass = ChiClass.generic
) -> list[tuple[int, int]]:
    """(g, deg M) where h<p> could carry the quotient generator onto the sub cogenerator.

    Both classes are the top class of H•(S^nC, χ²): the cogenerator lies over
    deg L = −n in QM(∞), the quotient generator over deg L = deg M − n in QM(0). A class
    of degree k sits in Ĥ-degree k minus the Tate total of the moduli rows at deg D = n.
    When χ² is trivial the submodule is e<p>-free and there is no cogenerator.
    """
    collisions = []
    for genus in range(1, g_max + 1):
        top = _clifford_top(genus, chi)
        if top is None:
            continue
        bound = span if span is not None else 4 * genus
        for deg_m in range(-bound, bound + 1):
            sub, quot = _moduli_rows(genus, deg_m, chi, top.a)
            d_sub, d_quot = -top.a, deg_m - top.a
            degree_sub = top.degree - LedgerReport.total(sub).tate
            degree_quot = top.degree - LedgerReport.total(quot).tate
            if (
                d_quot + H_P.d_shift == d_sub
                and degree_quot + H_P.degree_shift == degree_sub
            ):
                _LOGGER.debug("collision at g=%d, deg M=%d, d=%d", genus, deg_m, d_sub)
                collisions.append((genus, deg_m))
    return collisions
