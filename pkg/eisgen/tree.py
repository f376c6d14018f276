"""Bruhat–Tits tree of PGL(2, F_q((t))) and the Birkhoff splitting of lattices.

A vertex is the homothety class of a lattice L ⊂ F_q((t))², written by the
basis columns of [[t^a, c], [0, t^b]] with c a polynomial of degree < a and
min(a, b, val c) = 0, so L ⊆ F_q[[t]]² and L ⊄ t·F_q[[t]]². The bundle of a
vertex glues the trivial bundle on P¹ minus the point t = 0 to L; its type is
k₁ − k₂ from the Birkhoff splitting of the basis matrix.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
import itertools
import logging
import random
from secrets import token_hex
from typing import Any

from .bun import BunFun, hecke_delta
from .const import TREE_PRECISION_CAP, TREE_PRECISION_SLACK
from .errors import CheckFailed, InputError
from .gf import Field, field_for_q

_LOGGER = logging.getLogger(__name__)


class PrecisionExceeded(InputError):
    """Exception when the t-adic working precision is too small."""


class SingularMatrix(InputError):
    """Exception when a matrix is not invertible over F_q((t))."""


class LaurentPoly(dict):
    """Finite Laurent polynomial in t over F_q: exponent ↦ nonzero coefficient."""

    def valuation(self) -> int | None:
        """Lowest exponent, None for zero."""
        return min(self) if self else None

    def pole_order(self) -> int:
        """Largest k with a t^{−k} term, 0 when there is none."""
        return max(0, -min(self)) if self else 0

    def below(self, bound: int) -> LaurentPoly:
        """Terms with exponent < bound."""
        return LaurentPoly({e: c for e, c in self.items() if e < bound})

    def shift(self, n: int) -> LaurentPoly:
        """t^n·f."""
        return LaurentPoly({e + n: c for e, c in self.items()})

    def to_json(self) -> dict[str, int]:
        """exponent ↦ coefficient with string keys."""
        return {str(e): c for e, c in sorted(self.items())}


@dataclass(frozen=True)
class LaurentMatrix:
    """2×2 matrix over F_q[t, t⁻¹], entries (m11, m12, m21, m22)."""

    entries: tuple[LaurentPoly, LaurentPoly, LaurentPoly, LaurentPoly]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Mapping[int, int]]]) -> LaurentMatrix:
        """Build from [[{exp: coeff}, ...], ...]."""
        (m11, m12), (m21, m22) = rows
        return cls(
            tuple(
                LaurentPoly({e: c for e, c in entry.items() if c})
                for entry in (m11, m12, m21, m22)
            )
        )

    def pole_order(self) -> int:
        """Largest pole order among the entries."""
        return max(entry.pole_order() for entry in self.entries)

    def shift(self, n: int) -> LaurentMatrix:
        """t^n·g."""
        return LaurentMatrix(tuple(entry.shift(n) for entry in self.entries))

    def columns(self) -> list[tuple[LaurentPoly, LaurentPoly]]:
        """The two columns as (top, bottom) pairs."""
        m11, m12, m21, m22 = self.entries
        return [(m11, m21), (m12, m22)]

    def is_integral(self) -> bool:
        """All exponents are nonnegative."""
        return all(not entry or min(entry) >= 0 for entry in self.entries)

    def is_antiintegral(self) -> bool:
        """All exponents are nonpositive."""
        return all(not entry or max(entry) <= 0 for entry in self.entries)

    def to_json(self) -> list[list[dict[str, int]]]:
        """Nested rows of exponent maps."""
        m11, m12, m21, m22 = self.entries
        return [[m11.to_json(), m12.to_json()], [m21.to_json(), m22.to_json()]]


class LaurentRing:
    """Arithmetic in F_q[t, t⁻¹] with optional truncation of high exponents."""

    def __init__(self, field: Field) -> None:
        """Bind the coefficient field."""
        self.field = field

    def make(self, terms: Mapping[int, int] | Iterable[tuple[int, int]]) -> LaurentPoly:
        """Collect terms, dropping zeros."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        result: dict[int, int] = {}
        for exponent, coeff in items:
            value = self.field.add(result.get(exponent, 0), coeff)
            if value:
                result[exponent] = value
            else:
                result.pop(exponent, None)
        return LaurentPoly(result)

    def monomial(self, exponent: int, coeff: int = 1) -> LaurentPoly:
        """coeff·t^exponent."""
        return self.make({exponent: coeff})

    def add(self, f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
        """f + g."""
        return self.make(itertools.chain(f.items(), g.items()))

    def neg(self, f: LaurentPoly) -> LaurentPoly:
        """−f."""
        return LaurentPoly({e: self.field.neg(c) for e, c in f.items()})

    def sub(self, f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
        """f − g."""
        return self.add(f, self.neg(g))

    def scale(self, f: LaurentPoly, coeff: int) -> LaurentPoly:
        """coeff·f."""
        return self.make({e: self.field.mul(c, coeff) for e, c in f.items()})

    def mul(self, f: LaurentPoly, g: LaurentPoly, below: int | None = None) -> LaurentPoly:
        """f·g, keeping exponents < below when given."""
        mul = self.field.mul
        return self.make(
            (e1 + e2, mul(c1, c2))
            for e1, c1 in f.items()
            for e2, c2 in g.items()
            if below is None or e1 + e2 < below
        )

    def series_inverse(self, unit: LaurentPoly, count: int) -> LaurentPoly:
        """w with unit·w ≡ 1 modulo t^count, for unit ∈ F_q[[t]]^×."""
        lead = unit.get(0, 0)
        if not lead or min(unit) < 0:
            raise InputError("not a unit of F_q[[t]]")
        field = self.field
        inv_lead = field.inv(lead)
        inverse: list[int] = []
        for n in range(count):
            if n == 0:
                inverse.append(inv_lead)
                continue
            acc = 0
            for i in range(1, n + 1):
                if i in unit:
                    acc = field.add(acc, field.mul(unit[i], inverse[n - i]))
            inverse.append(field.neg(field.mul(inv_lead, acc)))
        return self.make(enumerate(inverse))

    # Matrices

    def matmul(self, left: LaurentMatrix, right: LaurentMatrix) -> LaurentMatrix:
        """left·right."""
        a, b, c, d = left.entries
        e, f, g, h = right.entries
        return LaurentMatrix(
            (
                self.add(self.mul(a, e), self.mul(b, g)),
                self.add(self.mul(a, f), self.mul(b, h)),
                self.add(self.mul(c, e), self.mul(d, g)),
                self.add(self.mul(c, f), self.mul(d, h)),
            )
        )

    def det(self, matrix: LaurentMatrix) -> LaurentPoly:
        """Determinant."""
        a, b, c, d = matrix.entries
        return self.sub(self.mul(a, d), self.mul(b, c))

    def identity(self) -> LaurentMatrix:
        """The unit matrix."""
        return self.diagonal(0, 0)

    def diagonal(self, k1: int, k2: int) -> LaurentMatrix:
        """diag(t^{k1}, t^{k2})."""
        return LaurentMatrix(
            (self.monomial(k1), LaurentPoly(), LaurentPoly(), self.monomial(k2))
        )

    def upper(self, p: LaurentPoly) -> LaurentMatrix:
        """[[1, p], [0, 1]]."""
        return LaurentMatrix((self.monomial(0), p, LaurentPoly(), self.monomial(0)))

    def lower(self, p: LaurentPoly) -> LaurentMatrix:
        """[[1, 0], [p, 1]]."""
        return LaurentMatrix((self.monomial(0), LaurentPoly(), p, self.monomial(0)))

    def swap(self) -> LaurentMatrix:
        """[[0, 1], [1, 0]]."""
        return LaurentMatrix((LaurentPoly(), self.monomial(0), self.monomial(0), LaurentPoly()))


# Vertices


@dataclass(frozen=True, order=True)
class TreeVertex:
    """Lattice in the normal form [[t^a, c], [0, t^b]]; c holds coefficients of t^0..t^{a−1}."""

    a: int
    b: int
    c: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        """Check the normal form."""
        if self.a < 0 or self.b < 0 or len(self.c) != self.a:
            raise InputError("vertex needs a, b ≥ 0 and a coefficients for c")
        if self.a and self.b and not any(self.c[:1]):
            raise InputError("vertex lattice is not primitive")

    @property
    def distance(self) -> int:
        """Distance from the root F_q[[t]]²."""
        return self.a + self.b

    def offdiagonal(self) -> LaurentPoly:
        """c as a polynomial."""
        return LaurentPoly({i: v for i, v in enumerate(self.c) if v})

    def matrix(self) -> LaurentMatrix:
        """Basis matrix."""
        return LaurentMatrix(
            (
                LaurentPoly({self.a: 1}),
                self.offdiagonal(),
                LaurentPoly(),
                LaurentPoly({self.b: 1}),
            )
        )

    def label(self) -> str:
        """Compact text form."""
        digits = "".join(str(v) for v in self.c) or "-"
        return f"a={self.a},b={self.b},c={digits}"


ROOT = TreeVertex(0, 0, ())


def apartment_vertex(n: int) -> TreeVertex:
    """diag(t^n, 1), at distance n along the standard apartment."""
    return TreeVertex(n, 0, (0,) * n)


def _hnf(
    ring: LaurentRing,
    generators: Iterable[tuple[LaurentPoly, LaurentPoly]],
    precision: int,
) -> tuple[int, int, LaurentPoly]:
    """Normal form (a, b, c) of the F_q[[t]]-span of polynomial generators."""
    gens = [(x.below(precision), y.below(precision)) for x, y in generators]
    pivots = [(min(y), i) for i, (_, y) in enumerate(gens) if y]
    if not pivots:
        raise PrecisionExceeded(f"lattice is not visible at precision {precision}")
    b, index = min(pivots)
    x_pivot, y_pivot = gens.pop(index)
    inverse = ring.series_inverse(y_pivot.shift(-b), precision)
    x_pivot = ring.mul(x_pivot, inverse, below=precision)
    firsts = []
    for x, y in gens:
        factor = ring.mul(y.shift(-b), inverse, below=precision)
        reduced = ring.sub(x, ring.mul(factor, x_pivot, below=precision))
        if reduced:
            firsts.append(reduced)
    if not firsts:
        raise PrecisionExceeded(f"lattice is not visible at precision {precision}")
    a = min(min(x) for x in firsts)
    if a >= precision or b >= precision:
        raise PrecisionExceeded(f"normal form exponents ({a}, {b}) reach precision {precision}")
    return a, b, x_pivot.below(a)


def _primitive(a: int, b: int, c: LaurentPoly) -> TreeVertex:
    while a > 0 and b > 0 and (not c or min(c) > 0):
        a, b, c = a - 1, b - 1, c.shift(-1)
    return TreeVertex(a, b, tuple(c.get(i, 0) for i in range(a)))


def neighbors(vertex: TreeVertex, q: int, precision: int | None = None) -> list[TreeVertex]:
    """The q+1 classes of index-q sublattices tL ⊂ L′ ⊂ L."""
    field = field_for_q(q)
    ring = LaurentRing(field)
    precision = precision or vertex.distance + TREE_PRECISION_SLACK
    (x1, y1), (x2, y2) = vertex.matrix().columns()
    lines = [(1, y) for y in field.elements()] + [(0, 1)]
    result = []
    for x, y in lines:
        mixed = (
            ring.add(ring.scale(x1, x), ring.scale(x2, y)),
            ring.add(ring.scale(y1, x), ring.scale(y2, y)),
        )
        generators = [mixed, (x1.shift(1), y1.shift(1)), (x2.shift(1), y2.shift(1))]
        result.append(_primitive(*_hnf(ring, generators, precision)))
    return result


def act(h: LaurentMatrix, vertex: TreeVertex, q: int) -> TreeVertex:
    """h·L for h ∈ GL(2, F_q[t⁻¹])."""
    ring = LaurentRing(field_for_q(q))
    det = ring.det(h)
    if not h.is_antiintegral() or len(det) != 1 or 0 not in det:
        raise InputError("h must have t⁻¹-polynomial entries and constant determinant")
    moved = ring.matmul(h, vertex.matrix())
    lift = moved.pole_order()
    precision = vertex.distance + 2 * lift + TREE_PRECISION_SLACK
    return _primitive(*_hnf(ring, moved.shift(lift).columns(), precision))


# Birkhoff splitting


@dataclass(frozen=True)
class BirkhoffSplit:
    """g = minus · diag(t^{k1}, t^{k2}) · plus with k1 ≥ k2."""

    minus: LaurentMatrix
    k1: int
    k2: int
    plus: LaurentMatrix

    @property
    def bundle_type(self) -> int:
        """k1 − k2."""
        return self.k1 - self.k2

    def recompose(self, q: int) -> LaurentMatrix:
        """Multiply the three factors back together."""
        ring = LaurentRing(field_for_q(q))
        return ring.matmul(
            ring.matmul(self.minus, ring.diagonal(self.k1, self.k2)), self.plus
        )

    def to_json(self) -> dict[str, Any]:
        """Serialized factors."""
        return {
            "minus": self.minus.to_json(),
            "k1": self.k1,
            "k2": self.k2,
            "plus": self.plus.to_json(),
            "type": self.bundle_type,
        }


def _split_triangular(
    ring: LaurentRing, a: int, b: int, c: LaurentPoly, precision: int
) -> tuple[int, int, LaurentMatrix, LaurentMatrix]:
    """Diagonalize [[t^a, c], [0, t^b]]; returns (A, B, left ops, their inverse)."""
    left = inverse = ring.identity()
    while True:
        low = LaurentPoly({e: v for e, v in c.items() if e <= b})
        if low:
            step = low.shift(-b)
            left = ring.matmul(ring.upper(ring.neg(step)), left)
            inverse = ring.matmul(inverse, ring.upper(step))
            c = ring.sub(c, low)
        # Column operations over F_q[[t]] clear exponents ≥ a.
        c = c.below(a)
        if not c:
            return a, b, left, inverse
        j = min(c)
        if a - j > precision:
            raise PrecisionExceeded(f"splitting needs {a - j} terms at precision {precision}")
        c = ring.series_inverse(c.shift(-j), a - j).shift(b)
        left = ring.matmul(ring.swap(), left)
        inverse = ring.matmul(inverse, ring.swap())
        a, b = a + b - j, j


def _birkhoff_at(
    ring: LaurentRing, lifted: LaurentMatrix, lift: int, precision: int
) -> BirkhoffSplit:
    a, b, c = _hnf(ring, lifted.columns(), precision)
    k1, k2, left, inverse = _split_triangular(ring, a, b, c, precision)
    if k1 < k2:
        left = ring.matmul(ring.swap(), left)
        inverse = ring.matmul(inverse, ring.swap())
        k1, k2 = k2, k1
    plus = ring.matmul(ring.diagonal(-k1, -k2), ring.matmul(left, lifted))
    if not plus.is_integral() or min(ring.det(plus)) != 0:
        raise CheckFailed("Birkhoff splitting left a non-integral factor", plus.to_json())
    return BirkhoffSplit(inverse, k1 - lift, k2 - lift, plus)


def birkhoff_split(
    g: LaurentMatrix, q: int, precision: int | None = None
) -> BirkhoffSplit:
    """g₋ ∈ GL(2, F_q[t⁻¹]), g₊ ∈ GL(2, F_q[[t]]) with g = g₋·diag(t^{k1}, t^{k2})·g₊."""
    ring = LaurentRing(field_for_q(q))
    lift = g.pole_order()
    lifted = g.shift(lift)
    det = ring.det(lifted)
    if not det:
        raise SingularMatrix("matrix has zero determinant")
    working = precision or min(det) + TREE_PRECISION_SLACK
    while True:
        try:
            return _birkhoff_at(ring, lifted, lift, working)
        except PrecisionExceeded:
            if working >= TREE_PRECISION_CAP:
                raise
            raised = min(2 * working, TREE_PRECISION_CAP)
            _LOGGER.warning("Raising t-adic precision from %s to %s", working, raised)
            working = raised


def check_recomposition(g: LaurentMatrix, split: BirkhoffSplit, q: int) -> None:
    """Exact recomposition, factor shapes and k1 + k2 = val det g."""
    ring = LaurentRing(field_for_q(q))
    if split.recompose(q) != g:
        raise CheckFailed("Birkhoff factors do not recompose", g.to_json())
    minus_det = ring.det(split.minus)
    if not split.minus.is_antiintegral() or list(minus_det) != [0]:
        raise CheckFailed("g₋ is not invertible over F_q[t⁻¹]", split.minus.to_json())
    if split.k1 + split.k2 != min(ring.det(g)):
        raise CheckFailed("k1 + k2 differs from the valuation of det g", g.to_json())


def vertex_bundle_type(vertex: TreeVertex, q: int, precision: int | None = None) -> int:
    """Type k ≥ 0 of the bundle glued from the lattice."""
    return birkhoff_split(vertex.matrix(), q, precision).bundle_type


def neighbor_profile(vertex: TreeVertex, q: int) -> Counter[int]:
    """Multiset of neighbor types."""
    return Counter(vertex_bundle_type(w, q) for w in neighbors(vertex, q))


def expected_profile(k: int, q: int) -> Counter[int]:
    """{(q+1) × 1} at k = 0, else {1 × (k+1), q × (k−1)}."""
    if k == 0:
        return Counter({1: q + 1})
    return Counter({k + 1: 1, k - 1: q})


# Random elements


def _random_poly(
    ring: LaurentRing, rng: random.Random, degree: int, sign: int
) -> LaurentPoly:
    q = ring.field.q
    return ring.make((sign * i, rng.randrange(q)) for i in range(degree + 1))


def random_loop_element(q: int, degree: int, rng: random.Random, rounds: int = 3) -> LaurentMatrix:
    """Random product of elementary matrices over F_q[t⁻¹]."""
    ring = LaurentRing(field_for_q(q))
    result = ring.diagonal(0, 0)
    for _ in range(rounds):
        result = ring.matmul(result, ring.upper(_random_poly(ring, rng, degree, -1)))
        result = ring.matmul(result, ring.lower(_random_poly(ring, rng, degree, -1)))
    unit = LaurentMatrix(
        (ring.monomial(0, rng.randrange(1, q)), LaurentPoly(), LaurentPoly(), ring.monomial(0, 1))
    )
    return ring.matmul(result, unit)


def random_split_matrix(
    q: int, degree: int, rng: random.Random
) -> tuple[LaurentMatrix, int, int]:
    """h·diag(t^{k1}, t^{k2})·p with h over F_q[t⁻¹] and p over F_q[t]; returns (g, k1, k2)."""
    ring = LaurentRing(field_for_q(q))
    k2 = rng.randrange(-degree, degree + 1)
    k1 = k2 + rng.randrange(0, degree + 1)
    plus = ring.identity()
    for _ in range(2):
        plus = ring.matmul(plus, ring.upper(_random_poly(ring, rng, degree, 1)))
        plus = ring.matmul(plus, ring.lower(_random_poly(ring, rng, degree, 1)))
    minus = random_loop_element(q, degree, rng)
    return ring.matmul(ring.matmul(minus, ring.diagonal(k1, k2)), plus), k1, k2


def brute_force_types(g: LaurentMatrix, q: int, max_degree: int) -> set[int]:
    """Types |v1 − v2| found by searching g₋⁻¹ among t⁻¹-polynomial matrices of bounded degree."""
    field = field_for_q(q)
    ring = LaurentRing(field)
    target = min(ring.det(g))
    polys = [
        ring.make((-i, coeff) for i, coeff in enumerate(coeffs))
        for coeffs in itertools.product(field.elements(), repeat=max_degree + 1)
    ]
    found = set()
    for entries in itertools.product(polys, repeat=4):
        candidate = LaurentMatrix(entries)
        det = ring.det(candidate)
        if list(det) != [0]:
            continue
        rows = ring.matmul(candidate, g).entries
        top = [e for e in rows[:2] if e]
        bottom = [e for e in rows[2:] if e]
        if not top or not bottom:
            continue
        v1 = min(min(e) for e in top)
        v2 = min(min(e) for e in bottom)
        if v1 + v2 == target:
            found.add(abs(v1 - v2))
    return found


# Exploration


def _parallel_map(func: Callable[[Any], Any], items: list[Any], jobs: int) -> list[Any]:
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _neighbors_task(q: int, precision: int, vertex: TreeVertex) -> list[TreeVertex]:
    return neighbors(vertex, q, precision)


def _type_task(q: int, vertex: TreeVertex) -> int:
    return vertex_bundle_type(vertex, q)


@dataclass
class TreeExploration:
    """Ball of radius depth around the root with adjacency of its interior."""

    q: int
    depth: int
    precision: int
    distance: dict[TreeVertex, int]
    adjacency: dict[TreeVertex, tuple[TreeVertex, ...]]
    types: dict[TreeVertex, int] = field(default_factory=dict)

    def sphere(self, n: int) -> list[TreeVertex]:
        """Vertices at distance n, sorted."""
        return sorted(v for v, d in self.distance.items() if d == n)

    def sphere_sizes(self) -> list[int]:
        """|S_n| for 0 ≤ n ≤ depth."""
        return [len(self.sphere(n)) for n in range(self.depth + 1)]

    def type_histogram(self) -> dict[int, dict[int, int]]:
        """Per sphere, type ↦ number of vertices."""
        return {
            n: dict(sorted(Counter(self.types[v] for v in self.sphere(n)).items()))
            for n in range(self.depth + 1)
        }

    def profile(self, vertex: TreeVertex) -> Counter[int]:
        """Neighbor types of an interior vertex."""
        return Counter(self.types[w] for w in self.adjacency[vertex])

    def to_json(self, profile: bool = False) -> dict[str, Any]:
        """Spheres, and per vertex the type and neighbor multiset when classified."""
        payload: dict[str, Any] = {
            "q": self.q,
            "depth": self.depth,
            "precision": self.precision,
            "sphere_sizes": self.sphere_sizes(),
        }
        if self.types:
            payload["type_histogram"] = {
                str(n): {str(k): v for k, v in hist.items()}
                for n, hist in self.type_histogram().items()
            }
            vertices = []
            for vertex in sorted(self.distance):
                entry: dict[str, Any] = {
                    "vertex": vertex.label(),
                    "distance": self.distance[vertex],
                    "type": self.types[vertex],
                }
                if profile and vertex in self.adjacency:
                    entry["neighbor_types"] = sorted(self.profile(vertex).elements())
                vertices.append(entry)
            payload["vertices"] = vertices
        return payload


def _check_ball(ball: TreeExploration) -> None:
    q = ball.q
    for vertex, nbrs in ball.adjacency.items():
        d = ball.distance[vertex]
        if len(set(nbrs)) != q + 1:
            raise CheckFailed(f"{vertex.label()} has {len(set(nbrs))} neighbors", vertex)
        children = sum(1 for w in nbrs if ball.distance[w] == d + 1)
        parents = sum(1 for w in nbrs if ball.distance[w] == d - 1)
        if (d == 0 and children != q + 1) or (d > 0 and (children != q or parents != 1)):
            raise CheckFailed(f"{vertex.label()} breaks the tree structure", vertex)
        for w in nbrs:
            if w in ball.adjacency and vertex not in ball.adjacency[w]:
                raise CheckFailed("adjacency is not symmetric", (vertex, w))
    for vertex, d in ball.distance.items():
        if vertex.distance != d:
            raise CheckFailed(f"{vertex.label()} reached at distance {d}", vertex)
    for n, size in enumerate(ball.sphere_sizes()):
        expected = 1 if n == 0 else (q + 1) * q ** (n - 1)
        if size != expected:
            raise CheckFailed(f"sphere {n} has {size} vertices, expected {expected}", n)


def explore(q: int, depth: int, jobs: int = 1, classify: bool = False) -> TreeExploration:
    """Breadth-first ball of radius depth; classification optional."""
    if depth < 0:
        raise InputError("depth must be nonnegative")
    precision = depth + TREE_PRECISION_SLACK
    if precision > TREE_PRECISION_CAP:
        raise PrecisionExceeded(f"depth {depth} exceeds the precision cap {TREE_PRECISION_CAP}")
    log_id = token_hex(2)
    _LOGGER.debug("[%s] Exploring the tree over F_%s to depth %s", log_id, q, depth)
    distance = {ROOT: 0}
    adjacency: dict[TreeVertex, tuple[TreeVertex, ...]] = {}
    layer = [ROOT]
    for n in range(depth):
        found = _parallel_map(partial(_neighbors_task, q, precision), layer, jobs)
        following = []
        for vertex, nbrs in zip(layer, found):
            adjacency[vertex] = tuple(nbrs)
            for w in nbrs:
                if w not in distance:
                    distance[w] = n + 1
                    following.append(w)
        layer = sorted(following)
        _LOGGER.debug("[%s] Sphere %s has %s vertices", log_id, n + 1, len(layer))
    ball = TreeExploration(q, depth, precision, distance, adjacency)
    _check_ball(ball)
    if classify:
        vertices = sorted(distance)
        ball.types = dict(
            zip(vertices, _parallel_map(partial(_type_task, q), vertices, jobs))
        )
        for vertex in vertices:
            if ball.types[vertex] % 2 != vertex.distance % 2:
                raise CheckFailed(f"type parity differs from distance at {vertex.label()}", vertex)
    return ball


def tree_hecke_check(
    q: int, depth: int, jobs: int = 1, ball: TreeExploration | None = None
) -> dict[int, Counter[int]]:
    """Neighbor sums through vertex types reproduce Δ = q·f(k−1) + f(k+1)."""
    if ball is None or not ball.types:
        ball = explore(q, depth, jobs, classify=True)
    profiles: dict[int, Counter[int]] = {}
    for vertex in ball.adjacency:
        k = ball.types[vertex]
        observed = ball.profile(vertex)
        if profiles.setdefault(k, observed) != observed:
            raise CheckFailed(f"type {k} vertices have different neighbor types", vertex)
    for k, observed in profiles.items():
        if observed != expected_profile(k, q):
            raise CheckFailed(f"type {k} neighbor rule fails", dict(observed))
        for m in set(observed) | {k + 1, abs(k - 1)}:
            value = hecke_delta(BunFun.delta(m))[k]
            realized = value.fraction_at(q) if value else 0
            if realized != observed[m]:
                raise CheckFailed(f"tree Δδ_{m} at type {k} is {observed[m]}, not {realized}", m)
    return dict(sorted(profiles.items()))


def ray_types(q: int, choices: Sequence[int]) -> list[int]:
    """Types along the non-backtracking path picking neighbor choices[i] mod the options."""
    path = [ROOT]
    previous: TreeVertex | None = None
    for choice in choices:
        current = path[-1]
        options = sorted(
            w
            for w in neighbors(current, q, len(choices) + TREE_PRECISION_SLACK)
            if w != previous
        )
        previous = current
        path.append(options[choice % len(options)])
    types = [vertex_bundle_type(v, q) for v in path]
    for left, right in zip(types, types[1:]):
        if abs(left - right) != 1:
            raise CheckFailed("adjacent vertices differ in type by more than one", types)
    return types
