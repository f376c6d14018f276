"""Finite fields, binary forms and projective point counts."""
from __future__ import annotations

from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
import itertools
import logging
from secrets import token_hex
from typing import Any

import numpy as np
import sympy

from .const import DEFAULT_BUDGET, FERMAT_CHECK_LIMIT, MAX_FIELD_SIZE
from .errors import CheckFailed, InputError

_LOGGER = logging.getLogger(__name__)

# Field sizes up to this bound get full addition and multiplication tables.
FULL_TABLE_LIMIT = 256

Form = tuple[int, ...]


class NotPrime(InputError):
    """Exception when the characteristic is not prime."""


class TooLarge(InputError):
    """Exception when the field would exceed the supported size."""


class BudgetExceeded(InputError):
    """Exception when an enumeration would exceed the configured budget."""


def _is_irreducible(p: int, tail: Sequence[int]) -> bool:
    coeffs = [1, *reversed(tail)]
    return sympy.Poly(coeffs, sympy.Symbol("X"), modulus=p).is_irreducible


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Least monic irreducible of degree k over F_p, coefficients low to high.

    Tails are enumerated as integers whose base-p digits are c_0, c_1, ...
    with c_0 least significant.
    """
    for index in range(p**k):
        tail = tuple((index // p**i) % p for i in range(k))
        if _is_irreducible(p, tail):
            return (*tail, 1)
    raise CheckFailed(f"no irreducible polynomial of degree {k} over F_{p}")


class Field:
    """F_q with q = p^k; elements are ints whose base-p digits are coefficients."""

    def __init__(self, p: int, k: int, modulus: tuple[int, ...]) -> None:
        """Build the lookup tables for the field."""
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._digits = [
            tuple((e // p**i) % p for i in range(k)) for e in range(self.q)
        ]
        self.generator = self._find_generator()
        self._exp = [1] * (2 * (self.q - 1))
        self._log = [0] * self.q
        value = 1
        for i in range(self.q - 1):
            self._exp[i] = value
            self._exp[i + self.q - 1] = value
            self._log[value] = i
            value = self._slow_mul(value, self.generator)
        self._add_table: list[list[int]] | None = None
        self._mul_table: list[list[int]] | None = None
        if self.q <= FULL_TABLE_LIMIT:
            digits = np.array(self._digits, dtype=np.int64).reshape(self.q, k)
            weights = p ** np.arange(k, dtype=np.int64)
            sums = (digits[:, None, :] + digits[None, :, :]) % p
            self._add_table = (sums @ weights).tolist()
            self._mul_table = [
                [self._table_mul(a, b) for b in range(self.q)] for a in range(self.q)
            ]

    def __repr__(self) -> str:
        return f"Field(p={self.p}, k={self.k}, modulus={self.modulus})"

    def __reduce__(self) -> tuple[Any, ...]:
        return make_field, (self.p, self.k)

    # Construction helpers

    def _from_digits(self, digits: Sequence[int]) -> int:
        return sum(d * self.p**i for i, d in enumerate(digits))

    def _slow_mul(self, a: int, b: int) -> int:
        """Schoolbook product modulo the monic modulus."""
        p, k = self.p, self.k
        da, db = self._digits[a], self._digits[b]
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for top in range(len(prod) - 1, k - 1, -1):
            c = prod[top]
            if c:
                for i in range(k + 1):
                    prod[top - k + i] = (prod[top - k + i] - c * self.modulus[i]) % p
        return self._from_digits(prod[:k])

    def _slow_pow(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            n >>= 1
        return result

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        order = self.q - 1
        primes = sympy.primefactors(order)
        for candidate in range(2, self.q):
            if all(self._slow_pow(candidate, order // r) != 1 for r in primes):
                return candidate
        raise CheckFailed(f"F_{self.q} has no multiplicative generator")

    def _table_mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    # Arithmetic

    def elements(self) -> range:
        """All field elements."""
        return range(self.q)

    def units(self) -> range:
        """All nonzero elements."""
        return range(1, self.q)

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime field."""
        return n % self.p

    def add(self, a: int, b: int) -> int:
        """a + b."""
        if self._add_table is not None:
            return self._add_table[a][b]
        p = self.p
        return self._from_digits(
            [(x + y) % p for x, y in zip(self._digits[a], self._digits[b])]
        )

    def neg(self, a: int) -> int:
        """−a."""
        p = self.p
        return self._from_digits([(-x) % p for x in self._digits[a]])

    def sub(self, a: int, b: int) -> int:
        """a − b."""
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        """a·b."""
        if self._mul_table is not None:
            return self._mul_table[a][b]
        return self._table_mul(a, b)

    def inv(self, a: int) -> int:
        """a⁻¹."""
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        """a/b."""
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        """a^n, negative n allowed for units."""
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("zero has no inverse")
            return 0 if n else 1
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frobenius(self, a: int) -> int:
        """a^p."""
        return self.pow(a, self.p)

    def fermat_check(self) -> bool:
        """x^q = x for every element; only run for small fields."""
        if self.q > FERMAT_CHECK_LIMIT:
            raise TooLarge(f"Fermat check limited to q ≤ {FERMAT_CHECK_LIMIT}")
        return all(self.pow(x, self.q) == x for x in self.elements())

    # Polynomials as tuples of coefficients, low to high

    def poly_trim(self, f: Sequence[int]) -> Form:
        """Drop trailing zero coefficients."""
        end = len(f)
        while end and f[end - 1] == 0:
            end -= 1
        return tuple(f[:end])

    def poly_divmod(self, f: Sequence[int], g: Sequence[int]) -> tuple[Form, Form]:
        """Quotient and remainder of f by g."""
        g = self.poly_trim(g)
        if not g:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.poly_trim(f))
        lead_inv = self.inv(g[-1])
        quot = [0] * max(len(rem) - len(g) + 1, 0)
        while len(rem) >= len(g):
            c = self.mul(rem[-1], lead_inv)
            shift = len(rem) - len(g)
            quot[shift] = c
            for i, y in enumerate(g):
                rem[shift + i] = self.sub(rem[shift + i], self.mul(c, y))
            rem = list(self.poly_trim(rem))
        return tuple(quot), tuple(rem)

    def poly_gcd(self, f: Sequence[int], g: Sequence[int]) -> Form:
        """Monic gcd; gcd(0, 0) is the empty tuple."""
        f, g = self.poly_trim(f), self.poly_trim(g)
        while g:
            f, g = g, self.poly_divmod(f, g)[1]
        if not f:
            return f
        lead_inv = self.inv(f[-1])
        return tuple(self.mul(c, lead_inv) for c in f)

    def poly_eval(self, f: Sequence[int], x: int) -> int:
        """Horner evaluation."""
        acc = 0
        for c in reversed(f):
            acc = self.add(self.mul(acc, x), c)
        return acc


@lru_cache(maxsize=64)
def make_field(p: int, k: int = 1) -> Field:
    """F_{p^k} with the least irreducible modulus."""
    if not sympy.isprime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise InputError("extension degree must be positive")
    if p**k > MAX_FIELD_SIZE:
        raise TooLarge(f"{p}^{k} exceeds {MAX_FIELD_SIZE}")
    modulus = least_irreducible(p, k)
    _LOGGER.debug("Built F_%s with modulus %s", p**k, modulus)
    return Field(p, k, modulus)


def field_for_q(q: int) -> Field:
    """F_q for a prime power q."""
    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise NotPrime(f"{q} is not a prime power")
    ((p, k),) = factors.items()
    return make_field(p, k)


# Binary forms


def normalized_forms(field: Field, degree: int) -> Iterator[Form]:
    """Nonzero forms of the given degree whose top nonzero coefficient is 1."""
    for top in range(degree + 1):
        for lower in itertools.product(field.elements(), repeat=top):
            yield (*lower, 1, *([0] * (degree - top)))


def _coprime(field: Field, f: Form, g: Form) -> bool:
    """No common zero on P¹, including [1:0], for forms given by their coefficients."""
    if f[-1] == 0 and g[-1] == 0:
        return False
    common = field.poly_gcd(f, g)
    return len(common) == 1


def pair_budget(q: int, deg_f: int, deg_g: int) -> int:
    """Number of candidate pairs an enumeration visits."""
    return q ** (deg_f + 1) * (q ** (deg_g + 1) - 1) // (q - 1)


def _check_budget(field: Field, deg_f: int, deg_g: int, budget: int | None) -> None:
    needed = pair_budget(field.q, deg_f, deg_g)
    limit = DEFAULT_BUDGET if budget is None else budget
    if needed > limit:
        raise BudgetExceeded(
            f"enumeration of degrees ({deg_f}, {deg_g}) over F_{field.q} needs "
            f"{needed} candidates, budget is {limit}"
        )


def iter_coprime_form_pairs(
    field: Field, deg_f: int, deg_g: int, top: int | None = None
) -> Iterator[tuple[Form, Form]]:
    """Coprime (F, G) with G normalized; optionally restricted to F's top coefficient."""
    if deg_f < 0 or deg_g < 0:
        raise InputError("form degrees must be nonnegative")
    tops = field.elements() if top is None else (top,)
    g_forms = list(normalized_forms(field, deg_g))
    for lead in tops:
        for lower in itertools.product(field.elements(), repeat=deg_f):
            f = (*lower, lead)
            for g in g_forms:
                if _coprime(field, f, g):
                    yield f, g


def _count_chunk(p: int, k: int, deg_f: int, deg_g: int, top: int) -> int:
    field = make_field(p, k)
    return sum(1 for _ in iter_coprime_form_pairs(field, deg_f, deg_g, top))


def enumerate_coprime_form_pairs(
    field: Field,
    deg_f: int,
    deg_g: int,
    budget: int | None = None,
    jobs: int = 1,
) -> int:
    """Count coprime pairs of binary forms of exact degrees up to common scalar."""
    _check_budget(field, deg_f, deg_g, budget)
    log_id = token_hex(2)
    _LOGGER.debug(
        "[%s] Counting coprime pairs (%s, %s) over F_%s with %s jobs",
        log_id,
        deg_f,
        deg_g,
        field.q,
        jobs,
    )
    tops = list(field.elements())
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(
                pool.map(
                    _count_chunk,
                    *zip(*[(field.p, field.k, deg_f, deg_g, t) for t in tops]),
                )
            )
    else:
        counts = [_count_chunk(field.p, field.k, deg_f, deg_g, t) for t in tops]
    total = sum(counts)
    _LOGGER.debug("[%s] Found %s pairs", log_id, total)
    return total


def common_factor_count(q: int, degree: int) -> int:
    """Number of nonzero forms of a degree up to scalar."""
    return (q ** (degree + 1) - 1) // (q - 1)


def sieve_check(
    field: Field, deg_f: int, deg_g: int, budget: int | None = None
) -> tuple[int, int]:
    """(all pairs with G ≠ 0 up to scalar, Σ_e coprime·common factors)."""
    if deg_f < deg_g:
        raise InputError("the sieve identity needs deg F ≥ deg G")
    q = field.q
    everything = q ** (deg_f + 1) * common_factor_count(q, deg_g)
    sieved = sum(
        enumerate_coprime_form_pairs(field, deg_f - e, deg_g - e, budget)
        * common_factor_count(q, e)
        for e in range(deg_g + 1)
    )
    if everything != sieved:
        raise CheckFailed(
            f"sieve identity fails at degrees ({deg_f}, {deg_g}) over F_{q}",
            (everything, sieved),
        )
    return everything, sieved


# Plane curves


def _terms(f_hom: Any) -> list[tuple[int, int, int, int]]:
    x, y, z = sympy.symbols("x y z")
    poly = f_hom if isinstance(f_hom, sympy.Poly) else sympy.Poly(f_hom, x, y, z)
    if poly.is_zero:
        return []
    if not poly.is_homogeneous:
        raise InputError(f"{poly.as_expr()} is not homogeneous")
    terms = []
    for (i, j, l), coeff in poly.terms():
        if not coeff.is_Integer:
            raise InputError("plane models need integer coefficients")
        terms.append((int(coeff), i, j, l))
    return terms


def projective_representatives(field: Field) -> Iterator[tuple[int, int, int]]:
    """(1, y, z), (0, 1, z), (0, 0, 1)."""
    for y in field.elements():
        for z in field.elements():
            yield 1, y, z
    for z in field.elements():
        yield 0, 1, z
    yield 0, 0, 1


def count_projective_zeros(f_hom: Any, field: Field, n: int = 1) -> int:
    """Points of {F = 0} in P²(F_{q^n}) by exhaustive enumeration."""
    if n < 1:
        raise InputError("extension degree must be positive")
    ext = make_field(field.p, field.k * n)
    terms = [
        (ext.from_int(c), i, j, l)
        for c, i, j, l in _terms(f_hom)
        if c % field.p
    ]
    if not terms:
        return ext.q**2 + ext.q + 1
    count = 0
    for x, y, z in projective_representatives(ext):
        acc = 0
        for c, i, j, l in terms:
            value = ext.mul(
                c, ext.mul(ext.pow(x, i), ext.mul(ext.pow(y, j), ext.pow(z, l)))
            )
            acc = ext.add(acc, value)
        if acc == 0:
            count += 1
    _LOGGER.debug("Counted %s points over F_%s", count, ext.q)
    return count
