"""Exact scalars and rational functions over Q(q^{1/2})."""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
import logging
import math
import re
from typing import Any

import sympy
from sympy import QQ, ZZ, Poly, Symbol

from .const import VARIABLES
from .errors import CheckFailed, InputError
from .models import LaurentTailModel, RatFunModel, ScalarQModel

_LOGGER = logging.getLogger(__name__)

SQRT_Q = Symbol("q_half", positive=True)
QS = QQ.frac_field(SQRT_Q)
SYMBOLS: dict[str, Symbol] = {name: Symbol(name) for name in VARIABLES}

AT_INFINITY = "inf"
AT_ZERO = "0"


class ExpressionSyntaxError(InputError):
    """Exception when an expression does not match the grammar."""

    def __init__(self, message: str, position: int) -> None:
        """Record where parsing stopped."""
        super().__init__(f"{message} at position {position}")
        self.position = position


class DivisionByZeroExpression(InputError):
    """Exception when an expression divides by zero."""


class NotAPole(InputError):
    """Exception when a residue is requested away from the poles."""


class PoleOnContour(InputError):
    """Exception when a pole sits exactly on the integration contour."""

    def __init__(self, place: Place) -> None:
        """Name the offending place."""
        super().__init__(f"pole {place.describe()} lies on the contour")
        self.place = place


class UnclassifiedPlace(InputError):
    """Exception when the magnitude of a pole cannot be decided."""


def _scalar_from_expr(expr: Any):
    try:
        return QS.from_sympy(sympy.cancel(sympy.sympify(expr)))
    except (sympy.CoercionFailed, sympy.PolificationFailed) as err:
        raise InputError(f"{expr} is not a rational function of q^(1/2)") from err


class ScalarQ:
    """Exact element of Q(q^{1/2}), i.e. f(q) + g(q)·q^{1/2}."""

    __slots__ = ("_value",)

    def __init__(self, value: Any = 0) -> None:
        """Coerce ints, fractions, sympy expressions and field elements."""
        if isinstance(value, ScalarQ):
            value = value._value
        elif isinstance(value, bool):
            raise TypeError("bool is not a scalar")
        elif isinstance(value, int):
            value = QS.convert(value)
        elif isinstance(value, Fraction):
            value = QS.convert(sympy.Rational(value.numerator, value.denominator))
        elif isinstance(value, sympy.Basic):
            value = _scalar_from_expr(value)
        elif not QS.of_type(value):
            raise TypeError(f"cannot build a scalar from {type(value).__name__}")
        self._value = value

    @classmethod
    def _coerce(cls, other: Any) -> ScalarQ | None:
        if isinstance(other, ScalarQ):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return cls(other)
        return None

    @property
    def value(self):
        """The underlying field element."""
        return self._value

    def to_expr(self) -> sympy.Expr:
        """Sympy expression in q^{1/2}."""
        return QS.to_sympy(self._value)

    def is_zero(self) -> bool:
        """True for the zero scalar."""
        return self._value == QS.zero

    def __bool__(self) -> bool:
        """Nonzero scalars are truthy."""
        return not self.is_zero()

    def __add__(self, other: Any) -> ScalarQ:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return ScalarQ(self._value + other._value)

    __radd__ = __add__

    def __sub__(self, other: Any) -> ScalarQ:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return ScalarQ(self._value - other._value)

    def __rsub__(self, other: Any) -> ScalarQ:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return ScalarQ(other._value - self._value)

    def __mul__(self, other: Any) -> ScalarQ:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return ScalarQ(self._value * other._value)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> ScalarQ:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero scalar")
        return ScalarQ(self._value / other._value)

    def __rtruediv__(self, other: Any) -> ScalarQ:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return other / self

    def __neg__(self) -> ScalarQ:
        return ScalarQ(-self._value)

    def __pow__(self, exponent: int) -> ScalarQ:
        if exponent < 0 and self.is_zero():
            raise ZeroDivisionError("negative power of zero")
        return ScalarQ(self._value**exponent)

    def __eq__(self, other: object) -> bool:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return self._value == other._value

    def __hash__(self) -> int:
        return hash(self.to_expr())

    def __repr__(self) -> str:
        return f"ScalarQ({self.to_text()})"

    def __str__(self) -> str:
        return self.to_text()

    def conjugate_root(self) -> ScalarQ:
        """Apply q^{1/2} ↦ −q^{1/2}."""
        return ScalarQ(self.to_expr().subs(SQRT_Q, -SQRT_Q))

    def parts(self) -> tuple[ScalarQ, ScalarQ]:
        """Split into (E, O) with self = E + O·q^{1/2}, both functions of q."""
        flipped = self.conjugate_root()
        even = (self + flipped) / 2
        odd = (self - flipped) / (2 * Q_HALF)
        return even, odd

    def half_tag(self) -> int | None:
        """0 or 1 for homogeneous scalars, None for mixed ones."""
        even, odd = self.parts()
        if odd.is_zero():
            return 0
        if even.is_zero():
            return 1
        return None

    def at(self, q: int) -> sympy.Expr:
        """Exact value at a concrete q, an element of Q(√q)."""
        even, odd = self.parts()
        root = sympy.sqrt(q)
        value = sympy.nsimplify(
            even.to_expr().subs(SQRT_Q, root) + root * odd.to_expr().subs(SQRT_Q, root)
        )
        if value.has(sympy.zoo, sympy.nan, sympy.oo):
            raise InputError(f"{self} has a pole at q = {q}")
        return sympy.radsimp(value)

    def fraction_at(self, q: int) -> Fraction:
        """Exact rational value at q; fails when √q survives."""
        value = self.at(q)
        if not value.is_Rational:
            raise InputError(f"{self} is irrational at q = {q}")
        return Fraction(int(value.p), int(value.q))

    def float_at(self, q: int) -> float:
        """Advisory floating point value."""
        return float(self.at(q))

    def is_positive_for_q_gt_1(self) -> bool:
        """Sign analysis on q^{1/2} > 1 through the real roots of num and den."""
        if self.is_zero():
            return False
        num, den = sympy.fraction(sympy.cancel(self.to_expr()))
        for part in (num, den):
            poly = Poly(part, SQRT_Q)
            if poly.is_ground:
                continue
            if any(bool(root > 1) for root in poly.real_roots()):
                return False
        return bool(self.to_expr().subs(SQRT_Q, 2) > 0)

    # Serialization

    def to_json(self) -> dict[str, Any]:
        """Canonical JSON: homogeneous map or a sum of two."""
        even, odd = self.parts()
        if odd.is_zero():
            return _even_to_json(even, 0)
        if even.is_zero():
            return _even_to_json(odd, 1)
        return {"sum": [_even_to_json(even, 0), _even_to_json(odd, 1)]}

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> ScalarQ:
        """Inverse of to_json."""
        model = ScalarQModel.parse_obj(payload)
        if model.sum is not None:
            return sum((cls.from_json(part.dict()) for part in model.sum), cls(0))
        num = _map_to_expr(model.num)
        den = _map_to_expr(model.den)
        if den == 0:
            raise DivisionByZeroExpression("zero denominator in scalar payload")
        return cls(num / den * SQRT_Q**model.half_q)

    def to_text(self) -> str:
        """Text that parse_expr reads back to the same scalar."""
        even, odd = self.parts()
        pieces = []
        if not even.is_zero():
            pieces.append(_even_to_text(even))
        if not odd.is_zero():
            pieces.append(f"q^(1/2)*{_even_to_text(odd)}")
        if not pieces:
            return "0"
        return " + ".join(pieces)


def _even_maps(scalar: ScalarQ) -> tuple[dict[int, int], dict[int, int]]:
    """Integer coefficient maps (in powers of q) of an even scalar."""
    num, den = sympy.fraction(sympy.cancel(scalar.to_expr()))
    num_poly = Poly(num, SQRT_Q, domain=QQ)
    den_poly = Poly(den, SQRT_Q, domain=QQ)
    coefficients = [
        *(Fraction(str(c)) for c in num_poly.coeffs()),
        *(Fraction(str(c)) for c in den_poly.coeffs()),
    ]
    scale = math.lcm(*(c.denominator for c in coefficients))
    content = math.gcd(*(int(c * scale) for c in coefficients))
    sign = -1 if den_poly.LC() < 0 else 1
    factor = Fraction(sign * scale, content)

    def _as_map(poly: Poly) -> dict[int, int]:
        result = {}
        for (degree,), coeff in poly.terms():
            if degree % 2:
                raise CheckFailed("odd power of q^(1/2) in an even scalar", scalar)
            result[degree // 2] = int(Fraction(str(coeff)) * factor)
        return result

    return _as_map(num_poly), _as_map(den_poly)


def _even_to_json(scalar: ScalarQ, half_q: int) -> dict[str, Any]:
    num, den = _even_maps(scalar)
    return {
        "num": {str(k): str(v) for k, v in sorted(num.items())},
        "den": {str(k): str(v) for k, v in sorted(den.items())},
        "half_q": half_q,
    }


def _map_to_expr(coefficients: Mapping[int, int]) -> sympy.Expr:
    return sum(
        (sympy.Integer(c) * SQRT_Q ** (2 * k) for k, c in coefficients.items()),
        sympy.Integer(0),
    )


def _q_poly_text(coefficients: Mapping[int, int]) -> str:
    terms = []
    for power, coeff in sorted(coefficients.items(), reverse=True):
        if power == 0:
            terms.append(str(coeff))
        elif power == 1:
            terms.append(f"{coeff}*q")
        else:
            terms.append(f"{coeff}*q^{power}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _even_to_text(scalar: ScalarQ) -> str:
    num, den = _even_maps(scalar)
    if den == {0: 1}:
        return f"({_q_poly_text(num)})"
    return f"({_q_poly_text(num)})/({_q_poly_text(den)})"


Q_HALF = ScalarQ(SQRT_Q)
Q = Q_HALF**2
ZERO = ScalarQ(0)
ONE = ScalarQ(1)


def q_power(half_exponent: int) -> ScalarQ:
    """q^{n/2} as a scalar."""
    return Q_HALF**half_exponent


@dataclass(frozen=True)
class LaurentTail:
    """Truncated Laurent expansion of a rational function at 0 or ∞."""

    at: str
    leading_exponent: int
    coefficients: tuple[ScalarQ, ...]
    order: int
    exact: bool

    def exponent(self, index: int) -> int:
        """Exponent carried by the index-th coefficient."""
        if self.at == AT_INFINITY:
            return self.leading_exponent - index
        return self.leading_exponent + index

    def terms(self) -> Iterator[tuple[int, ScalarQ]]:
        """(exponent, coefficient) pairs in expansion order."""
        for index, coeff in enumerate(self.coefficients):
            yield self.exponent(index), coeff

    def coefficient(self, exponent: int) -> ScalarQ:
        """Coefficient of var^exponent, when the tail reaches it."""
        if self.at == AT_INFINITY:
            index = self.leading_exponent - exponent
        else:
            index = exponent - self.leading_exponent
        if index < 0:
            return ZERO
        if index >= len(self.coefficients):
            if self.exact:
                return ZERO
            raise InputError(f"exponent {exponent} lies beyond the truncation order")
        return self.coefficients[index]

    def to_json(self) -> dict[str, Any]:
        """JSON payload of the tail."""
        return LaurentTailModel(
            at=self.at,
            leading_exponent=self.leading_exponent,
            order=self.order,
            exact=self.exact,
            coefficients=[c.to_json() for c in self.coefficients],
        ).dict()


def _integral_poly(expr: sympy.Expr, symbol: Symbol) -> tuple[int, Poly]:
    poly = Poly(expr, symbol, SQRT_Q, domain=QQ)
    denominator, poly = poly.clear_denoms(convert=True)
    return int(denominator), poly


def _series_divide(
    num: list, den: list, count: int
) -> list:  # coefficient lists over QS, den[0] != 0
    result = []
    for j in range(count):
        acc = num[j] if j < len(num) else QS.zero
        for i in range(1, min(j, len(den) - 1) + 1):
            acc -= den[i] * result[j - i]
        result.append(acc / den[0])
    return result


class RatFun:
    """Rational function in one of a, t, z with coefficients in Q(q^{1/2}).

    The numerator and denominator are kept in Z[var, q^{1/2}], coprime, with
    the denominator's leading coefficient positive; equality is structural.
    """

    __slots__ = ("var", "num", "den")

    def __init__(self, num: Any = 0, den: Any = 1, var: str = "a") -> None:
        """Normalize num/den given as sympy expressions, ints or scalars."""
        if var not in SYMBOLS:
            raise InputError(f"unknown variable {var}")
        symbol = SYMBOLS[var]
        if isinstance(num, Poly) and isinstance(den, Poly):
            num_poly, den_poly = num, den
        else:
            expr = _as_expr(num) / _as_expr(den) if _as_expr(den) != 0 else None
            if expr is None:
                raise DivisionByZeroExpression("zero denominator")
            top, bottom = sympy.fraction(sympy.together(expr))
            c_top, num_poly = _integral_poly(top, symbol)
            c_bottom, den_poly = _integral_poly(bottom, symbol)
            num_poly = num_poly * c_bottom
            den_poly = den_poly * c_top
        if den_poly.is_zero:
            raise DivisionByZeroExpression("zero denominator")
        if num_poly.is_zero:
            num_poly = Poly(0, symbol, SQRT_Q, domain=ZZ)
            den_poly = Poly(1, symbol, SQRT_Q, domain=ZZ)
        else:
            num_poly, den_poly = num_poly.cancel(den_poly, include=True)
        self.var = var
        self.num = num_poly
        self.den = den_poly

    # Constructors

    @classmethod
    def from_expr(cls, expr: Any, var: str = "a") -> RatFun:
        """Build from any sympy expression in var and q^{1/2}."""
        return cls(expr, 1, var)

    @classmethod
    def constant(cls, value: Any, var: str = "a") -> RatFun:
        """Constant function."""
        return cls(value, 1, var)

    @classmethod
    def monomial(cls, exponent: int, var: str = "a", coeff: Any = 1) -> RatFun:
        """coeff·var^exponent."""
        return cls(_as_expr(coeff) * SYMBOLS[var] ** exponent, 1, var)

    @classmethod
    def laurent_polynomial(
        cls, terms: Mapping[int, Any], var: str = "a"
    ) -> RatFun:
        """Σ coeff·var^exponent."""
        symbol = SYMBOLS[var]
        return cls(
            sum(
                (_as_expr(c) * symbol**n for n, c in terms.items()),
                sympy.Integer(0),
            ),
            1,
            var,
        )

    @property
    def symbol(self) -> Symbol:
        """The sympy symbol of the active variable."""
        return SYMBOLS[self.var]

    def as_expr(self) -> sympy.Expr:
        """num/den as a sympy expression."""
        return self.num.as_expr() / self.den.as_expr()

    def _coerce(self, other: Any) -> RatFun | None:
        if isinstance(other, RatFun):
            if other.var != self.var:
                raise InputError(f"mixing variables {self.var} and {other.var}")
            return other
        if isinstance(other, (int, Fraction, ScalarQ)) and not isinstance(
            other, bool
        ):
            return RatFun.constant(other, self.var)
        return None

    def is_zero(self) -> bool:
        """True for the zero function."""
        return self.num.is_zero

    def is_constant(self) -> bool:
        """True when the function does not depend on the variable."""
        return self.num.degree(self.symbol) <= 0 and self.den.degree(self.symbol) <= 0

    def constant_value(self) -> ScalarQ:
        """Value of a constant function."""
        if not self.is_constant():
            raise InputError(f"{self} is not constant")
        return ScalarQ(self.as_expr())

    def __add__(self, other: Any) -> RatFun:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return RatFun(
            self.num * other.den + other.num * self.den, self.den * other.den, self.var
        )

    __radd__ = __add__

    def __neg__(self) -> RatFun:
        return RatFun(-self.num, self.den, self.var)

    def __sub__(self, other: Any) -> RatFun:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> RatFun:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> RatFun:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return RatFun(self.num * other.num, self.den * other.den, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> RatFun:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroExpression("division by the zero function")
        return RatFun(self.num * other.den, self.den * other.num, self.var)

    def __rtruediv__(self, other: Any) -> RatFun:
        if (other := self._coerce(other)) is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> RatFun:
        if exponent >= 0:
            return RatFun(self.num**exponent, self.den**exponent, self.var)
        if self.is_zero():
            raise DivisionByZeroExpression("negative power of zero")
        return RatFun(self.den**-exponent, self.num**-exponent, self.var)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RatFun):
            return (
                self.var == other.var and self.num == other.num and self.den == other.den
            )
        if isinstance(other, (int, Fraction, ScalarQ)) and not isinstance(
            other, bool
        ):
            return self == RatFun.constant(other, self.var)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.var, self.num.as_expr(), self.den.as_expr()))

    def __repr__(self) -> str:
        return f"RatFun({self.to_text()})"

    def __str__(self) -> str:
        return str(sympy.factor(self.as_expr()))

    # Substitutions

    def _remap(self, var_power: int, half_q_per_var: int, var: str) -> RatFun:
        """Apply var ↦ q^{s/2}·new_var^{p} term by term."""
        old, new = self.symbol, SYMBOLS[var]
        maps = []
        for poly in (self.num, self.den):
            terms = {}
            for (i, j), coeff in poly.terms():
                terms[(var_power * i, j + half_q_per_var * i)] = int(coeff)
            maps.append(terms)
        shift_var = -min(k[0] for terms in maps for k in terms)
        shift_half = -min(k[1] for terms in maps for k in terms)
        polys = [
            Poly.from_dict(
                {(i + shift_var, j + shift_half): c for (i, j), c in terms.items()},
                new,
                SQRT_Q,
                domain=ZZ,
            )
            for terms in maps
        ]
        del old
        return RatFun(polys[0], polys[1], var)

    def substitute(self, invert: bool = False, shift: int = 0) -> RatFun:
        """Apply var ↦ q^{shift/2}·var^{±1}."""
        return self._remap(-1 if invert else 1, shift, self.var)

    def inverted(self) -> RatFun:
        """Apply var ↦ var⁻¹."""
        return self.substitute(invert=True)

    def rename(self, var: str) -> RatFun:
        """Same function in another variable."""
        return self._remap(1, 0, var)

    def compose_power(self, exponent: int, var: str = "a") -> RatFun:
        """Apply var ↦ new_var^exponent."""
        if exponent == 0:
            raise InputError("cannot substitute a constant")
        return self._remap(exponent, 0, var)

    def evaluate(self, point: ScalarQ | int) -> ScalarQ:
        """Value at a scalar point."""
        point = ScalarQ(point)
        den = sympy.cancel(self.den.as_expr().subs(self.symbol, point.to_expr()))
        if den == 0:
            raise DivisionByZeroExpression(f"{self} has a pole at {point}")
        num = self.num.as_expr().subs(self.symbol, point.to_expr())
        return ScalarQ(num / den)

    # Coefficients and expansions

    def _coefficient_lists(self) -> tuple[list, list]:
        """Low-to-high coefficient lists over QS."""
        half = QS.from_sympy(SQRT_Q)
        lists = []
        for poly in (self.num, self.den):
            values = [QS.zero] * (max(poly.degree(self.symbol), 0) + 1)
            for (i, j), coeff in poly.terms():
                values[i] += QS.convert(int(coeff)) * half**j
            lists.append(values)
        return lists[0], lists[1]

    def is_laurent_polynomial(self) -> bool:
        """True when the denominator is a monomial in var (times a scalar)."""
        _, den = self._coefficient_lists()
        return sum(1 for c in den if c != QS.zero) == 1

    def laurent_terms(self) -> dict[int, ScalarQ]:
        """exponent ↦ coefficient for a Laurent polynomial."""
        if not self.is_laurent_polynomial():
            raise InputError(f"{self} is not a Laurent polynomial")
        num, den = self._coefficient_lists()
        shift, lead = next((i, c) for i, c in enumerate(den) if c != QS.zero)
        return {
            i - shift: ScalarQ(c / lead) for i, c in enumerate(num) if c != QS.zero
        }

    def laurent(self, at: str = AT_INFINITY, order: int = 8) -> LaurentTail:
        """Expansion at ∞ (in var⁻¹) or at 0 (in var) with `order` terms."""
        if at not in (AT_INFINITY, AT_ZERO):
            raise InputError(f"expansion point {at} is not 0 or inf")
        if self.is_zero():
            return LaurentTail(at, 0, (), order, True)
        num, den = self._coefficient_lists()
        exact = self.is_laurent_polynomial()
        if at == AT_INFINITY:
            num = [c for c in reversed(num)]
            den = [c for c in reversed(den)]
            num_shift = next(i for i, c in enumerate(num) if c != QS.zero)
            den_shift = next(i for i, c in enumerate(den) if c != QS.zero)
            lead = (len(num) - 1 - num_shift) - (len(den) - 1 - den_shift)
        else:
            num_shift = next(i for i, c in enumerate(num) if c != QS.zero)
            den_shift = next(i for i, c in enumerate(den) if c != QS.zero)
            lead = num_shift - den_shift
        num, den = num[num_shift:], den[den_shift:]
        count = len(num) if exact else order
        coeffs = _series_divide(num, den, count)
        if exact:
            while coeffs and coeffs[-1] == QS.zero:
                coeffs.pop()
        return LaurentTail(
            at, lead, tuple(ScalarQ(c) for c in coeffs), count, exact
        )

    def coefficient(self, exponent: int, at: str = AT_INFINITY) -> ScalarQ:
        """Coefficient of var^exponent in the expansion at `at`."""
        if self.is_zero():
            return ZERO
        head = self.laurent(at, 1)
        if at == AT_INFINITY:
            index = head.leading_exponent - exponent
        else:
            index = exponent - head.leading_exponent
        if index < 0:
            return ZERO
        return self.laurent(at, index + 1).coefficient(exponent)

    def constant_term(self, at: str = AT_INFINITY) -> ScalarQ:
        """Constant term of the expansion at `at`."""
        return self.coefficient(0, at)

    # Serialization

    def to_json(self) -> dict[str, Any]:
        """Canonical JSON payload."""
        num, den = self._coefficient_lists()
        return RatFunModel(
            var=self.var,
            num={
                str(i): ScalarQ(c).to_json() for i, c in enumerate(num) if c != QS.zero
            },
            den={
                str(i): ScalarQ(c).to_json() for i, c in enumerate(den) if c != QS.zero
            },
        ).dict()

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> RatFun:
        """Inverse of to_json."""
        model = RatFunModel.parse_obj(payload)
        symbol = SYMBOLS[model.var]

        def _side(side: Mapping[str, Any]) -> sympy.Expr:
            return sum(
                (
                    ScalarQ.from_json(coeff).to_expr() * symbol ** int(power)
                    for power, coeff in side.items()
                ),
                sympy.Integer(0),
            )

        return cls(_side(model.num), _side(model.den), model.var)

    def to_text(self) -> str:
        """Text that parse_expr reads back to the same function."""
        num, den = self._coefficient_lists()

        def _side(values: list) -> str:
            terms = [
                f"({ScalarQ(c).to_text()})*{self.var}^{i}"
                for i, c in enumerate(values)
                if c != QS.zero
            ]
            return " + ".join(f"({term})" for term in terms) or "0"

        return f"({_side(num)})/({_side(den)})"


def _as_expr(value: Any) -> sympy.Expr:
    if isinstance(value, ScalarQ):
        return value.to_expr()
    if isinstance(value, RatFun):
        return value.as_expr()
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    return sympy.sympify(value)


# Places, residues and contour integrals


@dataclass(frozen=True)
class Place:
    """Galois orbit of poles given by a monic irreducible polynomial over Q(q^{1/2}).

    exponent is e with |location| = q^e; None marks the origin.
    """

    poly: Poly
    exponent: Fraction | None
    multiplicity: int = 1

    @property
    def is_origin(self) -> bool:
        """True for the place var = 0."""
        return self.exponent is None

    def describe(self) -> str:
        """Short label for reports."""
        magnitude = "origin" if self.is_origin else f"|.|=q^({self.exponent})"
        return f"{self.poly.as_expr()} = 0 [{magnitude}, mult {self.multiplicity}]"


WeilHint = tuple[RatFun, Fraction]


def _univariate(poly: Poly, symbol: Symbol) -> Poly:
    return Poly(poly.as_expr(), symbol, domain=QS)


def _signed_half_power(value: sympy.Expr) -> int | None:
    """j when value = ±q^{j/2}, else None."""
    element = QS.from_sympy(value)
    num_terms = element.numer.terms()
    den_terms = element.denom.terms()
    if len(num_terms) != 1 or len(den_terms) != 1:
        return None
    (num_monom, num_coeff), (den_monom, den_coeff) = num_terms[0], den_terms[0]
    if num_coeff not in (den_coeff, -den_coeff):
        return None
    return num_monom[0] - den_monom[0]


def _factors(poly: Poly, symbol: Symbol) -> list[tuple[Poly, int]]:
    """Monic irreducible factors (over Q(q^{1/2})) that involve the variable."""
    _, factors = poly.factor_list()
    result = []
    for factor, multiplicity in factors:
        if factor.degree(symbol) <= 0:
            continue
        result.append((_univariate(factor, symbol).monic(), multiplicity))
    return result


def classify(poly: Poly, hints: Iterable[WeilHint] = ()) -> Fraction | None:
    """Magnitude exponent of the roots of a monic irreducible polynomial."""
    symbol = poly.gen
    if poly == Poly(symbol, symbol, domain=QS):
        return None
    coeffs = poly.all_coeffs()
    degree = poly.degree()
    if all(c == 0 for c in coeffs[1:-1]):
        power = _signed_half_power(coeffs[-1])
        if power is not None:
            return Fraction(power, 2 * degree)
    for hint, exponent in hints:
        hint_poly = _univariate(hint.num, symbol)
        if hint_poly.rem(poly).is_zero:
            return Fraction(exponent)
    raise UnclassifiedPlace(
        f"cannot decide the magnitude of the roots of {poly.as_expr()}"
    )


def places(f: RatFun, hints: Iterable[WeilHint] = ()) -> list[Place]:
    """The poles of f with their magnitudes."""
    hints = tuple(hints)
    return [
        Place(factor, classify(factor, hints), multiplicity)
        for factor, multiplicity in _factors(f.den, f.symbol)
    ]


def _residue_trace(g: RatFun, factor: Poly) -> ScalarQ:
    """Sum of the residues of g(var)·dvar over the roots of factor."""
    num = _univariate(g.num, g.symbol)
    rest = _univariate(g.den, g.symbol)
    multiplicity = 0
    while True:
        quotient, remainder = rest.div(factor)
        if not remainder.is_zero:
            break
        rest = quotient
        multiplicity += 1
    if multiplicity == 0:
        raise NotAPole(f"{factor.as_expr()} is not a pole of {g}")
    modulus = factor**multiplicity
    local = (num * rest.invert(modulus)).rem(modulus)
    top = multiplicity * factor.degree() - 1
    return ScalarQ(local.coeff_monomial(g.symbol**top))


def residue(f: RatFun, place: Place) -> ScalarQ:
    """Residue trace of f(var)·dvar/var over the Galois orbit of place."""
    return _residue_trace(f * RatFun.monomial(-1, f.var), place.poly)


def circle_integral(
    f: RatFun, radius_exponent: Fraction | float, hints: Iterable[WeilHint] = ()
) -> ScalarQ:
    """∮ over |var| = q^c of f(var) dvar/(2πi var), for q real > 1."""
    if radius_exponent == math.inf:
        return f.constant_term(AT_INFINITY)
    if radius_exponent == -math.inf:
        return f.constant_term(AT_ZERO)
    c = Fraction(radius_exponent)
    g = f * RatFun.monomial(-1, f.var)
    hints = tuple(hints)
    total = ZERO
    for factor, multiplicity in _factors(g.den, g.symbol):
        exponent = classify(factor, hints)
        if exponent is not None and exponent == c:
            raise PoleOnContour(Place(factor, exponent, multiplicity))
        if exponent is None or exponent < c:
            total += _residue_trace(g, factor)
    _LOGGER.debug("Contour q^(%s) integral of %s is %s", c, f, total)
    return total


def residues_between(
    f: RatFun, low: Fraction, high: Fraction, hints: Iterable[WeilHint] = ()
) -> ScalarQ:
    """Sum of the residues of f/var at places with magnitude in (low, high)."""
    hints = tuple(hints)
    return sum(
        (
            residue(f, place)
            for place in places(f * RatFun.monomial(-1, f.var), hints)
            if not place.is_origin and low < place.exponent < high
        ),
        ZERO,
    )


# Expression parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|(\S))")


@dataclass
class _Token:
    kind: str
    text: str
    position: int


@dataclass
class _Parser:
    text: str
    variable: str
    tokens: list[_Token] = field(default_factory=list)
    index: int = 0

    def __post_init__(self) -> None:
        position = 0
        while position < len(self.text):
            match = _TOKEN.match(self.text, position)
            if match is None or match.end() == position:
                break
            start = match.start(match.lastindex) if match.lastindex else position
            if match.group(1):
                self.tokens.append(_Token("int", match.group(1), start))
            elif match.group(2):
                self.tokens.append(_Token("name", match.group(2), start))
            elif match.group(3):
                self.tokens.append(_Token("op", match.group(3), start))
            position = match.end()
        self.tokens.append(_Token("end", "", len(self.text)))

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _expect(self, text: str) -> _Token:
        if self.current.text != text:
            raise ExpressionSyntaxError(
                f"expected '{text}' but found '{self.current.text or 'end'}'",
                self.current.position,
            )
        return self._advance()

    def parse(self) -> sympy.Expr:
        result = self._expr()
        if self.current.kind != "end":
            raise ExpressionSyntaxError(
                f"unexpected '{self.current.text}'", self.current.position
            )
        return result

    def _expr(self) -> sympy.Expr:
        result = self._term()
        while self.current.text in ("+", "-"):
            op = self._advance().text
            rhs = self._term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def _term(self) -> sympy.Expr:
        result = self._factor()
        while self.current.text in ("*", "/"):
            token = self._advance()
            rhs = self._factor()
            if token.text == "*":
                result = result * rhs
            else:
                if sympy.cancel(rhs) == 0:
                    raise DivisionByZeroExpression(
                        f"division by zero at position {token.position}"
                    )
                result = result / rhs
        return result

    def _factor(self) -> sympy.Expr:
        if self.current.text in ("+", "-"):
            sign = -1 if self._advance().text == "-" else 1
            return sign * self._factor()
        start = self.current
        base, is_q = self._base()
        if self.current.text != "^":
            return base
        self._advance()
        numerator, halves = self._exponent(is_q)
        if numerator < 0 and sympy.cancel(base) == 0:
            raise DivisionByZeroExpression(
                f"negative power of zero at position {start.position}"
            )
        if halves:
            return SQRT_Q**numerator
        return base**numerator

    def _signed_int(self) -> int:
        sign = 1
        if self.current.text in ("+", "-"):
            sign = -1 if self._advance().text == "-" else 1
        if self.current.kind != "int":
            raise ExpressionSyntaxError(
                "expected an integer exponent", self.current.position
            )
        return sign * int(self._advance().text)

    def _exponent(self, is_q: bool) -> tuple[int, bool]:
        """(n, halves): the exponent is n, or n/2 when halves is set."""
        if self.current.text != "(":
            return self._signed_int(), False
        self._advance()
        value = self._signed_int()
        halves = False
        if self.current.text == "/":
            slash = self._advance()
            if self.current.text != "2":
                raise ExpressionSyntaxError(
                    "only half-integer exponents are allowed", self.current.position
                )
            self._advance()
            if not is_q:
                raise ExpressionSyntaxError(
                    f"half powers of {self.variable} are not allowed", slash.position
                )
            halves = True
        self._expect(")")
        return value, halves

    def _base(self) -> tuple[sympy.Expr, bool]:
        token = self.current
        if token.kind == "int":
            self._advance()
            return sympy.Integer(token.text), False
        if token.kind == "name":
            self._advance()
            if token.text == "q":
                return SQRT_Q**2, True
            if token.text == self.variable:
                return SYMBOLS[self.variable], False
            raise ExpressionSyntaxError(f"unknown name '{token.text}'", token.position)
        if token.text == "(":
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner, False
        raise ExpressionSyntaxError(
            f"unexpected '{token.text or 'end'}'", token.position
        )


def parse_expr(text: str, variable: str = "a") -> RatFun:
    """Parse the exact expression grammar into a canonical RatFun."""
    if variable not in SYMBOLS:
        raise InputError(f"unknown variable {variable}")
    expr = _Parser(text, variable).parse()
    return RatFun.from_expr(expr, variable)


def parse_scalar(text: str) -> ScalarQ:
    """Parse an expression that must not involve the main variable."""
    return parse_expr(text, "a").constant_value()
