"""Models for parsing the eisgen JSON payloads."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, root_validator, validator


class ChiClass(Enum):
    """Case split of a rank-1 local system character."""

    trivial = "trivial"
    two_torsion = "two_torsion_nontrivial"
    generic = "generic"

    @property
    def delta(self) -> int:
        """1 when χ₀² = 1, else 0."""
        return 0 if self == ChiClass.generic else 1

    @property
    def squared(self) -> ChiClass:
        """Class of χ²."""
        return ChiClass.generic if self == ChiClass.generic else ChiClass.trivial


class ScalarQModel(BaseModel):
    """Serialized element of Q(q^{1/2})."""

    num: dict[int, int] | None = None
    den: dict[int, int] = Field(default_factory=lambda: {0: 1})
    half_q: int = 0
    sum: list[ScalarQModel] | None = None

    @validator("half_q")
    def _check_half_q(cls, half_q: int) -> int:
        if half_q not in (0, 1):
            raise ValueError("half_q must be 0 or 1")
        return half_q

    @validator("den")
    def _check_den(cls, den: dict[int, int]) -> dict[int, int]:
        if not any(den.values()):
            raise ValueError("denominator must be nonzero")
        return den

    @root_validator(skip_on_failure=True)
    def _check_shape(cls, values: dict[str, Any]) -> dict[str, Any]:
        if (values.get("num") is None) == (values.get("sum") is None):
            raise ValueError("exactly one of num and sum is required")
        return values


ScalarQModel.update_forward_refs()


class RatFunModel(BaseModel):
    """Serialized rational function: coefficient maps var-exponent → scalar."""

    var: str = "a"
    num: dict[str, dict[str, Any]]
    den: dict[str, dict[str, Any]]

    @validator("var")
    def _check_var(cls, var: str) -> str:
        if var not in ("a", "t", "z"):
            raise ValueError(f"unknown variable {var}")
        return var

    @validator("num", "den")
    def _check_coefficients(
        cls, side: dict[str, dict[str, Any]]
    ) -> dict[str, dict[str, Any]]:
        for power, coeff in side.items():
            if int(power) < 0:
                raise ValueError("exponents must be nonnegative")
            ScalarQModel.parse_obj(coeff)
        return side

    @validator("den")
    def _check_den(cls, den: dict[str, dict[str, Any]]) -> dict[str, dict[str, Any]]:
        if not den:
            raise ValueError("denominator must be nonzero")
        return den


class LaurentTailModel(BaseModel):
    """Serialized truncated Laurent expansion."""

    at: str
    leading_exponent: int
    order: int
    exact: bool
    coefficients: list[dict[str, Any]]

    @validator("at")
    def _check_at(cls, at: str) -> str:
        if at not in ("0", "inf"):
            raise ValueError("expansion point must be 0 or inf")
        return at


class CurveDescriptor(BaseModel):
    """Weil data of a curve: {"q", "g", "numerator", "counts"?, "traces"?}."""

    q: int
    genus: int = Field(..., alias="g")
    numerator: list[int] | None = None
    counts: list[int] | None = None
    traces: list[int] | None = None

    class Config:
        """Accept both the alias and the field name."""

        allow_population_by_field_name = True

    @validator("q")
    def _check_q(cls, q: int) -> int:
        if q < 2:
            raise ValueError("q must be a prime power ≥ 2")
        return q

    @validator("genus")
    def _check_genus(cls, genus: int) -> int:
        if genus < 0:
            raise ValueError("genus must be nonnegative")
        return genus

    @validator("numerator")
    def _check_numerator(cls, numerator: list[int] | None, values: dict[str, Any]):
        if numerator is None:
            return None
        if numerator[:1] != [1]:
            raise ValueError("numerator must satisfy P(0) = 1")
        if "genus" in values and len(numerator) != 2 * values["genus"] + 1:
            raise ValueError("numerator must have degree 2g")
        return numerator

    @validator("counts")
    def _check_counts(cls, counts: list[int] | None):
        if counts is not None and any(n < 0 for n in counts):
            raise ValueError("point counts must be nonnegative")
        return counts

    @root_validator(skip_on_failure=True)
    def _check_source(cls, values: dict[str, Any]) -> dict[str, Any]:
        if (
            values.get("numerator") is None
            and values.get("counts") is None
            and values.get("traces") is None
            and values.get("genus")
        ):
            raise ValueError("one of numerator, counts or traces is required")
        return values

    @classmethod
    def from_file(cls, path: str | Path) -> CurveDescriptor:
        """Read a descriptor from disk."""
        return cls.parse_file(path)


class RepDescriptor(BaseModel):
    """Frobenius data on H⁰, H¹, H² of a rank-1 local system."""

    h0: list[int] = Field(default_factory=list)
    h1: list[int] = Field(default_factory=list)
    h2: list[int] = Field(default_factory=list)
    curve: CurveDescriptor | None = None

    @validator("h2")
    def _check_paired(cls, h2: list[int], values: dict[str, Any]) -> list[int]:
        if "h0" in values and len(values["h0"]) != len(h2):
            raise ValueError("h0 and h2 must have the same length")
        return h2


class CharTermModel(BaseModel):
    """One weight of a graded character."""

    a: int
    degree: int
    weight2: int
    symbol: str = ""
    mult: int


class GradedCharModel(BaseModel):
    """Serialized graded character."""

    terms: list[CharTermModel] = Field(default_factory=list)

    @validator("terms")
    def _check_terms(cls, terms: list[CharTermModel]) -> list[CharTermModel]:
        if any(term.mult == 0 for term in terms):
            raise ValueError("zero multiplicities are not serialized")
        return terms
