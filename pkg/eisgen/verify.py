"""Acceptance suites behind `eisgen verify-all`."""
from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
import json
import logging
import random
from secrets import token_hex
from typing import Any

from . import corralg, curve, genus, kchar, spectral, tree
from .bun import count_quasisections
from .errors import CheckFailed
from .exact import Q, RatFun, ScalarQ, parse_expr
from .gf import BudgetExceeded
from .models import ChiClass

_LOGGER = logging.getLogger(__name__)

SYNTHETIC_TRACES = (
    (2, (1,)),
    (2, (-2,)),
    (3, (0,)),
    (2, (1, 2)),
    (3, (3, -1)),
    (2, (1, 0, -1)),
    (4, (2, -3, 4)),
)

CORPUS_BASES = (
    "a",
    "(1 - q*a^2)/(a^2 - q)",
    "a^2 + a^-2",
    "1/(1 - a^-1)^3",
    "q^(1/2)*(a + a^-1)",
    "(a - 1)*(a + 2)/(3*a^2 + q)",
    "q^(-1)*a^-3 - 5",
    "(q^2 - 1)/(q*(a - q)^2)",
    "-a^4 + q^(3/2)*a",
    "(1 + a)^2/(1 - q*a)",
)
CORPUS_FACTORS = ("1", "a", "q", "a^-2", "q^(1/2)*a^3")


def expression_corpus() -> list[str]:
    """Fifty expressions covering half powers of q, poles and Laurent tails."""
    return [f"({factor})*({base})" for base in CORPUS_BASES for factor in CORPUS_FACTORS]


@dataclass
class SuiteResult:
    """Outcome of one acceptance suite."""

    name: str
    passed: bool = True
    checks: int = 0
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        """Serialized result."""
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "details": self.details,
        }


def suite_section_counts(budget: int | None, jobs: int) -> SuiteResult:
    """Brute-force section counts against Eis(P_k) coefficients."""
    result = SuiteResult("section-counts")
    tables: dict[str, Any] = {}
    for q in (2, 3):
        for k in (0, 1, 2):
            n_max = k + 6
            while True:
                try:
                    table = spectral.section_count_check(q, k, n_max, budget, jobs)
                    break
                except BudgetExceeded:
                    n_max -= 2
                    if n_max < -k:
                        table = {}
                        break
            result.checks += len(table)
            tables[f"q={q},k={k}"] = {str(n): count for n, count in table.items()}
    result.details["counts"] = tables
    return result


def suite_quasisections(budget: int | None, jobs: int) -> SuiteResult:
    """Quasisection enumeration against its closed forms."""
    result = SuiteResult("quasisections")
    for q in (2, 3):
        for k in range(4):
            for d in range(4):
                try:
                    count_quasisections(q, k, d, budget)
                except BudgetExceeded:
                    result.details.setdefault("skipped", []).append([q, k, d])
                    continue
                result.checks += 1
    return result


def suite_hecke(budget: int | None, jobs: int) -> SuiteResult:
    """Δ Eis = q^{1/2}(a + a⁻¹) Eis for k ≤ 20."""
    spectral.check_eigenrelation(20)
    return SuiteResult("hecke", checks=21)


def _synthetic_curves() -> list[curve.CurveData]:
    return [curve.from_traces(q, traces, strict=True) for q, traces in SYNTHETIC_TRACES]


def suite_functional_equations(budget: int | None, jobs: int) -> SuiteResult:
    """Functional equations of Eis, ξ_C and L̂ for P¹ and Weil-consistent curves."""
    result = SuiteResult("functional-equations")
    for k in range(11):
        spectral.check_eis_functional_equation(k)
        result.checks += 1
    for data in [curve.projective_line(2), *_synthetic_curves()]:
        curve.check_functional_equation(data)
        genus.check_lhat_functional_equation(genus.RepData.trivial(data))
        result.checks += 2
    result.details["curves"] = [list(traces) for _, traces in SYNTHETIC_TRACES]
    return result


def suite_projector(budget: int | None, jobs: int) -> SuiteResult:
    """Σ² = 2Σ on a^n, |n| ≤ 8, for P¹ and a genus-1 curve."""
    result = SuiteResult("projector")
    for data in (None, curve.from_traces(2, (1,), strict=True)):
        for n in range(-8, 9):
            spectral.check_projector(RatFun.monomial(n), data)
            result.checks += 1
    return result


def suite_pairing(budget: int | None, jobs: int) -> SuiteResult:
    """Brute-force L² = residue formula = −∫_T/(q(q−1)²) on monomials."""
    result = SuiteResult("pairing")
    for i in range(6):
        for j in range(i, 6):
            report = spectral.three_way_pairing(RatFun.monomial(i), RatFun.monomial(j))
            for q in (2, 3, 4):
                values = {
                    report.brute.fraction_at(q),
                    report.residue_form.fraction_at(q),
                    report.torus.fraction_at(q),
                }
                if len(values) != 1:
                    raise CheckFailed(f"pairing of a^{i}, a^{j} differs at q={q}", values)
            result.checks += 1
    return result


def suite_spectral(budget: int | None, jobs: int) -> SuiteResult:
    """Spectral split, residual weights, the kernel residue and Gram positivity."""
    result = SuiteResult("spectral")
    for n in range(4):
        split = spectral.spectral_split(RatFun.monomial(n))
        for weight in (split.weight_plus, split.weight_minus):
            if not weight.is_positive_for_q_gt_1():
                raise CheckFailed("residual weight is not positive for q > 1", weight)
        spectral.pseudo_eis_split(RatFun.monomial(n))
        result.checks += 2
    expected = (Q - 1 / Q) / 2
    for sign in (1, -1):
        if spectral.kernel_residue(sign) != expected:
            raise CheckFailed("kernel residue differs from (q − q⁻¹)/2", sign)
    at_two = spectral.kernel_residue().fraction_at(2)
    independent = Fraction(str(spectral.numeric_kernel_residue(2)))
    if at_two != Fraction(3, 4) or independent != Fraction(3, 4):
        raise CheckFailed("kernel residue at q = 2 is not 3/4", (at_two, independent))
    for q in (2, 3):
        if not spectral.gram_is_psd(q):
            raise CheckFailed(f"Gram matrix is not positive semidefinite at q={q}", q)
    result.checks += 5
    result.details["kernel_residue"] = expected.to_text()
    return result


def suite_scissor(budget: int | None, jobs: int) -> SuiteResult:
    """Three-term contour identity for n ≤ 4, |m| ≤ 6."""
    result = SuiteResult("scissor")
    for n in range(1, 5):
        for m in range(-6, 7):
            kchar.scissor_check(n, m)
            result.checks += 1
    return result


def suite_q_gamma(budget: int | None, jobs: int) -> SuiteResult:
    """Γ_q(qz) = (1 − z)Γ_q(z) through order 12."""
    residual = kchar.q_gamma_residual(12)
    if any(not c.is_zero() for c in residual):
        raise CheckFailed("q-Gamma residual is nonzero", [c.to_text() for c in residual])
    return SuiteResult("q-gamma", checks=12)


def suite_tree(budget: int | None, jobs: int) -> SuiteResult:
    """Sphere sizes, neighbor profiles, Birkhoff recomposition and tree-realized Δ."""
    result = SuiteResult("tree")
    for q, depth in ((2, 5), (3, 4)):
        profiles = tree.tree_hecke_check(q, depth, jobs)
        result.checks += len(profiles)
        result.details[f"q={q}"] = {
            "depth": depth,
            "profiles": {str(k): sorted(c.elements()) for k, c in profiles.items()},
        }
        for n in range(depth + 1):
            if tree.vertex_bundle_type(tree.apartment_vertex(n), q) != n:
                raise CheckFailed(f"apartment vertex {n} has the wrong type", n)
        rng = random.Random(q)
        for _ in range(10):
            g, k1, k2 = tree.random_split_matrix(q, 2, rng)
            split = tree.birkhoff_split(g, q)
            tree.check_recomposition(g, split, q)
            if (split.k1, split.k2) != (k1, k2):
                raise CheckFailed("Birkhoff exponents differ from the construction", (k1, k2))
            result.checks += 1
    return result


def suite_correspondence(budget: int | None, jobs: int) -> SuiteResult:
    """sl(2) and Clifford relations, with the literal sign as the negative control."""
    result = SuiteResult("correspondence")
    for g in range(4):
        corralg.fixed_locus_model(g)
        corralg.cogeneration_check(g)
        for m in range(-2, 5):
            module = corralg.build_stable_module(g, m)
            result.checks += corralg.check_relations(module, jobs).checked
            if g == 0:
                continue
            control = corralg.build_stable_module(g, m, module.degrees, literal_sign=True)
            try:
                corralg.check_relations(control, jobs)
            except corralg.RelationViolation:
                result.checks += 1
            else:
                raise CheckFailed("negative control passed", (g, m))
    return result


def suite_theorem_two(budget: int | None, jobs: int) -> SuiteResult:
    """Weight ledger, the genus-0 characters and the exception scan."""
    result = SuiteResult("theorem-two")
    for g in range(4):
        for chi in ChiClass:
            if g == 0 and chi is not ChiClass.trivial:
                continue
            for deg_m in range(-2, 3):
                corralg.thm2_weight_ledger(g, deg_m, chi)
                result.checks += 1
    for m in range(-3, 4):
        for d_max in range(6):
            corralg.thm2_character_check_g0(m, d_max)
            result.checks += 1
    collisions = corralg.exception_scan(4)
    if collisions != [(2, 0)]:
        raise CheckFailed("exception scan differs from {(2, 0)}", collisions)
    result.checks += 1
    for chi in (ChiClass.trivial, ChiClass.two_torsion):
        if corralg.exception_scan(4, chi=chi):
            raise CheckFailed("exception scan fires with χ² trivial", chi.value)
        result.checks += 1
    result.details["exceptions"] = [list(c) for c in collisions]
    return result


def suite_round_trip(budget: int | None, jobs: int) -> SuiteResult:
    """Serialize/parse identity on the corpus and run-to-run determinism."""
    result = SuiteResult("round-trip")
    for text in expression_corpus():
        value = parse_expr(text)
        if RatFun.from_json(json.loads(json.dumps(value.to_json()))) != value:
            raise CheckFailed("RatFun JSON round trip fails", text)
        if parse_expr(value.to_text()) != value:
            raise CheckFailed("RatFun text round trip fails", text)
        for coefficient in value.laurent(order=4).coefficients:
            if ScalarQ.from_json(coefficient.to_json()) != coefficient:
                raise CheckFailed("ScalarQ JSON round trip fails", text)
        result.checks += 1
    character = corralg.symmetric_product_character(2, 4, ChiClass.trivial)
    if corralg.GradedChar.from_json(json.loads(json.dumps(character.to_json()))) != character:
        raise CheckFailed("GradedChar JSON round trip fails", character)
    serial = json.dumps(tree.explore(2, 3, 1, classify=True).to_json(), sort_keys=True)
    parallel = json.dumps(tree.explore(2, 3, jobs, classify=True).to_json(), sort_keys=True)
    if serial != parallel:
        raise CheckFailed("tree exploration depends on the worker count", None)
    result.checks += 2
    return result


SUITES: tuple[Callable[[int | None, int], SuiteResult], ...] = (
    suite_section_counts,
    suite_quasisections,
    suite_hecke,
    suite_functional_equations,
    suite_projector,
    suite_pairing,
    suite_spectral,
    suite_scissor,
    suite_q_gamma,
    suite_tree,
    suite_correspondence,
    suite_theorem_two,
    suite_round_trip,
)


def run_suite(index: int, budget: int | None = None, jobs: int = 1) -> SuiteResult:
    """Run one suite, turning a failed check into a failed result."""
    suite = SUITES[index]
    try:
        return suite(budget, jobs)
    except CheckFailed as err:
        _LOGGER.debug("Suite %s failed: %s", suite.__name__, err)
        name = suite.__name__.removeprefix("suite_").replace("_", "-")
        return SuiteResult(name, False, 0, err.report())


def verify_all(budget: int | None = None, jobs: int = 1) -> list[SuiteResult]:
    """Every acceptance suite, in order; results do not depend on jobs."""
    log_id = token_hex(2)
    _LOGGER.debug("[%s] Running %s suites with %s workers", log_id, len(SUITES), jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(partial(run_suite, budget=budget, jobs=1), range(len(SUITES)))
            )
    else:
        results = [run_suite(index, budget, jobs) for index in range(len(SUITES))]
    for result in results:
        _LOGGER.debug(
            "[%s] %s: %s (%s checks)",
            log_id,
            result.name,
            "passed" if result.passed else "FAILED",
            result.checks,
        )
    return results
