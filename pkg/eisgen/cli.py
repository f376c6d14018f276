"""Command line front end for eisgen."""
from __future__ import annotations

import argparse
from collections.abc import Callable, Sequence
import csv
from dataclasses import dataclass
import json
import logging
import os
import sys
from typing import Any

from pydantic import ValidationError
import voluptuous as vol

from . import corralg, curve as curves, genus, kchar, spectral, tree
from .bun import BunFun, count_quasisections, hecke_delta
from .const import (
    CONF_BUDGET,
    CONF_CHI,
    CONF_CURVE,
    CONF_D_MAX,
    CONF_DEGREE,
    CONF_DEPTH,
    CONF_EXPAND,
    CONF_EXPR,
    CONF_EXPR2,
    CONF_FORMAT,
    CONF_GENUS,
    CONF_JOBS,
    CONF_K,
    CONF_M,
    CONF_N,
    CONF_PROFILE,
    CONF_Q,
    CONF_REP,
    DEFAULT_BUDGET,
    ENV_BUDGET,
    EXIT_CHECK_FAILED,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    FORMAT_CSV,
    FORMAT_JSON,
)
from .errors import CheckFailed, InputError
from .exact import AT_INFINITY, AT_ZERO, Q_HALF, RatFun, parse_expr
from .models import ChiClass, CurveDescriptor, RepDescriptor
from .verify import verify_all

_LOGGER = logging.getLogger(__name__)

COMMANDS = (
    "zeta",
    "xi",
    "lhat",
    "count-sections",
    "count-quasisections",
    "hecke",
    "tree",
    "eis",
    "ct",
    "sigma",
    "pairing",
    "spectrum",
    "scissor",
    "qgamma",
    "integrate",
    "cliff",
    "verify-all",
)


def budget_value(value: Any) -> int:
    """Accept integers and exponent notation such as 1e8."""
    try:
        number = float(value)
    except (TypeError, ValueError) as err:
        raise vol.Invalid(f"invalid budget {value!r}") from err
    if number < 1 or number != int(number):
        raise vol.Invalid(f"budget must be a positive integer, got {value!r}")
    return int(number)


PRIME_POWER = vol.All(vol.Coerce(int), vol.Range(min=2))
NONNEGATIVE = vol.All(vol.Coerce(int), vol.Range(min=0))
POSITIVE = vol.All(vol.Coerce(int), vol.Range(min=1))

BASE_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_BUDGET): budget_value,
        vol.Optional(CONF_JOBS, default=1): POSITIVE,
        vol.Optional(CONF_FORMAT, default=FORMAT_JSON): vol.In([FORMAT_JSON, FORMAT_CSV]),
        vol.Optional(CONF_CURVE): str,
        vol.Optional(CONF_REP): str,
        vol.Optional(CONF_PROFILE, default=False): bool,
    }
)

SCHEMAS: dict[str, vol.Schema] = {
    "zeta": BASE_SCHEMA.extend(
        {vol.Optional(CONF_Q): PRIME_POWER, vol.Optional(CONF_EXPAND, default=6): POSITIVE}
    ),
    "xi": BASE_SCHEMA.extend({vol.Optional(CONF_Q): PRIME_POWER}),
    "lhat": BASE_SCHEMA.extend({vol.Optional(CONF_Q): PRIME_POWER}),
    "count-sections": BASE_SCHEMA.extend(
        {
            vol.Required(CONF_Q): PRIME_POWER,
            vol.Required(CONF_K): NONNEGATIVE,
            vol.Optional(CONF_EXPAND): vol.Coerce(int),
        }
    ),
    "count-quasisections": BASE_SCHEMA.extend(
        {
            vol.Required(CONF_Q): PRIME_POWER,
            vol.Required(CONF_K): NONNEGATIVE,
            vol.Required(CONF_DEGREE): NONNEGATIVE,
        }
    ),
    "hecke": BASE_SCHEMA.extend({vol.Optional(CONF_K, default=20): NONNEGATIVE}),
    "tree": BASE_SCHEMA.extend(
        {vol.Required(CONF_Q): PRIME_POWER, vol.Optional(CONF_DEPTH, default=3): NONNEGATIVE}
    ),
    "eis": BASE_SCHEMA.extend(
        {
            vol.Optional(CONF_Q): PRIME_POWER,
            vol.Required(CONF_K): NONNEGATIVE,
            vol.Optional(CONF_EXPAND, default=8): POSITIVE,
        }
    ),
    "ct": BASE_SCHEMA.extend(
        {
            vol.Required(CONF_K): NONNEGATIVE,
            vol.Optional(CONF_M): vol.All(vol.Coerce(int), vol.Range(min=-1)),
        }
    ),
    "sigma": BASE_SCHEMA.extend({vol.Required(CONF_EXPR): str}),
    "pairing": BASE_SCHEMA.extend(
        {
            vol.Required(CONF_EXPR): str,
            vol.Optional(CONF_EXPR2): str,
            vol.Optional(CONF_Q): PRIME_POWER,
        }
    ),
    "spectrum": BASE_SCHEMA.extend(
        {vol.Required(CONF_Q): PRIME_POWER, vol.Optional(CONF_EXPR): str}
    ),
    "scissor": BASE_SCHEMA.extend(
        {vol.Optional(CONF_N): POSITIVE, vol.Optional(CONF_M): vol.Coerce(int)}
    ),
    "qgamma": BASE_SCHEMA.extend({vol.Optional(CONF_EXPAND, default=12): POSITIVE}),
    "integrate": BASE_SCHEMA.extend(
        {vol.Required(CONF_EXPR): str, vol.Optional(CONF_EXPR2, default="1"): str}
    ),
    "cliff": BASE_SCHEMA.extend(
        {
            vol.Required(CONF_GENUS): NONNEGATIVE,
            vol.Required(CONF_M): vol.Coerce(int),
            vol.Optional(CONF_CHI, default=ChiClass.trivial.value): vol.In(
                [chi.value for chi in ChiClass]
            ),
            vol.Optional(CONF_DEPTH, default=6): POSITIVE,
            vol.Optional(CONF_D_MAX, default=5): NONNEGATIVE,
        }
    ),
    "verify-all": BASE_SCHEMA.extend({vol.Optional(CONF_Q, default=2): PRIME_POWER}),
}


@dataclass
class CommandResult:
    """Payload of a subcommand and its flat table, when it has one."""

    payload: dict[str, Any]
    rows: list[list[Any]] | None = None
    passed: bool = True


def resolve_budget(options: dict[str, Any]) -> int:
    """--budget, else EISGEN_BUDGET, else the default."""
    if CONF_BUDGET in options:
        return options[CONF_BUDGET]
    if ENV_BUDGET in os.environ:
        try:
            return budget_value(os.environ[ENV_BUDGET])
        except vol.Invalid as err:
            raise InputError(f"{ENV_BUDGET}: {err}") from err
    return DEFAULT_BUDGET


class Commands:
    """Wraps subcommand handlers."""

    def __init__(self, options: dict[str, Any]) -> None:
        """Keep the validated options."""
        self.options = options
        self.budget = resolve_budget(options)
        self.jobs: int = options[CONF_JOBS]

    def dispatch(self, name: str) -> CommandResult:
        """Run the handler for one subcommand."""
        handler: Callable[[], CommandResult] = getattr(
            self, f"handle_{name.replace('-', '_')}"
        )
        return handler()

    def _curve(self) -> curves.CurveData:
        path = self.options.get(CONF_CURVE)
        if path is None:
            return curves.projective_line(self.options.get(CONF_Q) or 2)
        return curves.from_descriptor(CurveDescriptor.from_file(path))

    def _expr(self, key: str = CONF_EXPR) -> RatFun:
        return parse_expr(self.options[key])

    def handle_zeta(self) -> CommandResult:
        """Zeta function, point counts and class number."""
        data = self._curve()
        n_max = self.options[CONF_EXPAND]
        value = curves.zeta(data)
        counts = curves.point_counts(data, n_max)
        closed = curves.closed_point_counts(data, n_max)
        payload = {
            "curve": data.to_json(),
            "zeta": value.to_json(),
            "text": value.to_text(),
            "tail": value.laurent(AT_ZERO, n_max).to_json(),
            "point_counts": counts,
            "closed_points": closed,
            "class_number": curves.class_number(data),
            "weil_ok": data.weil_ok,
        }
        rows = [["n", "points", "closed_points"]] + [
            [n, c, p] for n, (c, p) in enumerate(zip(counts, closed), start=1)
        ]
        return CommandResult(payload, rows)

    def handle_xi(self) -> CommandResult:
        """Completed zeta function and its functional equation."""
        data = self._curve()
        value = curves.check_functional_equation(data)
        return CommandResult(
            {
                "curve": data.to_json(),
                "xi": value.to_json(),
                "text": value.to_text(),
                "functional_equation": "holds",
            }
        )

    def handle_lhat(self) -> CommandResult:
        """Completed L-genus of a rep, or of the trivial rep of the curve."""
        path = self.options.get(CONF_REP)
        if path is not None:
            rep = genus.RepData.from_descriptor(RepDescriptor.parse_file(path))
            data = None
        else:
            data = self._curve()
            rep = genus.RepData.trivial(data)
        value = genus.check_lhat_functional_equation(rep)
        payload: dict[str, Any] = {
            "lhat": value.to_json(),
            "text": value.to_text(),
            "functional_equation": "holds",
        }
        if data is not None:
            if value != curves.xi(data, "a"):
                raise CheckFailed("L̂ of the trivial rep differs from ξ_C", value.to_text())
            payload["matches_xi"] = True
        return CommandResult(payload)

    def handle_count_sections(self) -> CommandResult:
        """Brute-force section counts against the Eisenstein coefficients."""
        q, k = self.options[CONF_Q], self.options[CONF_K]
        n_max = self.options.get(CONF_EXPAND, k + 4)
        table = spectral.section_count_check(q, k, n_max, self.budget, self.jobs)
        return CommandResult(
            {
                "q": q,
                "k": k,
                "counts": {str(n): c for n, c in table.items()},
                "matches_eisenstein": True,
            },
            [["n", "sections"]] + [[n, c] for n, c in table.items()],
        )

    def handle_count_quasisections(self) -> CommandResult:
        """Quasisections and common factors against their closed forms."""
        result = count_quasisections(
            self.options[CONF_Q], self.options[CONF_K], self.options[CONF_DEGREE], self.budget
        )
        payload = {
            "q": result.q,
            "k": result.k,
            "d": result.d,
            "pairs": result.pairs,
            "pairs_closed_form": result.pairs_closed_form,
            "common_factors": result.common_factors,
            "common_factors_closed_form": result.common_factors_closed_form,
        }
        return CommandResult(payload, [list(payload), list(payload.values())])

    def handle_hecke(self) -> CommandResult:
        """Δ Eis = λ·Eis up to k."""
        k_max = self.options[CONF_K]
        spectral.check_eigenrelation(k_max)
        applied = hecke_delta(spectral.eis_family(k_max + 1))
        return CommandResult(
            {
                "k_max": k_max,
                "eigenvalue": spectral.laplace_eigenvalue().to_json(),
                "delta_eis": {str(k): applied[k].to_text() for k in range(k_max + 1)},
                "eigenrelation": "holds",
            }
        )

    def handle_tree(self) -> CommandResult:
        """Ball in the Bruhat–Tits tree with bundle types and the neighbor rule."""
        q, depth = self.options[CONF_Q], self.options[CONF_DEPTH]
        ball = tree.explore(q, depth, self.jobs, classify=True)
        profiles = tree.tree_hecke_check(q, depth, self.jobs, ball)
        payload = ball.to_json(self.options[CONF_PROFILE])
        payload["profiles"] = {str(k): sorted(c.elements()) for k, c in profiles.items()}
        rows = [["distance", "vertices"]] + [
            [n, size] for n, size in enumerate(ball.sphere_sizes())
        ]
        return CommandResult(payload, rows)

    def handle_eis(self) -> CommandResult:
        """Eis(P_k, a) and its expansion at |a| ≫ 1."""
        k, order = self.options[CONF_K], self.options[CONF_EXPAND]
        data = self._curve() if CONF_CURVE in self.options else None
        value = spectral.eis(k, data)
        payload: dict[str, Any] = {
            "k": k,
            "eis": value.to_json(),
            "text": value.to_text(),
            "tail": value.laurent(AT_INFINITY, order).to_json(),
        }
        q = self.options.get(CONF_Q)
        if q is not None and data is None:
            payload["q"] = q
            payload["sections"] = {
                str(n): str((value.coefficient(-n) * Q_HALF**n).fraction_at(q))
                for n in range(-k, order - k)
            }
        return CommandResult(payload)

    def handle_ct(self) -> CommandResult:
        """Constant term of Eis(P_k) and the Eisenstein/constant-term adjunction."""
        k = self.options[CONF_K]
        value = spectral.constant_term(k)
        payload: dict[str, Any] = {"k": k, "constant_term": value.to_json(), "text": value.to_text()}
        m = self.options.get(CONF_M)
        if m is not None:
            indicator = BunFun.delta(k)
            payload["m"] = m
            payload["ct_of_indicator"] = spectral.ct_of_function(indicator, m).to_text()
            pairing = spectral.check_ct_adjoint({m: 1}, indicator)
            payload["adjoint_pairing"] = pairing.to_text()
        return CommandResult(payload)

    def handle_sigma(self) -> CommandResult:
        """Σω and the projector identity."""
        omega = self._expr()
        data = self._curve() if CONF_CURVE in self.options else None
        spectral.check_projector(omega, data)
        value = spectral.sigma(omega, data)
        return CommandResult(
            {"sigma": value.to_json(), "text": value.to_text(), "projector": "holds"}
        )

    def handle_pairing(self) -> CommandResult:
        """The three evaluations of ⟨Eis_ω₁, Eis_ω₂⟩."""
        omega1 = self._expr()
        omega2 = self._expr(CONF_EXPR2) if CONF_EXPR2 in self.options else omega1
        report = spectral.three_way_pairing(omega1, omega2)
        payload: dict[str, Any] = {
            "brute": report.brute.to_json(),
            "residue_form": report.residue_form.to_json(),
            "torus": report.torus.to_json(),
            "text": report.brute.to_text(),
            "torus_constant": report.torus_constant.to_text(),
        }
        q = self.options.get(CONF_Q)
        if q is not None:
            payload["value_at_q"] = str(report.brute.fraction_at(q))
        return CommandResult(payload)

    def handle_spectrum(self) -> CommandResult:
        """Spectrum of Δ, optionally with the split of one ‖Eis_ω‖²."""
        q = self.options[CONF_Q]
        payload = spectral.spectrum(q)
        if CONF_EXPR in self.options:
            payload["split"] = spectral.spectral_split(self._expr()).to_json()
        payload["advisory"] = {
            "gram_psd": spectral.gram_is_psd(q),
            "kernel_residue": str(spectral.numeric_kernel_residue(q)),
        }
        continuous = payload["continuous"]
        rows = [
            ["part", "value"],
            ["continuous_lower", continuous["lower"]],
            ["continuous_upper", continuous["upper"]],
        ] + [["discrete", value] for value in payload["discrete"]]
        return CommandResult(payload, rows)

    def handle_scissor(self) -> CommandResult:
        """∮_{+ε} = χ(P^{n−1}, O(m)) + ∮_{−ε}."""
        n_values = [self.options[CONF_N]] if CONF_N in self.options else range(1, 5)
        m_values = [self.options[CONF_M]] if CONF_M in self.options else range(-6, 7)
        rows = [["n", "m", "outer", "middle", "inner"]]
        results = []
        for n in n_values:
            for m in m_values:
                result = kchar.scissor_check(n, m)
                rows.append([n, m, result.outer.to_text(), result.middle, result.inner.to_text()])
                results.append(
                    {
                        "n": n,
                        "m": m,
                        "outer": result.outer.to_json(),
                        "middle": result.middle,
                        "inner": result.inner.to_json(),
                    }
                )
        return CommandResult({"scissor": results}, rows)

    def handle_qgamma(self) -> CommandResult:
        """Γ_q coefficients and the residual of its functional equation."""
        order = self.options[CONF_EXPAND]
        coefficients = kchar.q_gamma(order)
        residual = kchar.q_gamma_residual(order)
        if any(not c.is_zero() for c in residual):
            raise CheckFailed("q-Gamma residual is nonzero", [c.to_text() for c in residual])
        return CommandResult(
            {
                "coefficients": [c.to_json() for c in coefficients],
                "residual": "zero",
            },
            [["d", "coefficient"]] + [[d, c.to_text()] for d, c in enumerate(coefficients)],
        )

    def handle_integrate(self) -> CommandResult:
        """The three equivariant integrals of ω₁ ⊠ ω₂."""
        box = genus.BoxClass(self._expr(), self._expr(CONF_EXPR2))
        data = self._curve() if CONF_CURVE in self.options else None
        torus = genus.integrate_T(box, data)
        payload: dict[str, Any] = {
            "flag": genus.integrate_flag(box).to_json(),
            "flag_regular": kchar.flag_integrand_is_regular(box),
            "cotangent": genus.integrate_cotangent(box).to_json(),
            "torus": torus.to_json(),
        }
        if data is None or data.is_projective_line:
            if genus.integrate_T_euler(box) != torus:
                raise CheckFailed("Euler-class form of ∫_T disagrees", torus.to_text())
            payload["euler_class_form"] = "agrees"
        return CommandResult(payload)

    def handle_cliff(self) -> CommandResult:
        """Correspondence-algebra relations and the weight ledger."""
        g, m = self.options[CONF_GENUS], self.options[CONF_M]
        chi = ChiClass(self.options[CONF_CHI])
        window = corralg.default_window(g, m, self.options[CONF_DEPTH])
        module = corralg.build_stable_module(g, m, window)
        report = corralg.check_relations(module, self.jobs)
        model = corralg.fixed_locus_model(g)
        cogenerated = corralg.cogeneration_check(g)
        payload: dict[str, Any] = {
            "relations": report.to_json(),
            "dimensions": {str(d): module.dimension(d) for d in module.degrees},
            "fixed_locus": {"eta_bound": model.eta_bound, "basis": len(model.basis())},
            "cogeneration": [[mask, k, c] for (mask, k), c in sorted(cogenerated.items())],
            "ledger": corralg.thm2_weight_ledger(g, m, chi).to_json(),
            "determinant_twist": str(corralg.determinant_twist(g, chi)),
            "exceptions": {
                case.value: [list(c) for c in corralg.exception_scan(max(g, 4), chi=case)]
                for case in ChiClass
            },
        }
        if g == 0:
            payload["character_g0"] = corralg.thm2_character_check_g0(
                m, self.options[CONF_D_MAX]
            ).to_json()
        return CommandResult(payload)

    def handle_verify_all(self) -> CommandResult:
        """Every acceptance suite."""
        results = verify_all(self.budget, self.jobs)
        passed = all(result.passed for result in results)
        rows = [["suite", "passed", "checks"]] + [
            [result.name, result.passed, result.checks] for result in results
        ]
        return CommandResult(
            {"suites": [result.to_json() for result in results], "passed": passed},
            rows,
            passed,
        )


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per verification."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG")
    common.add_argument("--q", help="field size")
    common.add_argument("--k", help="bundle class P_k")
    common.add_argument("--genus", help="curve genus")
    common.add_argument("--m", help="twist or degree of M")
    common.add_argument("--n", help="rank of C^n")
    common.add_argument("--degree", help="degree d of the quasisection pair")
    common.add_argument("--curve", help="curve descriptor JSON file")
    common.add_argument("--rep", help="rep descriptor JSON file")
    common.add_argument("--expr", help="rational function in a")
    common.add_argument("--expr2", help="second rational function in a")
    common.add_argument("--chi", help="character class")
    common.add_argument("--depth", help="tree depth or degree window length")
    common.add_argument("--d-max", dest="d_max", help="lowest component for characters")
    common.add_argument("--expand", help="expansion order or table size")
    common.add_argument("--budget", help="enumeration budget, e.g. 1e8")
    common.add_argument("--jobs", help="worker processes")
    common.add_argument(
        "--profile", action="store_true", default=None, help="neighbor types per vertex"
    )
    output = common.add_mutually_exclusive_group()
    output.add_argument("--json", dest="format", action="store_const", const=FORMAT_JSON)
    output.add_argument("--csv", dest="format", action="store_const", const=FORMAT_CSV)

    parser = argparse.ArgumentParser(
        prog="eisgen", description="Exact checks of rank-1 Eisenstein series."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def _emit(result: CommandResult, fmt: str) -> None:
    if fmt == FORMAT_CSV:
        if result.rows is None:
            raise InputError("this result is structured; use --json")
        csv.writer(sys.stdout, lineterminator="\n").writerows(result.rows)
        return
    print(json.dumps(result.payload, sort_keys=True, indent=2, ensure_ascii=False))


def _input_failure(err: Exception) -> dict[str, Any]:
    report: dict[str, Any] = {"error": type(err).__name__, "message": str(err)}
    position = getattr(err, "position", None)
    if position is not None:
        report["position"] = position
    return report


def run(argv: Sequence[str]) -> int:
    """Parse argv, run the subcommand and return the exit code."""
    args = build_parser().parse_args(list(argv))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    raw = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in ("command", "verbose")
    }
    try:
        options = SCHEMAS[args.command](raw)
        result = Commands(options).dispatch(args.command)
        _emit(result, options[CONF_FORMAT])
    except CheckFailed as err:
        print(json.dumps(err.report(), sort_keys=True, indent=2, ensure_ascii=False))
        return EXIT_CHECK_FAILED
    except (InputError, ValidationError, vol.Invalid, OSError) as err:
        _LOGGER.debug("Rejected input for %s: %s", args.command, err)
        print(json.dumps(_input_failure(err), sort_keys=True, indent=2, ensure_ascii=False))
        return EXIT_INPUT_ERROR
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point."""
    return run(sys.argv[1:] if argv is None else argv)
