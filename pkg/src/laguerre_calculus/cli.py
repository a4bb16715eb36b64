# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Command-line entry point `laguerre-calc`.

Every subcommand prints one JSON document on standard output. Logs go to standard
error. Side files (CSV, JSON lines) are written only when --output is given.

Exit codes: 0 on success, 1 when a property check or suite fails, 2 on usage errors,
invalid documents and violated numeric hypotheses.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from laguerre_calculus.evolution import (
    InitialData,
    evolve,
    stabilization_limit,
    stabilization_profile,
)
from laguerre_calculus.interchange import (
    dump_poly,
    load_form,
    load_poly,
    scalar_to_wire,
)
from laguerre_calculus.norms import (
    laguerre_stream,
    norm_b,
    norm_N_laguerre,
    operator_bound_check,
)
from laguerre_calculus.operators import (
    OperatorSpec,
    apply_phi_of_delta,
    exp_delta_closed,
    laguerre_poly,
    laguerre_rodrigues,
    operation_rule,
)
from laguerre_calculus.series import (
    CalculusError,
    Scalar,
    ScalarMode,
    default_precision,
)
from laguerre_calculus.suites import DEFAULT_SEED, SUITES, run_suite, suite_names
from laguerre_calculus.transform import (
    DEFAULT_ORDER,
    MAX_ORDER,
    exp_delta_integral_refined,
    gauss_laguerre_rule,
    rule_to_csv,
)
from laguerre_calculus.zeros import (
    VERDICT_TOLERANCE,
    PreservationReport,
    classify_P_plus,
    exp_preservation_trial,
    phi_preservation_trial,
    preservation_trial,
    roots,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class RunConfig(BaseModel):
    """Options shared by every subcommand."""

    model_config = ConfigDict(frozen=True)

    command: str = Field(description="Subcommand name.", examples=["laguerre"])
    mode: Literal["auto", "exact", "floating"] = Field(
        default="auto",
        description="Scalar mode; auto computes exactly for positive integer theta "
        "and rational inputs.",
    )
    precision: int = Field(
        default_factory=default_precision,
        ge=16,
        description="Decimal digits of extended-precision rechecks.",
    )
    tolerance: float = Field(
        default=VERDICT_TOLERANCE, gt=0, le=1e-2, description="Root verdict tolerance."
    )
    seed: int = Field(default=DEFAULT_SEED, ge=0, description="Suite seed.")
    trials: Optional[int] = Field(default=None, gt=0, description="Randomized cases per suite.")
    workers: int = Field(default=1, ge=1, description="Worker processes for suites.")
    output: Optional[Path] = Field(default=None, description="Side file path.")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Build the configuration from parsed arguments.

        Raises:
            ValidationError: if an option is out of range
        """
        fields = {
            name: getattr(args, name)
            for name in ("mode", "tolerance", "seed", "trials", "workers", "output")
            if getattr(args, name, None) is not None
        }
        if args.precision is not None:
            fields["precision"] = args.precision
        return cls(command=args.command, **fields)


def _is_rational_document(text: Optional[str]) -> bool:
    """Return whether a raw JSON document holds only integers and "p/q" strings."""
    if text is None:
        return True
    try:
        document = json.loads(text)
    except json.JSONDecodeError:
        return True

    def walk(node: Any) -> bool:
        if isinstance(node, dict):
            return "re" not in node and all(walk(value) for value in node.values())
        if isinstance(node, list):
            return all(walk(value) for value in node)
        return not isinstance(node, float)

    return walk(document)


def _is_integer_text(text: Optional[str]) -> bool:
    try:
        value = Fraction(str(text).strip())
    except ValueError:
        return False
    return value.denominator == 1 and value >= 1


def _mode(
    config: RunConfig, theta: Optional[str], documents: Sequence[Optional[str]] = ()
) -> ScalarMode:
    if config.mode == "exact":
        return ScalarMode.exact()
    if config.mode == "auto" and (theta is None or _is_integer_text(theta)):
        if all(_is_rational_document(document) for document in documents):
            return ScalarMode.exact()
    return ScalarMode.floating(config.precision)


def _scalar(text: str, mode: ScalarMode) -> Scalar:
    try:
        return mode.coerce(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}") from e


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid complex number: {text!r}") from e


def _times(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid time list: {text!r}") from e


def _emit(document: Dict[str, Any]) -> None:
    print(json.dumps(document))


def _write(path: Path, content: str) -> None:
    path.write_text(content)
    logger.info("Wrote %s", path)


def _report_document(report: PreservationReport) -> Dict[str, Any]:
    return {
        "verdict": report.verdict.value,
        "passed": report.passed,
        "output": dump_poly(report.output),
        "roots": [scalar_to_wire(complex(r)) for r in report.output_roots.roots],
        "max_imag": report.max_imag,
        "max_real_part": report.max_real_part,
        "tolerance": report.tolerance,
        "rechecked": report.rechecked,
    }


def cmd_apply(args: argparse.Namespace, config: RunConfig) -> int:
    """Apply phi(Delta_theta) to a polynomial."""
    mode = _mode(config, args.theta, (args.phi, args.poly))
    theta = mode.coerce_theta(_scalar(args.theta, mode))
    phi = load_poly(args.phi, mode)
    f = load_poly(args.poly, mode)
    _emit(dump_poly(apply_phi_of_delta(OperatorSpec.from_poly(phi), theta, f)))
    return EXIT_OK


def cmd_exp(args: argparse.Namespace, config: RunConfig) -> int:
    """Evaluate exp(a Delta_theta) on e^(uz) g(z) in closed form or through the kernel."""
    if args.method == "integral":
        mode = ScalarMode.floating(config.precision)
    else:
        mode = _mode(config, args.theta, (args.poly,))
    theta = mode.coerce_theta(_scalar(args.theta, mode))
    a = _scalar(args.a, mode)
    u = _scalar(args.u, mode) if args.u is not None else 0
    g = load_poly(args.poly, mode)
    if args.method == "closed":
        if u == 0:
            _emit(dump_poly(exp_delta_closed(a, theta, g)))
            return EXIT_OK
        result = operation_rule(a, u, theta, g)
        _emit(
            {
                "prefactor": scalar_to_wire(result.prefactor),
                "exp_coefficient": scalar_to_wire(result.exp_coefficient),
                "inner": dump_poly(result.inner),
            }
        )
        return EXIT_OK
    if args.z is None:
        raise argparse.ArgumentTypeError("--z is required for the integral method")
    if u:
        closed = operation_rule(a, u, theta, g).evaluate(args.z)

        def f(s: complex) -> complex:
            return complex(np.exp(u * s)) * complex(g(s))

    else:
        closed = complex(exp_delta_closed(a, theta, g)(args.z))
        f = g
    estimate = exp_delta_integral_refined(
        a, theta, f, args.z, order=args.order, precision=config.precision
    )
    _emit(
        {
            "value": scalar_to_wire(estimate.value),
            "order": estimate.order,
            "converged": estimate.converged,
            "closed_form": scalar_to_wire(closed),
        }
    )
    return EXIT_OK


def cmd_laguerre(args: argparse.Namespace, config: RunConfig) -> int:
    """Print the coefficients of L_n^theta = exp(-Delta_theta) z^n."""
    mode = _mode(config, args.theta)
    theta = mode.coerce_theta(_scalar(args.theta, mode))
    build = laguerre_rodrigues if args.route == "rodrigues" else laguerre_poly
    _emit(dump_poly(build(args.n, theta)))
    return EXIT_OK


def cmd_norm(args: argparse.Namespace, config: RunConfig) -> int:
    """Compute ||f||_b or N_b(f)."""
    mode = ScalarMode.floating(config.precision)
    b = float(_scalar(args.b, mode))
    if args.kind == "N":
        if args.form is None:
            raise argparse.ArgumentTypeError("--form is required for the N norm")
        _emit({"kind": "N", "b": b, "value": norm_N_laguerre(load_form(args.form, mode), b)})
        return EXIT_OK
    if args.poly is not None:
        report = norm_b(load_poly(args.poly, _mode(config, None, (args.poly,))), b)
    elif args.form is not None:
        form = load_form(args.form, mode)
        stream_type = 0.5 * (abs(float(form.alpha)) + b)
        report = norm_b(laguerre_stream(form, stream_type), b)
    else:
        raise argparse.ArgumentTypeError("--poly or --form is required for the b norm")
    _emit(
        {
            "kind": "b",
            "b": report.b,
            "value": report.value,
            "truncation_degree": report.truncation_degree,
            "tail_bound": report.tail_bound,
        }
    )
    return EXIT_OK


def cmd_bound_check(args: argparse.Namespace, config: RunConfig) -> int:
    """Check the operator norm bound for one (phi, f, a, b, theta)."""
    mode = ScalarMode.floating(config.precision)
    a = float(_scalar(args.a, mode))
    phi = OperatorSpec.from_poly(load_poly(args.phi, mode), type_bound=a)
    report = operator_bound_check(
        phi, load_poly(args.poly, mode), a, float(_scalar(args.b, mode)), _scalar(args.theta, mode)
    )
    _emit(
        {
            "c": report.c,
            "output_norm": report.output_norm,
            "bound": report.bound,
            "satisfied": report.satisfied,
        }
    )
    return EXIT_OK if report.satisfied else EXIT_FAILED


def cmd_zeros(args: argparse.Namespace, config: RunConfig) -> int:
    """Print the roots of a polynomial and its P+ classification."""
    p = load_poly(args.poly, ScalarMode.floating(config.precision))
    found = roots(p)
    _emit(
        {
            "roots": [scalar_to_wire(complex(r)) for r in found.roots],
            "residual": found.residual,
            "p_plus": classify_P_plus(p, config.tolerance),
        }
    )
    return EXIT_OK


def cmd_preserve(args: argparse.Namespace, config: RunConfig) -> int:
    """Run one zero-preservation trial."""
    mode = ScalarMode.floating(config.precision)
    theta = _scalar(args.theta, mode)
    f = load_poly(args.poly, mode)
    options = {"tol": config.tolerance, "precision": config.precision}
    if args.kind == "lemma":
        report = preservation_trial(f, _scalar(args.kappa, mode), theta, **options)
    elif args.kind == "theorem":
        if args.phi is None:
            raise argparse.ArgumentTypeError("--phi is required for the theorem trial")
        report = phi_preservation_trial(load_poly(args.phi, mode), f, theta, **options)
    else:
        report = exp_preservation_trial(_scalar(args.a, mode), theta, f, **options)
    _emit(_report_document(report))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_evolve(args: argparse.Namespace, config: RunConfig) -> int:
    """Solve the initial value problem at time t."""
    mode = _mode(config, args.theta, (args.h,))
    theta = mode.coerce_theta(_scalar(args.theta, mode))
    data = InitialData(_scalar(args.epsilon, mode), load_poly(args.h, mode))
    frame = evolve(data, theta, _scalar(args.t, mode))
    document: Dict[str, Any] = {
        "t": scalar_to_wire(frame.t),
        "prefactor": scalar_to_wire(frame.prefactor),
        "exp_coefficient": scalar_to_wire(frame.exp_coefficient),
        "inner": dump_poly(frame.inner),
    }
    if args.z:
        document["values"] = [scalar_to_wire(frame.evaluate(z)) for z in args.z]
    _emit(document)
    return EXIT_OK


def cmd_stabilize(args: argparse.Namespace, config: RunConfig) -> int:
    """Print the sup-norm profile over a disk along a time grid."""
    mode = ScalarMode.floating(config.precision)
    theta = _scalar(args.theta, mode)
    data = InitialData(_scalar(args.epsilon, mode), load_poly(args.h, mode))
    profile = stabilization_profile(data, theta, args.times, R=args.radius)
    if config.output is not None:
        _write(config.output, profile.to_csv())
    _emit(
        {
            "rows": [list(row) for row in profile.rows],
            "monotone_from": profile.monotone_from,
            "limit": scalar_to_wire(stabilization_limit(data, theta)),
        }
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    """Run property and oracle suites."""
    summaries = []
    lines: List[str] = []
    for name in suite_names(args.suite):
        result = run_suite(name, config.trials, config.seed, config.workers)
        summaries.append(result.summary())
        lines.extend(record.to_json_line() for record in result.records)
    if config.output is not None:
        _write(config.output, "".join(f"{line}\n" for line in lines))
    passed = all(summary["passed"] for summary in summaries)
    _emit({"passed": passed, "seed": config.seed, "suites": summaries})
    return EXIT_OK if passed else EXIT_FAILED


def cmd_rule_dump(args: argparse.Namespace, config: RunConfig) -> int:
    """Build a generalized Gauss-Laguerre rule and export it."""
    rule = gauss_laguerre_rule(float(Fraction(args.theta)), args.order)
    moment_error = max(rule.moment_residual(j) for j in range(2 * rule.order))
    document: Dict[str, Any] = {
        "theta": rule.theta,
        "order": rule.order,
        "max_moment_error": moment_error,
    }
    if config.output is not None:
        _write(config.output, rule_to_csv(rule))
        document["output"] = str(config.output)
    else:
        document["nodes"] = [float(node) for node in rule.nodes]
        document["weights"] = [float(weight) for weight in rule.weights]
    _emit(document)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laguerre-calc",
        description="Operator calculus of Delta_theta on entire functions of exponential type",
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    parser.add_argument("--mode", choices=("auto", "exact", "floating"), default="auto")
    parser.add_argument(
        "--precision", type=int, help="Extended precision in decimal digits (default from "
        "LAGUERRE_CALC_PRECISION, else 50)"
    )
    parser.add_argument("--tolerance", type=float, help="Root verdict tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("apply", help="Apply phi(Delta_theta) to a polynomial")
    s.add_argument("--phi", required=True, help='Symbol as {"coeffs": [...]}')
    s.add_argument("--poly", required=True, help='Polynomial as {"coeffs": [...]}')
    s.add_argument("--theta", required=True)
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("exp", help="Evaluate exp(a Delta_theta)")
    s.add_argument("--method", choices=("closed", "integral"), default="closed")
    s.add_argument("--a", required=True)
    s.add_argument("--theta", required=True)
    s.add_argument("--poly", required=True, help="Polynomial factor g")
    s.add_argument("--u", help="Exponential coefficient of the input e^(uz) g(z)")
    s.add_argument("--z", type=_complex, help="Evaluation point for the integral method")
    s.add_argument("--order", type=int, default=DEFAULT_ORDER, choices=range(1, MAX_ORDER + 1),
                   metavar="Q")
    s.set_defaults(func=cmd_exp)

    s = sub.add_parser("laguerre", help="Print L_n^theta = exp(-Delta_theta) z^n")
    s.add_argument("--n", type=int, required=True, choices=range(0, 1000), metavar="N")
    s.add_argument("--theta", required=True)
    s.add_argument("--route", choices=("closed", "rodrigues"), default="closed")
    s.set_defaults(func=cmd_laguerre)

    s = sub.add_parser("norm", help="Compute ||f||_b or N_b(f)")
    s.add_argument("--kind", choices=("b", "N"), default="b")
    s.add_argument("--b", required=True)
    s.add_argument("--poly", help='Polynomial as {"coeffs": [...]}')
    s.add_argument("--form", help='Laguerre form as {"C", "l", "alpha", "betas"}')
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("bound-check", help="Check the operator norm bound")
    s.add_argument("--phi", required=True)
    s.add_argument("--poly", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--theta", required=True)
    s.set_defaults(func=cmd_bound_check)

    s = sub.add_parser("zeros", help="Roots and P+ classification of a polynomial")
    s.add_argument("--poly", required=True)
    s.set_defaults(func=cmd_zeros)

    s = sub.add_parser("preserve", help="Run one zero-preservation trial")
    s.add_argument("--kind", choices=("lemma", "theorem", "exp"), default="lemma")
    s.add_argument("--poly", required=True, help="Input polynomial in P+")
    s.add_argument("--theta", required=True)
    s.add_argument("--kappa", default="0")
    s.add_argument("--phi", help="Symbol in P+ for the theorem trial")
    s.add_argument("--a", default="1")
    s.set_defaults(func=cmd_preserve)

    s = sub.add_parser("evolve", help="Solve the evolution equation at time t")
    s.add_argument("--epsilon", default="0")
    s.add_argument("--h", required=True, help="Polynomial factor of the initial value")
    s.add_argument("--theta", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--z", type=_complex, nargs="*", default=[])
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("stabilize", help="Sup-norm profile over a disk")
    s.add_argument("--epsilon", required=True)
    s.add_argument("--h", default='{"coeffs": [1]}')
    s.add_argument("--theta", required=True)
    s.add_argument("--times", type=_times, default=[0.0, 1.0, 10.0, 100.0, 1000.0])
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--output", type=Path, help='CSV file with rows "t,sup_norm"')
    s.set_defaults(func=cmd_stabilize)

    s = sub.add_parser("verify", help="Run property and oracle suites")
    s.add_argument("--suite", choices=("all", *SUITES), default="all")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--output", type=Path, help="JSON-lines file of trial records")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("rule-dump", help="Export a generalized Gauss-Laguerre rule")
    s.add_argument("--theta", required=True)
    s.add_argument("--order", type=int, default=DEFAULT_ORDER, choices=range(1, MAX_ORDER + 1),
                   metavar="Q")
    s.add_argument("--output", type=Path, help='CSV file with rows "node,weight"')
    s.set_defaults(func=cmd_rule_dump)
    return parser


CommandHandler = Callable[[argparse.Namespace, RunConfig], int]


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and return the exit code."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=args.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = RunConfig.from_args(args)
    except ValidationError as e:
        print(f"error: invalid options: {e}", file=sys.stderr)
        return EXIT_USAGE
    handler: CommandHandler = args.func
    try:
        return handler(args, config)
    except (argparse.ArgumentTypeError, ValueError, KeyError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CalculusError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
