# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Property and oracle suites run by `laguerre-calc verify`.

Every case is a pure function of (suite, seed, index): randomized cases draw from
`np.random.default_rng([seed, index])`, grid cases pick the index-th grid point. Results
are therefore independent of how cases are spread across worker processes.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from laguerre_calculus.evolution import (
    InitialData,
    pde_residual,
    radial_identity_check,
    stabilization_profile,
)
from laguerre_calculus.interchange import ComplexValue, TrialRecord, dump_poly
from laguerre_calculus.norms import (
    laguerre_stream,
    mu_k,
    norm_b,
    norm_N_laguerre,
    operator_bound_check,
    sandwich_constant,
)
from laguerre_calculus.operators import (
    OperatorSpec,
    exp_delta_closed,
    laguerre_poly,
    laguerre_rodrigues,
    vandermonde_residual,
)
from laguerre_calculus.series import LaguerreForm, Poly, reciprocal_gamma_theta
from laguerre_calculus.transform import (
    appell_partial_sum,
    exp_delta_integral,
    gauss_laguerre_rule,
    kernel_k,
)
from laguerre_calculus.zeros import (
    PreservationReport,
    exp_preservation_trial,
    phi_preservation_trial,
    preservation_trial,
    random_p_plus,
)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0

ORACLE_THETAS = (0.5, 1, 2, 3.5)
INTEGRAL_THETAS = (0.5, 1.0, 2.0, 4.0)
INTEGRAL_TIMES = (0.25, 0.5, 1.0)
INTEGRAL_POINTS = (0j, 2.5 + 0j, -4 + 0j, 1 + 2j, -3 + 1j)
MOMENT_ORDERS = (16, 80)
NORM_PARAMETERS = (0.5, 1.0, 2.0)
PDE_THETA = 1.5
PDE_TIMES = tuple(float(t) for t in np.linspace(0.1, 2.0, 10))
PDE_POINTS = tuple(float(z) for z in np.linspace(-1.5, 1.5, 10))
PDE_DATA = (
    InitialData(0, Poly((0, 1))),
    InitialData(
        0, Poly(tuple(float(reciprocal_gamma_theta(PDE_THETA, k)) for k in range(11)))
    ),
    InitialData(1, Poly((1,))),
    InitialData(1, Poly((1, 1))),
    InitialData(0.5, Poly((2, 3, 1))),
)
PDE_STEP = 5e-6
STABILIZATION_TIMES = (0.0, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class TrialOutcome:
    """The result of one suite case."""

    passed: bool
    inputs: Dict[str, Any] = field(default_factory=dict)
    metrics: Dict[str, float] = field(default_factory=dict)
    verdict: Optional[str] = None
    roots: Tuple[complex, ...] = ()


@dataclass(frozen=True)
class Suite:
    """A named property or oracle check.

    Attributes:
        name: suite name on the command line
        description: one-line summary
        case: (index, rng) -> TrialOutcome
        default_trials: number of randomized cases when not given
        grid_size: number of cases of a deterministic grid; None for randomized suites
    """

    name: str
    description: str
    case: Callable[[int, np.random.Generator], TrialOutcome]
    default_trials: int = 100
    grid_size: Optional[int] = None

    def count(self, trials: Optional[int]) -> int:
        """Return the number of cases to run."""
        if self.grid_size is not None:
            return self.grid_size
        return self.default_trials if trials is None else trials


@dataclass(frozen=True)
class SuiteResult:
    """All records of one suite run, ordered by case index."""

    name: str
    seed: int
    records: Tuple[TrialRecord, ...]

    @property
    def failures(self) -> int:
        """Return the number of failing cases."""
        return sum(1 for record in self.records if not record.passed)

    @property
    def passed(self) -> bool:
        """Return whether every case passed."""
        return self.failures == 0

    def summary(self) -> Dict[str, Any]:
        """Return the JSON summary document of the run."""
        worst: Dict[str, float] = {}
        for record in self.records:
            for key, value in record.metrics.items():
                if math.isfinite(value):
                    worst[key] = max(worst.get(key, -math.inf), value)
        return {
            "suite": self.name,
            "seed": self.seed,
            "trials": len(self.records),
            "failures": self.failures,
            "passed": self.passed,
            "worst": worst,
        }


def _relative_gap(left: Poly, right: Poly) -> float:
    size = max(len(left.coeffs), len(right.coeffs))
    scale = max((abs(complex(c)) for c in right.coeffs), default=0.0)
    if scale == 0:
        scale = 1.0
    return max(
        (abs(complex(left.coefficient(k) - right.coefficient(k))) / scale for k in range(size)),
        default=0.0,
    )


def _coefficientwise_gap(left: Poly, right: Poly) -> float:
    size = max(len(left.coeffs), len(right.coeffs))
    worst = 0.0
    for k in range(size):
        reference = abs(complex(right.coefficient(k)))
        difference = abs(complex(left.coefficient(k) - right.coefficient(k)))
        worst = max(worst, difference / reference if reference else difference)
    return worst


def _random_poly(rng: np.random.Generator, degree: int) -> Poly:
    return Poly(tuple(float(c) for c in rng.uniform(-1.0, 1.0, degree + 1)))


def _report_outcome(report: PreservationReport, inputs: Dict[str, Any]) -> TrialOutcome:
    return TrialOutcome(
        passed=report.passed,
        inputs=inputs,
        metrics={
            "max_imag": report.max_imag,
            "max_real_part": report.max_real_part,
            "residual": report.output_roots.residual,
        },
        verdict=report.verdict.value,
        roots=report.output_roots.roots,
    )


def laguerre_oracle_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """Compare the two Laguerre polynomial routes on the (n, theta) grid."""
    n, theta = list(itertools.product(range(16), ORACLE_THETAS))[index]
    exact = isinstance(theta, int)
    left = laguerre_poly(n, theta)
    right = laguerre_rodrigues(n, theta)
    if exact:
        gap = 0.0 if left == right else 1.0
        return TrialOutcome(gap == 0.0, {"n": n, "theta": theta}, {"gap": gap})
    gap = _coefficientwise_gap(left, right)
    return TrialOutcome(gap <= 1e-10, {"n": n, "theta": theta}, {"gap": gap})


def semigroup_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """exp(a Delta) exp(a' Delta) f = exp((a + a') Delta) f, exactly on even cases."""
    degree = int(rng.integers(0, 13))
    if index % 2 == 0:
        f = Poly(tuple(Fraction(int(c)) for c in rng.integers(-9, 10, degree + 1)))
        a = Fraction(int(rng.integers(-8, 9)), 8)
        b = Fraction(int(rng.integers(-8, 9)), 8)
        two_step = exp_delta_closed(a, 1, exp_delta_closed(b, 1, f))
        one_step = exp_delta_closed(a + b, 1, f)
        inputs = {"f": dump_poly(f), "a": str(a), "a_prime": str(b), "theta": 1}
        gap = 0.0 if two_step == one_step else 1.0
        return TrialOutcome(gap == 0.0, inputs, {"gap": gap})
    f = _random_poly(rng, degree)
    a, b = (float(x) for x in rng.uniform(-1.0, 1.0, 2))
    theta = float(rng.uniform(0.0, 4.0))
    gap = _relative_gap(
        exp_delta_closed(a, theta, exp_delta_closed(b, theta, f, keep_exact=True)),
        exp_delta_closed(a + b, theta, f),
    )
    inputs = {"f": dump_poly(f), "a": a, "a_prime": b, "theta": theta}
    return TrialOutcome(gap <= 1e-9, inputs, {"gap": gap})


_INTEGRAL_GRID = list(
    itertools.product(range(11), INTEGRAL_THETAS, INTEGRAL_TIMES, INTEGRAL_POINTS)
)


def integral_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """Quadrature route against the closed form on monomials."""
    m, theta, a, z = _INTEGRAL_GRID[index]
    f = Poly.monomial(m)
    rule = gauss_laguerre_rule(theta, 80)
    quadrature = exp_delta_integral(a, theta, f, z, rule)
    closed = complex(exp_delta_closed(a, theta, f)(z))
    error = abs(quadrature - closed) / abs(closed)
    inputs = {"m": m, "theta": theta, "a": a, "z": [z.real, z.imag]}
    return TrialOutcome(error <= 1e-8, inputs, {"relative_error": error})


def lemma_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """(kappa + Delta_theta) keeps random P+ polynomials in P+."""
    p = random_p_plus(rng, int(rng.integers(1, 13)))
    kappa, theta = (float(x) for x in rng.uniform(0.0, 3.0, 2))
    report = preservation_trial(p, kappa, theta)
    return _report_outcome(report, {"p": dump_poly(p), "kappa": kappa, "theta": theta})


def theorem_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """phi(Delta_theta) keeps P+ in P+ for phi in P+, applied stage by stage."""
    phi = random_p_plus(rng, int(rng.integers(0, 9)))
    f = random_p_plus(rng, int(rng.integers(1, 9)))
    theta = float(rng.uniform(0.0, 3.0))
    report = phi_preservation_trial(phi, f, theta)
    return _report_outcome(report, {"phi": dump_poly(phi), "f": dump_poly(f), "theta": theta})


def exp_preservation_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """exp(a Delta_theta) keeps P+ in P+ for a >= 0."""
    f = random_p_plus(rng, int(rng.integers(1, 11)))
    a = float(rng.uniform(0.0, 2.0))
    theta = float(rng.uniform(0.0, 3.0))
    report = exp_preservation_trial(a, theta, f)
    return _report_outcome(report, {"f": dump_poly(f), "a": a, "theta": theta})


def operator_bound_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """||phi(Delta_theta) f||_c <= (1-ab)^(-theta) ||phi||_a ||f||_b."""
    a = float(rng.uniform(0.1, 2.0))
    b = float(rng.uniform(0.05, 0.99 / a))
    theta = float(rng.uniform(0.0, 3.0))
    phi = _random_poly(rng, int(rng.integers(0, 7)))
    f = _random_poly(rng, int(rng.integers(0, 11)))
    report = operator_bound_check(OperatorSpec.from_poly(phi, type_bound=a), f, a, b, theta)
    inputs = {"phi": dump_poly(phi), "f": dump_poly(f), "a": a, "b": b, "theta": theta}
    slack = report.output_norm / report.bound if report.bound else 0.0
    return TrialOutcome(report.satisfied, inputs, {"ratio": slack})


def norm_identity_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """||z^n / n!||_a = a^(-n) exactly."""
    n, a = list(itertools.product(range(31), NORM_PARAMETERS))[index]
    value = norm_b(Poly.monomial(n, Fraction(1, math.factorial(n))), a).value
    expected = a ** (-n)
    return TrialOutcome(value == expected, {"n": n, "a": a}, {"gap": abs(value - expected)})


def _random_form(rng: np.random.Generator) -> LaguerreForm:
    return LaguerreForm(
        C=float(rng.uniform(0.5, 2.0)),
        l=int(rng.integers(0, 3)),
        alpha=float(rng.uniform(0.0, 1.0)),
        betas=tuple(float(beta) for beta in rng.uniform(0.0, 1.0, int(rng.integers(0, 4)))),
    )


def sandwich_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """N_b(f) <= ||f||_b <= C(b, eps) N_(b-eps)(f) on random L+ forms."""
    form = _random_form(rng)
    alpha = float(form.alpha)
    b = alpha + float(rng.uniform(0.5, 3.0))
    eps = float(rng.uniform(0.1, 0.9)) * (b - alpha)
    stream = laguerre_stream(form, alpha + 0.5 * (b - alpha))
    report = norm_b(stream, b)
    degree = max(report.truncation_degree, 40)
    if degree != report.truncation_degree:
        report = norm_b(stream, b, degree)
    lower = norm_N_laguerre(form, b)
    constant = sandwich_constant(b, eps)
    upper = constant * norm_N_laguerre(form, b - eps)
    slack = 1 + 1e-12
    passed = lower <= report.value * slack and report.value + report.tail_bound <= upper * slack
    inputs = {
        "C": form.C, "l": form.l, "alpha": alpha, "betas": list(form.betas), "b": b, "eps": eps,
    }
    metrics = {
        "N_b": lower,
        "norm_b": report.value,
        "tail_bound": report.tail_bound,
        "upper": upper,
        "mu_1": float(mu_k(form, 1)),
    }
    return TrialOutcome(passed, inputs, metrics)


def vandermonde_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """Gamma convolution identity at random points."""
    z = complex(1.5, 0.5) if rng.uniform() < 0.2 else complex(rng.uniform(0.5, 5.0))
    m, k = (int(x) for x in rng.integers(0, 13, 2))
    residual = vandermonde_residual(z, m, k)
    inputs = {"z": [z.real, z.imag], "m": m, "k": k}
    return TrialOutcome(residual <= 1e-10, inputs, {"residual": residual})


_PDE_GRID = list(itertools.product(range(len(PDE_DATA)), PDE_TIMES, PDE_POINTS))


def pde_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """The solution frame satisfies the evolution equation on a (t, z) grid."""
    which, t, z = _PDE_GRID[index]
    data = PDE_DATA[which]
    theta = PDE_THETA
    residual = pde_residual(data, theta, t, z, dt=PDE_STEP)
    inputs = {"epsilon": data.epsilon, "h": dump_poly(data.h), "theta": theta, "t": t, "z": z}
    return TrialOutcome(residual <= 1e-8, inputs, {"residual": residual})


def stabilization_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """e^(-z) with theta = 1 decays on the unit disk, monotonically from t = 1."""
    profile = stabilization_profile(InitialData(1, Poly((1,))), 1, STABILIZATION_TIMES, R=1.0)
    final = profile.rows[-1][1]
    start = STABILIZATION_TIMES.index(1.0)
    passed = final <= 1.1e-3 and profile.monotone_from <= start
    return TrialOutcome(
        passed,
        {"epsilon": 1, "theta": 1, "R": 1.0, "times": list(STABILIZATION_TIMES)},
        {"final_sup": final, "monotone_from": float(profile.monotone_from)},
    )


_MOMENT_GRID = list(itertools.product(MOMENT_ORDERS, INTEGRAL_THETAS))


def moments_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """Gauss rules reproduce Gamma(theta + j) for j <= 2Q - 1."""
    order, theta = _MOMENT_GRID[index]
    rule = gauss_laguerre_rule(theta, order)
    worst = max(rule.moment_residual(j) for j in range(2 * order))
    return TrialOutcome(worst <= 1e-10, {"order": order, "theta": theta}, {"moment_error": worst})


def radial_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """(Delta_theta f)(z^2) against the radial form of the operator."""
    f = _random_poly(rng, int(rng.integers(0, 9)))
    theta = float(rng.uniform(0.0, 3.0))
    z = complex(rng.uniform(0.3, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
    residual = radial_identity_check(f, theta, z)
    inputs = {"f": dump_poly(f), "theta": theta, "z": [z.real, z.imag]}
    return TrialOutcome(residual <= 1e-10, inputs, {"residual": residual})


def appell_case(index: int, rng: np.random.Generator) -> TrialOutcome:
    """Partial sums of the Appell expansion converge to K_theta at N = 40."""
    z, s = (float(x) for x in rng.uniform(-3.0, 3.0, 2))
    residual = abs(appell_partial_sum(1, z, s, 40) - kernel_k(1, z, s))
    return TrialOutcome(residual <= 1e-10, {"z": z, "s": s, "theta": 1}, {"residual": residual})


SUITES: Dict[str, Suite] = {
    suite.name: suite
    for suite in (
        Suite(
            "laguerre",
            "Laguerre polynomials by both routes",
            laguerre_oracle_case,
            grid_size=16 * len(ORACLE_THETAS),
        ),
        Suite("semigroup", "group law of exp(a Delta_theta)", semigroup_case, 200),
        Suite(
            "integral",
            "kernel integral against the closed form",
            integral_case,
            grid_size=len(_INTEGRAL_GRID),
        ),
        Suite("lemma", "(kappa + Delta_theta) preserves P+", lemma_case, 1000),
        Suite("theorem", "phi(Delta_theta) preserves P+", theorem_case, 1000),
        Suite(
            "exp-preservation", "exp(a Delta_theta) preserves P+", exp_preservation_case, 200
        ),
        Suite("operator-bound", "operator norm bound", operator_bound_case, 500),
        Suite(
            "norm-identity",
            "||z^n/n!||_a = a^-n",
            norm_identity_case,
            grid_size=31 * len(NORM_PARAMETERS),
        ),
        Suite("sandwich", "N_b <= ||.||_b <= C N_(b-eps)", sandwich_case, 50),
        Suite("vandermonde", "Gamma convolution identity", vandermonde_case, 200),
        Suite("pde", "evolution equation residual", pde_case, grid_size=len(_PDE_GRID)),
        Suite("stabilization", "decay of the e^(-z) solution", stabilization_case, grid_size=1),
        Suite(
            "moments", "quadrature moment exactness", moments_case, grid_size=len(_MOMENT_GRID)
        ),
        Suite("radial", "radial form of Delta_theta", radial_case, 200),
        Suite("appell", "Appell expansion of the kernel", appell_case, 100),
    )
}


def run_case(name: str, seed: int, index: int) -> TrialRecord:
    """Run one case of a suite and return its audit record."""
    suite = SUITES[name]
    outcome = suite.case(index, np.random.default_rng([seed, index]))
    return TrialRecord(
        suite=name,
        index=index,
        seed=seed,
        passed=outcome.passed,
        verdict=outcome.verdict or ("pass" if outcome.passed else "fail"),
        inputs=outcome.inputs,
        roots=[ComplexValue(re=r.real, im=r.imag) for r in outcome.roots],
        metrics=outcome.metrics,
    )


def _run_packed(arguments: Tuple[str, int, int]) -> TrialRecord:
    return run_case(*arguments)


def run_suite(
    name: str,
    trials: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> SuiteResult:
    """Run all cases of a suite, optionally across worker processes.

    Raises:
        KeyError: for an unknown suite name
    """
    suite = SUITES[name]
    count = suite.count(trials)
    logger.info("Running suite %s: %d cases, seed %d, %d workers", name, count, seed, workers)
    arguments = [(name, seed, index) for index in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            records: Sequence[TrialRecord] = list(
                executor.map(_run_packed, arguments, chunksize=max(1, count // (4 * workers)))
            )
    else:
        records = [_run_packed(packed) for packed in arguments]
    result = SuiteResult(name=name, seed=seed, records=tuple(records))
    logger.info("Suite %s finished with %d failures", name, result.failures)
    return result


def suite_names(selection: str) -> List[str]:
    """Expand a --suite argument ("all" or a single name)."""
    if selection == "all":
        return list(SUITES)
    if selection not in SUITES:
        raise KeyError(selection)
    return [selection]
