# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Zero locations of polynomials and certification of zero preservation.

A polynomial is in P+ when all its zeros are real and nonpositive. The trials here apply
an operator to a P+ input, extract the roots of the output and certify that they stay on
the nonpositive axis up to a scale-relative tolerance. Failing verdicts are recomputed
from exact rational inputs with extended-precision roots before they are reported.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import mpmath
import numpy as np
from mpmath.libmp.libhyper import NoConvergence
from numpy.polynomial import polynomial as npoly

from laguerre_calculus.operators import (
    OperatorSpec,
    apply_delta,
    apply_phi_of_delta,
    exp_delta_closed,
)
from laguerre_calculus.series import CalculusError, Poly, Scalar, default_precision

logger = logging.getLogger(__name__)

VERDICT_TOLERANCE = 1e-7
RESIDUAL_TOLERANCE = 1e-9
CLUSTER_DISTANCE = 1e-6
MAX_ITERATIONS = 500
ROOT_EXPONENT_RANGE = 3.0


class RootsNotConvergedError(CalculusError):
    """Raised when no root solver reaches the residual tolerance.

    Attributes:
        partial: the best roots found
    """

    def __init__(self, message: str, partial: Tuple[complex, ...] = ()):
        super().__init__(message)
        self.partial = partial


class ClassificationError(CalculusError):
    """Raised when an input does not belong to the class an operation requires."""


class Verdict(str, Enum):
    """Outcome of a preservation trial."""

    PASS = "pass"
    FAIL = "fail"
    VACUOUS_PASS = "vacuous-pass"


@dataclass(frozen=True)
class RootSet:
    """All complex roots with multiplicity and the worst backward residual."""

    roots: Tuple[complex, ...]
    residual: float = 0.0

    def clusters(self, distance: float = CLUSTER_DISTANCE) -> List[Tuple[complex, int]]:
        """Group roots closer than `distance` into (mean, multiplicity) pairs."""
        groups: List[List[complex]] = []
        for root in sorted(self.roots, key=lambda r: (r.real, r.imag)):
            for group in groups:
                if abs(group[0] - root) < distance:
                    group.append(root)
                    break
            else:
                groups.append([root])
        return [(complex(np.mean(group)), len(group)) for group in groups]


@dataclass(frozen=True)
class PreservationReport:
    """Certified zero locations of a trial output."""

    input_class: str
    output: Poly
    output_roots: RootSet
    max_imag: float
    max_real_part: float
    verdict: Verdict
    tolerance: float = VERDICT_TOLERANCE
    rechecked: bool = False
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Return whether the verdict is a pass (vacuous or not)."""
        return self.verdict is not Verdict.FAIL


def _relative_residual(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    values = np.abs(npoly.polyval(roots, coeffs))
    scale = npoly.polyval(np.abs(roots), np.abs(coeffs))
    return values / np.where(scale > 0, scale, 1.0)


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    """Points on a circle whose radius matches the geometric mean of the root moduli."""
    degree = len(coeffs) - 1
    radius = abs(coeffs[0] / coeffs[-1]) ** (1.0 / degree)
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    return radius * np.exp(1j * angles)


def _aberth(coeffs: np.ndarray, max_iterations: int) -> Tuple[np.ndarray, bool]:
    derivative = npoly.polyder(coeffs)
    z = _initial_guesses(coeffs)
    degree = len(z)
    limit = 4 * degree * np.finfo(float).eps
    for iteration in range(max_iterations):
        if np.all(_relative_residual(coeffs, z) <= limit):
            logger.debug("Aberth iteration converged after %d steps", iteration)
            return z, True
        values = npoly.polyval(z, coeffs)
        slopes = npoly.polyval(z, derivative)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = values / slopes
            differences = z[:, None] - z[None, :]
            np.fill_diagonal(differences, 1.0)
            repulsion = np.sum(1.0 / differences, axis=1) - 1.0
            correction = ratio / (1 - ratio * repulsion)
        correction = np.where(np.isfinite(correction), correction, 0.0)
        z = z - correction
        if np.all(np.abs(correction) <= 1e-15 * (1 + np.abs(z))):
            return z, True
    return z, False


def _polish(coeffs: np.ndarray, z: np.ndarray, steps: int = 3) -> np.ndarray:
    derivative = npoly.polyder(coeffs)
    for _ in range(steps):
        slopes = npoly.polyval(z, derivative)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = npoly.polyval(z, coeffs) / slopes
        z = z - np.where(np.isfinite(step), step, 0.0)
    return z


def roots(p: Poly, max_iterations: int = MAX_ITERATIONS) -> RootSet:
    """Return all complex roots of p with multiplicity.

    Zero roots are split off exactly from the trailing zero coefficients. The rest come
    from an Aberth-Ehrlich iteration, with the companion-matrix eigenvalues (polished by
    Newton steps) as fallback.

    Raises:
        ValueError: if deg p < 1
        RootsNotConvergedError: if neither solver reaches the residual tolerance
    """
    if p.is_zero or p.degree < 1:
        raise ValueError("Root extraction requires a polynomial of degree >= 1")
    coeffs = p.as_array()
    zero_count = int(np.argmax(coeffs != 0))
    reduced = coeffs[zero_count:]
    found = np.zeros(zero_count, dtype=complex)
    if len(reduced) > 1:
        estimate, converged = _aberth(reduced, max_iterations)
        if not converged or np.max(_relative_residual(reduced, estimate)) > RESIDUAL_TOLERANCE:
            logger.warning(
                "Aberth iteration failed at degree %d, using companion matrix", p.degree
            )
            estimate = _polish(reduced, np.roots(reduced[::-1]).astype(complex))
            if np.max(_relative_residual(reduced, estimate)) > RESIDUAL_TOLERANCE:
                raise RootsNotConvergedError(
                    f"Roots of the degree {p.degree} polynomial did not converge",
                    partial=tuple(complex(r) for r in np.concatenate([found, estimate])),
                )
        found = np.concatenate([found, estimate])
    residual = float(np.max(_relative_residual(coeffs, found))) if len(found) else 0.0
    return RootSet(roots=tuple(complex(r) for r in found), residual=residual)


def _spread(found: Tuple[complex, ...]) -> Tuple[float, float, float]:
    """Return (scale, max |Im r|, max Re r) with scale = 1 + max |r|."""
    if not found:
        return 1.0, 0.0, -math.inf
    scale = 1.0 + max(abs(r) for r in found)
    return (
        scale,
        max(abs(r.imag) for r in found),
        max(r.real for r in found),
    )


def classify_P_plus(p: Poly, tol: float = VERDICT_TOLERANCE) -> bool:  # noqa: N802
    """Return whether every root of p is real and nonpositive up to tol * (1 + max |r|).

    Raises:
        ClassificationError: for the zero polynomial
    """
    if p.is_zero:
        raise ClassificationError("The zero polynomial has no zero class")
    if p.degree == 0:
        return True
    scale, max_imag, max_real = _spread(roots(p).roots)
    return max_imag <= tol * scale and max_real <= tol * scale


def _mpmath_roots(p: Poly, precision: int) -> Tuple[complex, ...]:
    coeffs = list(p.coeffs)
    zero_count = 0
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        zero_count += 1
    if len(coeffs) < 2:
        return (0j,) * zero_count
    with mpmath.workdps(precision):
        values = [
            mpmath.mpf(c.numerator) / c.denominator
            if isinstance(c, Fraction)
            else mpmath.mpmathify(c)
            for c in reversed(coeffs)
        ]
        try:
            found = mpmath.polyroots(values, maxsteps=200, extraprec=2 * precision)
        except NoConvergence as e:
            raise RootsNotConvergedError(
                f"Extended-precision roots did not converge at {precision} digits"
            ) from e
        return (0j,) * zero_count + tuple(complex(r) for r in found)


def _certify(
    input_class: str,
    output: Poly,
    tol: float,
    exact_output: Optional[Callable[[], Poly]] = None,
    precision: Optional[int] = None,
    details: Optional[dict] = None,
) -> PreservationReport:
    details = details or {}
    if output.is_zero:
        return PreservationReport(
            input_class, output, RootSet(()), 0.0, -math.inf, Verdict.VACUOUS_PASS, tol,
            details=details,
        )
    root_set = roots(output) if output.degree > 0 else RootSet(())
    scale, max_imag, max_real = _spread(root_set.roots)
    passed = max_imag <= tol * scale and max_real <= tol * scale
    if passed or exact_output is None:
        verdict = Verdict.PASS if passed else Verdict.FAIL
        return PreservationReport(
            input_class, output, root_set, max_imag, max_real, verdict, tol, details=details
        )
    precision = precision or default_precision()
    logger.warning(
        "Rechecking failing verdict (max |Im|=%g, max Re=%g) at %d digits",
        max_imag, max_real, precision,
    )
    exact = exact_output()
    rechecked = RootSet(_mpmath_roots(exact, precision))
    scale, max_imag, max_real = _spread(rechecked.roots)
    passed = max_imag <= tol * scale and max_real <= tol * scale
    return PreservationReport(
        input_class,
        exact,
        rechecked,
        max_imag,
        max_real,
        Verdict.PASS if passed else Verdict.FAIL,
        tol,
        rechecked=True,
        details=details,
    )


def _require_p_plus(p: Poly, name: str, tol: float) -> None:
    if p.is_zero or not classify_P_plus(p, tol):
        raise ClassificationError(f"Input {name} is not in P+")


def _exact(value: Scalar) -> Fraction:
    return Fraction(value)


def _exact_poly(p: Poly) -> Poly:
    return Poly(tuple(Fraction(c) for c in p.coeffs))


def preservation_trial(
    p: Poly,
    kappa: Scalar,
    theta: Scalar,
    tol: float = VERDICT_TOLERANCE,
    precision: Optional[int] = None,
) -> PreservationReport:
    """Certify that (kappa + Delta_theta) p stays in P+.

    Raises:
        ClassificationError: if p is not in P+ or kappa, theta < 0
    """
    if kappa < 0 or theta < 0:
        raise ClassificationError(f"Trial requires kappa, theta >= 0, got {kappa}, {theta}")
    _require_p_plus(p, "p", tol)
    output = p * kappa + apply_delta(theta, p)
    return _certify(
        "P+",
        output,
        tol,
        exact_output=lambda: (
            _exact_poly(p) * _exact(kappa) + apply_delta(_exact(theta), _exact_poly(p))
        ),
        precision=precision,
        details={"kappa": kappa, "theta": theta},
    )


def stage_factors(phi: Poly) -> Tuple[Scalar, List[float]]:
    """Split phi(w) = lead * prod (kappa_j + w) and return (lead, [kappa_j])."""
    lead = phi.coeffs[-1]
    if phi.degree == 0:
        return lead, []
    kappas = [max(-r.real, 0.0) for r in roots(phi).roots]
    return lead, sorted(kappas)


def phi_preservation_trial(
    phi: Poly,
    f: Poly,
    theta: Scalar,
    tol: float = VERDICT_TOLERANCE,
    precision: Optional[int] = None,
) -> PreservationReport:
    """Certify that phi(Delta_theta) f stays in P+ for phi, f in P+.

    phi is applied as a product of stages (kappa_j + Delta_theta); the exact recheck
    applies the unfactored symbol to rational inputs.

    Raises:
        ClassificationError: if phi or f is not in P+
    """
    if theta < 0:
        raise ClassificationError(f"Trial requires theta >= 0, got {theta}")
    _require_p_plus(phi, "phi", tol)
    _require_p_plus(f, "f", tol)
    lead, kappas = stage_factors(phi)
    output = f
    for kappa in kappas:
        output = output * kappa + apply_delta(theta, output)
    output = output * lead

    def exact_output() -> Poly:
        return apply_phi_of_delta(
            OperatorSpec.from_poly(_exact_poly(phi)), _exact(theta), _exact_poly(f)
        )

    return _certify(
        "P+",
        output,
        tol,
        exact_output=exact_output,
        precision=precision,
        details={"theta": theta, "stages": kappas},
    )


def exp_preservation_trial(
    a: Scalar,
    theta: Scalar,
    f: Poly,
    tol: float = VERDICT_TOLERANCE,
    precision: Optional[int] = None,
) -> PreservationReport:
    """Certify that exp(a Delta_theta) f stays in P+ for a >= 0.

    Raises:
        ClassificationError: if f is not in P+ or a < 0
    """
    if a < 0 or theta < 0:
        raise ClassificationError(f"Trial requires a, theta >= 0, got {a}, {theta}")
    _require_p_plus(f, "f", tol)
    return _certify(
        "P+",
        exp_delta_closed(a, theta, f),
        tol,
        exact_output=lambda: exp_delta_closed(_exact(a), _exact(theta), _exact_poly(f)),
        precision=precision,
        details={"a": a, "theta": theta},
    )


def random_p_plus(rng: np.random.Generator, degree: int) -> Poly:
    """Draw a monic P+ polynomial of the given degree.

    Zero roots number 0, 1 or 2 (at most the degree); the other roots are
    -exp(U[-3, 3]).
    """
    zero_count = min(int(rng.integers(0, 3)), degree)
    exponents = rng.uniform(-ROOT_EXPONENT_RANGE, ROOT_EXPONENT_RANGE, degree - zero_count)
    negatives = -np.exp(exponents)
    return Poly.from_roots([0.0] * zero_count + [float(r) for r in negatives]).to_float()
