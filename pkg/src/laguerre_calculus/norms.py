# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Norms on spaces of entire functions of exponential type.

- ||f||_b = sup_k b^(-k) |f^(k)(0)|, computed on Taylor coefficients as b^(-k) k! |c_k|.
- N_b(f) = sup_z |f(z)| e^(-b|z|), computed for Laguerre forms with C > 0 and alpha >= 0,
  for which the maximum modulus on |z| = r is attained at z = r.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np
from scipy import optimize

from laguerre_calculus.operators import CompositionDomainError, OperatorSpec, apply_phi_of_delta
from laguerre_calculus.series import (
    CalculusError,
    LaguerreForm,
    Poly,
    Scalar,
    TaylorStream,
    is_exact,
)

logger = logging.getLogger(__name__)

STREAM_TAIL_TOLERANCE = 1e-12
MAX_STREAM_DEGREE = 400
ROOT_TOLERANCE = 1e-12
BOUND_SLACK = 1e-12
DECREASING_RUN = 10


class NormDomainError(CalculusError):
    """Raised when a norm is requested outside the range where it is finite or defined."""


class SequenceHypothesisError(CalculusError):
    """Raised when a member of a sequence of forms violates the boundedness hypothesis."""


@dataclass(frozen=True)
class NormReport:
    """A norm value with its truncation certificate.

    For polynomials the value is exact and tail_bound is 0. For streams the true norm
    lies in [value, value + tail_bound].
    """

    b: float
    value: float
    truncation_degree: int
    tail_bound: float = 0.0


@dataclass(frozen=True)
class SequenceParams:
    """The parameters (C_n, l_n, alpha_n, betas(n)) of a sequence of Laguerre forms."""

    forms: Tuple[LaguerreForm, ...]


@dataclass(frozen=True)
class OperatorBoundReport:
    """Outcome of checking ||phi(Delta_theta) f||_c <= (1-ab)^(-theta) ||phi||_a ||f||_b."""

    c: float
    output_norm: float
    bound: float
    satisfied: bool


def _weighted(k: int, c: Scalar, b: Scalar) -> Union[float, Fraction]:
    """Return b^(-k) k! |c_k|, exact when both c and b are."""
    if is_exact(c) and is_exact(b):
        return Fraction(math.factorial(k)) * abs(Fraction(c)) / Fraction(b) ** k
    magnitude = abs(complex(c))
    if magnitude == 0:
        return 0.0
    if is_exact(c):
        try:
            return float(math.factorial(k) * abs(Fraction(c))) / float(b) ** k
        except OverflowError:
            pass
    return math.exp(math.lgamma(k + 1) + math.log(magnitude) - k * math.log(float(b)))


def norm_b(
    f: Union[Poly, TaylorStream], b: Scalar, degree: Optional[int] = None
) -> NormReport:
    """Return ||f||_b.

    Args:
        f: a polynomial (exact finite sup) or a Taylor stream (truncated sup with tail)
        b: norm parameter, b > 0
        degree: truncation degree for streams; chosen from the stream majorant if omitted

    Returns:
        NormReport: the value, the degree used and the tail certificate

    Raises:
        NormDomainError: if b <= 0
    """
    if b <= 0:
        raise NormDomainError(f"The norm requires b > 0, got b={b}")
    if isinstance(f, Poly):
        value = max(
            (_weighted(k, c, b) for k, c in enumerate(f.coeffs)),
            default=0.0,
        )
        return NormReport(b=float(b), value=float(value), truncation_degree=f.degree)
    ratio = f.type_bound / float(b)
    if degree is None:
        degree = MAX_STREAM_DEGREE
        if ratio < 1:
            needed = math.log(STREAM_TAIL_TOLERANCE) / math.log(ratio) if ratio > 0 else 0
            degree = min(MAX_STREAM_DEGREE, max(int(math.ceil(needed)), 1))
    value = max(float(_weighted(k, f.coefficient(k), b)) for k in range(degree + 1))
    tail = f.norm_bound * ratio ** (degree + 1) if ratio < 1 else math.inf
    if math.isinf(tail):
        logger.warning("Stream of type %s gives no tail certificate at b=%s", f.type_bound, b)
    return NormReport(b=float(b), value=value, truncation_degree=degree, tail_bound=tail)


def mu_k(form: LaguerreForm, k: int) -> Scalar:
    """Return the power sum mu_k = sum_j beta_j^k."""
    return sum((beta**k for beta in form.betas), 0)


def sequence_bound(
    params: SequenceParams, a: float, C: float, l: int, b: float  # noqa: E741, N803
) -> float:
    """Return the uniform bound K = sup_k C (k/a)^l (a/b)^k of ||f_n||_b.

    The sup over k is evaluated at the two integers bracketing k* = l / ln(b/a).

    Raises:
        SequenceHypothesisError: if a member has |alpha_n| + mu_1(n) > a, |C_n| > C
            or l_n > l, or if b <= a
    """
    if a <= 0 or b <= a:
        raise SequenceHypothesisError(f"The bound requires 0 < a < b, got a={a}, b={b}")
    if C < 0:
        raise SequenceHypothesisError(f"The bound requires C >= 0, got C={C}")
    for n, form in enumerate(params.forms):
        if abs(float(form.alpha)) + float(mu_k(form, 1)) > a * (1 + 1e-12):
            raise SequenceHypothesisError(
                f"Member {n} violates |alpha| + mu_1 <= a: "
                f"{abs(float(form.alpha)) + float(mu_k(form, 1))} > {a}"
            )
        if abs(complex(form.C)) > C * (1 + 1e-12):
            raise SequenceHypothesisError(f"Member {n} violates |C| <= {C}: |C|={abs(form.C)}")
        if form.l > l:
            raise SequenceHypothesisError(f"Member {n} violates l <= {l}: l={form.l}")
    if l == 0 or C == 0:
        return float(C)
    peak = l / math.log(b / a)
    candidates = {max(math.floor(peak), 1), math.ceil(peak)}
    return max(
        math.exp(math.log(C) + l * math.log(k / a) + k * math.log(a / b)) for k in candidates
    )


def sandwich_constant(b: float, eps: float) -> float:
    """Return C(b, eps) = sup_k k! / k^k (1 - eps/b)^k e^k with C_0 = 1.

    The terms behave like sqrt(2 pi k) (1 - eps/b)^k, so the scan stops after
    ten consecutive decreases.

    Raises:
        NormDomainError: unless 0 < eps < b
    """
    if not 0 < eps < b:
        raise NormDomainError(f"The sandwich constant requires 0 < eps < b, got b={b}, eps={eps}")
    log_shrink = math.log(1 - eps / b)
    best = 0.0
    previous = 0.0
    run = 0
    k = 0
    while run < DECREASING_RUN:
        k += 1
        log_term = math.lgamma(k + 1) - k * math.log(k) + k * log_shrink + k
        best = max(best, log_term)
        run = run + 1 if log_term < previous else 0
        previous = log_term
    return math.exp(best)


def _check_positive_form(form: LaguerreForm) -> None:
    if form.alpha < 0 or isinstance(form.C, complex) or form.C <= 0:
        raise NormDomainError(
            f"N-norm evaluation requires C > 0 and alpha >= 0, got C={form.C}, alpha={form.alpha}"
        )


def _log_profile(form: LaguerreForm, c: float, r: float) -> float:
    """Return log(f(r) e^(-cr))."""
    value = math.log(float(form.C)) + (float(form.alpha) - c) * r
    if form.l:
        value += form.l * math.log(r)
    return value + sum(math.log1p(float(beta) * r) for beta in form.betas)


def norm_N_laguerre(form: LaguerreForm, c: float) -> float:  # noqa: N802
    """Return N_c(f) for an L+ form with C > 0.

    The maximizer r_c of f(r) e^(-cr) solves c = alpha + l/r + sum beta_j / (1 + beta_j r),
    whose right side decreases from +inf (l > 0) or alpha + mu_1 (l = 0) to alpha.
    For l = 0 and c >= alpha + mu_1 the supremum sits at r = 0 and equals C.

    Raises:
        NormDomainError: if c <= alpha or the form is outside the supported class
    """
    _check_positive_form(form)
    alpha = float(form.alpha)
    if c <= alpha:
        raise NormDomainError(
            f"Norm is infinite: c={c} is outside the A_alpha range (alpha={alpha})"
        )
    betas = [float(beta) for beta in form.betas]
    if form.l == 0 and c >= alpha + sum(betas):
        return float(form.C)

    def stationarity(r: float) -> float:
        left = alpha + sum(beta / (1 + beta * r) for beta in betas) - c
        return left + form.l / r if form.l else left

    low = form.l / (c - alpha) / 2 if form.l else 0.0
    high = 2 * (form.l + len(betas)) / (c - alpha)
    r_c = optimize.brentq(stationarity, low, high, xtol=ROOT_TOLERANCE)
    logger.debug("N-norm maximizer r_c=%s for c=%s", r_c, c)
    return math.exp(_log_profile(form, c, r_c))


def norm_N_sampled(  # noqa: N802
    form: LaguerreForm, b: float, radius: float, samples: int = 4096
) -> float:
    """Return max over a radial grid in [0, radius] of f(r) e^(-br), a sampling oracle for N_b."""
    _check_positive_form(form)
    grid = np.linspace(0.0, radius, samples)
    log_values = (math.log(float(form.C)) + (float(form.alpha) - b) * grid)
    if form.l:
        with np.errstate(divide="ignore"):
            log_values = log_values + form.l * np.log(grid)
    for beta in form.betas:
        log_values = log_values + np.log1p(float(beta) * grid)
    return float(np.exp(np.max(log_values)))


def _factored_bound(form: LaguerreForm, b: float) -> float:
    """Return sum_j |p_j| j! b^(-j) (1 - |alpha|/b)^(-(j+1)) for f = P e^(alpha z), b > |alpha|.

    It follows from f^(k)(0) = sum_j p_j j! C(k, j) alpha^(k-j) and
    sum_k C(k, j) x^(k-j) = (1 - x)^(-(j+1)).
    """
    shrink = 1 - abs(float(form.alpha)) / b
    return sum(
        abs(complex(p))
        * math.exp(math.lgamma(j + 1) - j * math.log(b) - (j + 1) * math.log(shrink))
        for j, p in enumerate(form.polynomial_part().coeffs)
        if p != 0
    )


def laguerre_stream(form: LaguerreForm, b: float) -> TaylorStream:
    """Return the Taylor stream of a form with a certified majorant of ||f||_b.

    For b > a = |alpha| + mu_1 the boundedness bound of the one-member sequence applies;
    for any b > |alpha| the factored bound of P(z) e^(alpha z) does. The smaller one
    is used.

    Raises:
        SequenceHypothesisError: if b <= |alpha|
    """
    alpha = abs(float(form.alpha))
    if b <= alpha:
        raise SequenceHypothesisError(f"Stream type b={b} must exceed |alpha|={alpha}")
    a = alpha + float(mu_k(form, 1))
    magnitude = abs(complex(form.C))
    if a == 0:
        bound = math.factorial(form.l) * magnitude / b**form.l
    else:
        bound = _factored_bound(form, b)
        if b > a:
            bound = min(bound, sequence_bound(SequenceParams((form,)), a, magnitude, form.l, b))
    return TaylorStream.from_form(form, type_bound=b, norm_bound=bound)


def operator_bound_check(
    phi: OperatorSpec, f: Poly, a: float, b: float, theta: Scalar
) -> OperatorBoundReport:
    """Compare ||phi(Delta_theta) f||_c with (1-ab)^(-theta) ||phi||_a ||f||_b, c = b/(1-ab).

    Raises:
        CompositionDomainError: if ab >= 1
    """
    if a * b >= 1:
        raise CompositionDomainError(f"Composition requires a * b < 1, got a={a}, b={b}")
    g = apply_phi_of_delta(phi, theta, f)
    c = b / (1 - a * b)
    output_norm = norm_b(g, c).value
    bound = (1 - a * b) ** (-float(theta)) * phi.norm(a) * norm_b(f, b).value
    return OperatorBoundReport(
        c=c,
        output_norm=output_norm,
        bound=bound,
        satisfied=output_norm <= bound * (1 + BOUND_SLACK),
    )
