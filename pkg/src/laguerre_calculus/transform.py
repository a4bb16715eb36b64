# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Integral realization of exp(a Delta_theta).

For a > 0 and theta > 0:

    exp(a Delta_theta) f (z) = e^(-z/a) int_0^inf s^(theta-1) e^(-s) w_theta(sz/a) f(as) ds

with w_theta(z) = sum z^k / gamma_theta(k) and K_theta(z, s) = e^(-z) w_theta(zs). The
integral is discretized by the generalized Gauss-Laguerre rule of the weight
s^(theta-1) e^(-s), on nodes stretched to cover the peak of the integrand. Sums that
cancel are redone in extended precision.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import mpmath
import numpy as np
from scipy import linalg, special

from laguerre_calculus.operators import (
    OperationRuleDomainError,
    UnsupportedThetaError,
    laguerre_poly,
    operation_rule,
)
from laguerre_calculus.rendering import render
from laguerre_calculus.series import Poly, Scalar, default_precision

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 80
MAX_ORDER = 320
REFINEMENT_TOLERANCE = 1e-10
KERNEL_TOLERANCE = 1e-17
SERIES_RADIUS = 16.0
CANCELLATION_LIMIT = 1e2
NEWTON_STEPS = 8
RULE_TEMPLATE = "rule.csv.j2"

Evaluable = Union[Poly, Callable[[complex], complex]]


@dataclass(frozen=True)
class QuadratureRule:
    """Generalized Gauss-Laguerre rule for the weight s^(theta-1) e^(-s) on [0, inf).

    The rule integrates s^j exactly for j <= 2Q - 1 and its weights sum to Gamma(theta).
    The logarithms of the weights are kept alongside them since the smallest weights of
    large rules underflow.
    """

    theta: float
    order: int
    nodes: Tuple[float, ...]
    weights: Tuple[float, ...]
    log_weights: Tuple[float, ...]

    def integrate(self, integrand: Callable[[np.ndarray], np.ndarray]) -> complex:
        """Return sum w_i integrand(s_i)."""
        values = integrand(np.asarray(self.nodes))
        return complex(np.dot(np.asarray(self.weights), values))

    def moment_residual(self, j: int) -> float:
        """Return the relative error of sum w_i s_i^j against Gamma(theta + j).

        Evaluated in log scale so that high moments of large rules do not overflow.
        """
        log_terms = np.asarray(self.log_weights) + j * np.log(np.asarray(self.nodes))
        ratio = np.sum(np.exp(log_terms - special.gammaln(self.theta + j)))
        return float(abs(ratio - 1.0))


def _recurrence(theta: float, order: int, x: np.ndarray):
    """Evaluate the monic orthogonal polynomials p_{Q-1}, p_Q and p_Q' at x.

    The values are rescaled as the recurrence runs; the returned log scale is shared
    by all three arrays.
    """
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    log_scale = np.zeros_like(x)
    for k in range(order):
        alpha = 2 * k + theta
        beta = k * (k + theta - 1)
        p_next = (x - alpha) * p - beta * p_prev
        dp_next = p + (x - alpha) * dp - beta * dp_prev
        p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
        size = np.maximum(np.abs(p), np.abs(dp))
        big = size > 1e100
        if np.any(big):
            factor = np.where(big, size, 1.0)
            p_prev, p, dp_prev, dp = p_prev / factor, p / factor, dp_prev / factor, dp / factor
            log_scale = log_scale + np.log(factor)
    return p_prev, p, dp, log_scale


@lru_cache(maxsize=64)
def gauss_laguerre_rule(theta: float, order: int) -> QuadratureRule:
    """Build the Q-point rule by the Golub-Welsch eigenvalue method.

    The Jacobi matrix has diagonal 2k + theta and off-diagonal sqrt(k (k + theta - 1)).
    Its eigenvalues are polished by one Newton step on the monic recurrence, and the
    weights are computed in log scale as
    Gamma(theta) prod_k beta_k / (p_{Q-1}(s_i) p_Q'(s_i)).

    Args:
        theta: weight exponent parameter, theta > 0
        order: number of nodes Q >= 1

    Returns:
        QuadratureRule: nodes in increasing order with positive weights

    Raises:
        UnsupportedThetaError: if theta <= 0
    """
    theta = float(theta)
    if theta <= 0:
        raise UnsupportedThetaError(
            f"Quadrature requires theta > 0, got {theta}; use the closed form instead"
        )
    if order < 1:
        raise ValueError(f"Invalid quadrature order: {order}")
    k = np.arange(order, dtype=float)
    diagonal = 2 * k + theta
    off_diagonal = np.sqrt(k[1:] * (k[1:] + theta - 1))
    if order == 1:
        nodes = diagonal.copy()
    else:
        nodes = np.sort(linalg.eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True))
    _, p, dp, _ = _recurrence(theta, order, nodes)
    nodes = nodes - p / dp
    p_prev, _, dp, log_scale = _recurrence(theta, order, nodes)
    log_beta = special.gammaln(order) + special.gammaln(order + theta - 1) - special.gammaln(theta)
    log_weights = (
        special.gammaln(theta) + log_beta - 2 * log_scale - np.log(np.abs(p_prev * dp))
    )
    weights = np.exp(log_weights)
    logger.debug("Built %d-point rule for theta=%s", order, theta)
    return QuadratureRule(
        theta=theta,
        order=order,
        nodes=tuple(float(x) for x in nodes),
        weights=tuple(float(w) for w in weights),
        log_weights=tuple(float(w) for w in log_weights),
    )


def _series_w(theta: float, z: complex) -> complex:
    t_k = complex(special.rgamma(theta))
    if z == 0:
        return t_k
    total = t_k
    t_k = z * complex(special.rgamma(theta + 1))
    k = 1
    while True:
        total += t_k
        ratio = abs(z) / ((k + 1) * (theta + k))
        if ratio < 0.5 and abs(t_k) <= KERNEL_TOLERANCE * max(abs(total), 1e-300):
            return total
        t_k = t_k * z / ((k + 1) * (theta + k))
        k += 1


def _scaled_w(theta: float, z: complex) -> Tuple[complex, float]:
    """Return (m, e) with w_theta(z) = m exp(e)."""
    if abs(z) <= SERIES_RADIUS:
        return _series_w(theta, z), 0.0
    root = cmath.sqrt(z)
    argument = 2 * root
    mantissa = root ** (1 - theta) * complex(special.ive(theta - 1, argument))
    return mantissa, abs(argument.real)


def w_theta(theta: Scalar, z: Scalar) -> complex:
    """Return w_theta(z) = sum_k z^k / (k! Gamma(theta + k)).

    Small arguments are summed directly until the ratio test certifies the tail;
    larger ones use w_theta(z) = z^((1-theta)/2) I_(theta-1)(2 sqrt z). For theta = 0 the
    k = 0 term vanishes.
    """
    mantissa, exponent = _scaled_w(float(theta), complex(z))
    return mantissa * math.exp(exponent) if exponent else mantissa


def kernel_k(theta: Scalar, z: Scalar, s: Scalar) -> complex:
    """Return K_theta(z, s) = e^(-z) w_theta(zs) without forming either factor alone.

    Values beyond the double range come back infinite instead of raising.
    """
    z = complex(z)
    mantissa, exponent = _scaled_w(float(theta), z * complex(s))
    with np.errstate(over="ignore"):
        size = complex(np.exp(exponent - z.real))
    return mantissa * size * cmath.exp(-1j * z.imag)


def node_stretch(x: complex, order: int) -> float:
    """Return the factor lambda >= 1 that moves the peak of the integrand inside the rule.

    For s^(theta-1) e^(-s) w_theta(s x) the modulus peaks near s = (Re sqrt x)^2, while
    the nodes of a Q-point rule reach about 4Q. Substituting s = lambda sigma keeps the
    peak below 2Q:

        int = lambda^theta int sigma^(theta-1) e^(-sigma) e^(-(lambda-1) sigma) G(lambda sigma)
    """
    peak = cmath.sqrt(x).real ** 2
    return max(1.0, peak / (2 * order))


def _integrand_terms(
    a: float, theta: float, f: Evaluable, z: complex, rule: QuadratureRule
) -> np.ndarray:
    x = z / a
    stretch = node_stretch(x, rule.order)
    sigma = np.asarray(rule.nodes)
    mantissas = np.empty(rule.order, dtype=complex)
    exponents = np.empty(rule.order)
    values = np.empty(rule.order, dtype=complex)
    for i, node in enumerate(rule.nodes):
        s = stretch * node
        mantissas[i], exponents[i] = _scaled_w(theta, s * x)
        values[i] = complex(f(a * s))
    log_sizes = (
        np.asarray(rule.log_weights)
        + theta * math.log(stretch)
        - (stretch - 1) * sigma
        + exponents
        - x.real
    )
    with np.errstate(over="ignore", invalid="ignore"):
        return mantissas * np.exp(log_sizes - 1j * x.imag) * values


def _to_mp(c: Scalar):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def _mp_recurrence(theta, order: int, x):
    p_prev, p = 0, 1
    dp_prev, dp = 0, 0
    for k in range(order):
        alpha = 2 * k + theta
        beta = k * (k + theta - 1)
        p_next = (x - alpha) * p - beta * p_prev
        dp_next = p + (x - alpha) * dp - beta * dp_prev
        p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
    return p_prev, p, dp


@lru_cache(maxsize=16)
def _extended_rule(theta: float, order: int, precision: int) -> Tuple[tuple, tuple]:
    """Return nodes and weights of the Q-point rule to `precision` decimal digits.

    The double nodes are Newton-polished on the monic recurrence and the weights follow
    Gamma(Q) Gamma(Q + theta - 1) / (p_{Q-1}(s_i) p_Q'(s_i)).
    """
    start = gauss_laguerre_rule(theta, order)
    with mpmath.workdps(precision):
        t = mpmath.mpf(theta)
        tolerance = mpmath.mpf(10) ** (-precision)
        constant = mpmath.gamma(order) * mpmath.gamma(order + t - 1)
        nodes, weights = [], []
        for guess in start.nodes:
            node = mpmath.mpf(guess)
            for _ in range(NEWTON_STEPS):
                _, p, dp = _mp_recurrence(t, order, node)
                step = p / dp
                node -= step
                if abs(step) <= tolerance * node:
                    break
            p_prev, _, dp = _mp_recurrence(t, order, node)
            nodes.append(node)
            weights.append(constant / abs(p_prev * dp))
    logger.debug("Built %d-point rule for theta=%s at %d digits", order, theta, precision)
    return tuple(nodes), tuple(weights)


def _extended_integral(
    a: float, theta: float, f: Poly, z: complex, order: int, precision: int
) -> complex:
    nodes, weights = _extended_rule(theta, order, precision)
    stretch = node_stretch(z / a, order)
    with mpmath.workdps(precision):
        t = mpmath.mpf(theta)
        x = mpmath.mpc(z) / a
        lam = mpmath.mpf(stretch)
        coeffs = [_to_mp(c) for c in reversed(f.coeffs)]
        total = mpmath.mpc(0)
        for sigma, weight in zip(nodes, weights):
            s = lam * sigma
            value = mpmath.mpc(0)
            for c in coeffs:
                value = value * (a * s) + c
            kernel = mpmath.hyp0f1(t, s * x)
            total += weight * mpmath.exp(-(lam - 1) * sigma) * kernel * value
        return complex(lam**t * mpmath.rgamma(t) * mpmath.exp(-x) * total)


def exp_delta_integral(
    a: float,
    theta: float,
    f: Evaluable,
    z: complex,
    rule: QuadratureRule,
    precision: Optional[int] = None,
) -> complex:
    """Evaluate exp(a Delta_theta) f at z through the kernel integral.

    The terms are assembled in log scale on nodes stretched by `node_stretch`. When f is
    a polynomial and the terms cancel by more than CANCELLATION_LIMIT against their sum,
    the sum is redone with mpmath at `precision` digits.

    Args:
        a: time parameter, a > 0
        theta: must match the rule's theta
        f: function evaluable on the positive axis
        z: evaluation point
        rule: quadrature rule for s^(theta-1) e^(-s)
        precision: digits for the cancellation recheck, default from the environment

    Returns:
        complex: e^(-z/a) sum_i w_i w_theta(s_i z/a) f(a s_i)
    """
    if a <= 0:
        raise ValueError(f"Integral representation requires a > 0, got {a}")
    if not math.isclose(float(theta), rule.theta):
        raise ValueError(f"Rule built for theta={rule.theta}, got theta={theta}")
    a, z = float(a), complex(z)
    terms = _integrand_terms(a, rule.theta, f, z, rule)
    value = complex(np.sum(terms))
    magnitude = float(np.sum(np.abs(terms)))
    if isinstance(f, Poly) and not magnitude <= CANCELLATION_LIMIT * abs(value):
        precision = precision or default_precision()
        logger.debug(
            "Integral terms cancel (%g against %g), summing at %d digits",
            magnitude,
            abs(value),
            precision,
        )
        value = _extended_integral(a, rule.theta, f, z, rule.order, precision)
    return value


@dataclass(frozen=True)
class IntegralEstimate:
    """Result of the doubling refinement."""

    value: complex
    order: int
    converged: bool


def exp_delta_integral_refined(
    a: float,
    theta: float,
    f: Evaluable,
    z: complex,
    order: int = DEFAULT_ORDER,
    max_order: int = MAX_ORDER,
    tolerance: float = REFINEMENT_TOLERANCE,
    precision: Optional[int] = None,
) -> IntegralEstimate:
    """Double the rule order until two successive estimates agree relative to their size."""
    previous = exp_delta_integral(
        a, theta, f, z, gauss_laguerre_rule(float(theta), order), precision
    )
    while order < max_order:
        order = min(2 * order, max_order)
        current = exp_delta_integral(
            a, theta, f, z, gauss_laguerre_rule(float(theta), order), precision
        )
        change = abs(current - previous)
        scale = max(abs(current), abs(previous))
        logger.debug("Refinement at Q=%d: change %g against %g", order, change, scale)
        if change <= tolerance * scale:
            return IntegralEstimate(value=current, order=order, converged=True)
        previous = current
    logger.warning("Quadrature refinement stopped at Q=%d without agreement", order)
    return IntegralEstimate(value=previous, order=order, converged=False)


def exp_delta_L_minus(a: float, theta: Scalar, u: float, g: Poly, z: Scalar) -> complex:
    """Evaluate exp(a Delta_theta) [e^(uz) g(z)] at z for u < 0 through the operation rule.

    Raises:
        OperationRuleDomainError: if u >= 0
    """
    if u >= 0:
        raise OperationRuleDomainError(f"The L- extension requires u < 0, got u={u}")
    return operation_rule(a, u, theta, g).evaluate(z)


def appell_partial_sum(theta: Scalar, z: Scalar, s: Scalar, N: int) -> complex:
    """Return sum_{n<=N} z^n / n! L_n(s) / Gamma(theta + n), with L_n = exp(-Delta_theta) z^n.

    For integer theta and real s the polynomials are evaluated in exact rationals,
    which avoids the cancellation of their alternating coefficients.
    """
    exact = (
        not isinstance(theta, complex)
        and float(theta) == int(theta)
        and theta > 0
        and not isinstance(s, complex)
    )
    point = Fraction(s) if exact else complex(s)
    theta_value = int(theta) if exact else theta
    total = 0j
    power = 1 + 0j
    for n in range(N + 1):
        value = laguerre_poly(n, theta_value)(point)
        total += power * complex(value) * complex(special.rgamma(float(theta) + n))
        power = power * complex(z) / (n + 1)
    return total


def rule_to_csv(rule: QuadratureRule) -> str:
    """Render the rule as CSV rows "node,weight"."""
    return render(RULE_TEMPLATE, rows=list(zip(rule.nodes, rule.weights)))
