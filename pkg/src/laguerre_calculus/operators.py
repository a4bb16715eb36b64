# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""The operator Delta_theta = theta D + z D^2 and functions of it.

On a polynomial f(z) = sum c_m z^m the operator phi(Delta_theta), with
phi(w) = sum phi_k w^k, acts coefficient-wise:

    g_n = sum_k phi_k c_{n+k} q_theta^(n+k, k)

which is a finite sum because q_theta^(m,k) vanishes for k > m. The exponential
exp(a Delta_theta) is the case phi_k = a^k / k! and is valid for every real a on
polynomials. Laguerre polynomials are exp(-Delta_theta) z^n; the Rodrigues route
computes them independently.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from laguerre_calculus.series import (
    CalculusError,
    Poly,
    Scalar,
    ScalarModeError,
    TaylorStream,
    exact_div,
    exp_series,
    is_exact,
)

logger = logging.getLogger(__name__)

SERIES_TOLERANCE = 1e-15
MAX_SERIES_TERMS = 20_000
POLE_DISTANCE = 1e-6


class UnsupportedThetaError(CalculusError):
    """Raised when an operation is requested for a theta it does not support."""


class OperationRuleDomainError(CalculusError):
    """Raised when u * a >= 1, outside the domain of the operation rule."""


class CompositionDomainError(CalculusError):
    """Raised when a * b >= 1, where phi(Delta_theta) does not map B_b into a B_c."""


class IllConditionedEvaluationError(CalculusError):
    """Raised when an evaluation point lies too close to a pole of Gamma."""


@dataclass(frozen=True)
class OperatorSpec:
    """A symbol phi given by its Taylor coefficients phi_k = phi^(k)(0) / k!.

    Attributes:
        coefficient: k -> phi_k
        type_bound: a, with ||phi||_a <= norm_bound
        norm_bound: majorant of ||phi||_a; None when only finite sums are needed
        length: number of coefficients for finite symbols, None for infinite ones
    """

    coefficient: Callable[[int], Scalar]
    type_bound: float = 0.0
    norm_bound: Optional[float] = None
    length: Optional[int] = None

    @classmethod
    def from_coefficients(
        cls, coeffs: Sequence[Scalar], type_bound: float = 1.0
    ) -> "OperatorSpec":
        """Return the polynomial symbol with the given Taylor coefficients.

        A polynomial has every finite norm, so any type a > 0 may be stated.
        """
        values = tuple(Poly(tuple(coeffs)).coeffs)
        return cls(
            coefficient=lambda k: values[k] if k < len(values) else 0,
            type_bound=type_bound,
            norm_bound=None,
            length=len(values),
        )

    @classmethod
    def from_poly(cls, phi: Poly, type_bound: float = 1.0) -> "OperatorSpec":
        """Return the symbol of a polynomial phi."""
        return cls.from_coefficients(phi.coeffs, type_bound)

    @classmethod
    def identity(cls) -> "OperatorSpec":
        """Return phi = 1."""
        return cls.from_coefficients((1,))

    @classmethod
    def exponential(cls, a: Scalar) -> "OperatorSpec":
        """Return phi(w) = exp(a w), for which ||phi||_|a| = 1."""
        return cls(
            coefficient=partial(_exponential_term, a),
            type_bound=abs(float(a)),
            norm_bound=1.0,
            length=None,
        )

    def terms(self, limit: int) -> List[Scalar]:
        """Return phi_0 .. phi_{limit-1}, stopping early for finite symbols."""
        stop = limit if self.length is None else min(limit, self.length)
        return [self.coefficient(k) for k in range(stop)]

    def norm(self, a: float) -> float:
        """Return ||phi||_a for a finite symbol, else the stored majorant."""
        if self.length is None:
            if self.norm_bound is None:
                raise ValueError("Infinite symbol without a norm majorant")
            return self.norm_bound
        values = self.terms(self.length)
        if a <= 0:
            if any(c != 0 for c in values[1:]):
                return math.inf
            return abs(float(values[0])) if values else 0.0
        return max(
            (math.factorial(k) * abs(complex(c)) / a**k for k, c in enumerate(values)),
            default=0.0,
        )


@lru_cache(maxsize=65536, typed=True)
def _exponential_term(a: Scalar, k: int) -> Scalar:
    """Return a^k / k!, exact when a is."""
    if is_exact(a):
        return Fraction(a) ** k / math.factorial(k)
    if k == 0:
        return 1
    if a == 0:
        return 0.0
    if k <= 170:
        try:
            power = a**k
        except OverflowError:
            power = math.inf
        if power != 0 and math.isfinite(power):
            return power / math.gamma(k + 1)
    size = math.exp(k * math.log(abs(a)) - math.lgamma(k + 1))
    return -size if a < 0 and k % 2 else size


def _output_coefficient(
    phi: Callable[[int], Scalar],
    theta: Scalar,
    coeffs: Sequence[Scalar],
    n: int,
    length: Optional[int],
) -> Scalar:
    total: Scalar = 0
    q: Scalar = 1
    last = len(coeffs) - n
    if length is not None:
        last = min(last, length)
    for k in range(last):
        if k:
            # q_theta^(n+k, k) from q_theta^(n+k-1, k-1)
            q = q * (n + k) * (theta + n + k - 1)
        c = coeffs[n + k]
        if c == 0:
            continue
        phi_k = phi(k)
        if phi_k == 0:
            continue
        total = total + phi_k * c * q
    return total


def apply_delta(theta: Scalar, f: Poly) -> Poly:
    """Return Delta_theta f = theta f' + z f''.

    The coefficient of z^n is c_{n+1} (n + 1)(theta + n), so a nonconstant input loses
    exactly one degree (or vanishes identically when theta = 0 and f = c0 + c1 z).
    """
    return Poly(
        tuple(c * k * (theta + k - 1) for k, c in enumerate(f.coeffs) if k > 0)
    )


def apply_phi_of_delta(phi: OperatorSpec, theta: Scalar, f: Poly) -> Poly:
    """Apply phi(Delta_theta) to a polynomial.

    Args:
        phi: the symbol
        theta: parameter theta >= 0
        f: polynomial input

    Returns:
        Poly: the output, of degree at most deg f
    """
    coeffs = f.coeffs
    return Poly(
        tuple(
            _output_coefficient(phi.coefficient, theta, coeffs, n, phi.length)
            for n in range(len(coeffs))
        )
    )


def _rational_parts(f: Poly) -> Tuple[Poly, Optional[Poly]]:
    """Split f into the binary rationals of its real and imaginary parts.

    Raises:
        ValueError, OverflowError: on non-finite coefficients
    """
    if not any(isinstance(c, complex) for c in f.coeffs):
        return Poly(tuple(Fraction(c) for c in f.coeffs)), None
    return (
        Poly(tuple(Fraction(complex(c).real) for c in f.coeffs)),
        Poly(tuple(Fraction(complex(c).imag) for c in f.coeffs)),
    )


def exp_delta_closed(a: Scalar, theta: Scalar, f: Poly, keep_exact: bool = False) -> Poly:
    """Return exp(a Delta_theta) f for a polynomial f and any real a.

    Floating inputs are taken as the binary rationals they are and the sum is carried out
    in rationals, so every output coefficient is rounded once. With `keep_exact` the
    unrounded rational result is returned.

    Raises:
        ScalarModeError: if `keep_exact` is set and a, theta or f has no rational form
    """
    if is_exact(a) and is_exact(theta) and f.is_exact:
        if a == 0:
            return f
        return apply_phi_of_delta(OperatorSpec.exponential(a), theta, f)
    if a == 0 and not keep_exact:
        return f
    try:
        a_q, theta_q = Fraction(a), Fraction(theta)
        real, imag = _rational_parts(f)
    except (TypeError, ValueError, OverflowError) as e:
        if keep_exact:
            raise ScalarModeError(f"No rational form for a={a}, theta={theta}") from e
        return apply_phi_of_delta(OperatorSpec.exponential(a), theta, f)
    if keep_exact and imag is not None:
        raise ScalarModeError("Complex coefficients have no rational form")
    spec = OperatorSpec.exponential(a_q)
    real = apply_phi_of_delta(spec, theta_q, real)
    if keep_exact:
        return real
    if imag is None:
        return Poly(tuple(float(c) for c in real.coeffs))
    imag = apply_phi_of_delta(spec, theta_q, imag)
    size = max(len(real.coeffs), len(imag.coeffs))
    return Poly(
        tuple(complex(float(real.coefficient(k)), float(imag.coefficient(k))) for k in range(size))
    )


def _stream_coefficient(
    phi: OperatorSpec,
    theta: float,
    f: TaylorStream,
    n: int,
    tolerance: float,
) -> Scalar:
    """Sum the k-series of one output coefficient for a non-polynomial input.

    Terms are bounded by the majorant t_k = M_phi M_f a^k b^(n+k) q(n+k, k) / (k! (n+k)!),
    whose consecutive ratio is a b (theta + n + k) / (k + 1). The sum stops once the
    geometric tail estimate falls below `tolerance` relative to the magnitude reached.
    """
    a = phi.type_bound
    b = f.type_bound
    ab = a * b
    if phi.length is not None:
        total: Scalar = 0
        q: Scalar = 1
        for k in range(phi.length):
            if k:
                q = q * (n + k) * (theta + n + k - 1)
            total = total + phi.coefficient(k) * f.coefficient(n + k) * q
        return total
    log_t0 = (
        math.log(max(phi.norm(a), 1e-300))
        + math.log(max(f.norm_bound, 1e-300))
        + (n * math.log(b) if b > 0 else (0.0 if n == 0 else -math.inf))
        - math.lgamma(n + 1)
    )
    t0 = math.exp(log_t0) if log_t0 > -745 else 0.0
    total = 0
    magnitude = 0.0
    q = 1
    t_k = t0
    for k in range(MAX_SERIES_TERMS):
        if k:
            q = q * (n + k) * (theta + n + k - 1)
        term = phi.coefficient(k) * f.coefficient(n + k) * q
        total = total + term
        magnitude += abs(complex(term))
        t_k = t_k * ab * (theta + n + k) / (k + 1)
        ratio = max(ab * (theta + n + k + 1) / (k + 2), ab)
        if ratio < 1:
            tail = t_k / (1 - ratio)
            scale = magnitude if magnitude > 0 else t0
            if tail <= tolerance * scale:
                logger.debug("Output coefficient %d converged after %d terms", n, k + 1)
                return total
    logger.warning("Output coefficient %d did not reach tolerance %g", n, tolerance)
    return total


def _stream_output(
    phi: OperatorSpec, theta: float, f: TaylorStream, tolerance: float
) -> Callable[[int], Scalar]:
    @lru_cache(maxsize=None)
    def coefficient(n: int) -> Scalar:
        return _stream_coefficient(phi, theta, f, n, tolerance)

    return coefficient


def apply_phi_to_stream(
    phi: OperatorSpec,
    theta: Scalar,
    f: TaylorStream,
    tolerance: float = SERIES_TOLERANCE,
) -> TaylorStream:
    """Apply phi(Delta_theta) to a non-polynomial input given as a Taylor stream.

    The output carries the operator-norm majorant: with a the type of phi and b the
    type of f, g = phi(Delta_theta) f has ||g||_c <= (1 - ab)^(-theta) ||phi||_a ||f||_b
    for c = b / (1 - ab).

    Raises:
        CompositionDomainError: if ab >= 1
    """
    a = phi.type_bound
    b = f.type_bound
    if a * b >= 1:
        raise CompositionDomainError(
            f"Composition requires a * b < 1, got a={a}, b={b}"
        )
    c = b / (1 - a * b)
    norm_bound = (1 - a * b) ** (-float(theta)) * phi.norm(a) * f.norm_bound
    return TaylorStream(
        coefficient=_stream_output(phi, float(theta), f, tolerance),
        type_bound=c,
        norm_bound=norm_bound,
    )


def laguerre_poly(n: int, theta: Scalar) -> Poly:
    """Return the Laguerre polynomial exp(-Delta_theta) z^n."""
    return exp_delta_closed(-1, theta, Poly.monomial(n))


def laguerre_rodrigues(n: int, theta: Scalar) -> Poly:
    """Return (-1)^n z^(1-theta) e^z D^n (z^(theta+n-1) e^(-z)).

    The n-th derivative is tracked on terms a_j z^(theta+n-1-j) e^(-z); each
    differentiation maps a z^e e^(-z) to a e z^(e-1) e^(-z) - a z^e e^(-z). This route
    shares no code with `laguerre_poly`.

    Raises:
        UnsupportedThetaError: if theta <= 0
    """
    if theta <= 0:
        raise UnsupportedThetaError(f"Rodrigues route requires theta > 0, got {theta}")
    terms: Dict[int, Scalar] = {0: 1}
    for _ in range(n):
        stepped: Dict[int, Scalar] = {}
        for j, a in terms.items():
            exponent = theta + n - 1 - j
            stepped[j] = stepped.get(j, 0) - a
            stepped[j + 1] = stepped.get(j + 1, 0) + a * exponent
        terms = stepped
    sign = -1 if n % 2 else 1
    coeffs: List[Scalar] = [0] * (n + 1)
    for j, a in terms.items():
        coeffs[n - j] = sign * a
    return Poly(tuple(coeffs))


@dataclass(frozen=True)
class ExpFactoredResult:
    """The factored function prefactor * exp(exp_coefficient * z) * inner(z)."""

    prefactor: Scalar
    exp_coefficient: Scalar
    inner: Poly = field(default_factory=Poly.zero)

    def evaluate(self, z: Scalar) -> complex:
        """Evaluate the factored function at z."""
        return complex(
            complex(self.prefactor) * np.exp(complex(self.exp_coefficient) * complex(z))
        ) * complex(self.inner(z))

    def truncated_series(self, degree: int) -> Poly:
        """Return the Taylor polynomial through `degree` of the reassembled function."""
        exponential = Poly(tuple(exp_series(self.exp_coefficient, degree)))
        return ((exponential * self.inner.truncate(degree)).truncate(degree)) * self.prefactor


def _power(base: Scalar, exponent: Scalar) -> Scalar:
    if is_exact(base) and is_exact(exponent) and Fraction(exponent).denominator == 1:
        return Fraction(base) ** int(exponent)
    return float(base) ** float(exponent)


def operation_rule(a: Scalar, u: Scalar, theta: Scalar, g: Poly) -> ExpFactoredResult:
    """Evaluate exp(a Delta_theta) on e^(uz) g(z) in factored form.

    The result is (1 - ua)^(-theta) exp(uz / (1 - ua)) h(z) with
    h(z) = [exp(a / (1 - ua) Delta_theta) g](z / (1 - ua)^2).

    Args:
        a: time parameter, a > 0 (a = 0 is accepted and returns the input)
        u: exponential coefficient of the input
        theta: parameter theta >= 0
        g: polynomial factor of the input

    Returns:
        ExpFactoredResult: prefactor, exponential coefficient and inner polynomial

    Raises:
        OperationRuleDomainError: if u * a >= 1
    """
    if a < 0:
        raise OperationRuleDomainError(f"Operation rule requires a >= 0, got a={a}")
    s = 1 - u * a
    if s <= 0:
        raise OperationRuleDomainError(
            f"Operation rule requires u * a < 1, got u={u}, a={a}"
        )
    inner = exp_delta_closed(exact_div(a, s), theta, g).scale_argument(exact_div(1, s * s))
    return ExpFactoredResult(
        prefactor=_power(s, -theta),
        exp_coefficient=exact_div(u, s),
        inner=inner,
    )


def operation_rule_type_bound(a: float, u: float, b: float) -> float:
    """Return the type c = b (1 - ua)^(-1) [1 - a(u + b)]^(-1) of the inner function.

    Raises:
        OperationRuleDomainError: if ua >= 1 or a(u + b) >= 1
    """
    if u * a >= 1 or a * (u + b) >= 1:
        raise OperationRuleDomainError(
            f"Type bound requires u * a < 1 and a * (u + b) < 1, got a={a}, u={u}, b={b}"
        )
    return b / ((1 - u * a) * (1 - a * (u + b)))


def _check_pole(w: complex) -> None:
    nearest = round(w.real)
    if nearest <= 0 and abs(w - nearest) < POLE_DISTANCE:
        raise IllConditionedEvaluationError(
            f"Gamma argument {w} lies within {POLE_DISTANCE} of the pole {nearest}"
        )


def vandermonde_residual(z: complex, m: int, k: int) -> float:
    """Return the relative residual of the Gamma convolution identity.

    LHS = Gamma(z+m+k) / (Gamma(z+m) Gamma(z+k)) is evaluated through log-Gamma,
    RHS = sum_n C(m,n) C(k,n) n! / Gamma(z+n) through the reciprocal Gamma function.

    Raises:
        IllConditionedEvaluationError: near a pole of a Gamma factor on the left
    """
    z = complex(z)
    for w in (z + m + k, z + m, z + k):
        _check_pole(w)
    lhs = np.exp(
        special.loggamma(z + m + k) - special.loggamma(z + m) - special.loggamma(z + k)
    )
    rhs = sum(
        math.comb(m, n) * math.comb(k, n) * math.factorial(n) * special.rgamma(z + n)
        for n in range(min(m, k) + 1)
    )
    if lhs == 0:
        return float(abs(rhs))
    return float(abs(lhs - rhs) / abs(lhs))
