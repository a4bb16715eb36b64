# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Function carriers for the Laguerre operator calculus.

This module contains the value types every other module computes with:

- `Poly`: a finite Taylor coefficient list, f(z) = sum c_k z^k.
- `LaguerreForm`: the factored form C z^l exp(alpha z) prod(1 + beta_j z).
- `TaylorStream`: a lazily generated coefficient sequence carrying an exponential-type
  majorant, used where a function is not a polynomial.
- `ScalarMode`: exact rational or floating arithmetic.

It also contains the gamma utilities gamma_theta(m) = m! Gamma(theta + m) and the
coefficients q_theta^(m,k) of Delta_theta^k z^m.

All values are immutable; every function is pure.

Example:
```python

from fractions import Fraction

from laguerre_calculus.series import LaguerreForm, Poly, expand

form = LaguerreForm(C=1, l=1, alpha=1)
expand(form, 3)  # Poly(coeffs=(0, 1, 1, Fraction(1, 2)))
Poly((1, 2, 1))(-1)  # 0
```
"""

import logging
import math
import os
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction, float, complex]

PRECISION_ENV_VAR = "LAGUERRE_CALC_PRECISION"
DEFAULT_PRECISION = 50


class CalculusError(Exception):
    """Base class for custom errors raised by this package."""


class GammaPoleError(CalculusError):
    """Raised when Gamma(theta + m) is requested at its pole theta = m = 0."""


class ScalarModeError(CalculusError):
    """Raised when exact arithmetic is requested for inputs it cannot represent."""


def is_exact(value: object) -> bool:
    """Return whether a scalar is an exact rational (int or Fraction)."""
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def exact_div(numerator: Scalar, denominator: Scalar) -> Scalar:
    """Divide, staying in rationals when both operands are exact."""
    if is_exact(numerator) and is_exact(denominator):
        return Fraction(numerator) / Fraction(denominator)
    return numerator / denominator


def default_precision() -> int:
    """Return the extended precision (decimal digits) configured in the environment."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if not raw:
        return DEFAULT_PRECISION
    try:
        precision = int(raw)
    except ValueError:
        logger.warning("Ignoring invalid %s=%s", PRECISION_ENV_VAR, raw)
        return DEFAULT_PRECISION
    if precision < 16:
        logger.warning("%s=%d is below double precision, using 16", PRECISION_ENV_VAR, precision)
        return 16
    return precision


class Arithmetic(Enum):
    """Arithmetic used for coefficients.

    EXACT: fractions.Fraction; only valid for positive integer theta.
    FLOATING: IEEE doubles, with an extended precision for mpmath rechecks.
    """

    EXACT = "exact"
    FLOATING = "floating"


@dataclass(frozen=True)
class ScalarMode:
    """Scalar mode flag: the arithmetic and the extended precision (decimal digits)."""

    arithmetic: Arithmetic = Arithmetic.FLOATING
    precision: int = DEFAULT_PRECISION

    @classmethod
    def exact(cls) -> "ScalarMode":
        """Return the exact-rational mode."""
        return cls(arithmetic=Arithmetic.EXACT)

    @classmethod
    def floating(cls, precision: Optional[int] = None) -> "ScalarMode":
        """Return the floating mode, taking the precision from the environment by default."""
        return cls(
            arithmetic=Arithmetic.FLOATING,
            precision=default_precision() if precision is None else precision,
        )

    @property
    def is_exact(self) -> bool:
        """Return whether this mode computes in rationals."""
        return self.arithmetic is Arithmetic.EXACT

    def coerce(self, value: Union[Scalar, str]) -> Scalar:
        """Convert a scalar (or a "p/q" string) to this mode's representation.

        Raises:
            ScalarModeError: if a complex value is given in exact mode.
        """
        if isinstance(value, str):
            value = Fraction(value.strip())
        if self.is_exact:
            if isinstance(value, complex):
                raise ScalarModeError(f"Complex value {value} has no exact rational form")
            return value if is_exact(value) else Fraction(value)
        if isinstance(value, complex):
            return value
        return float(value)

    def coerce_theta(self, theta: Scalar) -> Scalar:
        """Validate theta against this mode.

        Exact mode is only permitted for positive integer theta, where every
        Gamma(theta + m) is an integer factorial.

        Raises:
            ScalarModeError: if theta is not a positive integer in exact mode.
        """
        if not self.is_exact:
            return float(theta)
        if isinstance(theta, complex) or Fraction(theta).denominator != 1 or theta < 1:
            raise ScalarModeError(
                f"Exact mode requires a positive integer theta, got {theta}"
            )
        return int(theta)


def _trim(coeffs: Iterable[Scalar]) -> Tuple[Scalar, ...]:
    values = tuple(coeffs)
    end = len(values)
    while end and values[end - 1] == 0:
        end -= 1
    return values[:end]


def _convolve(
    left: Sequence[Scalar], right: Sequence[Scalar], cap: Optional[int] = None
) -> List[Scalar]:
    """Multiply two coefficient lists, optionally dropping terms above degree `cap`."""
    if not left or not right:
        return []
    size = len(left) + len(right) - 1
    if cap is not None:
        size = min(size, cap + 1)
    out: List[Scalar] = [0] * size
    for i, a in enumerate(left):
        if i >= size:
            break
        if a == 0:
            continue
        for j, b in enumerate(right[: size - i]):
            out[i + j] += a * b
    return out


@dataclass(frozen=True)
class Poly:
    """Polynomial f(z) = sum c_k z^k stored by its Taylor coefficients.

    The trailing coefficient is nonzero unless the list is empty (the zero polynomial).
    In exact mode f^(k)(0) = k! c_k is recovered without loss.
    """

    coeffs: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        """Normalize the coefficient list."""
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def zero(cls) -> "Poly":
        """Return the zero polynomial."""
        return cls(())

    @classmethod
    def constant(cls, value: Scalar) -> "Poly":
        """Return the constant polynomial."""
        return cls((value,))

    @classmethod
    def monomial(cls, m: int, coeff: Scalar = 1) -> "Poly":
        """Return coeff * z^m."""
        if m < 0:
            raise ValueError(f"Invalid monomial degree: {m}")
        return cls((0,) * m + (coeff,))

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar], leading: Scalar = 1) -> "Poly":
        """Return leading * prod (z - r)."""
        coeffs: List[Scalar] = [leading]
        for root in roots:
            coeffs = _convolve(coeffs, [-root, 1])
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        """Return the index of the last nonzero coefficient (0 for the zero polynomial)."""
        return max(len(self.coeffs) - 1, 0)

    @property
    def is_zero(self) -> bool:
        """Return whether this is the zero polynomial."""
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        """Return whether every coefficient is an exact rational."""
        return all(is_exact(c) for c in self.coeffs)

    def coefficient(self, k: int) -> Scalar:
        """Return c_k (zero beyond the degree)."""
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, z: Scalar) -> Scalar:
        """Evaluate at z."""
        return eval_poly(self, z)

    def __add__(self, other: Union["Poly", Scalar]) -> "Poly":
        """Add a polynomial or a scalar."""
        other = other if isinstance(other, Poly) else Poly.constant(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coefficient(k) + other.coefficient(k) for k in range(size)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        """Negate."""
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Union["Poly", Scalar]) -> "Poly":
        """Subtract a polynomial or a scalar."""
        other = other if isinstance(other, Poly) else Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Poly":
        """Subtract from a scalar."""
        return Poly.constant(other) - self

    def __mul__(self, other: Union["Poly", Scalar]) -> "Poly":
        """Multiply by a polynomial or a scalar."""
        if isinstance(other, Poly):
            return Poly(tuple(_convolve(self.coeffs, other.coeffs)))
        return Poly(tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def truncate(self, degree: int) -> "Poly":
        """Drop every coefficient above `degree`."""
        return Poly(self.coeffs[: degree + 1])

    def scale_argument(self, factor: Scalar) -> "Poly":
        """Return the polynomial z -> p(factor * z)."""
        out: List[Scalar] = []
        power: Scalar = 1
        for c in self.coeffs:
            out.append(c * power)
            power = power * factor
        return Poly(tuple(out))

    def derivative(self) -> "Poly":
        """Return p'."""
        return differentiate(self)

    def taylor_derivatives(self) -> List[Scalar]:
        """Return the derivatives at zero, f^(k)(0) = k! c_k."""
        return [math.factorial(k) * c for k, c in enumerate(self.coeffs)]

    def to_float(self) -> "Poly":
        """Return a copy with floating (or complex) coefficients."""
        return Poly(
            tuple(c if isinstance(c, (float, complex)) else float(c) for c in self.coeffs)
        )

    def as_array(self) -> np.ndarray:
        """Return the coefficients as a complex numpy array (ascending degree)."""
        return np.array([complex(c) for c in self.coeffs], dtype=complex)


def eval_poly(p: Poly, z: Scalar) -> Scalar:
    """Evaluate sum c_k z^k by Horner's rule.

    Args:
        p: polynomial
        z: evaluation point (exact, real or complex)

    Returns:
        The value p(z); 0 for the zero polynomial.
    """
    result: Scalar = 0
    for c in reversed(p.coeffs):
        result = result * z + c
    return result


def differentiate(p: Poly) -> Poly:
    """Return p' by the coefficient shift-and-scale; the degree drops by one."""
    return Poly(tuple(k * c for k, c in enumerate(p.coeffs) if k > 0))


def _is_integer(value: Scalar) -> bool:
    if isinstance(value, complex):
        return False
    if is_exact(value):
        return Fraction(value).denominator == 1
    return False


def gamma_theta(theta: Scalar, m: int) -> Scalar:
    """Return gamma_theta(m) = m! Gamma(theta + m).

    For an exact integer theta the value is the integer m! (theta + m - 1)!.
    Otherwise it is a float; it overflows to inf for large m, where
    `log_gamma_theta` should be used.

    Raises:
        GammaPoleError: for theta = 0 and m = 0.
    """
    if m < 0:
        raise ValueError(f"Invalid index m: {m}")
    if theta == 0 and m == 0:
        raise GammaPoleError("Gamma(theta + m) has a pole at theta = m = 0")
    if _is_integer(theta) and theta >= 0:
        return math.factorial(m) * math.factorial(int(theta) + m - 1)
    return float(special.factorial(m, exact=False) * special.gamma(float(theta) + m))


def log_gamma_theta(theta: Scalar, m: int) -> float:
    """Return log(m! Gamma(theta + m)), safe for m well beyond 100.

    Raises:
        GammaPoleError: for theta = 0 and m = 0.
    """
    if theta == 0 and m == 0:
        raise GammaPoleError("Gamma(theta + m) has a pole at theta = m = 0")
    return float(special.gammaln(m + 1) + special.gammaln(float(theta) + m))


def reciprocal_gamma_theta(theta: Scalar, m: int) -> Scalar:
    """Return 1/gamma_theta(m) with the pole convention 1/gamma_0(0) = 0."""
    if theta == 0 and m == 0:
        return 0
    value = gamma_theta(theta, m)
    if is_exact(value):
        return Fraction(1, value)
    if math.isinf(value):
        return math.exp(-log_gamma_theta(theta, m))
    return 1.0 / value


def q_coefficient(theta: Scalar, m: int, k: int) -> Scalar:
    """Return q_theta^(m,k), the coefficient in Delta_theta^k z^m = q z^(m-k).

    Computed as the product prod_{i<k} (m - i)(theta + m - 1 - i), never as a ratio
    of Gamma values. Zero for k > m.
    """
    if k > m:
        return 0
    q: Scalar = 1
    for i in range(k):
        q = q * (m - i) * (theta + m - 1 - i)
    return q


@dataclass(frozen=True)
class LaguerreForm:
    """Laguerre form f(z) = C z^l exp(alpha z) prod_j (1 + beta_j z).

    Only finitely many beta_j are represented. The betas are stored nonnegative and
    sorted in descending order.
    """

    C: Scalar = 1
    l: int = 0  # noqa: E741
    alpha: Scalar = 0
    betas: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        """Validate and normalize the parameters."""
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"Invalid power l: {self.l}")
        if isinstance(self.alpha, complex):
            raise ValueError(f"Invalid alpha: {self.alpha}")
        betas = tuple(self.betas)
        for beta in betas:
            if isinstance(beta, complex) or beta < 0:
                raise ValueError(f"Invalid beta: {beta}")
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "betas", tuple(sorted(betas, reverse=True)))

    @property
    def membership(self) -> FrozenSet[str]:
        """Return the class tags: L+ for alpha >= 0, L0 for alpha = 0, L- for alpha < 0."""
        if self.alpha == 0:
            return frozenset({"L+", "L0"})
        return frozenset({"L+"}) if self.alpha > 0 else frozenset({"L-"})

    def polynomial_part(self) -> Poly:
        """Return C z^l prod (1 + beta_j z)."""
        coeffs: List[Scalar] = [self.C]
        for beta in self.betas:
            coeffs = _convolve(coeffs, [1, beta])
        return Poly.monomial(self.l) * Poly(tuple(coeffs))

    def evaluate(self, z: Scalar) -> complex:
        """Evaluate the form at z."""
        value = complex(self.C) * complex(z) ** self.l * np.exp(float(self.alpha) * complex(z))
        for beta in self.betas:
            value *= 1 + float(beta) * complex(z)
        return complex(value)


def exp_series(alpha: Scalar, degree: int) -> List[Scalar]:
    """Return the Taylor coefficients alpha^j / j! of exp(alpha z) for j <= degree."""
    out: List[Scalar] = []
    term: Scalar = 1
    for j in range(degree + 1):
        out.append(term)
        term = exact_div(term * alpha, j + 1)
    return out


def expand(form: LaguerreForm, N: Optional[int] = None) -> Poly:
    """Expand a Laguerre form into its Taylor polynomial through degree N.

    The polynomial part is convolved with the exponential series truncated at N.
    With N omitted, forms with alpha = 0 expand exactly to their polynomial part.

    Args:
        form: the factored representation
        N: degree cap

    Returns:
        Poly: the Taylor coefficients of degree <= N; the zero polynomial (with a
        logged warning) when N < l.
    """
    if N is None:
        if form.alpha != 0:
            raise ValueError("A degree cap is required when alpha != 0")
        return form.polynomial_part()
    if N < form.l:
        logger.warning("Degree cap %d is below the power l=%d; expansion is degenerate", N, form.l)
        return Poly.zero()
    polynomial = form.polynomial_part().coeffs
    if form.alpha == 0:
        return Poly(tuple(polynomial[: N + 1]))
    return Poly(tuple(_convolve(polynomial, exp_series(form.alpha, N), cap=N)))


class _ExpansionCache:
    """Growing cache of the Taylor coefficients of a Laguerre form.

    Readers take the current tuple without locking; growth replaces it under the lock.
    """

    def __init__(self, form: LaguerreForm):
        self._form = form
        self._coeffs: Tuple[Scalar, ...] = ()
        self._lock = threading.Lock()

    def __call__(self, k: int) -> Scalar:
        coeffs = self._coeffs
        if k < len(coeffs):
            return coeffs[k]
        with self._lock:
            coeffs = self._coeffs
            if k >= len(coeffs):
                cap = max(2 * len(coeffs), k, 16)
                expansion = expand(self._form, cap)
                coeffs = tuple(expansion.coefficient(i) for i in range(cap + 1))
                self._coeffs = coeffs
        return coeffs[k]


@dataclass(frozen=True)
class TaylorStream:
    """Lazily generated Taylor coefficients with a certified majorant.

    The stream guarantees ||f||_b <= norm_bound for b = type_bound, i.e.
    |c_k| <= norm_bound * b^k / k! for every k.
    """

    coefficient: Callable[[int], Scalar]
    type_bound: float
    norm_bound: float

    @classmethod
    def from_form(
        cls, form: LaguerreForm, type_bound: float, norm_bound: float
    ) -> "TaylorStream":
        """Build the stream of a Laguerre form with a caller-supplied majorant."""
        return cls(coefficient=_ExpansionCache(form), type_bound=type_bound, norm_bound=norm_bound)

    def truncate(self, degree: int) -> Poly:
        """Return the Taylor polynomial through `degree`."""
        return Poly(tuple(self.coefficient(k) for k in range(degree + 1)))
