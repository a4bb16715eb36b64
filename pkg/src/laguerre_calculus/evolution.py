# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Solutions of df/dt = theta df/dz + z d^2f/dz^2 with f(0, z) = e^(-eps z) h(z).

The solution is the semigroup orbit f(t, .) = exp(t Delta_theta) g, which the operation
rule keeps in the factored shape

    f(t, z) = (1 + eps t)^(-theta) exp(-eps z / (1 + eps t)) h_t(z)

with a polynomial h_t. Frames are exact in z; only the time derivative of the residual
check is discretized.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from laguerre_calculus.operators import apply_delta, exp_delta_closed, operation_rule
from laguerre_calculus.rendering import render
from laguerre_calculus.series import CalculusError, Poly, Scalar, exact_div

logger = logging.getLogger(__name__)

CIRCLE_SAMPLES = 256
PROFILE_TEMPLATE = "profile.csv.j2"


class StabilizationDomainError(CalculusError):
    """Raised when decay to zero is requested where it is not asserted (eps = 0 or theta = 0)."""


class SingularPointError(CalculusError):
    """Raised when an identity is evaluated at its singular point z = 0."""


@dataclass(frozen=True)
class InitialData:
    """Initial value g(z) = e^(-epsilon z) h(z) with epsilon >= 0."""

    epsilon: Scalar
    h: Poly

    def __post_init__(self):
        """Validate epsilon."""
        if isinstance(self.epsilon, complex) or self.epsilon < 0:
            raise ValueError(f"Invalid epsilon: {self.epsilon}")

    def evaluate(self, z: Scalar) -> complex:
        """Return g(z)."""
        return complex(np.exp(-complex(self.epsilon) * complex(z))) * complex(self.h(z))


@dataclass(frozen=True)
class SolutionFrame:
    """The solution at time t: prefactor * exp(exp_coefficient * z) * inner(z)."""

    t: Scalar
    prefactor: Scalar
    exp_coefficient: Scalar
    inner: Poly

    def evaluate(self, z: Scalar) -> complex:
        """Return f(t, z)."""
        return self.z_derivative(0, z)

    def z_derivative(self, order: int, z: Scalar) -> complex:
        """Return the z-derivative of order 0, 1 or 2 by the product rule.

        With f = P e^(cz) H: f' = P e^(cz) (cH + H'), f'' = P e^(cz) (c^2 H + 2cH' + H'').
        """
        c = complex(self.exp_coefficient)
        z = complex(z)
        h0 = complex(self.inner(z))
        if order == 0:
            combined = h0
        elif order == 1:
            combined = c * h0 + complex(self.inner.derivative()(z))
        elif order == 2:
            h1 = complex(self.inner.derivative()(z))
            h2 = complex(self.inner.derivative().derivative()(z))
            combined = c * c * h0 + 2 * c * h1 + h2
        else:
            raise ValueError(f"Unsupported derivative order: {order}")
        return complex(self.prefactor) * complex(np.exp(c * z)) * combined

    def delta(self, theta: Scalar, z: Scalar) -> complex:
        """Return (Delta_theta f(t, .))(z)."""
        return complex(theta) * self.z_derivative(1, z) + complex(z) * self.z_derivative(2, z)


def evolve(data: InitialData, theta: Scalar, t: Scalar) -> SolutionFrame:
    """Return the factored solution frame at time t.

    For eps = 0 the frame is (1, 0, exp(t Delta_theta) h); for eps > 0 it comes from the
    operation rule with a = t and u = -eps.

    Raises:
        ValueError: if t < 0
    """
    if t < 0:
        raise ValueError(f"Evolution requires t >= 0, got t={t}")
    if data.epsilon == 0:
        return SolutionFrame(
            t=t, prefactor=1, exp_coefficient=0, inner=exp_delta_closed(t, theta, data.h)
        )
    result = operation_rule(t, -data.epsilon, theta, data.h)
    return SolutionFrame(
        t=t,
        prefactor=result.prefactor,
        exp_coefficient=result.exp_coefficient,
        inner=result.inner,
    )


def evolve_two_step(data: InitialData, theta: Scalar, t1: Scalar, t2: Scalar) -> SolutionFrame:
    """Evolve to t1 and then for a further t2, feeding the first frame back into the rule."""
    first = evolve(data, theta, t1)
    if t2 < 0:
        raise ValueError(f"Evolution requires t >= 0, got t={t2}")
    second = operation_rule(t2, first.exp_coefficient, theta, first.inner)
    return SolutionFrame(
        t=t1 + t2,
        prefactor=first.prefactor * second.prefactor,
        exp_coefficient=second.exp_coefficient,
        inner=second.inner,
    )


def pde_residual(
    data: InitialData,
    theta: Scalar,
    t: float,
    z: Scalar,
    dt: Optional[float] = None,
    stencil: int = 2,
) -> float:
    """Return |df/dt - Delta_theta f| at (t, z).

    The z-derivatives are exact; df/dt is the central difference
    (f(t+h) - f(t-h)) / 2h, or with `stencil=4` the fourth-order
    (f(t-2h) - 8f(t-h) + 8f(t+h) - f(t+2h)) / 12h.

    Args:
        data: initial data
        theta: parameter theta >= 0
        t: time, t > 0
        z: evaluation point
        dt: step, t / 1000 by default
        stencil: 2 or 4

    Returns:
        float: absolute residual
    """
    if t <= 0:
        raise ValueError(f"Residual requires t > 0, got t={t}")
    step = t / 1000 if dt is None else dt
    if stencil == 2:
        reach = 1
    elif stencil == 4:
        reach = 2
    else:
        raise ValueError(f"Unsupported stencil: {stencil}")
    if t - reach * step < 0:
        raise ValueError(f"Step {step} reaches below t=0 from t={t}")

    def value(time: float) -> complex:
        return evolve(data, theta, time).evaluate(z)

    if stencil == 2:
        time_derivative = (value(t + step) - value(t - step)) / (2 * step)
    else:
        time_derivative = (
            value(t - 2 * step) - 8 * value(t - step) + 8 * value(t + step) - value(t + 2 * step)
        ) / (12 * step)
    return float(abs(time_derivative - evolve(data, theta, t).delta(theta, z)))


def circle_max(frame: SolutionFrame, radius: float, samples: int = CIRCLE_SAMPLES) -> float:
    """Return max |f(t, z)| over |z| <= radius, attained on the boundary circle.

    The circle is sampled and the best sample is polished by a bounded scalar search.
    """
    if radius == 0:
        return abs(frame.evaluate(0))
    angles = 2 * np.pi * np.arange(samples) / samples

    def modulus(angle: float) -> float:
        return abs(frame.evaluate(radius * np.exp(1j * angle)))

    values = [modulus(angle) for angle in angles]
    best = int(np.argmax(values))
    width = 2 * np.pi / samples
    polished = optimize.minimize_scalar(
        lambda angle: -modulus(angle),
        bounds=(angles[best] - width, angles[best] + width),
        method="bounded",
    )
    return max(values[best], -float(polished.fun))


@dataclass(frozen=True)
class StabilizationProfile:
    """Sup norms over a disk along a time grid.

    Attributes:
        rows: (t, sup_norm) pairs
        monotone_from: first index after which the values decrease strictly
    """

    rows: Tuple[Tuple[float, float], ...]
    monotone_from: int

    def to_csv(self) -> str:
        """Render the rows as CSV "t,sup_norm"."""
        return render(PROFILE_TEMPLATE, rows=list(self.rows))


def _monotone_from(values: Sequence[float]) -> int:
    index = len(values) - 1
    while index > 0 and values[index - 1] > values[index]:
        index -= 1
    return max(index, 0)


def stabilization_profile(
    data: InitialData,
    theta: Scalar,
    times: Sequence[float],
    R: float = 1.0,  # noqa: N803
    samples: int = CIRCLE_SAMPLES,
) -> StabilizationProfile:
    """Return sup_{|z|<=R} |f(t, z)| along `times`.

    Raises:
        StabilizationDomainError: if eps = 0 or theta <= 0; at theta = 0 the decay factor
            (1 + eps t)^(-theta) is constant and the remaining factors tend to a nonzero
            limit, so decay is not asserted there
    """
    if data.epsilon <= 0:
        raise StabilizationDomainError("Stabilization requires eps > 0")
    if theta <= 0:
        raise StabilizationDomainError(
            "Stabilization is only certified for theta > 0; see stabilization_limit for theta = 0"
        )
    rows: List[Tuple[float, float]] = []
    for t in times:
        rows.append((float(t), circle_max(evolve(data, theta, t), R, samples)))
        logger.debug("Profile at t=%s: %s", t, rows[-1][1])
    return StabilizationProfile(
        rows=tuple(rows), monotone_from=_monotone_from([value for _, value in rows])
    )


def stabilization_limit(data: InitialData, theta: Scalar) -> Scalar:
    """Return lim_{t->inf} (1 + eps t)^theta f(t, z) = {exp(Delta_theta / eps) h}(0).

    Raises:
        StabilizationDomainError: if eps = 0
    """
    if data.epsilon <= 0:
        raise StabilizationDomainError("The limit requires eps > 0")
    return exp_delta_closed(exact_div(1, data.epsilon), theta, data.h)(0)


def radial_identity_check(f: Poly, theta: Scalar, z: Scalar) -> float:
    """Compare (Delta_theta f)(z^2) with (1/4)[((2 theta - 1)/z) g' + g''](z), g(z) = f(z^2).

    Both sides are exact polynomial evaluations; the difference is returned relative
    to max(1, |left side|).

    Raises:
        SingularPointError: if z = 0
    """
    if z == 0:
        raise SingularPointError("The radial identity is singular at z = 0")
    left = complex(apply_delta(theta, f)(z * z))
    g = Poly(tuple(_interleave(f)))
    g1 = g.derivative()
    g2 = g1.derivative()
    right = 0.25 * (
        (2 * complex(theta) - 1) / complex(z) * complex(g1(z)) + complex(g2(z))
    )
    return float(abs(left - right)) / max(1.0, abs(left))


def _interleave(f: Poly) -> List[Scalar]:
    """Return the coefficient list of f(z^2)."""
    out: List[Scalar] = []
    for c in f.coeffs:
        out.extend((c, 0))
    return out[:-1] if out else out
