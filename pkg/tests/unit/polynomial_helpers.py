# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

from fractions import Fraction
from typing import Sequence

import numpy as np
from hypothesis import strategies as st

from laguerre_calculus.series import Poly

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=8)


@st.composite
def exact_polys(draw, max_degree: int = 8) -> Poly:
    coeffs = draw(st.lists(small_fractions, min_size=1, max_size=max_degree + 1))
    return Poly(tuple(Fraction(c) for c in coeffs))


@st.composite
def float_polys(draw, max_degree: int = 8) -> Poly:
    coeffs = draw(
        st.lists(
            st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
            min_size=1,
            max_size=max_degree + 1,
        )
    )
    return Poly(tuple(coeffs))


def poly_with_roots(roots: Sequence[float]) -> Poly:
    return Poly.from_roots(roots)


def max_coefficient_gap(left: Poly, right: Poly) -> float:
    size = max(len(left.coeffs), len(right.coeffs), 1)
    a = np.array([complex(left.coefficient(k)) for k in range(size)])
    b = np.array([complex(right.coefficient(k)) for k in range(size)])
    scale = max(float(np.max(np.abs(b))), 1.0)
    return float(np.max(np.abs(a - b))) / scale
