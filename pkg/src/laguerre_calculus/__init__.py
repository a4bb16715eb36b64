# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Operator calculus of Delta_theta = theta D + z D^2 on entire functions of exponential type."""

from laguerre_calculus.series import CalculusError, LaguerreForm, Poly, ScalarMode, TaylorStream

__all__ = ["CalculusError", "LaguerreForm", "Poly", "ScalarMode", "TaylorStream"]
