"""Parametrized hyperbolic-tangent activation.

The building block of every kernel in this package is

    h(x) = (e^(a x) - q e^(-a x)) / ((1+q) e^(a x) + (1-q) e^(-a x))

with shape parameter q in (0, 1) and slope parameter a = alpha > 0.  On
that parameter range the denominator is strictly positive, h is strictly
increasing, and h(x) stays inside the open interval (-q/(1-q), 1/(1+q)).
Outside the range the function degenerates: q = 1 kills one exponential
and q > 1 produces a pole, so parameter construction rejects both.

Unlike the classical tanh, h is not odd.  Its value at the origin is
h(0) = (1-q)/2, and its graph is a shifted, rescaled tanh:
h(x) = c1 * tanh(alpha x + phi) + c2 with phi = log((1+q)/(1-q))/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ActivationParams", "h_eval", "h_derivative", "h_limits"]


@dataclass(frozen=True)
class ActivationParams:
    """Validated (q, alpha) pair; q in (0, 1), alpha > 0."""

    q: float
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in the open interval (0, 1), got {self.q!r}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")


def _maybe_scalar(out, x):
    if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
        return float(out)
    return out


def h_eval(params: ActivationParams, x):
    """Evaluate h at a float or an ndarray of floats.

    The two exponentials are rescaled by e^(-alpha |x|) before dividing,
    so the evaluation never overflows even for |alpha * x| ~ 700 and the
    saturation limits are reached gracefully.
    """
    q, a = params.q, params.alpha
    xs = np.asarray(x, dtype=float)
    t = np.exp(-2.0 * a * np.abs(xs))
    pos = (1.0 - q * t) / ((1.0 + q) + (1.0 - q) * t)
    neg = (t - q) / ((1.0 + q) * t + (1.0 - q))
    return _maybe_scalar(np.where(xs >= 0.0, pos, neg), x)


def h_derivative(params: ActivationParams, x):
    """First derivative of h.

    Differentiating the quotient directly gives

        h'(x) = 2 alpha (1 + q^2) / D(x)^2,
        D(x)  = (1+q) e^(alpha x) + (1-q) e^(-alpha x).

    Some printed sources carry (1 - q^2) in the numerator instead; that
    variant disagrees with finite differences (at q = 0.5, alpha = 1 it
    would give h'(0) = 0.375 instead of the correct 0.625) and is not
    used here.  The same e^(-alpha |x|) rescaling as in h_eval keeps the
    squared denominator finite.
    """
    q, a = params.q, params.alpha
    xs = np.asarray(x, dtype=float)
    t = np.exp(-2.0 * a * np.abs(xs))
    scale = 2.0 * a * (1.0 + q * q) * t
    pos = scale / ((1.0 + q) + (1.0 - q) * t) ** 2
    neg = scale / ((1.0 + q) * t + (1.0 - q)) ** 2
    return _maybe_scalar(np.where(xs >= 0.0, pos, neg), x)


def h_limits(params: ActivationParams) -> tuple[float, float]:
    """Saturation limits (lower, upper) = (-q/(1-q), 1/(1+q))."""
    q = params.q
    return (-q / (1.0 - q), 1.0 / (1.0 + q))


def h_bound(params: ActivationParams) -> float:
    """Uniform bound B(q) = max(1/(1+q), q/(1-q)) on |h|."""
    lo, hi = h_limits(params)
    return max(abs(lo), abs(hi))


def h_center_value(params: ActivationParams) -> float:
    """h(0) = (1-q)/2; nonzero for every admissible q, so h is not odd."""
    return (1.0 - params.q) / 2.0


def h_shift(params: ActivationParams) -> float:
    """Center offset phi/alpha of the underlying shifted tanh.

    Writing h(x) = c1 tanh(alpha x + phi) + c2 gives
    phi = log((1+q)/(1-q)) / 2.  The kernel built from h is symmetric
    about -phi/alpha, which is why its first moment does not vanish.
    """
    q = params.q
    return 0.5 * math.log((1.0 + q) / (1.0 - q)) / params.alpha
