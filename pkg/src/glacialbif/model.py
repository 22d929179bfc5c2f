"""Vector fields, parameter charts and the Hamiltonian of the glacial-cycle model.

Three coordinate charts describe the same planar dynamics:

* the reduced system on the critical manifold ``z = -x``::

      x' = -x - y
      y' = p x + r y - s y**2 - y**3

* the translated chart ``(X, Y) = (x, -x - y)``, in which ``X' = Y``;
* the rescaled chart ``X = eta u``, ``Y = eta**2 v``, ``t -> eta t`` with
  ``delta = s/eta``, ``mu = (r - p)/eta**2``, ``lam = (r - 1)/eta**2``.
  At ``eta = 0`` it is Hamiltonian with
  ``H = v**2/2 - mu u**2/2 - delta u**3/3 + u**4/4``.

The three-dimensional slow-fast system keeps ``z`` as a fast variable with
time-scale ratio ``eps``.

States are plain float arrays: ``(x, y)``, ``(x, y, z)`` or ``(u, v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "ReducedParams",
    "SlowFastParams",
    "RescaledParams",
    "reduced_field",
    "full_field",
    "translated_field",
    "rescaled_field",
    "hamiltonian_value",
    "to_rescaled",
    "from_rescaled",
    "jacobian_reduced",
    "jacobian_rescaled",
    "to_translated",
    "from_translated",
]


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ReducedParams:
    """Rates ``p``, ``r`` and quadratic feedback ``s`` of the planar system."""

    p: float
    r: float
    s: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(p=self.p, r=self.r, s=self.s)
        if self.p <= 0:
            raise ParameterError(f"p must be > 0, got {self.p}")
        if self.r <= 0:
            raise ParameterError(f"r must be > 0, got {self.r}")
        if self.s < 0:
            raise ParameterError(f"s must be >= 0, got {self.s}")


@dataclass(frozen=True)
class SlowFastParams:
    """Reduced parameters plus the time-scale ratio ``eps = 1/q``."""

    base: ReducedParams
    eps: float

    def __post_init__(self) -> None:
        _check_finite(eps=self.eps)
        if not 0.0 < self.eps < 1.0:
            raise ParameterError(f"eps must satisfy 0 < eps < 1, got {self.eps}")


@dataclass(frozen=True)
class RescaledParams:
    """Unfolding parameters ``(delta, mu, lam)`` at scale ``eta``.

    ``lam`` is the rescaled damping (``lambda`` is reserved in Python).
    """

    delta: float
    mu: float
    lam: float
    eta: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(delta=self.delta, mu=self.mu, lam=self.lam, eta=self.eta)
        if self.eta < 0:
            raise ParameterError(f"eta must be >= 0, got {self.eta}")


def reduced_field(params: ReducedParams, st) -> np.ndarray:
    x, y = st[0], st[1]
    p, r, s = params.p, params.r, params.s
    return np.array([-x - y, p * x + r * y - s * y * y - y * y * y])


def full_field(params: SlowFastParams, st) -> np.ndarray:
    """Slow-fast field in slow time; the third component carries ``1/eps``."""
    x, y, z = st[0], st[1], st[2]
    b = params.base
    return np.array(
        [
            -x - y,
            b.r * y - b.p * z - b.s * y * y - y * y * y,
            (-x - z) / params.eps,
        ]
    )


def translated_field(params: ReducedParams, st) -> np.ndarray:
    x, y = st[0], st[1]
    p, r, s = params.p, params.r, params.s
    w = x + y
    return np.array([y, (r - p) * x + (r - 1.0) * y + s * w * w - w * w * w])


def rescaled_field(rp: RescaledParams, st) -> np.ndarray:
    u, v = st[0], st[1]
    d, mu, lam, eta = rp.delta, rp.mu, rp.lam, rp.eta
    vdot = mu * u + d * u * u - u**3
    if eta != 0.0:
        vdot += (
            eta * (lam * v + 2.0 * d * u * v - 3.0 * u * u * v)
            + eta**2 * (d * v * v - 3.0 * u * v * v)
            - eta**3 * v**3
        )
    return np.array([v, vdot])


def hamiltonian_value(delta: float, mu: float, st) -> float:
    u, v = st[0], st[1]
    return 0.5 * v * v - 0.5 * mu * u * u - delta / 3.0 * u**3 + 0.25 * u**4


def to_rescaled(params: ReducedParams, eta: float) -> RescaledParams:
    if not eta > 0:
        raise ParameterError(f"eta must be > 0 for the chart map, got {eta}")
    return RescaledParams(
        delta=params.s / eta,
        mu=(params.r - params.p) / eta**2,
        lam=(params.r - 1.0) / eta**2,
        eta=eta,
    )


def from_rescaled(rp: RescaledParams) -> ReducedParams:
    if not rp.eta > 0:
        raise ParameterError(f"eta must be > 0 for the chart map, got {rp.eta}")
    e2 = rp.eta**2
    return ReducedParams(p=1.0 + e2 * (rp.lam - rp.mu), r=1.0 + e2 * rp.lam, s=rp.eta * rp.delta)


def to_translated(st) -> np.ndarray:
    """``(x, y) -> (x, -x - y)``; the map is an involution."""
    return np.array([st[0], -st[0] - st[1]])


from_translated = to_translated


def jacobian_reduced(params: ReducedParams, st) -> np.ndarray:
    y = st[1]
    return np.array(
        [[-1.0, -1.0], [params.p, params.r - 2.0 * params.s * y - 3.0 * y * y]]
    )


def jacobian_rescaled(rp: RescaledParams, st) -> np.ndarray:
    u, v = st[0], st[1]
    d, mu, lam, eta = rp.delta, rp.mu, rp.lam, rp.eta
    dvdu = mu + 2 * d * u - 3 * u * u + eta * (2 * d * v - 6 * u * v) - 3 * eta**2 * v * v
    dvdv = (
        eta * (lam + 2 * d * u - 3 * u * u)
        + eta**2 * (2 * d * v - 6 * u * v)
        - 3 * eta**3 * v * v
    )
    return np.array([[0.0, 1.0], [dvdu, dvdv]])
