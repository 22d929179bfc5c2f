"""Homoclinic loops of the unperturbed Hamiltonian and their Melnikov persistence.

At ``eta = 0`` the rescaled system is Hamiltonian with
``H = v**2/2 - mu u**2/2 - delta u**3/3 + u**4/4``. For ``mu > 0`` the
origin is a saddle with two homoclinic loops on ``H = 0``: the left loop
(``u < 0``) and the right loop (``u > 0``). To first order in ``eta`` the
splitting of a loop is ``eta * M`` with
``M = lambda I0 + 2 delta I1 - 3 I2`` and ``I_k = int u**k v**2 dt``, so the
loop persists at ``lambda = (3 I2 - 2 delta I1) / I0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .errors import ParameterError, QuadratureError

__all__ = [
    "Branch",
    "HomoclinicOrbit",
    "MelnikovResult",
    "LevelBranch",
    "homoclinic_point",
    "melnikov_integrals",
    "lambda_single",
    "lambda_double",
    "lambda_double_quadrature",
    "persistence_surface",
    "ralpha",
    "kappa_min",
]

SQRT2 = math.sqrt(2.0)


class Branch(str, enum.Enum):
    LeftLoop = "LeftLoop"
    RightLoop = "RightLoop"


def _check_domain(delta: float, mu: float) -> None:
    if not mu > 0:
        raise ParameterError(f"mu must be > 0 for a homoclinic saddle at the origin, got {mu}")
    if not delta >= 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")


@dataclass(frozen=True)
class HomoclinicOrbit:
    branch: Branch
    delta: float
    mu: float

    def __post_init__(self) -> None:
        _check_domain(self.delta, self.mu)
        object.__setattr__(self, "branch", Branch(self.branch))

    @property
    def alpha_coef(self) -> float:
        return math.sqrt(self.mu / (2.0 * self.delta**2 + 9.0 * self.mu))

    @property
    def sign(self) -> float:
        return -1.0 if self.branch is Branch.LeftLoop else 1.0

    @property
    def turning_point(self) -> float:
        """Extremal ``u`` of the loop, reached at ``t = 0``."""
        return float(homoclinic_point(self, 0.0)[0])


def homoclinic_point(orbit: HomoclinicOrbit, t):
    """State on the loop at time ``t`` (scalar or array); ``t = 0`` is the turning point."""
    d, mu, a = orbit.delta, orbit.mu, orbit.alpha_coef
    sm = math.sqrt(mu)
    x = sm * np.asarray(t, dtype=float)
    # left: den > 0, right: den < 0
    den = SQRT2 * d * a - orbit.sign * sm * np.cosh(x)
    u = -3.0 * SQRT2 * mu * a / den
    v = -orbit.sign * 3.0 * SQRT2 * mu**2 * a * np.sinh(x) / den**2
    return np.array([u, v])


@dataclass(frozen=True)
class MelnikovResult:
    I0: float
    I1: float
    I2: float
    lambda_root: float
    method: str
    truncation_time: float = math.nan
    abserr: float = math.nan


def _truncation_time(orbit: HomoclinicOrbit, tol: float, safety: float = 10.0) -> float:
    """Half-width ``T`` with the tails of every ``I_k`` below ``tol``.

    With ``rho = sqrt(2) delta alpha / sqrt(mu) < 1`` one has
    ``|v| <= 6 sqrt(2) mu alpha exp(-sqrt(mu)|t|) / (1 - rho)**2`` and
    ``|u| <= |u(0)|``, so both tails together are bounded by
    ``C exp(-2 sqrt(mu) T)`` with the ``C`` below.
    """
    mu, a = orbit.mu, orbit.alpha_coef
    sm = math.sqrt(mu)
    rho = SQRT2 * orbit.delta * a / sm
    umax = abs(orbit.turning_point)
    C = 72.0 * mu * mu * a * a * max(1.0, umax * umax) / ((1.0 - rho) ** 4 * sm) * safety
    return max(1.0, math.log(C / tol)) / (2.0 * sm)


def melnikov_integrals(orbit: HomoclinicOrbit, tol: float = 1e-12) -> MelnikovResult:
    """``I0, I1, I2`` by adaptive quadrature on a truncated window.

    The integrands are even in ``t``, so ``[0, T]`` is integrated and doubled.
    """
    T = _truncation_time(orbit, tol)
    vals, errs = [], []
    for k in range(3):

        def f(t: float, k: int = k) -> float:
            u, v = homoclinic_point(orbit, t)
            return float(u**k * v * v)

        val, err = quad(f, 0.0, T, epsabs=0.1 * tol, epsrel=1e-13, limit=500)
        vals.append(2.0 * val)
        errs.append(2.0 * err)
    if max(errs) > tol * max(1.0, abs(vals[0])):
        raise QuadratureError(f"quadrature error {max(errs):.2e} above tolerance {tol:.1e}")
    I0, I1, I2 = vals
    lam = (3.0 * I2 - 2.0 * orbit.delta * I1) / I0
    return MelnikovResult(I0, I1, I2, lam, "Quadrature", T, max(errs))


def _lambda_closed(delta: float, mu: float, x: float) -> float:
    A = math.atan(x)
    sm = math.sqrt(mu)
    S = 2.0 * delta**2 + 9.0 * mu
    num = 5.0 * SQRT2 * delta * S**2 * A + 3.0 * sm * (
        10.0 * delta**4 + 75.0 * delta**2 * mu + 108.0 * mu**2
    )
    den = 15.0 * (SQRT2 * delta * S * A + 3.0 * sm * (delta**2 + 3.0 * mu))
    return num / den


def _arctan_args(delta: float, mu: float) -> tuple[float, float]:
    S = 2.0 * delta**2 + 9.0 * mu
    r = math.sqrt(S)
    sm3 = 3.0 * math.sqrt(mu)
    return (SQRT2 * delta - r) / sm3, (SQRT2 * delta + r) / sm3


def lambda_single(branch, delta: float, mu: float) -> float:
    """Closed-form persistence value of one loop."""
    _check_domain(delta, mu)
    a_left, b_right = _arctan_args(delta, mu)
    x = a_left if Branch(branch) is Branch.LeftLoop else b_right
    return _lambda_closed(delta, mu, x)


def lambda_double(delta: float, mu: float) -> float:
    """Closed form for the figure-eight (double) loop.

    This expression equals ``(3 sum I2 + 2 delta sum I1) / sum I0`` over the
    two loops: its ``I1`` term has the opposite sign from the single-loop
    condition. :func:`lambda_double_quadrature` gives the value consistent
    with summing the two single-loop Melnikov functions. Both reduce to
    ``12 mu / 5`` at ``delta = 0``.
    """
    _check_domain(delta, mu)
    a_left, b_right = _arctan_args(delta, mu)
    A = math.atan(b_right) + math.atan(a_left)
    sm = math.sqrt(mu)
    S = 2.0 * delta**2 + 9.0 * mu
    num = 2.0 * (
        5.0 * SQRT2 * A * delta * (2.0 * delta**2 + 3.0 * mu) * S
        + 6.0 * sm * (10.0 * delta**4 + 45.0 * delta**2 * mu + 18.0 * mu**2)
    )
    den = 5.0 * SQRT2 * A * delta * S + 30.0 * sm * (delta**2 + 3.0 * mu)
    return num / den


def lambda_double_quadrature(delta: float, mu: float, tol: float = 1e-12) -> MelnikovResult:
    """Root of the summed Melnikov function ``M_left + M_right``."""
    left = melnikov_integrals(HomoclinicOrbit(Branch.LeftLoop, delta, mu), tol)
    right = melnikov_integrals(HomoclinicOrbit(Branch.RightLoop, delta, mu), tol)
    I0, I1, I2 = left.I0 + right.I0, left.I1 + right.I1, left.I2 + right.I2
    lam = (3.0 * I2 - 2.0 * delta * I1) / I0
    return MelnikovResult(
        I0, I1, I2, lam, "Quadrature", max(left.truncation_time, right.truncation_time),
        left.abserr + right.abserr,
    )


def persistence_surface(which: str, delta_grid, mu_grid) -> list[tuple[float, float, float]]:
    """Rows ``(delta, mu, lambda)``, ``delta`` as the outer index."""
    which = which.lower()
    if which in ("left", "leftloop"):
        fn = lambda d, m: lambda_single(Branch.LeftLoop, d, m)  # noqa: E731
    elif which in ("right", "rightloop"):
        fn = lambda d, m: lambda_single(Branch.RightLoop, d, m)  # noqa: E731
    elif which == "double":
        fn = lambda_double
    else:
        raise ParameterError(f"which must be left, right or double, got {which!r}")
    return [
        (float(d), float(m), fn(float(d), float(m)))
        for d in np.atleast_1d(delta_grid)
        for m in np.atleast_1d(mu_grid)
    ]


class LevelBranch(str, enum.Enum):
    Outer = "Outer"
    InnerRight = "InnerRight"
    InnerLeft = "InnerLeft"


def _level_integrals(a2: float, b2: float, lo: float, hi: float) -> tuple[float, float]:
    """``int u**2 v du`` and ``int v du`` over ``[lo, hi]`` for
    ``v**2 = (b2 - u**2)(u**2 - a2) / 2``.

    Square-root endpoints are removed by ``u = lo + w**2`` (if singular) and
    ``u = hi - w**2`` on the two halves.
    """

    def v(u: float) -> float:
        return math.sqrt(max(0.5 * (b2 - u * u) * (u * u - a2), 0.0))

    mid = 0.5 * (lo + hi)
    num = den = 0.0
    lo_singular = lo * lo == a2 or lo * lo == b2
    if lo_singular:
        wl = math.sqrt(mid - lo)
        num += quad(lambda w: 2 * w * (lo + w * w) ** 2 * v(lo + w * w), 0, wl, epsabs=1e-14, limit=200)[0]
        den += quad(lambda w: 2 * w * v(lo + w * w), 0, wl, epsabs=1e-14, limit=200)[0]
    else:
        num += quad(lambda u: u * u * v(u), lo, mid, epsabs=1e-14, limit=200)[0]
        den += quad(v, lo, mid, epsabs=1e-14, limit=200)[0]
    wh = math.sqrt(hi - mid)
    num += quad(lambda w: 2 * w * (hi - w * w) ** 2 * v(hi - w * w), 0, wh, epsabs=1e-14, limit=200)[0]
    den += quad(lambda w: 2 * w * v(hi - w * w), 0, wh, epsabs=1e-14, limit=200)[0]
    return num, den


def ralpha(alpha: float, branch=LevelBranch.Outer) -> float:
    """``R(alpha) = 3 (closed int u**2 v du) / (closed int v du)`` on the level
    ``H = alpha`` of the symmetric Hamiltonian (``delta = 0``, ``mu = 1``).

    The outer curve (``alpha > 0``) surrounds both loops; the inner curves
    (``-1/4 < alpha < 0``) surround one center each and give equal values.
    """
    branch = LevelBranch(branch)
    root = math.sqrt(1.0 + 4.0 * alpha) if alpha > -0.25 else math.nan
    b2 = 1.0 + root
    a2 = 1.0 - root
    if branch is LevelBranch.Outer:
        if not alpha > 0:
            raise ParameterError(f"outer level curves need alpha > 0, got {alpha}")
        # a2 < 0 here; integrate over [0, b] using the u -> -u symmetry
        num, den = _level_integrals(a2, b2, 0.0, math.sqrt(b2))
    else:
        if not -0.25 < alpha < 0:
            raise ParameterError(f"inner level curves need -1/4 < alpha < 0, got {alpha}")
        num, den = _level_integrals(a2, b2, math.sqrt(a2), math.sqrt(b2))
    if not den > 0:
        raise QuadratureError(f"degenerate level curve at alpha={alpha}")
    return 3.0 * num / den


def kappa_min(bracket: tuple[float, float, float] = (1e-6, 0.1, 50.0), xtol: float = 1e-10):
    """Minimizer and minimum of ``R`` on the outer branch, ``alpha`` in ``(0, 50]``."""
    res = minimize_scalar(ralpha, bracket=bracket, method="golden", tol=xtol)
    if not bracket[0] < res.x <= bracket[2]:
        raise QuadratureError(f"minimizer {res.x} left the search interval")
    return float(res.x), float(res.fun)
