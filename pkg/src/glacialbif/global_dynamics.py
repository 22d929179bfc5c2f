"""Limit cycles by return maps and homoclinic connections by shooting.

Two shooting problems are handled:

* the reduced system at fixed ``(r, s)``, bisecting on ``p``. The section is
  the line of equilibria ``x + y = 0`` and the matching happens on the ray
  beyond the enclosed equilibrium;
* the rescaled system at fixed ``(delta, mu, eta)``, bisecting on ``lambda``
  from the Melnikov prediction. The section is ``v = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .equilibria import Equilibrium, Kind, find_equilibria
from .errors import (
    IntegrationError,
    NoCrossing,
    NoCycleInBracket,
    NoSignChange,
    NotASaddle,
    ParameterError,
)
from .integrate import IntegratorConfig, Section, Trajectory, integrate, integrate_to_section
from .linalg import eig2
from .melnikov import Branch, lambda_double_quadrature, lambda_single
from .model import (
    ReducedParams,
    RescaledParams,
    jacobian_reduced,
    reduced_field,
    rescaled_field,
)

__all__ = [
    "Stability",
    "LimitCycle",
    "ManifoldSeeds",
    "Splitting",
    "HomoclinicFind",
    "return_map",
    "find_limit_cycles",
    "saddle_manifold_seed",
    "splitting_distance",
    "find_homoclinic",
    "rescaled_splitting",
    "melnikov_guided_homoclinic",
]

SHOOT_CFG = IntegratorConfig(rtol=1e-11, atol=1e-13)


class Stability(str, enum.Enum):
    Stable = "Stable"
    Unstable = "Unstable"


@dataclass(frozen=True)
class LimitCycle:
    """Fixed point of the first-return map on the ray ``{y = y_f, x > x_f}``."""

    section_point: np.ndarray
    radius: float
    period: float
    multiplier: float
    stability: Stability
    residual: float


def _focus_section(focus) -> Section:
    xf, yf = float(focus[0]), float(focus[1])
    return Section((0.0, 1.0), yf, accept=lambda st: st[0] > xf)


def return_map(
    params: ReducedParams,
    radius: float,
    focus=(0.0, 0.0),
    cfg: IntegratorConfig = SHOOT_CFG,
    t_max: float = 200.0,
) -> tuple[float, float]:
    """First return ``(radius, time)`` of ``focus + (radius, 0)`` to the ray."""
    xf, yf = float(focus[0]), float(focus[1])
    ev = integrate_to_section(
        lambda st: reduced_field(params, st),
        np.array([xf + radius, yf]),
        _focus_section(focus),
        0,
        cfg,
        t_max,
    )
    return float(ev.state[0] - xf), float(ev.time)


def find_limit_cycles(
    params: ReducedParams,
    radius_bracket: tuple[float, float] = (0.01, 1.0),
    focus=(0.0, 0.0),
    n_scan: int = 40,
    cfg: IntegratorConfig = SHOOT_CFG,
    fd_step: float = 1e-5,
) -> list[LimitCycle]:
    """Cycles around ``focus`` crossing the ray within ``radius_bracket``.

    The displacement ``d(rho) = P(rho) - rho`` is scanned on ``n_scan``
    points; each sign change is bisected to ``1e-12``. The multiplier is the
    centered difference of ``P`` with step ``fd_step * rho``.
    """
    lo, hi = radius_bracket
    if not 0 < lo < hi:
        raise ParameterError("radius bracket must satisfy 0 < lo < hi")

    def disp(rho: float) -> float:
        try:
            return return_map(params, rho, focus, cfg)[0] - rho
        except IntegrationError:
            return math.nan

    grid = np.linspace(lo, hi, n_scan)
    vals = [disp(float(g)) for g in grid]
    cycles = []
    for a, b, da, db in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if not (math.isfinite(da) and math.isfinite(db)) or da * db > 0:
            continue
        rho = float(bisect(disp, a, b, xtol=1e-12)) if da * db < 0 else float(a if da == 0 else b)
        r1, period = return_map(params, rho, focus, cfg)
        h = fd_step * rho
        mult = (return_map(params, rho + h, focus, cfg)[0] - return_map(params, rho - h, focus, cfg)[0]) / (2 * h)
        cycles.append(
            LimitCycle(
                section_point=np.array([focus[0] + rho, focus[1]]),
                radius=rho,
                period=period,
                multiplier=mult,
                stability=Stability.Stable if abs(mult) < 1 else Stability.Unstable,
                residual=abs(r1 - rho),
            )
        )
    if not cycles:
        raise NoCycleInBracket(f"no sign change of the displacement on {radius_bracket}")
    return cycles


def _real_eigvec(m: np.ndarray, lam: float) -> np.ndarray:
    a, b = m[0]
    c, d = m[1]
    v1 = np.array([b, lam - a])
    v2 = np.array([lam - d, c])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    v = v / np.linalg.norm(v)
    # orient with a positive first component (second if the first vanishes)
    k = 0 if abs(v[0]) > 1e-14 else 1
    return v if v[k] > 0 else -v


def _saddle_data(m: np.ndarray):
    e1, e2 = eig2(m)
    if abs(e1.imag) > 0 or not (e1.real > 0 > e2.real):
        raise NotASaddle(f"eigenvalues {e1}, {e2} are not real of opposite sign")
    lu, ls = e1.real, e2.real
    return lu, _real_eigvec(m, lu), ls, _real_eigvec(m, ls)


@dataclass(frozen=True)
class ManifoldSeeds:
    """Points at ``+-offset`` along the unit unstable and stable eigenvectors."""

    saddle: np.ndarray
    lambda_u: float
    lambda_s: float
    vu: np.ndarray
    vs: np.ndarray
    offset: float

    def unstable(self, sign: int) -> np.ndarray:
        return self.saddle + sign * self.offset * self.vu

    def stable(self, sign: int) -> np.ndarray:
        return self.saddle + sign * self.offset * self.vs


def _seeds(m, point, offset: float) -> ManifoldSeeds:
    if not offset > 0:
        raise ParameterError(f"seed offset must be > 0, got {offset}")
    lu, vu, ls, vs = _saddle_data(np.asarray(m, dtype=float))
    return ManifoldSeeds(np.asarray(point, dtype=float), lu, ls, vu, vs, offset)


def saddle_manifold_seed(params: ReducedParams, saddle: Equilibrium, offset: float = 1e-6) -> ManifoldSeeds:
    if saddle.kind is not Kind.SaddlePoint:
        raise NotASaddle(f"{saddle.name} is a {saddle.kind.value}")
    return _seeds(jacobian_reduced(params, saddle.location), saddle.location, offset)


@dataclass(frozen=True)
class Splitting:
    """Signed gap between manifold crossings on the matching ray.

    Positive means the unstable branch lands farther out along the ray than
    the stable one. ``valid`` is false when a branch's first crossing of the
    section misses the ray.
    """

    gap: float
    valid: bool
    transit_time: float = math.nan
    unstable_hit: np.ndarray | None = None
    stable_hit: np.ndarray | None = None
    t_unstable: float = math.nan
    t_stable: float = math.nan


def _equilibrium(params: ReducedParams, name: str) -> Equilibrium:
    for eq in find_equilibria(params):
        names = eq.collision.split("=") if eq.collision else [eq.name]
        if name in names:
            return eq
    raise ParameterError(f"equilibrium {name} does not exist at {params}")


def splitting_distance(
    params: ReducedParams,
    saddle: str,
    enclosed: str,
    signs: tuple[int, int],
    offset: float = 1e-7,
    cfg: IntegratorConfig = SHOOT_CFG,
    t_max: float = 300.0,
) -> Splitting:
    """Gap on the line ``x + y = 0`` beyond ``enclosed``, seen from ``saddle``.

    ``signs = (su, ss)`` picks the unstable and stable seed sides.
    """
    sad = _equilibrium(params, saddle)
    enc = _equilibrium(params, enclosed)
    seeds = saddle_manifold_seed(params, sad, offset)
    x_sad, x_enc = float(sad.location[0]), float(enc.location[0])
    ray = 1.0 if x_enc > x_sad else -1.0
    line = Section((1.0, 1.0), 0.0)
    f = lambda st: reduced_field(params, st)  # noqa: E731
    try:
        eu = integrate_to_section(f, seeds.unstable(signs[0]), line, 0, cfg, t_max)
        es = integrate_to_section(f, seeds.stable(signs[1]), line, 0, cfg, t_max, backward=True)
    except NoCrossing:
        return Splitting(math.nan, False)
    xu, xs = float(eu.state[0]), float(es.state[0])
    valid = (xu - x_enc) * ray > 0 and (xs - x_enc) * ray > 0
    return Splitting(
        gap=(xu - xs) * ray,
        valid=valid,
        transit_time=eu.time - es.time,
        unstable_hit=eu.state,
        stable_hit=es.state,
        t_unstable=eu.time,
        t_stable=es.time,
    )


@dataclass
class HomoclinicFind:
    """Located homoclinic parameter value.

    ``value`` is ``p*`` (reduced chart) or ``lambda*`` (rescaled chart).
    ``offset_shift`` is the change in ``value`` when the seed offset is
    halved; ``prediction`` is the Melnikov value where applicable.
    """

    fixed: dict
    parameter: str
    value: float
    splitting_at_root: float
    saddle: str
    signs: tuple[int, int]
    bracket: tuple[float, float]
    offset_shift: float = math.nan
    prediction: float | None = None
    orbit: Trajectory | None = field(default=None, repr=False)


def _bisect_gap(gap: Callable[[float], float], a: float, b: float, ga: float, gb: float,
                gtol: float = 1e-10, xtol: float = 1e-12) -> tuple[float, float]:
    while abs(b - a) > xtol:
        m = 0.5 * (a + b)
        gm = gap(m)
        if math.isnan(gm):
            raise NoSignChange(f"splitting undefined at {m!r} inside the bracket")
        if abs(gm) < gtol:
            return m, gm
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b, gb = m, gm
    return (a, ga) if abs(ga) <= abs(gb) else (b, gb)


def _concat_orbit(field_fn, sp: Splitting, start_u, start_s, cfg) -> Trajectory:
    up = integrate(field_fn, start_u, (0.0, sp.t_unstable), cfg)
    down = integrate(field_fn, start_s, (0.0, sp.t_stable), cfg)
    t_shift = sp.t_unstable - sp.t_stable
    times = np.concatenate([up.times, (down.times[::-1] + t_shift)[1:]])
    states = np.vstack([up.states, down.states[::-1][1:]])
    return Trajectory(times, states, up.terminal_reason)


def find_homoclinic(
    r: float,
    s: float,
    p_bracket: tuple[float, float],
    saddle: str = "P0",
    enclosed: str = "P2",
    offset: float = 1e-7,
    cfg: IntegratorConfig = SHOOT_CFG,
    richardson: bool = True,
    with_orbit: bool = True,
) -> HomoclinicFind:
    """Bisect on ``p`` for a loop from ``saddle`` around ``enclosed``.

    All four seed-side combinations are tried; those valid at both bracket
    ends with a sign change are kept, and the one with the shortest transit
    time is used.
    """
    a, b = sorted(map(float, p_bracket))

    def split(p: float, signs) -> Splitting:
        return splitting_distance(ReducedParams(p, r, s), saddle, enclosed, signs, offset, cfg)

    candidates = []
    for su in (1, -1):
        for ss in (1, -1):
            sa, sb = split(a, (su, ss)), split(b, (su, ss))
            if sa.valid and sb.valid and sa.gap * sb.gap < 0:
                candidates.append((sa.transit_time + sb.transit_time, (su, ss), sa.gap, sb.gap))
    if not candidates:
        raise NoSignChange(f"no seed combination changes sign on p in [{a}, {b}]")
    _, signs, ga, gb = min(candidates)

    def gap(p: float) -> float:
        sp = split(p, signs)
        return sp.gap if sp.valid else math.nan

    p_star, g_star = _bisect_gap(gap, a, b, ga, gb)
    shift = math.nan
    if richardson:
        w = 1e-5
        def gap_half(p: float) -> float:
            sp = splitting_distance(ReducedParams(p, r, s), saddle, enclosed, signs, offset / 2, cfg)
            return sp.gap if sp.valid else math.nan
        lo, hi = p_star - w, p_star + 1.7 * w  # asymmetric: the midpoint must not be p_star
        glo, ghi = gap_half(lo), gap_half(hi)
        if glo * ghi < 0:
            shift = abs(_bisect_gap(gap_half, lo, hi, glo, ghi)[0] - p_star)
    orbit = None
    if with_orbit:
        params = ReducedParams(p_star, r, s)
        sp = split(p_star, signs)
        seeds = saddle_manifold_seed(params, _equilibrium(params, saddle), offset)
        orbit = _concat_orbit(
            lambda st: reduced_field(params, st), sp, seeds.unstable(signs[0]), seeds.stable(signs[1]), cfg
        )
    return HomoclinicFind(
        fixed={"r": r, "s": s},
        parameter="p",
        value=p_star,
        splitting_at_root=g_star,
        saddle=saddle,
        signs=signs,
        bracket=(a, b),
        offset_shift=shift,
        orbit=orbit,
    )


LOOPS = ("left", "right", "double")


def rescaled_splitting(
    rp: RescaledParams,
    loop: str = "left",
    offset: float = 1e-8,
    cfg: IntegratorConfig = SHOOT_CFG,
    t_max: float = 200.0,
) -> Splitting:
    """Gap on ``v = 0`` for a loop of the origin in the rescaled chart.

    Single loops pair the unstable and stable seeds on the loop's side and
    compare their first crossings. The double loop leaves on the left and is
    matched to the stable seed on the right; if the unstable branch turns
    back into the left well instead of reaching ``u > 0``, it is inside the
    connection and gets the gap ``-inf``.
    """
    if loop not in LOOPS:
        raise ParameterError(f"loop must be one of {LOOPS}, got {loop!r}")
    m = np.array([[0.0, 1.0], [rp.mu, rp.eta * rp.lam]])
    seeds = _seeds(m, (0.0, 0.0), offset)
    f = lambda st: rescaled_field(rp, st)  # noqa: E731
    sec = Section((0.0, 1.0), 0.0)
    side_u = 1 if loop == "right" else -1
    side_s = -1 if loop == "left" else 1
    try:
        eu = integrate_to_section(f, seeds.unstable(side_u), sec, 0, cfg, t_max)
        if loop == "double":
            if eu.state[0] > 0:
                return Splitting(math.nan, False)
            eu2 = integrate_to_section(f, eu.state, sec, 0, cfg, t_max)
            if eu2.state[0] < 0:
                return Splitting(-math.inf, True, t_unstable=eu.time + eu2.time)
            eu = type(eu)(eu.time + eu2.time, eu2.state, eu2.residual, eu2.direction)
        es = integrate_to_section(f, seeds.stable(side_s), sec, 0, cfg, t_max, backward=True)
    except NoCrossing:
        return Splitting(math.nan, False)
    uu, us = float(eu.state[0]), float(es.state[0])
    valid = uu * side_s > 0 and us * side_s > 0
    return Splitting(
        gap=(uu - us) * side_s,
        valid=valid,
        transit_time=eu.time - es.time,
        unstable_hit=eu.state,
        stable_hit=es.state,
        t_unstable=eu.time,
        t_stable=es.time,
    )


def melnikov_guided_homoclinic(
    delta: float,
    mu: float,
    eta: float,
    loop: str = "left",
    offset: float = 1e-8,
    cfg: IntegratorConfig = SHOOT_CFG,
    max_width: float = 16.0,
    with_orbit: bool = False,
) -> HomoclinicFind:
    """Refine the first-order persistence value of ``lambda`` by shooting.

    The bracket grows geometrically around the prediction (from 0.25 up to
    ``max_width``) until the gap changes sign. The double loop starts from
    the value that makes the summed Melnikov function vanish.
    """
    if not 0 < eta <= 0.3:
        raise ParameterError(f"eta must satisfy 0 < eta <= 0.3, got {eta}")
    if loop == "double":
        pred = lambda_double_quadrature(delta, mu).lambda_root
    elif loop in ("left", "right"):
        pred = lambda_single(Branch.LeftLoop if loop == "left" else Branch.RightLoop, delta, mu)
    else:
        raise ParameterError(f"loop must be one of {LOOPS}, got {loop!r}")

    def gap(lam: float) -> float:
        sp = rescaled_splitting(RescaledParams(delta, mu, lam, eta), loop, offset, cfg)
        return sp.gap if sp.valid else math.nan

    w = 0.25
    while True:
        a, b = pred - w, pred + w
        ga, gb = gap(a), gap(b)
        if ga * gb < 0:
            break
        w *= 2.0
        if w > max_width:
            raise NoSignChange(f"no sign change within +-{max_width} of lambda={pred:.6g}")
    lam_star, g_star = _bisect_gap(gap, a, b, ga, gb)
    orbit = None
    side_u = 1 if loop == "right" else -1
    side_s = -1 if loop == "left" else 1
    if with_orbit:
        rp = RescaledParams(delta, mu, lam_star, eta)
        sp = rescaled_splitting(rp, loop, offset, cfg)
        m = np.array([[0.0, 1.0], [mu, eta * lam_star]])
        seeds = _seeds(m, (0.0, 0.0), offset)
        orbit = _concat_orbit(
            lambda st: rescaled_field(rp, st), sp, seeds.unstable(side_u), seeds.stable(side_s), cfg
        )
    return HomoclinicFind(
        fixed={"delta": delta, "mu": mu, "eta": eta, "loop": loop},
        parameter="lambda",
        value=lam_star,
        splitting_at_root=g_star,
        saddle="origin",
        signs=(side_u, side_s),
        bracket=(a, b),
        prediction=pred,
        orbit=orbit,
    )
