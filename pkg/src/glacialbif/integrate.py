"""Adaptive Dormand-Prince 5(4) integration with dense output and section events.

Fields are autonomous callables ``f(state) -> derivative``. Integration may run
forward or backward in time; the sign of ``t_span[1] - t_span[0]`` decides.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import Diverged, NoCrossing, ParameterError, StepFailure
from .model import SlowFastParams, full_field, reduced_field

__all__ = [
    "IntegratorConfig",
    "TerminalReason",
    "Trajectory",
    "Section",
    "SectionEvent",
    "integrate",
    "integrate_to_section",
    "SlowFastDiagnostics",
    "slow_fast_compare",
]

Field = Callable[[np.ndarray], np.ndarray]

DIVERGENCE_BOUND = 1e8

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.append(_A[6], 0.0)
_E = np.array(
    [-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40]
)
# free fourth-order interpolant: y(t0 + theta h) = y0 + h K^T P [theta, .., theta^4]
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_ALPHA = 0.17
_BETA = 0.04
_FAC_MIN, _FAC_MAX = 0.2, 10.0


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-14
    h_max: float = 0.5
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if not (self.rtol > 0 and self.atol > 0):
            raise ParameterError("rtol and atol must be > 0")
        if not (0 < self.h_min <= self.h_init <= self.h_max):
            raise ParameterError("need 0 < h_min <= h_init <= h_max")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be >= 1")


class TerminalReason(str, enum.Enum):
    TimeEnd = "TimeEnd"
    Event = "Event"
    StepFailure = "StepFailure"
    Diverged = "Diverged"


@dataclass
class Trajectory:
    """Sampled solution. ``times`` is monotone in the integration direction."""

    times: np.ndarray
    states: np.ndarray
    terminal_reason: TerminalReason

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class Section:
    """Affine section ``normal . state - offset = 0``.

    ``accept`` optionally restricts which crossings count, e.g. to one ray of
    a line.
    """

    normal: tuple[float, ...]
    offset: float = 0.0
    accept: Optional[Callable[[np.ndarray], bool]] = None

    def g(self, st) -> float:
        return float(np.dot(self.normal, st) - self.offset)


@dataclass(frozen=True)
class SectionEvent:
    time: float
    state: np.ndarray
    residual: float
    direction: int


@dataclass
class _Step:
    t0: float
    y0: np.ndarray
    h: float
    K: np.ndarray
    t1: float
    y1: np.ndarray

    def dense(self, theta: float) -> np.ndarray:
        powers = np.array([theta, theta**2, theta**3, theta**4])
        return self.y0 + self.h * (self.K.T @ (_P @ powers))

    def at(self, t: float) -> np.ndarray:
        return self.dense((t - self.t0) / self.h)


def _steps(field: Field, y0, t0: float, t1: float, cfg: IntegratorConfig) -> Iterator[_Step]:
    """Accepted steps from ``t0`` towards ``t1``; raises on failure."""
    y = np.asarray(y0, dtype=float).copy()
    if not np.all(np.isfinite(y)):
        raise ParameterError("initial state must be finite")
    span = t1 - t0
    if span == 0:
        return
    sgn = 1.0 if span > 0 else -1.0
    n = y.size
    K = np.empty((7, n))
    K[0] = field(y)
    t = t0
    h = min(cfg.h_init, abs(span))
    err_old = 1e-4
    rejected = False
    for _ in range(cfg.max_steps):
        remaining = abs(t1 - t)
        if remaining <= 1e-15 * max(1.0, abs(t1)):
            return
        h = min(h, remaining, cfg.h_max)
        hs = sgn * h
        for i in range(1, 7):
            K[i] = field(y + hs * (_A[i] @ K[:i]))
        y_new = y + hs * (_B @ K)
        err_vec = hs * (_E @ K)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if not math.isfinite(err) or not np.all(np.isfinite(y_new)):
            err = math.inf
        if err <= 1.0:
            t_new = t + hs if h < remaining else t1
            step = _Step(t, y, hs, K.copy(), t_new, y_new)
            if float(np.max(np.abs(y_new))) > DIVERGENCE_BOUND:
                exc = Diverged(f"|state| exceeded {DIVERGENCE_BOUND:g} at t={t_new:.6g}")
                exc.last_step = step
                raise exc
            yield step
            fac = err**_ALPHA / err_old**_BETA / _SAFETY if err > 0 else 1.0 / _FAC_MAX
            fac = min(1.0 / _FAC_MIN, max(1.0 / _FAC_MAX, fac))
            if rejected:
                fac = max(fac, 1.0)
            h = h / fac
            err_old = max(err, 1e-4)
            t, y = t_new, y_new
            K[0] = K[6]
            rejected = False
        else:
            fac = _FAC_MIN if not math.isfinite(err) else max(_FAC_MIN, _SAFETY * err**-_ALPHA)
            h *= fac
            rejected = True
            if h < cfg.h_min:
                raise StepFailure(f"step size {h:.3e} below h_min at t={t:.6g}")
    raise StepFailure(f"max_steps={cfg.max_steps} exhausted at t={t:.6g}")


def integrate(
    field: Field,
    state0,
    t_span: tuple[float, float],
    cfg: IntegratorConfig = IntegratorConfig(),
    t_eval=None,
    raise_on_failure: bool = True,
) -> Trajectory:
    """Integrate over ``t_span``.

    Without ``t_eval`` every accepted step is recorded; with it the dense
    output is sampled at the requested (monotone, in-range) times. With
    ``raise_on_failure=False`` a failed run returns what was computed, tagged
    with the terminal reason.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(t0) and math.isfinite(t1)) or t0 == t1:
        raise ParameterError("t_span must be two distinct finite times")
    y0 = np.asarray(state0, dtype=float)
    sgn = 1.0 if t1 > t0 else -1.0
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(sgn * np.diff(t_eval) <= 0):
            raise ParameterError("t_eval must be strictly monotone in the integration direction")
    times, states = [t0], [y0.copy()]
    reason = TerminalReason.TimeEnd
    idx = 0
    if t_eval is not None:
        times, states = [], []
        while idx < t_eval.size and t_eval[idx] == t0:
            times.append(t0)
            states.append(y0.copy())
            idx += 1
    try:
        for st in _steps(field, y0, t0, t1, cfg):
            if t_eval is None:
                times.append(st.t1)
                states.append(st.y1)
                continue
            while idx < t_eval.size and sgn * (t_eval[idx] - st.t1) <= 0:
                times.append(float(t_eval[idx]))
                states.append(st.y1 if t_eval[idx] == st.t1 else st.at(t_eval[idx]))
                idx += 1
    except (StepFailure, Diverged) as exc:
        if raise_on_failure:
            raise
        reason = TerminalReason.Diverged if isinstance(exc, Diverged) else TerminalReason.StepFailure
    return Trajectory(np.array(times), np.array(states).reshape(len(times), y0.size), reason)


def integrate_to_section(
    field: Field,
    state0,
    section: Section,
    direction: int = 0,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_max: float = 100.0,
    backward: bool = False,
) -> SectionEvent:
    """First crossing of ``section`` strictly after the start.

    ``direction`` is the required sign of the change in ``g`` along the path
    as traversed (+1, -1, or 0 for either). The reported ``time`` is negative
    for backward runs.
    """
    if direction not in (-1, 0, 1):
        raise ParameterError("direction must be -1, 0 or 1")
    y0 = np.asarray(state0, dtype=float)
    t_end = -t_max if backward else t_max
    g_prev = section.g(y0)
    if abs(g_prev) <= 1e-14 * (1.0 + float(np.max(np.abs(y0)))):
        g_prev = 0.0  # starting on the section does not count as a crossing
    try:
        for st in _steps(field, y0, 0.0, t_end, cfg):
            g_new = section.g(st.y1)
            crossed = (g_prev < 0 < g_new) or (g_prev > 0 > g_new) or (g_new == 0 and g_prev != 0)
            if crossed:
                d = 1 if g_new > g_prev else -1
                if direction == 0 or d == direction:
                    if g_new == 0:
                        theta = 1.0
                    else:
                        theta = brentq(
                            lambda th: section.g(st.dense(th)), 0.0, 1.0, xtol=1e-15
                        )
                    y_c = st.y1 if theta == 1.0 else st.dense(theta)
                    if section.accept is None or section.accept(y_c):
                        return SectionEvent(
                            time=st.t0 + theta * st.h,
                            state=y_c,
                            residual=abs(section.g(y_c)),
                            direction=d,
                        )
            g_prev = g_new
    except Diverged as exc:
        raise NoCrossing(f"orbit diverged before reaching the section: {exc}") from exc
    raise NoCrossing(f"no admissible crossing within |t| <= {t_max:g}")


@dataclass(frozen=True)
class SlowFastDiagnostics:
    """Comparison of the slow-fast and reduced flows.

    ``manifold_residual`` is ``sup |z + x|`` after ``t_transient``;
    ``state_gap`` the ``sup`` of the ``(x, y)`` difference over the same
    window and ``state_gap_all`` over the whole run.
    """

    eps: float
    t_transient: float
    manifold_residual: float
    state_gap: float
    state_gap_all: float
    initial_offset: float


def slow_fast_compare(
    params: SlowFastParams,
    state0,
    T: float,
    cfg: IntegratorConfig = IntegratorConfig(rtol=1e-10, atol=1e-12),
    t_transient: float | None = None,
    n_samples: int = 4001,
) -> SlowFastDiagnostics:
    eps = params.eps
    if t_transient is None:
        t_transient = 10.0 * eps * abs(math.log(eps))
    if not 0 <= t_transient < T:
        raise ParameterError("need 0 <= t_transient < T")
    x0 = np.asarray(state0, dtype=float)
    grid = np.union1d(np.linspace(0.0, T, n_samples), [t_transient])
    full = integrate(lambda st: full_field(params, st), x0, (0.0, T), cfg, t_eval=grid)
    red = integrate(lambda st: reduced_field(params.base, st), x0[:2], (0.0, T), cfg, t_eval=grid)
    post = grid >= t_transient
    resid = np.abs(full.states[:, 2] + full.states[:, 0])
    gap = np.max(np.abs(full.states[:, :2] - red.states), axis=1)
    return SlowFastDiagnostics(
        eps=eps,
        t_transient=t_transient,
        manifold_residual=float(np.max(resid[post])),
        state_gap=float(np.max(gap[post])),
        state_gap_all=float(np.max(gap)),
        initial_offset=float(abs(x0[2] + x0[0])),
    )
