"""Local bifurcation loci in the ``(p, r)`` plane and region labelling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .equilibria import Kind, find_equilibria
from .errors import EmptyRange, ParameterError
from .lyapunov import Criticality, bautin_transversality, lyapunov_at
from .model import ReducedParams, jacobian_reduced

__all__ = [
    "HopfLocus",
    "BautinCertificate",
    "RegionLabel",
    "hopf_r",
    "hopf_locus",
    "bautin_point",
    "region_classify",
    "sweep",
]

WHICH = ("Origin", "P1", "P2")
TRACE_TOL = 1e-10


def hopf_r(which: str, p: float, s: float) -> float:
    """``r`` on the Hopf locus of ``which`` at given ``p`` and ``s``."""
    if which == "Origin":
        return 1.0
    if which not in WHICH:
        raise ParameterError(f"which must be one of {WHICH}, got {which!r}")
    sg = -1.0 if which == "P1" else 1.0
    arg = s * s + 8.0 * p - 8.0
    if arg < 0:
        return math.nan
    return (-4.0 + 12.0 * p - s * s + sg * s * math.sqrt(arg)) / 8.0


@dataclass(frozen=True)
class HopfLocus:
    """Sampled Hopf curve ``r(p)`` with pointwise certification.

    ``trace``/``det`` are the Jacobian invariants at the named equilibrium;
    samples where the equilibrium or a valid ``r`` is missing are dropped.
    """

    which: str
    s: float
    p: np.ndarray
    r: np.ndarray
    trace: np.ndarray
    det: np.ndarray
    l1: np.ndarray
    criticality: tuple[Criticality, ...]
    bautin_p: float | None = None

    @property
    def certified(self) -> bool:
        return bool(np.all(np.abs(self.trace) < TRACE_TOL) and np.all(self.det > 0))


def _equilibrium_named(params: ReducedParams, name: str):
    for eq in find_equilibria(params):
        names = eq.collision.split("=") if eq.collision else [eq.name]
        if name in names:
            return eq
    return None


def hopf_locus(which: str, s: float, p_values) -> HopfLocus:
    if which not in WHICH:
        raise ParameterError(f"which must be one of {WHICH}, got {which!r}")
    if s < 0:
        raise ParameterError(f"s must be >= 0, got {s}")
    name = "P0" if which == "Origin" else which
    rows = []
    for p in np.atleast_1d(np.asarray(p_values, dtype=float)):
        if not p > 1.0:
            continue
        r = hopf_r(which, float(p), s)
        if not r > 0:
            continue
        params = ReducedParams(float(p), r, s)
        eq = _equilibrium_named(params, name)
        if eq is None:
            continue
        jac = jacobian_reduced(params, eq.location)
        tr = float(np.trace(jac))
        det = float(np.linalg.det(jac))
        if det <= 0:
            continue
        res = lyapunov_at(params, eq.location)
        rows.append((p, r, tr, det, res.l1, res.criticality))
    if not rows:
        raise EmptyRange(f"no admissible Hopf points for {which} at s={s} in the given p range")
    cols = list(zip(*rows))
    bp = 1.0 + 2.0 * s * s / 3.0 if (which == "Origin" and s > 0) else None
    return HopfLocus(
        which=which,
        s=s,
        p=np.array(cols[0]),
        r=np.array(cols[1]),
        trace=np.array(cols[2]),
        det=np.array(cols[3]),
        l1=np.array(cols[4]),
        criticality=tuple(cols[5]),
        bautin_p=bp,
    )


@dataclass(frozen=True)
class BautinCertificate:
    """Located Bautin point on the origin's Hopf line ``r = 1``.

    ``p`` is found by root-finding on the generic ``l1``; ``p_formula`` is
    ``1 + 2 s**2 / 3`` for comparison.
    """

    s: float
    r: float
    p: float
    p_formula: float
    l1: float
    l2: float
    transversality: float

    @property
    def ok(self) -> bool:
        return abs(self.l1) < 1e-10 and self.l2 < 0 and self.transversality != 0


def bautin_point(s: float, adjoint_unit: int = 1) -> BautinCertificate:
    if not s > 0:
        raise ParameterError(f"s must be > 0, got {s}")

    def l1(p: float) -> float:
        return lyapunov_at(ReducedParams(p, 1.0, s), (0.0, 0.0), adjoint_unit).l1

    # l1 > 0 below the Bautin point and < 0 above it
    p = brentq(l1, 1.0 + s * s / 6.0, 1.0 + 2.0 * s * s, xtol=1e-15)
    res = lyapunov_at(ReducedParams(p, 1.0, s), (0.0, 0.0), adjoint_unit, always_l2=True)
    return BautinCertificate(
        s=s,
        r=1.0,
        p=p,
        p_formula=1.0 + 2.0 * s * s / 3.0,
        l1=res.l1,
        l2=float(res.l2),
        transversality=bautin_transversality(s, adjoint_unit),
    )


@dataclass(frozen=True)
class RegionLabel:
    """Linear picture at one parameter point.

    ``kinds`` maps P0/P1/P2 to a kind or ``None`` when absent; merged points
    share a kind. ``sides`` holds signs relative to the origin Hopf line
    (``r - 1``), the transcritical line (``p - r``) and the saddle-node line
    (``r + s**2/4 - p``).
    """

    p: float
    r: float
    s: float
    n_equilibria: int
    kinds: dict[str, Kind | None]
    sides: dict[str, int] = field(default_factory=dict)

    def stable(self, name: str) -> bool:
        k = self.kinds.get(name)
        return bool(k is not None and k.is_stable)


def _sign(x: float, tol: float = 1e-12) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def region_classify(params: ReducedParams) -> RegionLabel:
    eqs = find_equilibria(params)
    kinds: dict[str, Kind | None] = {"P0": None, "P1": None, "P2": None}
    for eq in eqs:
        for n in eq.collision.split("=") if eq.collision else [eq.name]:
            kinds[n] = eq.kind
    p, r, s = params.p, params.r, params.s
    sides = {
        "origin_hopf": _sign(r - 1.0),
        "transcritical": _sign(p - r),
        "saddle_node": _sign(r + s * s / 4.0 - p),
    }
    return RegionLabel(p, r, s, len(eqs), kinds, sides)


def sweep(s: float, p_grid, r_grid) -> list[RegionLabel]:
    """Region labels on a grid, row-major with ``p`` as the outer index."""
    ps = np.atleast_1d(np.asarray(p_grid, dtype=float))
    rs = np.atleast_1d(np.asarray(r_grid, dtype=float))
    if ps.size == 0 or rs.size == 0:
        raise EmptyRange("sweep grids must be nonempty")
    return [region_classify(ReducedParams(float(p), float(r), s)) for p in ps for r in rs]
