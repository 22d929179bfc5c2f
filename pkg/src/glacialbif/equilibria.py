"""Equilibria of the reduced and Hamiltonian systems and their linear type."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAnEquilibrium, ParameterError
from .linalg import eig2
from .model import ReducedParams, jacobian_reduced, reduced_field

__all__ = [
    "Kind",
    "Equilibrium",
    "DegeneracyLoci",
    "HamKind",
    "HamEquilibrium",
    "classify_matrix",
    "classify",
    "find_equilibria",
    "degeneracy_loci",
    "hamiltonian_equilibria",
]

MERGE_TOL = 1e-9
DISC_TOL = 1e-12
DEGEN_RTOL = 1e-10
RESIDUAL_TOL = 1e-10


class Kind(str, enum.Enum):
    SaddlePoint = "SaddlePoint"
    StableNode = "StableNode"
    UnstableNode = "UnstableNode"
    StableDegenerateNode = "StableDegenerateNode"
    UnstableDegenerateNode = "UnstableDegenerateNode"
    StableFocus = "StableFocus"
    UnstableFocus = "UnstableFocus"
    LinearCenter = "LinearCenter"
    DoubleZero = "DoubleZero"
    ZeroEigenvalue = "ZeroEigenvalue"

    @property
    def is_stable(self) -> bool:
        return self in (Kind.StableNode, Kind.StableDegenerateNode, Kind.StableFocus)


@dataclass(frozen=True)
class Equilibrium:
    """An equilibrium ``(x, -x)`` of the reduced system.

    ``collision`` names the points merged into this one, e.g. ``"P0=P2"``
    on the transcritical line ``p = r``.
    """

    name: str
    location: np.ndarray
    eigenvalues: tuple[complex, complex]
    kind: Kind
    collision: str | None = None


def classify_matrix(m, rtol: float = DEGEN_RTOL) -> Kind:
    """Linear type from trace, determinant and discriminant.

    Exact degeneracies are reported only when the defining equality holds
    to ``rtol`` relative to the matrix scale.
    """
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tr * tr - 4.0 * det
    scale = 1.0 + float(np.max(np.abs(m)))
    tol1 = rtol * scale
    tol2 = rtol * scale * scale
    if abs(det) <= tol2:
        return Kind.DoubleZero if abs(tr) <= tol1 else Kind.ZeroEigenvalue
    if det < 0:
        return Kind.SaddlePoint
    if abs(tr) <= tol1:
        return Kind.LinearCenter
    stable = tr < 0
    if abs(disc) <= tol2:
        return Kind.StableDegenerateNode if stable else Kind.UnstableDegenerateNode
    if disc > 0:
        return Kind.StableNode if stable else Kind.UnstableNode
    return Kind.StableFocus if stable else Kind.UnstableFocus


def classify(
    params: ReducedParams, location, name: str = "", collision: str | None = None
) -> Equilibrium:
    """Classify ``location``; it must annihilate the reduced field."""
    loc = np.asarray(location, dtype=float)
    res = float(np.max(np.abs(reduced_field(params, loc))))
    if res > RESIDUAL_TOL * (1.0 + float(np.max(np.abs(loc))) ** 3):
        raise NotAnEquilibrium(f"field residual {res:.3e} at {loc.tolist()}")
    jac = jacobian_reduced(params, loc)
    return Equilibrium(name, loc, eig2(jac), classify_matrix(jac), collision)


def _nonzero_roots(p: float, r: float, s: float) -> list[tuple[str, float, str | None]]:
    # x**2 - s x + (p - r) = 0
    disc = s * s + 4.0 * (r - p)
    if disc < -DISC_TOL:
        return []
    if disc <= DISC_TOL:
        return [("P1", 0.5 * s, "P1=P2")]
    big = 0.5 * (s + math.sqrt(disc))  # s >= 0, so no cancellation here
    return [("P1", big, None), ("P2", (p - r) / big, None)]


def find_equilibria(params: ReducedParams) -> list[Equilibrium]:
    """All equilibria, sorted by ``x`` descending.

    Points closer than ``1e-9`` (max norm) are merged into one entry whose
    ``collision`` records the merged names; the origin keeps the name P0.
    """
    pts: list[tuple[str, float, str | None]] = [("P0", 0.0, None)]
    for name, x, col in _nonzero_roots(params.p, params.r, params.s):
        hit = next((i for i, q in enumerate(pts) if abs(q[1] - x) <= MERGE_TOL), None)
        if hit is None:
            pts.append((name, x, col))
        else:
            kept = pts[hit]
            merged = "=".join(filter(None, [kept[2] or kept[0], col or name]))
            pts[hit] = (kept[0], kept[1], merged)
    pts.sort(key=lambda t: -t[1])
    return [classify(params, np.array([x, -x]) + 0.0, name, col) for name, x, col in pts]


def _jac(p: float, r: float, s: float, y: float) -> np.ndarray:
    return np.array([[-1.0, -1.0], [p, r - 2.0 * s * y - 3.0 * y * y]])


@dataclass(frozen=True)
class DegeneracyLoci:
    """Codimension-one loci and Bogdanov-Takens points in the ``(p, r)`` plane."""

    s: float
    q0: tuple[float, float]
    q1: tuple[float, float]
    saddle_node_residual: float = field(default=math.nan)
    bt_residual: float = field(default=math.nan)

    def saddle_node_p(self, r: float) -> float:
        return r + self.s * self.s / 4.0

    @staticmethod
    def transcritical_p(r: float) -> float:
        return r

    def saddle_node_other_eigenvalue(self, r: float) -> float:
        return r + self.s * self.s / 4.0 - 1.0

    @property
    def certified(self) -> bool:
        return self.saddle_node_residual < 1e-10 and self.bt_residual < 1e-10


def degeneracy_loci(s: float, r_samples=(0.5, 1.0, 1.2, 2.0)) -> DegeneracyLoci:
    """Loci with a numerical certificate.

    On the saddle-node line the Jacobian at ``(s/2, -s/2)`` must have
    eigenvalues ``{0, r + s**2/4 - 1}``; at each BT point it must be nilpotent
    and nonzero (one-dimensional kernel). The largest deviation seen is kept.
    """
    if not s >= 0:
        raise ParameterError(f"s must be >= 0, got {s}")
    sn_res = 0.0
    for r in r_samples:
        p = r + s * s / 4.0
        ev = sorted(np.real(eig2(_jac(p, r, s, -0.5 * s))), key=abs)
        target = r + s * s / 4.0 - 1.0
        sn_res = max(sn_res, abs(ev[0]), abs(ev[1] - target))
    q0 = (1.0, 1.0)
    q1 = (1.0, 1.0 - s * s / 4.0)
    bt_res = 0.0
    for (p, r), y in ((q0, 0.0), (q1, -0.5 * s)):
        m = _jac(p, r, s, y)
        bt_res = max(bt_res, float(np.max(np.abs(m @ m))))
        if np.linalg.matrix_rank(m) != 1:
            bt_res = math.inf
    return DegeneracyLoci(s, q0, q1, sn_res, bt_res)


class HamKind(str, enum.Enum):
    Saddle = "Saddle"
    Center = "Center"
    Degenerate = "Degenerate"


@dataclass(frozen=True)
class HamEquilibrium:
    name: str
    location: np.ndarray
    kind: HamKind
    curvature: float  # d(v')/du; > 0 saddle, < 0 center


def hamiltonian_equilibria(delta: float, mu: float) -> list[HamEquilibrium]:
    """Equilibria ``p0, p1, p2`` of the unperturbed rescaled system."""
    roots = [("p0", 0.0)]
    disc = delta * delta + 4.0 * mu
    if disc > 0:
        w = math.sqrt(disc)
        roots += [("p1", 0.5 * (delta + w)), ("p2", 0.5 * (delta - w))]
    out = []
    for name, u in roots:
        k = mu + 2.0 * delta * u - 3.0 * u * u
        tol = DEGEN_RTOL * (1.0 + abs(mu) + abs(delta) ** 2)
        if abs(k) <= tol:
            kind = HamKind.Degenerate
        else:
            kind = HamKind.Saddle if k > 0 else HamKind.Center
        out.append(HamEquilibrium(name, np.array([u, 0.0]), kind, k))
    return out
