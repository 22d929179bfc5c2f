"""First and second Lyapunov coefficients of the reduced system at Hopf points.

The planar field is written in the complex coordinate ``z = <p_adj, x - x0>``
as ``z' = i omega z + sum g_kl z**k conj(z)**l / (k! l!)``. Because the field
is cubic, every ``g_kl`` with ``k + l >= 4`` vanishes; they are still carried
so the general formulas read as written.

Lyapunov coefficients are not invariant under rescaling the eigenvectors:
``q -> c q`` with ``p_adj -> p_adj / conj(c)`` multiplies ``l1`` by ``|c|**2``
and ``l2`` by ``|c|**4``. Their signs, and their values under unit-modulus
``c``, are invariant. The default convention (``adjoint_unit=1``, unit second
component of ``p_adj``) is the one under which the classical closed form
``l1_origin_closed`` holds. ``adjoint_unit=0`` instead fixes the first
component, which multiplies ``l1`` at the origin by ``p`` and ``l2`` by
``p**2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .linalg import EigenPair, hopf_eigendata
from .model import ReducedParams, jacobian_reduced

__all__ = [
    "DerivativeTensors",
    "GCoefficients",
    "Criticality",
    "LyapunovResult",
    "derivative_tensors",
    "g_coefficients",
    "first_lyapunov",
    "second_lyapunov",
    "lyapunov_at",
    "l1_origin_closed",
    "l2_origin_closed",
    "l1_offorigin_closed",
    "bautin_transversality",
    "transversality_closed",
]

L2_THRESHOLD = 1e-6


@dataclass(frozen=True)
class DerivativeTensors:
    """Exact multilinear forms of the reduced field at an equilibrium.

    Only the second component of the field is nonlinear, and only in ``y``:
    ``B(a, b) = (0, fyy a1 b1)``, ``C(a, b, c) = (0, fyyy a1 b1 c1)`` with
    zero-based indices. ``D`` vanishes identically.
    """

    fyy: float
    fyyy: float

    def B(self, a, b) -> np.ndarray:
        return np.array([0.0 * a[1], self.fyy * a[1] * b[1]])

    def C(self, a, b, c) -> np.ndarray:
        return np.array([0.0 * a[1], self.fyyy * a[1] * b[1] * c[1]])

    def D(self, a, b, c, d) -> np.ndarray:
        return np.zeros(2, dtype=np.result_type(a, b, c, d, float))


def derivative_tensors(params: ReducedParams, location) -> DerivativeTensors:
    y0 = float(location[1])
    return DerivativeTensors(fyy=-2.0 * params.s - 6.0 * y0, fyyy=-6.0)


@dataclass(frozen=True)
class GCoefficients:
    g20: complex
    g11: complex
    g02: complex
    g30: complex
    g21: complex
    g12: complex
    g03: complex
    g40: complex
    g31: complex
    g22: complex
    g13: complex


def g_coefficients(t: DerivativeTensors, eig: EigenPair) -> GCoefficients:
    q, qb = eig.q, np.conj(eig.q)

    def proj(v) -> complex:
        return complex(np.vdot(eig.p_adj, v))

    return GCoefficients(
        g20=proj(t.B(q, q)),
        g11=proj(t.B(q, qb)),
        g02=proj(t.B(qb, qb)),
        g30=proj(t.C(q, q, q)),
        g21=proj(t.C(q, q, qb)),
        g12=proj(t.C(q, qb, qb)),
        g03=proj(t.C(qb, qb, qb)),
        g40=proj(t.D(q, q, q, q)),
        g31=proj(t.D(q, q, q, qb)),
        g22=proj(t.D(q, q, qb, qb)),
        g13=proj(t.D(q, qb, qb, qb)),
    )


def first_lyapunov(g: GCoefficients, omega: float) -> float:
    return (1.0 / (2.0 * omega**2)) * (1j * g.g20 * g.g11 + omega * g.g21).real


def second_lyapunov(g: GCoefficients, omega: float, g32: complex = 0.0) -> float:
    """Second Lyapunov coefficient of a planar field in complex normal form.

    ``g32`` needs fifth derivatives; it is zero for the cubic model and kept
    only as an argument for completeness.
    """
    c = np.conj
    g20, g11, g02 = g.g20, g.g11, g.g02
    g30, g21, g12, g03 = g.g30, g.g21, g.g12, g.g03
    g40, g31, g22, g13 = g.g40, g.g31, g.g22, g.g13
    w = omega
    t1 = (g32 / w).real
    t2 = (
        g20 * c(g31)
        - g11 * (4.0 * g31 + 3.0 * c(g22))
        - g02 * (g40 + c(g13)) / 3.0
        - g30 * g12
    ).imag / w**2
    t3 = (
        (
            g20 * (c(g11) * (3.0 * g12 - c(g30)) + g02 * (c(g12) - g30 / 3.0) + c(g02) * g03 / 3.0)
            + g11 * (c(g02) * (5.0 / 3.0 * c(g30) + 3.0 * g12) + g02 * c(g03) / 3.0 - 4.0 * g11 * g30)
        ).real
        + 3.0 * (g20 * g11).imag * g21.imag
    ) / w**3
    t4 = (
        (g11 * c(g02) * (c(g20) ** 2 - 3.0 * c(g20) * g11 - 4.0 * g11**2)).imag
        + (g20 * g11).imag * (3.0 * (g20 * g11).real - 2.0 * abs(g02) ** 2)
    ) / w**4
    return float((t1 + t2 + t3 + t4) / 12.0)


class Criticality(str, enum.Enum):
    Supercritical = "Supercritical"
    Subcritical = "Subcritical"
    DegenerateCandidate = "DegenerateCandidate"


@dataclass(frozen=True)
class LyapunovResult:
    omega: float
    g: GCoefficients
    l1: float
    l2: float | None
    criticality: Criticality


def lyapunov_at(
    params: ReducedParams, location, adjoint_unit: int = 1, always_l2: bool = False
) -> LyapunovResult:
    """Lyapunov data at a Hopf equilibrium of the reduced system.

    ``l2`` is evaluated only when ``|l1| < 1e-6 * omega`` (or when forced by
    ``always_l2``); the same threshold separates the criticality labels.
    """
    loc = np.asarray(location, dtype=float)
    eig = hopf_eigendata(jacobian_reduced(params, loc), adjoint_unit)
    g = g_coefficients(derivative_tensors(params, loc), eig)
    l1 = first_lyapunov(g, eig.omega)
    thr = L2_THRESHOLD * eig.omega
    if l1 < -thr:
        crit = Criticality.Supercritical
    elif l1 > thr:
        crit = Criticality.Subcritical
    else:
        crit = Criticality.DegenerateCandidate
    l2 = second_lyapunov(g, eig.omega) if (always_l2 or abs(l1) < thr) else None
    return LyapunovResult(eig.omega, g, l1, l2, crit)


def _check_p(p: float) -> None:
    if not p > 1:
        raise ParameterError(f"p must be > 1 on a Hopf locus, got {p}")


def l1_origin_closed(p: float, s: float) -> float:
    """``l1`` at the origin on ``r = 1`` (default eigenvector convention)."""
    _check_p(p)
    return -p * (3.0 * (p - 1.0) - 2.0 * s * s) / (8.0 * (p - 1.0) ** 2.5)


def l2_origin_closed(s: float, adjoint_unit: int = 0) -> float:
    """``l2`` at the origin's Bautin point ``p = 1 + 2 s**2 / 3``.

    The value ``-5 (3 + 2 s**2)**4 / (128 sqrt(6) s**7)`` holds when the first
    component of ``p_adj`` has unit modulus. Under the default convention of
    :func:`lyapunov_at` it is divided by ``p**2``.
    """
    if not s > 0:
        raise ParameterError(f"s must be > 0, got {s}")
    val = -5.0 * (3.0 + 2.0 * s * s) ** 4 / (128.0 * math.sqrt(6.0) * s**7)
    if adjoint_unit == 0:
        return val
    return val / (1.0 + 2.0 * s * s / 3.0) ** 2


def l1_offorigin_closed(p: float, s: float, which: str = "P1") -> float:
    """``l1`` at the Hopf point of P1 or P2 (default eigenvector convention).

    The two equilibria differ only in the sign of the ``s sqrt(...)`` term:
    minus for P1, plus for P2.
    """
    _check_p(p)
    if which not in ("P1", "P2"):
        raise ParameterError(f"which must be 'P1' or 'P2', got {which!r}")
    sg = -1.0 if which == "P1" else 1.0
    root = math.sqrt(s * s + 8.0 * (p - 1.0))
    return p * (24.0 * (p - 1.0) + 5.0 * s * s + sg * 3.0 * s * root) / (
        32.0 * (p - 1.0) ** 2.5
    )


def bautin_transversality(s: float, adjoint_unit: int = 1, rel_step: float = 1e-5) -> float:
    """Determinant of ``(r, p) -> (Re eigenvalue, l1)`` at the Bautin point.

    On ``r = 1`` the real part of the eigenvalue is ``(r - 1)/2`` and does not
    depend on ``p``, so the determinant reduces to ``0.5 * dl1/dp``, taken by
    central differences of the generic pipeline.
    """
    if not s > 0:
        raise ParameterError(f"s must be > 0, got {s}")
    pb = 1.0 + 2.0 * s * s / 3.0
    h = rel_step * pb

    def l1(p: float) -> float:
        return lyapunov_at(ReducedParams(p, 1.0, s), (0.0, 0.0), adjoint_unit).l1

    return 0.5 * (l1(pb + h) - l1(pb - h)) / (2.0 * h)


def transversality_closed(s: float, adjoint_unit: int = 1) -> float:
    """Closed form of :func:`bautin_transversality`."""
    if not s > 0:
        raise ParameterError(f"s must be > 0, got {s}")
    val = -9.0 * math.sqrt(1.5) * (3.0 + 2.0 * s * s) / (64.0 * s**5)
    if adjoint_unit == 0:
        val *= 1.0 + 2.0 * s * s / 3.0
    return val
