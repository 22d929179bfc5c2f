"""Closed-form eigen-analysis of 2x2 matrices and Hopf eigenvector data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotAHopfPoint

__all__ = ["EigenPair", "eig2", "eig3", "hopf_eigendata", "is_pure_imaginary"]


@dataclass(frozen=True)
class EigenPair:
    """Critical eigen-data of a matrix with eigenvalues ``+-i omega``.

    ``q`` is the right eigenvector for ``i omega``; ``p_adj`` the eigenvector
    of the transpose for ``-i omega``, scaled so ``conj(p_adj) . q == 1``.
    """

    omega: float
    q: np.ndarray
    p_adj: np.ndarray


def eig2(m) -> tuple[complex, complex]:
    """Eigenvalues from the characteristic polynomial.

    Complex pairs come back with the positive imaginary part first; real
    pairs in descending order.
    """
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0:
        root = math.sqrt(disc)
        # cancellation-free pair
        big = 0.5 * (tr + math.copysign(root, tr)) if tr != 0 else 0.5 * root
        if big == 0.0:
            return complex(0.0), complex(0.0)
        other = det / big
        hi, lo = max(big, other), min(big, other)
        return complex(hi), complex(lo)
    im = 0.5 * math.sqrt(-disc)
    return complex(0.5 * tr, im), complex(0.5 * tr, -im)


def eig3(m) -> np.ndarray:
    """Eigenvalues of a 3x3 matrix as roots of its characteristic cubic."""
    m = np.asarray(m, dtype=float)
    c2 = -np.trace(m)
    c1 = 0.5 * (np.trace(m) ** 2 - np.trace(m @ m))
    c0 = -np.linalg.det(m)
    roots = np.roots([1.0, c2, c1, c0])
    return roots[np.lexsort((-roots.imag, -roots.real))]


def is_pure_imaginary(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return abs(tr) <= tol * (1.0 + np.linalg.norm(m)) and det > 0


def hopf_eigendata(m, adjoint_unit: int = 1) -> EigenPair:
    """Normalized eigenvectors at a Hopf point.

    Lyapunov coefficients depend on the modulus of the eigenvector scaling
    (``l1`` scales with ``|c|**2`` under ``q -> c q``), so a convention has to
    be fixed. ``p_adj[adjoint_unit]`` is given unit modulus and ``q`` follows
    from ``conj(p_adj) . q = 1``. The phase is then fixed by making the
    largest-modulus component of ``q`` real and positive.

    With ``adjoint_unit=1`` the first Lyapunov coefficient of the reduced
    system equals the classical closed forms at every Hopf point.
    """
    m = np.asarray(m, dtype=float)
    if not is_pure_imaginary(m):
        tr = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        raise NotAHopfPoint(f"need trace 0 and det > 0, got trace={tr:.3e}, det={det:.3e}")
    a, b = m[0]
    c, d = m[1]
    omega = math.sqrt(a * d - b * c)
    iw = 1j * omega
    # (A - i w) q = 0 and (A^T + i w) p = 0; each row pair is rank one
    if abs(b) >= abs(a - iw):
        q = np.array([b, iw - a], dtype=complex)
    else:
        q = np.array([iw - d, c], dtype=complex)
    if abs(c) >= abs(a + iw):
        p = np.array([c, -(a + iw)], dtype=complex)
    else:
        p = np.array([-(d + iw), b], dtype=complex)

    p = p / abs(p[adjoint_unit])
    k = int(np.argmax(np.abs(q)))
    q = q * (abs(q[k]) / q[k])
    # conj(p).q must be 1: rescale q's modulus, push the phase onto p
    ip = np.vdot(p, q)
    q = q / abs(ip)
    p = p * (ip / abs(ip))
    return EigenPair(omega=omega, q=q, p_adj=p)
