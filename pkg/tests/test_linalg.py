import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glacialbif.errors import NotAHopfPoint
from glacialbif.linalg import eig2, eig3, hopf_eigendata, is_pure_imaginary

entry = st.floats(-5.0, 5.0)


@settings(max_examples=200)
@given(entry, entry, entry, entry)
def test_eig2_matches_numpy(a, b, c, d):
    m = np.array([[a, b], [c, d]])
    ours = np.sort_complex(np.array(eig2(m)))
    ref = np.sort_complex(np.linalg.eigvals(m))
    np.testing.assert_allclose(ours, ref, atol=1e-6 * (1 + np.abs(m).max()))


def test_eig2_ordering():
    l1, l2 = eig2([[0.0, 1.0], [-4.0, 0.0]])
    assert l1.imag > 0 and l2 == np.conj(l1)
    l1, l2 = eig2([[1.0, 0.0], [0.0, 3.0]])
    assert l1.real == 3.0 and l2.real == 1.0


def test_eig3_matches_numpy():
    m = np.array([[-1.0, -1.0, 0.0], [0.0, 0.5, -1.3], [-100.0, 0.0, -100.0]])
    np.testing.assert_allclose(np.sort_complex(eig3(m)), np.sort_complex(np.linalg.eigvals(m)), rtol=1e-9)


def test_is_pure_imaginary():
    assert is_pure_imaginary([[-1.0, -1.0], [2.0, 1.0]])
    assert not is_pure_imaginary([[-1.0, -1.0], [2.0, 1.1]])
    assert not is_pure_imaginary([[1.0, 0.0], [0.0, -1.0]])


@settings(max_examples=100)
@given(st.floats(1.01, 10.0), st.integers(0, 1))
def test_hopf_eigendata_properties(p, unit):
    m = np.array([[-1.0, -1.0], [p, 1.0]])
    e = hopf_eigendata(m, unit)
    assert e.omega == pytest.approx(np.sqrt(p - 1.0))
    np.testing.assert_allclose(m @ e.q, 1j * e.omega * e.q, atol=1e-12)
    np.testing.assert_allclose(m.T @ e.p_adj, -1j * e.omega * e.p_adj, atol=1e-12)
    assert np.vdot(e.p_adj, e.q) == pytest.approx(1.0, abs=1e-12)
    assert abs(e.p_adj[unit]) == pytest.approx(1.0)


def test_hopf_eigendata_rejects_non_hopf():
    with pytest.raises(NotAHopfPoint):
        hopf_eigendata([[-1.0, -1.0], [2.0, 0.5]])
