import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glacialbif import ParameterError, ReducedParams
from glacialbif.curves import hopf_r
from glacialbif.equilibria import find_equilibria
from glacialbif.linalg import EigenPair, hopf_eigendata
from glacialbif.lyapunov import (
    Criticality,
    bautin_transversality,
    derivative_tensors,
    first_lyapunov,
    g_coefficients,
    l1_offorigin_closed,
    l1_origin_closed,
    l2_origin_closed,
    lyapunov_at,
    second_lyapunov,
    transversality_closed,
)
from glacialbif.model import jacobian_reduced


def _origin_data(p, s, unit=1):
    params = ReducedParams(p, 1.0, s)
    eig = hopf_eigendata(jacobian_reduced(params, (0.0, 0.0)), unit)
    return derivative_tensors(params, (0.0, 0.0)), eig


@settings(max_examples=50, deadline=None)
@given(st.floats(1.05, 6.0), st.floats(0.0, 3.0), st.floats(0.0, 2 * math.pi))
def test_l1_and_l2_invariant_under_phase(p, s, phi):
    t, eig = _origin_data(p, s)
    c = complex(math.cos(phi), math.sin(phi))
    rot = EigenPair(eig.omega, eig.q * c, eig.p_adj * c)
    g0, g1 = g_coefficients(t, eig), g_coefficients(t, rot)
    assert first_lyapunov(g1, eig.omega) == pytest.approx(first_lyapunov(g0, eig.omega), rel=1e-9, abs=1e-12)
    assert second_lyapunov(g1, eig.omega) == pytest.approx(second_lyapunov(g0, eig.omega), rel=1e-8, abs=1e-10)


def test_l1_scales_with_modulus_squared():
    t, eig = _origin_data(2.0, 0.5)
    c = 1.7
    scaled = EigenPair(eig.omega, eig.q * c, eig.p_adj / c)
    ratio = first_lyapunov(g_coefficients(t, scaled), eig.omega) / first_lyapunov(g_coefficients(t, eig), eig.omega)
    assert ratio == pytest.approx(c * c, rel=1e-12)


@pytest.mark.parametrize("p, s", [(1.2, 0.0), (2.0, 1.0), (4.0, 2.0), (1.5, 0.3)])
def test_origin_l1_matches_closed_form(p, s):
    assert lyapunov_at(ReducedParams(p, 1.0, s), (0.0, 0.0)).l1 == pytest.approx(l1_origin_closed(p, s), rel=1e-10)


def test_s_zero_origin_is_supercritical():
    res = lyapunov_at(ReducedParams(2.0, 1.0, 0.0), (0.0, 0.0))
    assert res.criticality is Criticality.Supercritical
    assert res.l2 is None


def _hopf_equilibrium(which, p, s):
    r = hopf_r(which, p, s)
    params = ReducedParams(p, r, s)
    for eq in find_equilibria(params):
        if eq.name == which:
            return params, eq.location
    raise AssertionError(f"{which} missing")


@pytest.mark.parametrize("which", ["P1", "P2"])
@pytest.mark.parametrize("p, s", [(1.5, 0.5), (2.0, 1.0), (3.0, 2.0), (1.2, 0.2)])
def test_offorigin_l1_matches_closed_form(which, p, s):
    params, loc = _hopf_equilibrium(which, p, s)
    assert abs(np.trace(jacobian_reduced(params, loc))) < 1e-12
    got = lyapunov_at(params, loc).l1
    assert got == pytest.approx(l1_offorigin_closed(p, s, which), rel=1e-9)


def test_p2_needs_plus_sign_in_closed_form():
    # the P1 expression (minus sign) does not describe P2
    p, s = 2.0, 1.0
    params, loc = _hopf_equilibrium("P2", p, s)
    got = lyapunov_at(params, loc).l1
    assert got != pytest.approx(l1_offorigin_closed(p, s, "P1"), rel=1e-3)


def test_offorigin_closed_form_rejects_bad_which():
    with pytest.raises(ParameterError):
        l1_offorigin_closed(2.0, 1.0, "P0")


def test_l1_closed_form_domain():
    with pytest.raises(ParameterError):
        l1_origin_closed(1.0, 1.0)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_l2_at_bautin_point_both_conventions(s):
    pb = 1.0 + 2.0 * s * s / 3.0
    for unit in (0, 1):
        res = lyapunov_at(ReducedParams(pb, 1.0, s), (0.0, 0.0), unit, always_l2=True)
        assert abs(res.l1) < 1e-12
        assert res.criticality is Criticality.DegenerateCandidate
        assert res.l2 == pytest.approx(l2_origin_closed(s, unit), rel=1e-8)


def test_l2_reference_values():
    assert l2_origin_closed(1.0, 0) == pytest.approx(-9.966999, abs=1e-6)
    assert l2_origin_closed(2.0, 0) == pytest.approx(-1.8240855, abs=1e-7)
    assert l2_origin_closed(1.0, 1) == pytest.approx(-9.966999 / (5 / 3) ** 2, rel=1e-6)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("unit", [0, 1])
def test_transversality_closed_form(s, unit):
    fd = bautin_transversality(s, unit)
    assert fd == pytest.approx(transversality_closed(s, unit), rel=1e-6)
    assert fd < 0


def test_transversality_reference_value():
    assert transversality_closed(1.0) == pytest.approx(-0.8611487, abs=1e-7)
