import numpy as np
import pytest

from glacialbif import ParameterError, ReducedParams
from glacialbif.equilibria import find_equilibria
from glacialbif.errors import NoCycleInBracket, NoSignChange, NotASaddle
from glacialbif.global_dynamics import (
    SHOOT_CFG,
    Stability,
    find_homoclinic,
    find_limit_cycles,
    melnikov_guided_homoclinic,
    rescaled_splitting,
    return_map,
    saddle_manifold_seed,
    splitting_distance,
)
from glacialbif.integrate import integrate
from glacialbif.model import RescaledParams, reduced_field

BAUTIN_CASE = ReducedParams(1.3, 0.96, 1.0)


@pytest.fixture(scope="module")
def two_cycles():
    return find_limit_cycles(BAUTIN_CASE)


def test_two_nested_cycles(two_cycles):
    inner, outer = two_cycles
    assert inner.stability is Stability.Unstable and outer.stability is Stability.Stable
    assert inner.radius < outer.radius
    assert max(inner.residual, outer.residual) < 1e-8


def test_cycles_are_periodic(two_cycles):
    f = lambda st: reduced_field(BAUTIN_CASE, st)  # noqa: E731
    for c in two_cycles:
        tr = integrate(f, c.section_point, (0.0, 2 * c.period), SHOOT_CFG, t_eval=[0.0, c.period, 2 * c.period])
        assert np.max(np.abs(tr.states[1] - c.section_point)) < 1e-8
        assert np.max(np.abs(tr.states[2] - c.section_point)) < 2e-8


def test_return_map_fixed_point(two_cycles):
    for c in two_cycles:
        rho, t = return_map(BAUTIN_CASE, c.radius)
        assert rho == pytest.approx(c.radius, abs=1e-9)
        assert t == pytest.approx(c.period, rel=1e-9)


def test_stable_focus_without_cycles():
    with pytest.raises(NoCycleInBracket):
        find_limit_cycles(ReducedParams(2.0, 0.5, 0.0), (0.01, 0.5), n_scan=8)


def test_supercritical_hopf_cycle_is_stable():
    cycles = find_limit_cycles(ReducedParams(2.0, 1.05, 0.0), (0.01, 1.0), n_scan=12)
    assert len(cycles) == 1 and cycles[0].stability is Stability.Stable


def test_bad_radius_bracket():
    with pytest.raises(ParameterError):
        find_limit_cycles(BAUTIN_CASE, (0.0, 1.0))


def test_manifold_seeds():
    params = ReducedParams(1.1, 1.2, 0.1)
    p0 = find_equilibria(params)
    saddle = [e for e in p0 if e.name == "P0"][0]
    seeds = saddle_manifold_seed(params, saddle, 1e-6)
    assert seeds.lambda_u > 0 > seeds.lambda_s
    assert np.linalg.norm(seeds.unstable(1) - saddle.location) == pytest.approx(1e-6)
    with pytest.raises(ParameterError):
        saddle_manifold_seed(params, saddle, 0.0)
    focus = [e for e in p0 if e.name == "P1"][0]
    with pytest.raises(NotASaddle):
        saddle_manifold_seed(params, focus)


def test_splitting_changes_sign_across_connection():
    a = splitting_distance(ReducedParams(1.10, 1.2, 0.1), "P0", "P2", (-1, -1))
    b = splitting_distance(ReducedParams(1.12, 1.2, 0.1), "P0", "P2", (-1, -1))
    assert a.valid and b.valid and a.gap * b.gap < 0


def test_find_homoclinic_orbit_returns_to_saddle():
    res = find_homoclinic(1.2, 0.1, (1.09, 1.13))
    assert res.value == pytest.approx(1.1104755, abs=2e-3)
    assert res.offset_shift < 1e-6
    ends = res.orbit.states[[0, -1]]
    assert np.max(np.abs(ends)) < 1e-6
    assert np.min(res.orbit.states[:, 0]) < -0.1  # the loop goes round P2


def test_find_homoclinic_without_sign_change():
    with pytest.raises(NoSignChange):
        find_homoclinic(1.2, 0.1, (1.05, 1.06), richardson=False, with_orbit=False)


def test_symmetric_loops_share_lambda():
    left = melnikov_guided_homoclinic(0.0, 1.0, 0.1, "left")
    right = melnikov_guided_homoclinic(0.0, 1.0, 0.1, "right")
    assert left.value == pytest.approx(right.value, abs=1e-8)
    assert left.prediction == pytest.approx(2.4)


def test_right_loop_converges_to_prediction():
    a = melnikov_guided_homoclinic(4.0, 2.0, 0.1, "right")
    b = melnikov_guided_homoclinic(4.0, 2.0, 0.05, "right")
    assert abs(b.value - b.prediction) < abs(a.value - a.prediction)


def test_double_loop_tends_to_summed_melnikov():
    gaps = [abs(melnikov_guided_homoclinic(2.0, 1.0, eta, "double").value - 5.528823) for eta in (0.1, 0.05)]
    assert gaps[1] < gaps[0] < 0.2


def test_rescaled_splitting_rejects_unknown_loop():
    with pytest.raises(ParameterError):
        rescaled_splitting(RescaledParams(1.0, 1.0, 1.0, 0.1), "triple")


@pytest.mark.parametrize("eta", [0.0, 0.5])
def test_guided_eta_domain(eta):
    with pytest.raises(ParameterError):
        melnikov_guided_homoclinic(1.0, 1.0, eta)

