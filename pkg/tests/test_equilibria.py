import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glacialbif import ParameterError, ReducedParams
from glacialbif.equilibria import (
    HamKind,
    Kind,
    classify,
    classify_matrix,
    degeneracy_loci,
    find_equilibria,
    hamiltonian_equilibria,
)
from glacialbif.errors import NotAnEquilibrium
from glacialbif.model import reduced_field


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 4.0), st.floats(0.05, 4.0), st.floats(0.0, 4.0))
def test_equilibria_are_zeros_and_sorted(p, r, s):
    eqs = find_equilibria(ReducedParams(p, r, s))
    xs = [e.location[0] for e in eqs]
    assert xs == sorted(xs, reverse=True)
    for e in eqs:
        assert e.location[1] == -e.location[0]
        assert np.max(np.abs(reduced_field(ReducedParams(p, r, s), e.location))) < 1e-10


@pytest.mark.parametrize(
    "p, r, s, count",
    [
        (2.0, 1.0, 1.0, 1),  # p > r + s^2/4
        (1.25, 1.0, 1.0, 2),  # saddle-node: P1 = P2
        (1.1, 1.0, 1.0, 3),  # r < p < r + s^2/4
        (1.0, 1.0, 1.0, 2),  # transcritical: P0 = P2
        (0.5, 1.0, 1.0, 3),  # p < r
        (1.0, 1.0, 0.0, 1),  # s = 0, p = r: triple collision
    ],
)
def test_equilibrium_counts(p, r, s, count):
    assert len(find_equilibria(ReducedParams(p, r, s))) == count


def test_p1_p2_positions():
    p, r, s = 0.5, 1.0, 1.0
    eqs = {e.name: e for e in find_equilibria(ReducedParams(p, r, s))}
    root = math.sqrt(s * s + 4 * (r - p))
    assert eqs["P1"].location[0] == pytest.approx((s + root) / 2)
    assert eqs["P2"].location[0] == pytest.approx((s - root) / 2)
    assert eqs["P0"].location[0] == 0.0 and not math.copysign(1, eqs["P0"].location[1]) < 0


def test_collision_labels():
    eqs = find_equilibria(ReducedParams(1.0, 1.0, 1.0))
    assert {e.collision for e in eqs} == {None, "P0=P2"}
    eqs = find_equilibria(ReducedParams(1.25, 1.0, 1.0))
    assert "P1=P2" in {e.collision for e in eqs}
    merged = [e for e in eqs if e.collision == "P1=P2"][0]
    assert merged.kind in (Kind.ZeroEigenvalue, Kind.DoubleZero)


def test_transcritical_origin_has_zero_eigenvalue():
    eq = classify(ReducedParams(0.7, 0.7, 0.3), (0.0, 0.0))
    assert eq.kind is Kind.ZeroEigenvalue


def test_bogdanov_takens_points_are_double_zero():
    assert classify(ReducedParams(1.0, 1.0, 0.0), (0.0, 0.0)).kind is Kind.DoubleZero
    s = 1.0
    eq = [e for e in find_equilibria(ReducedParams(1.0, 1.0 - s * s / 4, s)) if e.collision == "P1=P2"][0]
    assert eq.kind is Kind.DoubleZero


@pytest.mark.parametrize(
    "m, kind",
    [
        ([[1.0, 0.0], [0.0, -1.0]], Kind.SaddlePoint),
        ([[-1.0, 0.0], [0.0, -2.0]], Kind.StableNode),
        ([[1.0, 0.0], [0.0, 2.0]], Kind.UnstableNode),
        ([[-1.0, 1.0], [0.0, -1.0]], Kind.StableDegenerateNode),
        ([[1.0, 1.0], [0.0, 1.0]], Kind.UnstableDegenerateNode),
        ([[-0.1, 1.0], [-1.0, -0.1]], Kind.StableFocus),
        ([[0.1, 1.0], [-1.0, 0.1]], Kind.UnstableFocus),
        ([[0.0, 1.0], [-1.0, 0.0]], Kind.LinearCenter),
        ([[0.0, 1.0], [0.0, 0.0]], Kind.DoubleZero),
        ([[0.0, 0.0], [0.0, 1.0]], Kind.ZeroEigenvalue),
    ],
)
def test_classify_matrix(m, kind):
    assert classify_matrix(m) is kind


def test_classify_rejects_non_equilibrium():
    with pytest.raises(NotAnEquilibrium):
        classify(ReducedParams(1.0, 1.0), (0.5, 0.0))


def test_stability_matches_eigenvalues():
    for p, r, s in [(0.5, 0.8, 1.0), (2.0, 0.5, 0.0), (3.0, 1.5, 2.0), (1.1, 1.0, 1.0)]:
        for e in find_equilibria(ReducedParams(p, r, s)):
            if e.kind.is_stable:
                assert max(ev.real for ev in e.eigenvalues) < 0


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 2.0])
def test_degeneracy_loci_certified(s):
    loci = degeneracy_loci(s)
    assert loci.certified
    assert loci.q1 == (1.0, 1.0 - s * s / 4)
    assert loci.saddle_node_p(1.0) == 1.0 + s * s / 4
    assert loci.transcritical_p(0.7) == 0.7


def test_degeneracy_loci_rejects_negative_s():
    with pytest.raises(ParameterError):
        degeneracy_loci(-1.0)


def test_hamiltonian_equilibria():
    eqs = {e.name: e for e in hamiltonian_equilibria(1.0, 2.0)}
    assert eqs["p0"].kind is HamKind.Saddle
    assert eqs["p1"].location[0] == pytest.approx(2.0)
    assert eqs["p2"].location[0] == pytest.approx(-1.0)
    assert eqs["p1"].kind is HamKind.Center and eqs["p2"].kind is HamKind.Center
    assert [e.name for e in hamiltonian_equilibria(0.0, -1.0)] == ["p0"]
    assert hamiltonian_equilibria(0.0, 0.0)[0].kind is HamKind.Degenerate
