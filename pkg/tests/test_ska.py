import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsbraid import ska
from nsbraid.metrics import H_GATE, T_GATE, phase_distance
from nsbraid.search import OneQubitDistance, SearchConfig, evaluate, mc_search
from conftest import random_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_project_su2():
    assert np.allclose(ska.project_su2(np.eye(2)), np.eye(2))
    u = random_unitary(np.random.default_rng(0), 2)
    p = ska.project_su2(u)
    assert abs(np.linalg.det(p) - 1) < 1e-12
    assert phase_distance(p, u) < 1e-7
    q = ska.project_su2(np.exp(0.9j) * u)
    assert min(np.abs(q - p).max(), np.abs(q + p).max()) < 1e-12
    with pytest.raises(ZeroDivisionError):
        ska.project_su2(np.zeros((2, 2)))


def test_project_su2_on_braid_words(g1_2063):
    rng = np.random.default_rng(4)
    for _ in range(20):
        w = "".join(rng.choice(list("ABCD"), size=15))
        assert abs(np.linalg.det(ska.project_su2(evaluate(w, g1_2063))) - 1) < 1e-12


def test_axis_angle_examples():
    aa = ska.axis_angle(np.eye(2))
    assert aa.angle == 0 and aa.axis == (0.0, 0.0, 1.0)
    theta = 0.8
    aa = ska.axis_angle(np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))
    assert np.allclose(aa.axis, (0, 0, 1)) and math.isclose(aa.angle, theta)
    aa = ska.axis_angle(ska.project_su2(X))
    assert np.allclose(aa.axis, (1, 0, 0)) and math.isclose(aa.angle, math.pi)
    with pytest.raises(ValueError):
        ska.axis_angle(2 * np.eye(2))


@settings(max_examples=100, deadline=None)
@given(
    v=st.tuples(*[st.floats(-1, 1) for _ in range(3)]).filter(lambda v: np.linalg.norm(v) > 1e-3),
    angle=st.floats(0, math.pi - 1e-6),
)
def test_axis_angle_round_trip(v, angle):
    n = unit(v)
    u = ska.from_axis_angle(n, angle)
    aa = ska.axis_angle(u)
    assert np.abs(ska.from_axis_angle(aa.axis, aa.angle) - u).max() < 1e-12
    assert abs(np.linalg.norm(aa.axis) - 1) < 1e-12
    assert 0 <= aa.angle <= math.pi


def commutator(v, w):
    return v @ w @ v.conj().T @ w.conj().T


def test_gc_decompose_examples():
    v, w = ska.gc_decompose(np.eye(2))
    assert np.allclose(v, np.eye(2)) and np.allclose(w, np.eye(2))
    delta = ska.from_axis_angle((0, 0, 1), 0.1)
    v, w = ska.gc_decompose(delta)
    assert np.linalg.norm(commutator(v, w) - delta) < 1e-10


def test_gc_decompose_balanced_angles():
    delta = ska.from_axis_angle(unit((1, 2, 3)), 0.2)
    v, w = ska.gc_decompose(delta)
    assert math.isclose(ska.axis_angle(v).angle, ska.axis_angle(w).angle, rel_tol=1e-10)
    assert abs(np.dot(ska.axis_angle(v).axis, ska.axis_angle(w).axis)) < 1e-10


def test_gc_decompose_property_many():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        delta = ska.from_axis_angle(unit(rng.normal(size=3)), rng.uniform(0, 0.3))
        v, w = ska.gc_decompose(delta)
        assert np.linalg.norm(commutator(v, w) - delta) < 1e-10


def test_gc_decompose_overflow():
    with pytest.raises(ska.CommutatorAngleOverflow, match="commutator angle overflow"):
        ska.gc_decompose(ska.from_axis_angle((0, 1, 0), 2.0))


def test_balanced_phi_solves_equation():
    theta = 0.37
    phi = ska._balanced_phi(theta)
    s2 = math.sin(phi / 2) ** 2
    assert abs(2 * s2 * math.sqrt(1 - s2 * s2) - math.sin(theta / 2)) < 1e-13


def test_level_zero_is_base_output(g1_2063):
    calls = []

    def base(u):
        calls.append(u)
        return "AB", evaluate("AB", g1_2063)

    trace = ska.solovay_kitaev(H_GATE, 0, base)
    assert len(trace.levels) == 1 and trace.final.word == "AB" and len(calls) == 1
    assert math.isclose(trace.final.distance, phase_distance(evaluate("AB", g1_2063), H_GATE))


def test_perfect_base_fixed_point():
    target = ska.project_su2(T_GATE)
    trace = ska.solovay_kitaev(target, 1, lambda u: ("", np.array(u)))
    assert trace.final.distance < 1e-7
    assert np.abs(ska.project_su2(trace.final.matrix) - target).max() < 1e-10


def test_mc_enhanced_level_two(g1_2063):
    L0 = 12
    cfg = SearchConfig(L0, OneQubitDistance(T_GATE), 1e-2, 200, seed=9)
    trace = ska.mc_enhanced_ska(T_GATE, 2, g1_2063, cfg)
    assert [r.word_length for r in trace.levels] == [L0, 5 * L0, 25 * L0]
    final = trace.final
    assert np.abs(evaluate(final.word, g1_2063) - final.matrix).max() < 1e-9 * final.word_length
    assert math.isclose(phase_distance(evaluate(final.word, g1_2063), T_GATE), final.distance, abs_tol=1e-9)
    # Level 0 is a plain MC run on the master seed.
    assert trace.levels[0].word == mc_search(g1_2063, SearchConfig(L0, OneQubitDistance(ska.project_su2(T_GATE)), 1e-2, 200, 9)).best_word.letters
    again = ska.mc_enhanced_ska(T_GATE, 2, g1_2063, cfg)
    assert [r.word for r in again.levels] == [r.word for r in trace.levels]
    assert again.distances == trace.distances


def test_memo_reuses_answers(g1_2063):
    cfg = SearchConfig(8, OneQubitDistance(H_GATE), 1e-2, 20, seed=1)
    base = ska.mc_base(g1_2063, cfg)
    u = ska.project_su2(H_GATE)
    first = base(u)
    assert base(-u) is first
    assert base(u + 1e-14) is first


def test_mc_enhanced_rejects_two_qubit(g2_2031):
    with pytest.raises(ValueError):
        ska.mc_enhanced_ska(H_GATE, 1, g2_2031, SearchConfig(3, OneQubitDistance(H_GATE)))
