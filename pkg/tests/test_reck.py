import math

import numpy as np
import pytest

from conftest import haar_unitary
from loqc.fock import FockState, enumerate_basis, fock_basis_state
from loqc.gates import ns_matrix
from loqc.optics import BeamSplitter, PhaseShifter, apply_elements, apply_mode_unitary_permanent
from loqc.reck import (DecompositionPlan, TwoModeRotation, compile_to_elements, decompose,
                       reconstruct, rotation_order, unitary_from_json, unitary_to_json)


def test_identity_plan():
    plan = decompose(np.eye(4))
    assert all(r.theta == 0 and r.phi == 0 for r in plan.rotations)
    assert all(p == 0 for p in plan.diagonal_phases)
    assert compile_to_elements(plan) == [BeamSplitter(r.q, r.p, 0.0, 0.0) for r in plan.rotations]
    assert not [e for e in compile_to_elements(plan) if isinstance(e, PhaseShifter)]


def test_empty_plan_reconstructs_identity():
    assert np.allclose(reconstruct(DecompositionPlan(3, (), (0.0, 0.0, 0.0))), np.eye(3))


def test_single_rotation_convention():
    """U = T^-1 = T^dag, which is the beam-splitter matrix with phi negated."""
    t, f = 0.4, 1.1
    plan = DecompositionPlan(2, (TwoModeRotation(1, 0, t, f),), (0.0, 0.0))
    u = reconstruct(plan)
    assert np.allclose(u, BeamSplitter(0, 1, t, -f).matrix2())
    assert np.allclose(u, TwoModeRotation(1, 0, t, f).matrix(2).conj().T)


def test_rotation_order():
    assert rotation_order(4) == [(3, 2), (3, 1), (3, 0), (2, 1), (2, 0), (1, 0)]


def test_ns_matrix_angles():
    plan = decompose(ns_matrix())
    assert np.abs(reconstruct(plan) - ns_matrix()).max() < 1e-9
    thetas = sorted(math.degrees(r.theta) for r in plan.rotations)
    for got, want in zip(thetas, [12.8, 20.4, 63.8]):
        assert abs(got - want) < 0.1
    phis = [abs(r.phi) for r in plan.rotations]
    assert sorted(phis)[-1] == pytest.approx(math.pi)
    assert sorted(phis)[:2] == pytest.approx([0, 0], abs=1e-12)
    assert abs(plan.diagonal_phases[0]) == pytest.approx(math.pi)
    assert plan.diagonal_phases[1:] == pytest.approx((0, 0), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_haar_round_trip(rng, n):
    for _ in range(10):
        u = haar_unitary(rng, n)
        plan = decompose(u)
        assert len(plan.rotations) == n * (n - 1) // 2
        assert np.abs(reconstruct(plan) - u).max() < 1e-9
        assert all(0 <= r.theta <= math.pi / 2 + 1e-12 for r in plan.rotations)
        assert all(-math.pi < r.phi <= math.pi for r in plan.rotations)


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        decompose(np.array([[1, 0.1], [0, 1]]))
    with pytest.raises(ValueError):
        decompose(np.ones((2, 3)))


def test_element_counts(rng):
    u = haar_unitary(rng, 5)
    els = compile_to_elements(decompose(u), keep_zero_phases=True)
    n_bs = sum(isinstance(e, BeamSplitter) for e in els)
    n_ps = sum(isinstance(e, PhaseShifter) for e in els)
    assert n_bs == 10 and n_ps <= 5 + 10


def test_netlist_on_single_photon(rng):
    u = haar_unitary(rng, 4)
    out = apply_elements(fock_basis_state((1, 0, 0, 0)), compile_to_elements(decompose(u)))
    for m in range(4):
        occ = [0] * 4
        occ[m] = 1
        assert abs(out[tuple(occ)] - u[m, 0]) < 1e-12


def test_netlist_on_two_photons(rng):
    for _ in range(5):
        u = haar_unitary(rng, 3)
        amps = {o: complex(*rng.normal(size=2)) for o in enumerate_basis(3, 2)}
        psi = FockState(3, amps).normalized()
        a = apply_elements(psi, compile_to_elements(decompose(u)))
        b = apply_mode_unitary_permanent(psi, u)
        assert max(abs(a[o] - b[o]) for o in enumerate_basis(3, 2)) < 1e-9


def test_ns_netlist_matches_matrix():
    els = compile_to_elements(decompose(ns_matrix()))
    assert sum(isinstance(e, BeamSplitter) for e in els) == 3


def test_json(rng):
    u = haar_unitary(rng, 3)
    assert np.allclose(unitary_from_json(unitary_to_json(u)), u)
    with pytest.raises(ValueError):
        unitary_from_json({"n": 3, "rows": [[{"re": 1}]]})
    js = decompose(u).to_json()
    assert js["n"] == 3 and len(js["rotations"]) == 3 and len(js["diagonal_phases_deg"]) == 3
