import cmath
import math

import numpy as np
import pytest

from conftest import random_amps
from loqc import gates
from loqc.fock import FockState, fidelity
from loqc.gates import (DualRailQubit, compile_single_qubit, csign_klm, csign_knill_2_27,
                        csign_resource_state, csign_target, encode_dual_rail, is_dual_rail_valid,
                        logical_matrix, ns_gate, ns_matrix, ns_netlist, rz_elements, ry_elements)
from loqc.optics import circuit_matrix

Q = DualRailQubit(0, 1)
H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def phase_equal(a, b, tol=1e-9):
    k = np.flatnonzero(np.abs(b.ravel()) > 1e-6)[0]
    ph = a.ravel()[k] / b.ravel()[k]
    return abs(abs(ph) - 1) < tol and np.abs(a - ph * b).max() < tol


def test_encode():
    assert dict(encode_dual_rail(1, 0, Q).items()) == {(0, 1): 1}
    assert dict(encode_dual_rail(0, 1, Q).items()) == {(1, 0): 1}
    s = encode_dual_rail(1 / math.sqrt(2), 1 / math.sqrt(2), Q)
    assert s.norm() == pytest.approx(1)
    with pytest.raises(ValueError):
        encode_dual_rail(1, 1, Q)
    with pytest.raises(ValueError):
        DualRailQubit(2, 2)


def test_rz():
    a, b, phi = 0.6, 0.8j, 0.9
    m = logical_matrix(rz_elements(Q, phi))
    assert np.allclose(m, cmath.exp(0.5j * phi) * gates.rz(phi))
    assert np.allclose(m @ [a, b], [a, b * cmath.exp(1j * phi)])
    assert np.allclose(logical_matrix(rz_elements(Q, 0.0)), np.eye(2))
    m2pi = logical_matrix(rz_elements(Q, 2 * math.pi))
    assert np.allclose(m2pi, np.eye(2))
    assert np.allclose(gates.rz(2 * math.pi), -np.eye(2))


def test_ry():
    a, b, t = 0.6, 0.8j, 0.3
    m = logical_matrix(ry_elements(Q, t))
    assert np.allclose(m, gates.ry(-2 * t))
    # cos t (a|01> + b|10>) - sin t (a|10> - b|01>)
    expect = [math.cos(t) * a + math.sin(t) * b, math.cos(t) * b - math.sin(t) * a]
    assert np.allclose(m @ [a, b], expect)
    assert np.allclose(logical_matrix(ry_elements(Q, 0.0)), np.eye(2))
    assert np.allclose(logical_matrix(ry_elements(Q, math.pi / 4)) @ [1, 0], np.array([1, -1]) / math.sqrt(2))


def test_compile_single_qubit_hadamard():
    prog = compile_single_qubit(math.pi / 2, 0.0, math.pi / 2, math.pi)
    assert np.abs(logical_matrix(prog.elements, global_phase=prog.global_phase) - H).max() < 1e-9
    ident = compile_single_qubit(0, 0, 0, 0)
    assert np.allclose(logical_matrix(ident.elements, global_phase=ident.global_phase), np.eye(2))


def test_rx_from_rz_ry():
    t = 0.77
    rx = np.array([[math.cos(t / 2), -1j * math.sin(t / 2)], [-1j * math.sin(t / 2), math.cos(t / 2)]])
    prog = compile_single_qubit(0.0, math.pi / 2, -t, -math.pi / 2)
    assert phase_equal(logical_matrix(prog.elements, global_phase=prog.global_phase), rx)


def _u(al, be, ga, de):
    return cmath.exp(1j * al) * gates.rz(be) @ gates.ry(ga) @ gates.rz(de)


def test_compile_random_and_composition(rng):
    for _ in range(10):
        p1, p2 = rng.uniform(-math.pi, math.pi, 4), rng.uniform(-math.pi, math.pi, 4)
        a = compile_single_qubit(*p1)
        b = compile_single_qubit(*p2)
        ma = logical_matrix(a.elements, global_phase=a.global_phase)
        assert np.abs(ma - _u(*p1)).max() < 1e-9
        both = logical_matrix(a.elements + b.elements, global_phase=a.global_phase + b.global_phase)
        assert phase_equal(both, _u(*p2) @ _u(*p1))


def test_ns_examples():
    r = ns_gate(1, 0, 0)
    assert r.success_probability == pytest.approx(0.25, abs=1e-9)
    assert r.output[(0,)] == pytest.approx(1)
    r = ns_gate(0, 0, 1)
    assert r.success_probability == pytest.approx(0.25, abs=1e-9)
    assert r.output[(2,)] == pytest.approx(-1)
    s = 1 / math.sqrt(3)
    r = ns_gate(s, s, s)
    assert [r.output[(n,)] for n in range(3)] == pytest.approx([s, s, -s])
    assert r.total_probability() == pytest.approx(1)
    with pytest.raises(ValueError):
        ns_gate(1, 1, 0)


def test_ns_netlist_vs_matrix():
    m = circuit_matrix(ns_netlist(), 3)
    assert np.abs(m - ns_matrix()).max() < 1e-6
    for amps in ((0.6, 0.0, 0.8j), (0.5, 0.5, 1 / math.sqrt(2))):
        a, b = ns_gate(*amps), ns_gate(*amps, use_netlist=True)
        assert fidelity(a.output, b.output) == pytest.approx(1, abs=1e-12)
        assert a.success_probability == pytest.approx(b.success_probability, abs=1e-12)


def test_ns_matrix_unitary():
    m = ns_matrix()
    assert np.abs(m.conj().T @ m - np.eye(3)).max() < 1e-12


def test_csign_klm_examples():
    r = csign_klm((0, 1), (0, 1))
    assert r.success_probability == pytest.approx(1 / 16, abs=1e-9)
    assert r.output[(1, 0, 1, 0)] == pytest.approx(-1)
    r = csign_klm((1, 0), (1, 0))
    assert r.output[(0, 1, 0, 1)] == pytest.approx(1)
    h = (1 / math.sqrt(2), 1 / math.sqrt(2))
    r = csign_klm(h, h)
    assert fidelity(r.output, csign_target(h, h)) == pytest.approx(1)
    assert r.total_probability() == pytest.approx(1)


def test_resource_state():
    s = csign_resource_state()
    assert dict(s.items()) == pytest.approx({(0, 1, 0, 1): 0.5, (0, 1, 1, 0): 0.5,
                                             (1, 0, 0, 1): 0.5, (1, 0, 1, 0): -0.5})
    assert s.norm() == pytest.approx(1)
    h = (1 / math.sqrt(2), 1 / math.sqrt(2))
    assert fidelity(csign_klm(h, h).output, s) == pytest.approx(1)


def test_knill_examples():
    r = csign_knill_2_27((0, 1), (0, 1))
    assert r.success_probability == pytest.approx(2 / 27, abs=2e-4)
    assert r.output[(1, 0, 1, 0)].real < -0.999
    r = csign_knill_2_27((1, 0), (1, 0))
    assert abs(r.output[(0, 1, 0, 1)]) > 0.999


def test_knill_refined_equals_closed_form():
    ref = gates.knill_refined_angles()
    ex = gates.knill_exact_angles()
    assert np.allclose(ref, ex, atol=1e-7)
    assert math.degrees(ex[0]) == pytest.approx(54.7356, abs=1e-4)
    assert math.degrees(ex[3]) == pytest.approx(17.6322, abs=1e-4)
    for a, p in zip(ex, gates.KNILL_ROUNDED_ANGLES):
        assert abs(math.degrees(a - p)) < 0.01


def test_knill_exact_is_exact(rng):
    for _ in range(5):
        q1, q2 = random_amps(rng, 2), random_amps(rng, 2)
        r = csign_knill_2_27(q1, q2, angles="exact")
        assert r.success_probability == pytest.approx(2 / 27, abs=1e-12)
        assert fidelity(r.output, csign_target(q1, q2)) == pytest.approx(1, abs=1e-12)


def test_dual_rail_closure(rng):
    q1, q2 = random_amps(rng, 2), random_amps(rng, 2)
    pairs = [(0, 1), (2, 3)]
    assert is_dual_rail_valid(csign_klm(q1, q2).output, pairs)
    assert is_dual_rail_valid(csign_knill_2_27(q1, q2, angles="refined").output, pairs)
    # the rounded angles leak a little amplitude out of the qubit space
    assert not is_dual_rail_valid(csign_knill_2_27(q1, q2).output, pairs)


def test_gate_result_json():
    js = ns_gate(0.6, 0.8, 0).to_json()
    assert js["gate"] == "ns"
    assert set(js) == {"gate", "success_probability", "conditional_state", "failures"}
