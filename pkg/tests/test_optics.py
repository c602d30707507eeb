import math

import numpy as np
import pytest

from conftest import haar_unitary, random_amps
from loqc.fock import FockState, enumerate_basis, fidelity, fock_basis_state, vacuum
from loqc.optics import (BeamSplitter, DetectorSpec, OpticalCircuit, PhaseShifter,
                         PhotonNumberViolation, amplitude_permanent, apply_beam_splitter,
                         apply_elements, apply_mode_unitary, apply_mode_unitary_permanent,
                         apply_phase_shifter, bs_fock_block, bs_fock_matrix_element,
                         circuit_from_json, circuit_to_json, measure_modes, post_select,
                         run_circuit)

TH, PH = 0.37, 0.81


def test_phase_shifter_examples():
    out = apply_phase_shifter(fock_basis_state((2,)), PhaseShifter(0, math.pi / 2))
    assert out[(2,)] == pytest.approx(-1)
    assert apply_phase_shifter(vacuum(1), PhaseShifter(0, 1.234)) == vacuum(1)
    psi = FockState(2, {(1, 2): 0.6, (0, 3): 0.8j})
    assert apply_phase_shifter(psi, PhaseShifter(1, 0.0)) == psi


def test_beam_splitter_single_photon():
    out = apply_beam_splitter(fock_basis_state((1, 0)), BeamSplitter(0, 1, TH, PH))
    assert out[(1, 0)] == pytest.approx(math.cos(TH))
    assert out[(0, 1)] == pytest.approx(np.exp(-1j * PH) * math.sin(TH))
    out = apply_beam_splitter(fock_basis_state((0, 1)), BeamSplitter(0, 1, TH, PH))
    assert out[(1, 0)] == pytest.approx(-np.exp(1j * PH) * math.sin(TH))
    assert out[(0, 1)] == pytest.approx(math.cos(TH))


def test_hong_ou_mandel():
    out = apply_beam_splitter(fock_basis_state((1, 1)), BeamSplitter(0, 1, math.pi / 4))
    assert dict(out.items()) == pytest.approx({(0, 2): 1 / math.sqrt(2), (2, 0): -1 / math.sqrt(2)})


def test_two_photon_worked_examples():
    c, s, e = math.cos(TH), math.sin(TH), np.exp(-1j * PH)
    assert bs_fock_matrix_element(0, 2, 2, 0, TH, PH) == pytest.approx(e ** 2 * s ** 2)
    assert bs_fock_matrix_element(2, 0, 2, 0, TH, PH) == pytest.approx(c ** 2)
    assert bs_fock_matrix_element(1, 1, 2, 0, TH, PH) == pytest.approx(math.sqrt(2) * c * s * e)
    assert bs_fock_matrix_element(1, 1, 1, 1, TH, PH) == pytest.approx(c ** 2 - s ** 2)
    assert bs_fock_matrix_element(2, 0, 0, 2, TH, PH) == pytest.approx(np.conj(e) ** 2 * s ** 2)
    assert bs_fock_matrix_element(1, 1, 0, 2, TH, PH) == pytest.approx(-math.sqrt(2) * c * s / e)
    assert bs_fock_matrix_element(1, 0, 0, 2, TH, PH) == 0
    for n1, n2 in [(0, 0), (3, 1), (2, 2)]:
        assert bs_fock_matrix_element(n1, n2, n1, n2, 0.0, 0.7) == pytest.approx(1)


def test_general_mn_formula():
    """|mn> image by expanding (U11 a1 + U21 a2)^m (U12 a1 + U22 a2)^n directly."""
    bs = BeamSplitter(0, 1, TH, PH)
    u = bs.matrix2()
    for m, n in [(1, 2), (2, 1), (3, 1), (2, 2)]:
        poly = {(0, 0): 1.0 + 0j}
        for col, power in ((0, m), (1, n)):
            for _ in range(power):
                nxt = {}
                for (i, j), a in poly.items():
                    nxt[(i + 1, j)] = nxt.get((i + 1, j), 0) + a * u[0, col]
                    nxt[(i, j + 1)] = nxt.get((i, j + 1), 0) + a * u[1, col]
                poly = nxt
        pref = 1 / math.sqrt(math.factorial(m) * math.factorial(n))
        out = apply_beam_splitter(fock_basis_state((m, n)), bs)
        for (i, j), a in poly.items():
            expect = pref * a * math.sqrt(math.factorial(i) * math.factorial(j))
            assert abs(out[(i, j)] - expect) < 1e-12


@pytest.mark.parametrize("total", range(7))
def test_blocks_unitary(total):
    b = bs_fock_block(total, 0.91, -2.2)
    assert np.abs(b.conj().T @ b - np.eye(total + 1)).max() < 1e-10


def test_norm_and_photon_number_preserved(rng):
    for _ in range(20):
        amps = {o: complex(*rng.normal(size=2)) for o in enumerate_basis(3, 3)}
        psi = FockState(3, amps).normalized()
        el = BeamSplitter(*rng.choice(3, 2, replace=False), *rng.uniform(-3, 3, 2))
        out = apply_elements(psi, [el, PhaseShifter(int(rng.integers(3)), rng.uniform(-3, 3))])
        assert abs(out.norm() - 1) < 1e-12
        assert out.photon_numbers() == {3}


def test_photon_number_assertion(monkeypatch):
    import loqc.optics as optics

    def leaky(state, bs):
        return FockState(state.n_modes, {tuple(k + 1 for k in occ): a for occ, a in state.items()})

    monkeypatch.setattr(optics, "apply_beam_splitter", leaky)
    with pytest.raises(PhotonNumberViolation):
        optics.apply_elements(fock_basis_state((1, 0)), [BeamSplitter(0, 1, 0.3)])


def test_mode_unitary_single_photon(rng):
    u = haar_unitary(rng, 3)
    for l in range(3):
        occ = [0, 0, 0]
        occ[l] = 1
        out = apply_mode_unitary(fock_basis_state(occ), u)
        for m in range(3):
            o = [0, 0, 0]
            o[m] = 1
            assert abs(out[tuple(o)] - u[m, l]) < 1e-12


def test_mode_unitary_identity_and_errors():
    psi = FockState(2, {(1, 1): 0.6, (2, 0): 0.8})
    assert fidelity(apply_mode_unitary(psi, np.eye(2)), psi) == pytest.approx(1)
    with pytest.raises(ValueError):
        apply_mode_unitary(psi, np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        apply_mode_unitary(psi, np.eye(3))


def test_permanent_oracle_examples(rng):
    u = haar_unitary(rng, 3)
    assert amplitude_permanent(u, (0, 1, 0), (0, 0, 1)) == pytest.approx(u[2, 1])
    bs = BeamSplitter(0, 1, TH, PH).matrix2()
    assert amplitude_permanent(bs, (1, 1), (1, 1)) == pytest.approx(math.cos(TH) ** 2 - math.sin(TH) ** 2)
    out = apply_mode_unitary(fock_basis_state((2, 1, 0)), u)
    assert abs(out[(1, 1, 1)] - amplitude_permanent(u, (2, 1, 0), (1, 1, 1))) < 1e-12
    assert amplitude_permanent(u, (1, 0, 0), (1, 1, 0)) == 0


def test_111_all_outputs_match_permanent(rng):
    u = haar_unitary(rng, 3)
    a = apply_mode_unitary(fock_basis_state((1, 1, 1)), u)
    b = apply_mode_unitary_permanent(fock_basis_state((1, 1, 1)), u)
    for o in enumerate_basis(3, 3):
        assert abs(a[o] - b[o]) < 1e-10


def test_measure_modes():
    outs = measure_modes(fock_basis_state((1, 0, 2)), DetectorSpec((0, 1, 2)))
    assert len(outs) == 1 and outs[0].probability == pytest.approx(1)
    assert outs[0].conditional_state.n_modes == 0
    psi = apply_beam_splitter(fock_basis_state((1, 1)), BeamSplitter(0, 1, math.pi / 4))
    outs = measure_modes(psi, DetectorSpec((0,)))
    assert [o.pattern for o in outs] == [(0,), (2,)]
    assert sum(o.probability for o in outs) == pytest.approx(1)


def test_post_select():
    psi = FockState(2, {(1, 0): 0.6, (0, 1): 0.8})
    o = post_select(psi, DetectorSpec((0,)), (1,))
    assert o.probability == pytest.approx(0.36)
    assert o.conditional_state[(0,)] == pytest.approx(1)
    empty = post_select(psi, DetectorSpec((0,)), (2,))
    assert empty.probability == 0 and empty.empty
    with pytest.raises(ValueError):
        post_select(psi, DetectorSpec((0,)), (1, 0))


def test_run_circuit_variants():
    psi = FockState(2, {(1, 0): 1.0})
    assert run_circuit(OpticalCircuit(2), psi) == psi
    half = OpticalCircuit(2, (BeamSplitter(0, 1, math.pi / 8), BeamSplitter(0, 1, math.pi / 8)))
    full = OpticalCircuit(2, (BeamSplitter(0, 1, math.pi / 4),))
    for occ in ((1, 0), (0, 1)):
        assert fidelity(run_circuit(half, fock_basis_state(occ)), run_circuit(full, fock_basis_state(occ))) == \
            pytest.approx(1)
    assert np.allclose(half.mode_matrix(), full.mode_matrix())
    with pytest.raises(ValueError):
        run_circuit(OpticalCircuit(3), psi)
    with pytest.raises(ValueError):
        OpticalCircuit(2, (BeamSplitter(0, 2, 0.1),))
    det = OpticalCircuit(2, (), DetectorSpec((0,), (1,)))
    assert run_circuit(det, psi).probability == pytest.approx(1)


def test_circuit_json_round_trip():
    c = OpticalCircuit(3, (BeamSplitter(0, 2, 0.5, 0.25), PhaseShifter(1, -1.0)), DetectorSpec((1, 2), (1, 0)))
    back = circuit_from_json(circuit_to_json(c))
    assert back.n_modes == 3 and back.detector == c.detector
    assert np.allclose(back.mode_matrix(), c.mode_matrix())
    with pytest.raises(ValueError):
        circuit_from_json({"n_modes": 2, "elements": [{"type": "mirror"}]})
