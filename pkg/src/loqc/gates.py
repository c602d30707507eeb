"""Dual-rail qubits and post-selected photonic gates.

A dual-rail qubit holds one photon in two modes. Logical |0> puts the photon
in ``mode_b`` and logical |1> puts it in ``mode_a``, so on the pair (a, b)
|0>_q = |01> and |1>_q = |10>.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .fock import FockState, fidelity, tensor
from .optics import (BeamSplitter, DetectorSpec, Element, PhaseShifter, apply_elements,
                     measure_modes, shift_elements)
from .reck import compile_to_elements, decompose

PROB_TOL = 1e-9
DEG = math.pi / 180


@dataclass(frozen=True)
class DualRailQubit:
    mode_a: int  # occupied for logical 1
    mode_b: int  # occupied for logical 0

    def __post_init__(self):
        if self.mode_a == self.mode_b or min(self.mode_a, self.mode_b) < 0:
            raise ValueError("dual-rail modes must be distinct and non-negative")


@dataclass(frozen=True)
class FailureOutcome:
    pattern: tuple[int, ...]
    probability: float
    classification: str  # "Z-projection" or "other"
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"pattern": list(self.pattern), "probability": self.probability,
                "classification": self.classification, **self.detail}


@dataclass(frozen=True)
class GateResult:
    success_probability: float
    output: FockState
    failure_outcomes: tuple[FailureOutcome, ...]
    name: str = ""

    def total_probability(self) -> float:
        return self.success_probability + sum(f.probability for f in self.failure_outcomes)

    def to_json(self) -> dict[str, Any]:
        return {"gate": self.name, "success_probability": self.success_probability,
                "conditional_state": self.output.to_json(),
                "failures": [f.to_json() for f in self.failure_outcomes]}


def _check_norm(*amps: complex) -> None:
    n = sum(abs(complex(a)) ** 2 for a in amps)
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"amplitudes are not normalized (sum |.|^2 = {n:.12g})")


# ------------------------------------------------------------ single qubits


def encode_dual_rail(alpha: complex, beta: complex, q: DualRailQubit = DualRailQubit(0, 1),
                     n_modes: int | None = None) -> FockState:
    _check_norm(alpha, beta)
    n = max(q.mode_a, q.mode_b) + 1 if n_modes is None else n_modes
    zero = [0] * n
    zero[q.mode_b] = 1
    one = [0] * n
    one[q.mode_a] = 1
    return FockState(n, {tuple(zero): alpha, tuple(one): beta})


def logical_amplitudes(state: FockState, q: DualRailQubit) -> tuple[complex, complex]:
    """(c0, c1) of a single dual-rail qubit that lives alone in ``state``."""
    c0 = c1 = 0j
    for k, a in state.items():
        if k[q.mode_b] == 1 and k[q.mode_a] == 0:
            c0 += a
        elif k[q.mode_a] == 1 and k[q.mode_b] == 0:
            c1 += a
    return c0, c1


def rz_elements(q: DualRailQubit, phi: float) -> list[Element]:
    """exp(i phi/2) R_Z(phi): a phase shifter on the |1> rail."""
    return [PhaseShifter(q.mode_a, phi)]


def ry_elements(q: DualRailQubit, theta: float) -> list[Element]:
    """R_Y(-2 theta): a beam splitter across the pair."""
    return [BeamSplitter(q.mode_a, q.mode_b, theta, 0.0)]


def rz(phi: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * phi), cmath.exp(0.5j * phi)])


def ry(gamma: float) -> np.ndarray:
    c, s = math.cos(gamma / 2), math.sin(gamma / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class SingleQubitProgram:
    elements: tuple[Element, ...]
    global_phase: float  # logical U = exp(i global_phase) * (action of elements)


def compile_single_qubit(alpha_g: float, beta: float, gamma: float, delta: float,
                         q: DualRailQubit = DualRailQubit(0, 1)) -> SingleQubitProgram:
    """Netlist for exp(i alpha_g) R_z(beta) R_y(gamma) R_z(delta)."""
    els = rz_elements(q, delta) + ry_elements(q, -gamma / 2) + rz_elements(q, beta)
    return SingleQubitProgram(tuple(els), alpha_g - (beta + delta) / 2)


def logical_matrix(elements: Sequence[Element], q: DualRailQubit = DualRailQubit(0, 1),
                   global_phase: float = 0.0) -> np.ndarray:
    """2x2 logical action of a netlist on one dual-rail qubit, by simulation."""
    n = max(max(q.mode_a, q.mode_b) + 1, *(_max_mode(e) + 1 for e in elements)) if elements else \
        max(q.mode_a, q.mode_b) + 1
    cols = []
    for amps in ((1, 0), (0, 1)):
        out = apply_elements(encode_dual_rail(*amps, q, n), elements)
        cols.append(logical_amplitudes(out, q))
    return cmath.exp(1j * global_phase) * np.array(cols, dtype=complex).T


def _max_mode(el: Element) -> int:
    return el.max_mode()


# ---------------------------------------------------------------- NS gate


def ns_matrix() -> np.ndarray:
    """Mode matrix of the nonlinear sign gate in closed form."""
    r2 = math.sqrt(2)
    a = math.sqrt(3 / r2 - 2)
    return np.array([
        [1 - r2, 2 ** -0.25, a],
        [2 ** -0.25, 0.5, 0.5 - 1 / r2],
        [a, 0.5 - 1 / r2, r2 - 0.5],
    ], dtype=complex)


NS_THETA2 = math.acos(math.sqrt(2) - 1)  # 65.5302 degrees


def ns_netlist() -> list[Element]:
    """Three beam splitters and a pi phase shifter; mode 0 is the signal."""
    return [
        BeamSplitter(2, 1, 22.5 * DEG),
        BeamSplitter(0, 1, NS_THETA2),
        PhaseShifter(0, math.pi),
        BeamSplitter(2, 1, -22.5 * DEG),
    ]


@lru_cache(maxsize=1)
def _ns_elements() -> tuple[Element, ...]:
    return tuple(compile_to_elements(decompose(ns_matrix())))


def ns_elements(signal: int = 0, anc1: int = 1, anc2: int = 2, use_netlist: bool = False) -> list[Element]:
    """NS gate elements on (signal, ancilla with one photon, empty ancilla)."""
    base = ns_netlist() if use_netlist else list(_ns_elements())
    return shift_elements(base, [signal, anc1, anc2])


def _postselected(state: FockState, modes: Sequence[int], pattern: Sequence[int],
                  name: str, classify=None) -> GateResult:
    outs = measure_modes(state, DetectorSpec(tuple(modes)))
    success = None
    failures = []
    for o in outs:
        if o.pattern == tuple(pattern):
            success = o
        else:
            cls = classify(o) if classify else "other"
            failures.append(FailureOutcome(o.pattern, o.probability, cls))
    if success is None:
        raise RuntimeError(f"{name}: success pattern {tuple(pattern)} never occurs")
    return GateResult(success.probability, success.conditional_state, tuple(failures), name)


def _ns_raw(alpha, beta, gamma, use_netlist: bool) -> GateResult:
    psi = FockState(3, {(0, 1, 0): alpha, (1, 1, 0): beta, (2, 1, 0): gamma})
    out = apply_elements(psi, ns_elements(use_netlist=use_netlist))
    return _postselected(out, (1, 2), (1, 0), "ns")


@lru_cache(maxsize=None)
def _ns_phase(use_netlist: bool) -> float:
    return cmath.phase(_ns_raw(1.0, 0.0, 0.0, use_netlist).output[(0,)])


def ns_gate(alpha: complex, beta: complex, gamma: complex, use_netlist: bool = False) -> GateResult:
    """alpha|0> + beta|1> + gamma|2>  ->  alpha|0> + beta|1> - gamma|2>, with probability 1/4.

    The output is reported without the circuit's input-independent global
    phase, read off the vacuum-signal branch.
    """
    _check_norm(alpha, beta, gamma)
    return _strip_phase(_ns_raw(alpha, beta, gamma, use_netlist), _ns_phase(use_netlist))


def _strip_phase(res: GateResult, phase: float) -> GateResult:
    return GateResult(res.success_probability, res.output * cmath.exp(-1j * phase),
                      res.failure_outcomes, res.name)


# ----------------------------------------------------------------- CSign

Q1 = DualRailQubit(0, 1)
Q2 = DualRailQubit(2, 3)


def csign_target(q1_amps: Sequence[complex], q2_amps: Sequence[complex]) -> FockState:
    """Ideal CSign output on modes (Q1a, Q1b, Q2a, Q2b)."""
    a, b = q1_amps
    c, d = q2_amps
    return FockState(4, {(0, 1, 0, 1): a * c, (0, 1, 1, 0): a * d,
                         (1, 0, 0, 1): b * c, (1, 0, 1, 0): -b * d})


def _two_qubit_input(q1_amps, q2_amps) -> FockState:
    _check_norm(*q1_amps)
    _check_norm(*q2_amps)
    return tensor(encode_dual_rail(*q1_amps, Q1), encode_dual_rail(*q2_amps, DualRailQubit(0, 1)))


def csign_klm_elements() -> list[Element]:
    """Modes 0-3 hold the qubits, 4-7 the ancillas of the two NS gates."""
    return ([BeamSplitter(0, 2, 45 * DEG)]
            + ns_elements(0, 4, 5)
            + ns_elements(2, 6, 7)
            + [BeamSplitter(0, 2, -45 * DEG)])


def _klm_raw(q1_amps, q2_amps) -> GateResult:
    psi = tensor(_two_qubit_input(q1_amps, q2_amps), FockState(4, {(1, 0, 1, 0): 1.0}))
    out = apply_elements(psi, csign_klm_elements())
    return _postselected(out, (4, 5, 6, 7), (1, 0, 1, 0), "csign_klm")


@lru_cache(maxsize=1)
def _klm_phase() -> float:
    return cmath.phase(_klm_raw((1, 0), (1, 0)).output[(0, 1, 0, 1)])


def csign_klm(q1_amps: Sequence[complex], q2_amps: Sequence[complex]) -> GateResult:
    """Two NS gates between 45 degree beam splitters; succeeds with probability 1/16."""
    return _strip_phase(_klm_raw(q1_amps, q2_amps), _klm_phase())


def csign_resource_state() -> FockState:
    return FockState(4, {(0, 1, 0, 1): 0.5, (0, 1, 1, 0): 0.5, (1, 0, 0, 1): 0.5, (1, 0, 1, 0): -0.5})


# Knill's two-ancilla CSign. Modes: 0 = Q1 |1> rail, 1 = Q2 |1> rail,
# 2, 3 = ancillas with one photon each, 4 = Q1 |0> rail, 5 = Q2 |0> rail.
KNILL_ROUNDED_ANGLES = (54.74 * DEG, -54.74 * DEG, 54.74 * DEG, 17.63 * DEG)
_KNILL_Q1 = DualRailQubit(0, 4)
_KNILL_Q2 = DualRailQubit(1, 5)


def knill_elements(angles: Sequence[float]) -> list[Element]:
    t1, t2, t3, t4 = angles
    return [
        BeamSplitter(0, 2, t1),
        BeamSplitter(1, 3, t2),
        BeamSplitter(0, 1, t3),
        BeamSplitter(2, 3, t4),
        # the bare network yields CSign (Z x Z); undo the local Z's
        PhaseShifter(0, math.pi),
        PhaseShifter(1, math.pi),
    ]


def _knill_basis() -> list[tuple[int, ...]]:
    basis = []
    for x in (0, 1):
        for y in (0, 1):
            occ = [0] * 6
            occ[0 if x else 4] = 1
            occ[1 if y else 5] = 1
            occ[2] = occ[3] = 1
            basis.append(tuple(occ))
    return basis


def _knill_conditional(angles: Sequence[float], leakage: bool = False):
    """4x4 conditional amplitude map on |q1 q2>, basis order 00, 01, 10, 11.

    With ``leakage=True`` also returns the amplitudes from each logical input
    into heralded outputs that are not valid dual-rail states.
    """
    from .fock import enumerate_basis
    from .optics import amplitude_permanent, circuit_matrix

    u = circuit_matrix(knill_elements(angles), 6)
    basis = _knill_basis()
    a = np.array([[amplitude_permanent(u, i, o) for i in basis] for o in basis])
    if not leakage:
        return a
    bad = [o for o in enumerate_basis(6, 4)
           if o[2] == 1 and o[3] == 1 and o not in basis]
    leak = np.array([[amplitude_permanent(u, i, o) for i in basis] for o in bad])
    return a, leak


CSIGN = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def _knill_residual(angles: np.ndarray) -> np.ndarray:
    a, leak = _knill_conditional(angles, leakage=True)
    r = np.concatenate([(a / a[0, 0] - CSIGN).ravel(), (leak / a[0, 0]).ravel()])
    return np.concatenate([r.real, r.imag])


@lru_cache(maxsize=1)
def knill_refined_angles() -> tuple[float, float, float, float]:
    """Angles re-solved so the conditional map is exactly proportional to CSign.

    Starts from the two-decimal angles and runs a least-squares solve
    on the off-diagonal and relative-diagonal deviations.
    """
    from scipy.optimize import least_squares

    sol = least_squares(_knill_residual, np.array(KNILL_ROUNDED_ANGLES), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return tuple(float(x) for x in sol.x)


def knill_exact_angles() -> tuple[float, float, float, float]:
    """Closed-form angles: arccos(1/sqrt 3) and arccos(sqrt((3 + sqrt 6)/6))."""
    t1 = math.acos(1 / math.sqrt(3))
    t4 = math.acos(math.sqrt((3 + math.sqrt(6)) / 6))
    return (t1, -t1, t1, t4)


def csign_knill_2_27(q1_amps: Sequence[complex], q2_amps: Sequence[complex],
                     angles: Sequence[float] | str = "rounded") -> GateResult:
    """CSign with two single-photon ancillas, post-selected on one photon in each."""
    if isinstance(angles, str):
        angles = {"rounded": KNILL_ROUNDED_ANGLES, "refined": knill_refined_angles(),
                  "exact": knill_exact_angles()}[angles]
    _check_norm(*q1_amps)
    _check_norm(*q2_amps)
    psi = tensor(tensor(encode_dual_rail(*q1_amps, DualRailQubit(0, 1)),
                        encode_dual_rail(*q2_amps, DualRailQubit(0, 1))),
                 FockState(2, {(1, 1): 1.0}))
    # reorder (Q1a, Q1b, Q2a, Q2b, anc, anc) into the circuit's layout
    psi = psi.permute_modes([0, 2, 4, 5, 1, 3])
    out = apply_elements(psi, knill_elements(angles))
    res = _postselected(out, (2, 3), (1, 1), "csign_2_27")
    # back to (Q1a, Q1b, Q2a, Q2b)
    state = res.output.permute_modes([0, 2, 1, 3])
    res = GateResult(res.success_probability, state, res.failure_outcomes, res.name)
    return _strip_phase(res, cmath.phase(_knill_conditional(angles)[0, 0]))


def is_dual_rail_valid(state: FockState, pairs: Sequence[tuple[int, int]]) -> bool:
    """Every term holds exactly one photon in each listed mode pair."""
    return all(k[a] + k[b] == 1 for k in state for a, b in pairs)


def csign_fidelity(res: GateResult, q1_amps, q2_amps) -> float:
    return fidelity(csign_target(q1_amps, q2_amps), res.output)
