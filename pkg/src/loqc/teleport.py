"""Linear-optics teleportation with the |t_n> resource.

Mode layout for ``teleport_rail(..., n)``:

    0          |1> rail of the input qubit (carries beta)
    1 .. 2n    resource |t_n>
    2n + 1     |0> rail of the input qubit (carries alpha)

Modes 0..n are measured. With k photons counted, 0 < k < n+1, the qubit
reappears with its |1> rail on mode n+k and its |0> rail unchanged; every
other unmeasured resource mode holds a fixed occupation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .fock import FockState, tensor
from .gates import (DualRailQubit, FailureOutcome, GateResult, _check_norm, csign_resource_state,
                    csign_target, encode_dual_rail)
from .optics import (BeamSplitter, DetectorSpec, Element, PhaseShifter, apply_elements,
                     measure_modes)
from .reck import compile_to_elements, decompose

MAX_N = 3


@dataclass(frozen=True)
class ResourceState:
    n: int
    state: FockState


def t_n_state(n: int) -> ResourceState:
    if n < 1:
        raise ValueError("n must be at least 1")
    amp = 1 / math.sqrt(n + 1)
    terms = {}
    for j in range(n + 1):
        occ = (1,) * j + (0,) * (n - j) + (0,) * j + (1,) * (n - j)
        terms[occ] = amp
    return ResourceState(n, FockState(2 * n, terms))


def fourier_unitary(dim: int) -> np.ndarray:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    k = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(k, k) / dim) / math.sqrt(dim)


def measurement_elements(n: int) -> list[Element]:
    """Elements acting on modes 0..n.

    For n = 1 this is the 45 degree beam splitter between the input rail and
    the first resource mode; it differs from F_2 only by a sign on one input.
    For n > 1 it is the Reck netlist of F_{n+1}.
    """
    if n == 1:
        return [BeamSplitter(0, 1, math.pi / 4, 0.0)]
    return compile_to_elements(decompose(fourier_unitary(n + 1)))


@dataclass(frozen=True)
class TeleportOutcome:
    pattern: tuple[int, ...]
    k: int
    probability: float
    success: bool
    output_mode: int | None  # mode holding the |1> rail after success
    conditional_state: FockState  # on modes n+1 .. 2n+1
    logical: tuple[complex, complex] | None  # (c0, c1) of the output qubit
    correction: float | None  # phase on the alpha rail that restores the input
    projected_value: int | None  # for failures: 0 or 1

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"pattern": list(self.pattern), "photons": self.k,
                               "probability": self.probability,
                               "status": "success" if self.success else "failure_Z"}
        if self.success:
            obj["output_mode"] = self.output_mode
            obj["correction_phase_deg"] = math.degrees(self.correction)
        else:
            obj["projected_value"] = self.projected_value
        if self.logical is not None:
            obj["logical"] = [{"re": c.real, "im": c.imag} for c in self.logical]
        return obj


def _input_state(alpha: complex, beta: complex, n: int) -> FockState:
    q = DualRailQubit(0, 1)
    psi = encode_dual_rail(alpha, beta, q)  # modes (0, 1) -> relabel below
    full = tensor(psi, t_n_state(n).state)
    # move the alpha rail from mode 1 to the end
    order = [0] + list(range(2, 2 * n + 2)) + [1]
    return full.permute_modes(order)


def _run(alpha: complex, beta: complex, n: int):
    state = apply_elements(_input_state(alpha, beta, n), measurement_elements(n))
    return measure_modes(state, DetectorSpec(tuple(range(n + 1))))


def _split_logical(state: FockState, n: int, k: int) -> tuple[complex, complex]:
    """(c0, c1) with the |1> rail on mode n+k and the |0> rail on 2n+1."""
    a_idx = k - 1  # local index of mode n+k among the kept modes n+1..2n+1
    b_idx = n
    c0 = c1 = 0j
    for occ, amp in state.items():
        if occ[a_idx] == 1 and occ[b_idx] == 0:
            c1 += amp
        elif occ[a_idx] == 0 and occ[b_idx] == 1:
            c0 += amp
        else:
            raise AssertionError(f"unexpected term {occ} after {k} detections")
    return c0, c1


@lru_cache(maxsize=None)
def _basis_responses(n: int) -> dict[tuple[int, ...], tuple[complex, complex]]:
    """Per success pattern: amplitude multiplying alpha and beta respectively."""
    resp: dict[tuple[int, ...], list[complex]] = {}
    for idx, (a, b) in enumerate(((1.0, 0.0), (0.0, 1.0))):
        state = apply_elements(_input_state(a, b, n), measurement_elements(n))
        for occ, amp in state.items():
            pat = occ[: n + 1]
            if 0 < sum(pat) < n + 1:
                # exactly one term per pattern for each basis input
                resp.setdefault(pat, [0j, 0j])[idx] += amp
    return {p: (v[0], v[1]) for p, v in resp.items()}


def correction_for_outcome(n: int, pattern: Sequence[int]) -> tuple[int, float]:
    """(mode, angle) of the phase shifter fixing a successful outcome.

    The shifter sits on the alpha rail, mode 2n+1.
    """
    pattern = tuple(int(c) for c in pattern)
    k = sum(pattern)
    if len(pattern) != n + 1:
        raise ValueError(f"pattern must have {n + 1} entries")
    if not 0 < k < n + 1:
        raise ValueError(f"pattern {pattern} is a failure ({k} photons); no correction exists")
    resp = _basis_responses(n)
    if pattern not in resp:
        raise ValueError(f"pattern {pattern} never occurs")
    u0, u1 = resp[pattern]
    angle = cmath.phase(u1 / u0)
    if abs(angle) < 1e-12:
        angle = 0.0
    return 2 * n + 1, angle


def teleport_rail(alpha: complex, beta: complex, n: int) -> list[TeleportOutcome]:
    """All detection outcomes of teleporting alpha|0> + beta|1> through |t_n>."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    _check_norm(alpha, beta)
    out = []
    for o in _run(alpha, beta, n):
        k = sum(o.pattern)
        if 0 < k < n + 1:
            c0, c1 = _split_logical(o.conditional_state, n, k)
            _, corr = correction_for_outcome(n, o.pattern)
            out.append(TeleportOutcome(o.pattern, k, o.probability, True, n + k,
                                       o.conditional_state, (c0, c1), corr, None))
        else:
            out.append(TeleportOutcome(o.pattern, k, o.probability, False, None,
                                       o.conditional_state, None, None, 0 if k == 0 else 1))
    return out


def corrected_logical(outcome: TeleportOutcome) -> tuple[complex, complex]:
    """Logical amplitudes after the correction, normalized."""
    c0, c1 = outcome.logical
    c0 = c0 * cmath.exp(1j * outcome.correction)
    nrm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
    return c0 / nrm, c1 / nrm


def success_probability(n: int, alpha: complex = 1 / math.sqrt(2), beta: complex = 1 / math.sqrt(2)) -> float:
    return sum(o.probability for o in teleport_rail(alpha, beta, n) if o.success)


# ------------------------------------------------------- teleported CSign
#
# Modes: 0 Q1a, 1 Q1b, 2 Q2a, 3 Q2b, 4 r1, 5 o1, 6 r2, 7 o2.
# Resource qubit i has its |1> rail on o_i and its |0> rail on r_i; the pair
# is prepared in CSign(|+>|+>). Each input |1> rail meets r_i on a 45 degree
# beam splitter and both are counted. On success qubit i continues on
# (o_i, Qi_b).


def _tcs_raw(q1_amps, q2_amps) -> FockState:
    _check_norm(*q1_amps)
    _check_norm(*q2_amps)
    a, b = q1_amps
    c, d = q2_amps
    qubits = FockState(4, {(0, 1, 0, 1): a * c, (0, 1, 1, 0): a * d,
                           (1, 0, 0, 1): b * c, (1, 0, 1, 0): b * d})
    # resource in layout (o1, r1, o2, r2) -> (r1, o1, r2, o2)
    res = csign_resource_state().permute_modes([1, 0, 3, 2])
    state = tensor(qubits, res)
    els = [BeamSplitter(0, 4, math.pi / 4), BeamSplitter(2, 6, math.pi / 4)]
    return apply_elements(state, els)


def teleported_csign(q1_amps: Sequence[complex], q2_amps: Sequence[complex]) -> GateResult:
    """CSign by teleporting both qubits through a CSign-entangled resource.

    Successful branches are corrected with Z's on the |0> rails (they commute
    with CSign). A failed teleport of qubit 1 leaves it Z-projected; the
    resource then imprints Z^x on qubit 2, which is undone, so qubit 2 is
    reported intact. Likewise with the roles swapped.
    """
    state = _tcs_raw(q1_amps, q2_amps)
    outs = measure_modes(state, DetectorSpec((0, 4, 2, 6)))
    success_p = 0.0
    output = None
    failures = []
    for o in outs:
        k1 = o.pattern[0] + o.pattern[1]
        k2 = o.pattern[2] + o.pattern[3]
        # kept modes: 1 Q1b, 3 Q2b, 5 o1, 7 o2 -> local 0..3
        st = o.conditional_state.permute_modes([2, 0, 3, 1])  # (o1, Q1b, o2, Q2b)
        if k1 == 1 and k2 == 1:
            els = []
            if o.pattern[:2] == (1, 0):
                els.append(PhaseShifter(1, math.pi))
            if o.pattern[2:] == (1, 0):
                els.append(PhaseShifter(3, math.pi))
            st = apply_elements(st, els)
            success_p += o.probability
            if output is None:
                output = st * cmath.exp(-1j * _tcs_phase(o.pattern))
            continue
        detail: dict[str, Any] = {}
        if k1 != 1:
            detail["qubit1"] = {"status": "Z-projected", "value": 0 if k1 == 0 else 1}
        if k2 != 1:
            detail["qubit2"] = {"status": "Z-projected", "value": 0 if k2 == 0 else 1}
        if k1 != 1 and k2 == 1:
            detail["qubit2"] = {"status": "intact", "correction": "Z" if k1 == 0 else "I"}
        if k2 != 1 and k1 == 1:
            detail["qubit1"] = {"status": "intact", "correction": "Z" if k2 == 0 else "I"}
        failures.append(FailureOutcome(o.pattern, o.probability, "Z-projection", detail))
    return GateResult(success_p, output, tuple(failures), "csign_teleported")


@lru_cache(maxsize=None)
def _tcs_phase(pattern: tuple[int, ...]) -> float:
    """Global phase of a success branch, read off the |00> input."""
    for row in teleported_csign_branches((1.0, 0.0), (1.0, 0.0)):
        if row["pattern"] == pattern:
            return cmath.phase(row["state"][(0, 1, 0, 1)])
    raise ValueError(f"pattern {pattern} does not occur")


def teleported_csign_branches(q1_amps, q2_amps) -> list[dict[str, Any]]:
    """Per detection pattern: probability, corrected 4-mode state, and status."""
    state = _tcs_raw(q1_amps, q2_amps)
    rows = []
    for o in measure_modes(state, DetectorSpec((0, 4, 2, 6))):
        st = o.conditional_state.permute_modes([2, 0, 3, 1])
        k1 = o.pattern[0] + o.pattern[1]
        k2 = o.pattern[2] + o.pattern[3]
        els = []
        if k1 == 1 and o.pattern[:2] == (1, 0):
            els.append(PhaseShifter(1, math.pi))
        if k2 == 1 and o.pattern[2:] == (1, 0):
            els.append(PhaseShifter(3, math.pi))
        # a failed teleport that counted no photons means its resource qubit
        # was |1>, which imprinted a Z on the partner
        if k1 == 0 and k2 == 1:
            els.append(PhaseShifter(3, math.pi))
        if k2 == 0 and k1 == 1:
            els.append(PhaseShifter(1, math.pi))
        rows.append({"pattern": o.pattern, "k1": k1, "k2": k2, "probability": o.probability,
                     "state": apply_elements(st, els)})
    return rows
