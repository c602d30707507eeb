"""Linear-optical elements, circuit execution and photon-counting measurement.

Convention: an element with mode matrix ``U`` maps a†_l -> sum_m U[m, l] a†_m.
The beam splitter on modes (a, b) has

    U = [[cos t, -exp(i p) sin t],
         [exp(-i p) sin t, cos t]]

and a phase shifter multiplies |n> by exp(i n p). Elements listed in a circuit
are executed first to last, so the circuit's mode matrix is U_k ... U_2 U_1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence, Union

import numpy as np

from . import kernels
from .fock import FockState, Occupation, PRUNE_TOL, _check_mode

UNITARY_TOL = 1e-10
PROB_TOL = 1e-9


class PhotonNumberViolation(AssertionError):
    """A linear-optical element changed the photon number of a term."""


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float

    def matrix(self, n_modes: int) -> np.ndarray:
        m = np.eye(n_modes, dtype=complex)
        m[self.mode, self.mode] = cmath.exp(1j * self.phi)
        return m

    def max_mode(self) -> int:
        return self.mode


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError("beam splitter needs two distinct modes")

    def matrix2(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -cmath.exp(1j * self.phi) * s],
                         [cmath.exp(-1j * self.phi) * s, c]])

    def matrix(self, n_modes: int) -> np.ndarray:
        m = np.eye(n_modes, dtype=complex)
        idx = [self.mode_a, self.mode_b]
        m[np.ix_(idx, idx)] = self.matrix2()
        return m

    def max_mode(self) -> int:
        return max(self.mode_a, self.mode_b)


Element = Union[PhaseShifter, BeamSplitter]


@dataclass(frozen=True)
class DetectorSpec:
    modes: tuple[int, ...]
    postselect: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("detector modes must be distinct")
        if self.postselect is not None:
            ps = tuple(int(c) for c in self.postselect)
            if len(ps) != len(self.modes):
                raise ValueError("postselect pattern length must match detector modes")
            if any(c < 0 for c in ps):
                raise ValueError("postselect counts must be non-negative")
            object.__setattr__(self, "postselect", ps)


@dataclass(frozen=True)
class OpticalCircuit:
    n_modes: int
    elements: tuple[Element, ...] = ()
    detector: DetectorSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            if el.max_mode() >= self.n_modes or min(_modes_of(el)) < 0:
                raise ValueError(f"{el} does not fit in {self.n_modes} modes")
        if self.detector is not None:
            if any(not 0 <= m < self.n_modes for m in self.detector.modes):
                raise ValueError("detector mode outside the circuit")

    def mode_matrix(self) -> np.ndarray:
        return circuit_matrix(self.elements, self.n_modes)


@dataclass(frozen=True)
class MeasurementOutcome:
    pattern: tuple[int, ...]
    probability: float
    conditional_state: FockState | None  # None only for probability-zero post-selection

    @property
    def empty(self) -> bool:
        return self.conditional_state is None

    def to_json(self) -> dict[str, Any]:
        return {
            "pattern": list(self.pattern),
            "probability": self.probability,
            "conditional_state": None if self.empty else self.conditional_state.to_json(),
        }


def _modes_of(el: Element) -> tuple[int, ...]:
    if isinstance(el, BeamSplitter):
        return (el.mode_a, el.mode_b)
    return (el.mode,)


def circuit_matrix(elements: Iterable[Element], n_modes: int) -> np.ndarray:
    m = np.eye(n_modes, dtype=complex)
    for el in elements:
        m = el.matrix(n_modes) @ m
    return m


# ---------------------------------------------------------------- elements


def apply_phase_shifter(state: FockState, ps: PhaseShifter) -> FockState:
    _check_mode(state, ps.mode)
    return FockState(state.n_modes,
                     {k: a * cmath.exp(1j * k[ps.mode] * ps.phi) for k, a in state.items()})


@lru_cache(maxsize=4096)
def _block(total: int, theta: float, phi: float) -> np.ndarray:
    blk = kernels.bs_block(total, theta, phi)
    blk.setflags(write=False)
    return blk


def bs_fock_matrix_element(m1: int, m2: int, n1: int, n2: int, theta: float, phi: float) -> complex:
    """Coefficient of |m1 m2> in the beam-splitter image of |n1 n2>."""
    if m1 + m2 != n1 + n2 or min(m1, m2, n1, n2) < 0:
        return 0j
    return complex(_block(n1 + n2, float(theta), float(phi))[m1, n1])


def bs_fock_block(total: int, theta: float, phi: float) -> np.ndarray:
    """Matrix over |m, total-m>, m = 0..total; column n is the image of |n, total-n>."""
    return _block(int(total), float(theta), float(phi)).copy()


def apply_beam_splitter(state: FockState, bs: BeamSplitter) -> FockState:
    a, b = bs.mode_a, bs.mode_b
    _check_mode(state, a)
    _check_mode(state, b)
    out: dict[Occupation, complex] = {}
    for k, amp in state.items():
        n1, n2 = k[a], k[b]
        tot = n1 + n2
        if tot == 0:
            out[k] = out.get(k, 0j) + amp
            continue
        col = _block(tot, float(bs.theta), float(bs.phi))[:, n1]
        base = list(k)
        for m1 in range(tot + 1):
            c = col[m1]
            if abs(c) < PRUNE_TOL:
                continue
            base[a] = m1
            base[b] = tot - m1
            key = tuple(base)
            out[key] = out.get(key, 0j) + amp * c
    return FockState(state.n_modes, out)


def apply_element(state: FockState, el: Element) -> FockState:
    if isinstance(el, PhaseShifter):
        return apply_phase_shifter(state, el)
    if isinstance(el, BeamSplitter):
        return apply_beam_splitter(state, el)
    raise TypeError(f"not an optical element: {el!r}")


def _photon_profile(state: FockState) -> dict[int, float]:
    prof: dict[int, float] = {}
    for k, a in state.items():
        n = sum(k)
        prof[n] = prof.get(n, 0.0) + abs(a) ** 2
    return prof


def _assert_photon_number(before: dict[int, float], after: FockState, el: Element) -> None:
    prof = _photon_profile(after)
    for n, w in prof.items():
        if abs(before.get(n, 0.0) - w) > 1e-9:
            raise PhotonNumberViolation(f"{el} moved weight into the {n}-photon sector")
    for n, w in before.items():
        if abs(prof.get(n, 0.0) - w) > 1e-9:
            raise PhotonNumberViolation(f"{el} removed weight from the {n}-photon sector")


def apply_elements(state: FockState, elements: Iterable[Element], check: bool = True) -> FockState:
    for el in elements:
        before = _photon_profile(state) if check else None
        state = apply_element(state, el)
        if check:
            _assert_photon_number(before, state, el)
    return state


# ------------------------------------------------------------ mode unitaries


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if err > tol:
        raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
    return u


def apply_mode_unitary(state: FockState, u: np.ndarray) -> FockState:
    """Evolve ``state`` under the mode unitary ``u`` via its triangular netlist."""
    from .reck import compile_to_elements, decompose

    u = check_unitary(u)
    if u.shape[0] != state.n_modes:
        raise ValueError(f"unitary is {u.shape[0]}x{u.shape[0]} but state has {state.n_modes} modes")
    return apply_elements(state, compile_to_elements(decompose(u)))


def amplitude_permanent(u: np.ndarray, in_occ: Sequence[int], out_occ: Sequence[int]) -> complex:
    """<out| U |in> from the permanent of the row/column-repeated submatrix."""
    u = np.asarray(u, dtype=complex)
    if sum(in_occ) != sum(out_occ):
        return 0j
    cols = [i for i, c in enumerate(in_occ) for _ in range(c)]
    rows = [i for i, c in enumerate(out_occ) for _ in range(c)]
    norm = math.prod(math.factorial(c) for c in in_occ) * math.prod(math.factorial(c) for c in out_occ)
    return kernels.permanent(u[np.ix_(rows, cols)]) / math.sqrt(norm)


def apply_mode_unitary_permanent(state: FockState, u: np.ndarray) -> FockState:
    """Same map as ``apply_mode_unitary``, computed term by term from permanents."""
    from .fock import enumerate_basis

    u = np.asarray(u, dtype=complex)
    out: dict[Occupation, complex] = {}
    for k, a in state.items():
        for o in enumerate_basis(state.n_modes, sum(k)):
            out[o] = out.get(o, 0j) + a * amplitude_permanent(u, k, o)
    return FockState(state.n_modes, out)


# ----------------------------------------------------------------- detection


def _split(state: FockState, modes: Sequence[int]):
    keep = [m for m in range(state.n_modes) if m not in set(modes)]
    groups: dict[tuple[int, ...], dict[Occupation, complex]] = {}
    for k, a in state.items():
        pat = tuple(k[m] for m in modes)
        rest = tuple(k[m] for m in keep)
        groups.setdefault(pat, {})[rest] = a
    return keep, groups


def measure_modes(state: FockState, detector: DetectorSpec) -> list[MeasurementOutcome]:
    """Every detection pattern on ``detector.modes`` with its probability."""
    for m in detector.modes:
        _check_mode(state, m)
    keep, groups = _split(state, detector.modes)
    total = state.norm() ** 2
    outcomes = []
    for pat in sorted(groups):
        sub = FockState(len(keep), groups[pat], prune=0.0)
        w = sub.norm() ** 2
        outcomes.append(MeasurementOutcome(pat, w / total, sub / math.sqrt(w)))
    return outcomes


def post_select(state: FockState, detector: DetectorSpec,
                pattern: Sequence[int] | None = None) -> MeasurementOutcome:
    """Probability and conditional state for one detection pattern.

    A pattern absent from the state gives probability 0 and
    ``conditional_state=None``.
    """
    if pattern is None:
        pattern = detector.postselect
    if pattern is None:
        raise ValueError("no post-selection pattern given")
    pattern = tuple(int(c) for c in pattern)
    if len(pattern) != len(detector.modes):
        raise ValueError(f"pattern {pattern} does not match {len(detector.modes)} detector modes")
    for m in detector.modes:
        _check_mode(state, m)
    keep, groups = _split(state, detector.modes)
    if pattern not in groups:
        return MeasurementOutcome(pattern, 0.0, None)
    sub = FockState(len(keep), groups[pattern], prune=0.0)
    w = sub.norm() ** 2
    return MeasurementOutcome(pattern, w / state.norm() ** 2, sub / math.sqrt(w))


def run_circuit(circuit: OpticalCircuit, state: FockState):
    """Apply the circuit's elements, then its detector if it has one.

    Returns the evolved state, the list of all outcomes (detector without a
    post-selection pattern) or the single post-selected outcome.
    """
    if state.n_modes != circuit.n_modes:
        raise ValueError(f"circuit has {circuit.n_modes} modes but state has {state.n_modes}")
    out = apply_elements(state, circuit.elements, check=True)
    det = circuit.detector
    if det is None:
        return out
    if det.postselect is None:
        return measure_modes(out, det)
    return post_select(out, det)


# ----------------------------------------------------------------- JSON I/O


def element_to_json(el: Element) -> dict[str, Any]:
    if isinstance(el, BeamSplitter):
        return {"type": "bs", "modes": [el.mode_a, el.mode_b],
                "theta_deg": math.degrees(el.theta), "phi_deg": math.degrees(el.phi)}
    return {"type": "ps", "mode": el.mode, "phi_deg": math.degrees(el.phi)}


def element_from_json(obj: dict[str, Any]) -> Element:
    kind = obj.get("type")
    if kind == "bs":
        a, b = obj["modes"]
        return BeamSplitter(int(a), int(b), math.radians(float(obj["theta_deg"])),
                            math.radians(float(obj.get("phi_deg", 0.0))))
    if kind == "ps":
        return PhaseShifter(int(obj["mode"]), math.radians(float(obj["phi_deg"])))
    raise ValueError(f"unknown element type {kind!r}")


def circuit_to_json(c: OpticalCircuit) -> dict[str, Any]:
    obj: dict[str, Any] = {"n_modes": c.n_modes, "elements": [element_to_json(e) for e in c.elements]}
    if c.detector is not None:
        det: dict[str, Any] = {"modes": list(c.detector.modes)}
        if c.detector.postselect is not None:
            det["postselect"] = list(c.detector.postselect)
        obj["detect"] = det
    return obj


def circuit_from_json(obj: dict[str, Any]) -> OpticalCircuit:
    try:
        n = int(obj["n_modes"])
        elements = tuple(element_from_json(e) for e in obj.get("elements", []))
        det = None
        if obj.get("detect") is not None:
            d = obj["detect"]
            ps = d.get("postselect")
            det = DetectorSpec(tuple(d["modes"]), None if ps is None else tuple(ps))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed circuit JSON: {exc}") from None
    return OpticalCircuit(n, elements, det)


def shift_elements(elements: Iterable[Element], mapping: Sequence[int]) -> list[Element]:
    """Relabel element modes: local mode ``i`` becomes ``mapping[i]``."""
    out: list[Element] = []
    for el in elements:
        if isinstance(el, BeamSplitter):
            out.append(BeamSplitter(mapping[el.mode_a], mapping[el.mode_b], el.theta, el.phi))
        else:
            out.append(PhaseShifter(mapping[el.mode], el.phi))
    return out
