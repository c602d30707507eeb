"""Qubit-level laboratory for the Z-measurement code and the Steane code.

States are dense numpy vectors with qubit 0 as the most significant bit, so
``|q0 q1 ... >`` has index ``q0 * 2**(n-1) + ...``. Rotations follow

    (P)_theta = cos(theta/2) - i sin(theta/2) P

for any Pauli product P.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np

from . import kernels

MAX_QUBITS = 8
MAX_RHO_QUBITS = 7

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


# ------------------------------------------------------------------ states


def _check_state(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    n = int(round(math.log2(state.size)))
    if state.ndim != 1 or 2 ** n != state.size:
        raise ValueError("state length must be a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"at most {MAX_QUBITS} qubits are supported")
    return state


def n_qubits(state: np.ndarray) -> int:
    return int(round(math.log2(np.asarray(state).size)))


def ket(bits: str) -> np.ndarray:
    """Computational basis state from a bit string like '010'."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def apply_1q(state: np.ndarray, u: np.ndarray, qubit: int) -> np.ndarray:
    state = _check_state(state)
    n = n_qubits(state)
    t = state.reshape((2,) * n)
    t = np.tensordot(u, t, axes=([1], [qubit]))
    return np.moveaxis(t, 0, qubit).reshape(-1)


def state_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 for normalized vectors; blind to global phase."""
    return abs(np.vdot(a, b)) ** 2


# ------------------------------------------------------------------ Paulis


@dataclass(frozen=True)
class PauliString:
    letters: str
    phase: complex = 1

    def __post_init__(self):
        if any(c not in "IXYZ" for c in self.letters):
            raise ValueError(f"bad Pauli letters {self.letters!r}")
        if min(abs(self.phase - p) for p in (1, -1, 1j, -1j)) > 1e-12:
            raise ValueError("phase must be one of +-1, +-i")

    @classmethod
    def on(cls, n: int, ops: dict[int, str], phase: complex = 1) -> PauliString:
        s = ["I"] * n
        for q, c in ops.items():
            s[q] = c
        return cls("".join(s), phase)

    def __len__(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        m = np.array([[1.0 + 0j]])
        for c in self.letters:
            m = np.kron(m, PAULI[c])
        return self.phase * m

    def __mul__(self, other: PauliString) -> PauliString:
        if len(self) != len(other):
            raise ValueError("length mismatch")
        phase = self.phase * other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            m = PAULI[a] @ PAULI[b]
            for c, p in PAULI.items():
                for ph in (1, -1, 1j, -1j):
                    if np.allclose(m, ph * p):
                        out.append(c)
                        phase *= ph
                        break
                else:
                    continue
                break
        return PauliString("".join(out), phase)

    def commutes_with(self, other: PauliString) -> bool:
        anti = sum(1 for a, b in zip(self.letters, other.letters)
                   if a != "I" and b != "I" and a != b)
        return anti % 2 == 0

    def support(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.letters) if c != "I")


def apply_pauli(state: np.ndarray, p: PauliString) -> np.ndarray:
    state = _check_state(state)
    if len(p) != n_qubits(state):
        raise ValueError(f"Pauli of length {len(p)} on a {n_qubits(state)}-qubit state")
    out = state
    for q, c in enumerate(p.letters):
        if c != "I":
            out = apply_1q(out, PAULI[c], q)
    return p.phase * out


# --------------------------------------------------------------- rotations


@dataclass(frozen=True)
class PauliRotation:
    """(P)_theta on the listed qubits, e.g. letters='ZY', qubits=(0, 1)."""
    letters: str
    qubits: tuple[int, ...]
    theta: float

    def __post_init__(self):
        if len(self.letters) != len(self.qubits):
            raise ValueError("one letter per target qubit")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("target qubits must be distinct")

    def apply(self, state: np.ndarray) -> np.ndarray:
        n = n_qubits(state)
        p = PauliString.on(n, dict(zip(self.qubits, self.letters)))
        return math.cos(self.theta / 2) * state - 1j * math.sin(self.theta / 2) * apply_pauli(state, p)

    def matrix(self, n: int) -> np.ndarray:
        p = PauliString.on(n, dict(zip(self.qubits, self.letters))).matrix()
        return math.cos(self.theta / 2) * np.eye(2 ** n) - 1j * math.sin(self.theta / 2) * p


class TwoQubitRotation(PauliRotation):
    """(U V)_theta on a pair of qubits."""

    def __init__(self, u: str, v: str, theta: float, targets: tuple[int, int] = (0, 1)):
        super().__init__(u + v, tuple(targets), theta)


def apply_rotation(state: np.ndarray, r: PauliRotation) -> np.ndarray:
    return r.apply(_check_state(state))


def apply_sequence(state: np.ndarray, ops: Iterable[PauliRotation | PauliString]) -> np.ndarray:
    for op in ops:
        state = apply_pauli(state, op) if isinstance(op, PauliString) else apply_rotation(state, op)
    return state


def rot(letters: str, qubits: Sequence[int], degrees: float) -> PauliRotation:
    return PauliRotation(letters, tuple(qubits), math.radians(degrees))


def y_rotation_from_x(phi: float) -> list[PauliRotation]:
    """Y_phi = Z_90 X_phi Z_-90, listed in execution order."""
    return [rot("Z", (0,), -90), PauliRotation("X", (0,), phi), rot("Z", (0,), 90)]


def csign_matrix() -> np.ndarray:
    return np.diag([1, 1, 1, -1]).astype(complex)


def csign_from_zz90() -> tuple[complex, list[PauliRotation]]:
    """CSign = exp(-i pi/4) Z_-90 Z_-90 (ZZ)_90.

    Returns the global phase factor and the rotations in execution order.
    """
    return cmath.exp(-1j * math.pi / 4), [rot("ZZ", (0, 1), 90), rot("Z", (0,), -90), rot("Z", (1,), -90)]


def sequence_matrix(ops: Sequence[PauliRotation], n: int) -> np.ndarray:
    m = np.eye(2 ** n, dtype=complex)
    for op in ops:
        m = op.matrix(n) @ m
    return m


# ---------------------------------------------------- Z-measurement code

ZERO_L = (ket("00") + ket("11")) / math.sqrt(2)
ONE_L = (ket("01") + ket("10")) / math.sqrt(2)


def _check_amps(alpha: complex, beta: complex) -> None:
    n = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(n - 1) > 1e-9:
        raise ValueError(f"amplitudes are not normalized (|a|^2 + |b|^2 = {n:.12g})")


def encode_z_code(alpha: complex, beta: complex) -> np.ndarray:
    _check_amps(alpha, beta)
    return alpha * ZERO_L + beta * ONE_L


# input qubit 0, ancilla |0> on qubit 1
ENCODER = (rot("Y", (0,), -90), rot("ZY", (0, 1), 90), rot("Y", (0,), 90))


def encode_z_code_circuit(alpha: complex, beta: complex) -> np.ndarray:
    """Encoder from two single-qubit Y rotations around one (ZY)_90."""
    _check_amps(alpha, beta)
    return apply_sequence(np.kron([alpha, beta], [1, 0]).astype(complex), ENCODER)


@dataclass(frozen=True)
class Measurement:
    outcome: int  # +1 or -1
    probability: float
    state: np.ndarray | None  # None when the outcome has probability 0


def measure_pauli(state: np.ndarray, p: PauliString, outcome: int) -> Measurement:
    """Project onto the ``outcome`` eigenspace of ``p`` and renormalize."""
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    state = _check_state(state)
    proj = 0.5 * (state + outcome * apply_pauli(state, p))
    w = float(np.vdot(proj, proj).real)
    if w < 1e-24:
        return Measurement(outcome, 0.0, None)
    return Measurement(outcome, w / float(np.vdot(state, state).real), proj / math.sqrt(w))


def z_measure(state: np.ndarray, qubit: int, outcome: int | None = None,
              rng: np.random.Generator | None = None) -> Measurement:
    """Z measurement of one qubit; the outcome is sampled unless given."""
    n = n_qubits(state)
    p = PauliString.on(n, {qubit: "Z"})
    if outcome is None:
        rng = rng or np.random.default_rng()
        plus = measure_pauli(state, p, 1)
        outcome = 1 if rng.random() < plus.probability else -1
    return measure_pauli(state, p, outcome)


def z_branches(state: np.ndarray, qubit: int) -> list[Measurement]:
    return [z_measure(state, qubit, o) for o in (1, -1)]


def _require_projected(state: np.ndarray, qubit: int) -> None:
    zq = apply_pauli(state, PauliString.on(n_qubits(state), {qubit: "Z"}))
    if abs(abs(np.vdot(state, zq)) - 1) > 1e-9:
        raise ValueError(f"qubit {qubit} is not in a Z eigenstate")


def recover_z_measurement(state: np.ndarray, projected_qubit: int, xx_outcome: int,
                          method: str = "xx") -> Measurement:
    """Restore a 2-qubit encoded state after qubit ``projected_qubit`` was Z-measured.

    ``method='xx'`` measures X X and applies Z to the projected qubit on -1.
    ``method='rotation'`` rotates with (Y X)_-90, measures Z on the projected
    qubit, rotates back with (Y X)_90 and applies the same conditional Z.
    ``xx_outcome`` picks the measurement branch.
    """
    state = _check_state(state)
    if n_qubits(state) != 2:
        raise ValueError("the Z-measurement code has two qubits")
    if projected_qubit not in (0, 1):
        raise ValueError("projected_qubit must be 0 or 1")
    _require_projected(state, projected_qubit)
    other = 1 - projected_qubit
    if method == "xx":
        m = measure_pauli(state, PauliString("XX"), xx_outcome)
    elif method == "rotation":
        qs = (projected_qubit, other)
        s = apply_rotation(state, rot("YX", qs, -90))
        m = z_measure(s, projected_qubit, xx_outcome)
        if m.state is not None:
            m = Measurement(m.outcome, m.probability, apply_rotation(m.state, rot("YX", qs, 90)))
    else:
        raise ValueError(f"unknown method {method!r}")
    if m.state is None or xx_outcome == 1:
        return m
    fixed = apply_pauli(m.state, PauliString.on(2, {projected_qubit: "Z"}))
    return Measurement(m.outcome, m.probability, fixed)


def encoded_pauli(kind: str, alternate: bool = False) -> PauliString:
    """Physical representative of an encoded Pauli on the 2-qubit code."""
    table = {
        "X": (PauliString("XI"), PauliString("IX")),
        "Y": (PauliString("YZ"), PauliString("ZY")),
        "Z": (PauliString("ZZ"), PauliString("YY", -1)),
    }
    key = kind.strip("̄").upper()
    if key not in table:
        raise ValueError(f"unknown encoded Pauli {kind!r}")
    return table[key][1 if alternate else 0]


def encoded_x_rotation(phi: float, block: int = 0) -> PauliRotation:
    return PauliRotation("X", (2 * block,), phi)


def encoded_z90(block: int = 0) -> PauliRotation:
    return rot("ZZ", (2 * block, 2 * block + 1), 90)


def encoded_zz90() -> PauliRotation:
    return rot("ZZZZ", (0, 1, 2, 3), 90)


def logical_basis(n_blocks: int) -> np.ndarray:
    """Columns are encoded |x1 x2 ...> in binary order of the logical bits."""
    cols = []
    for bits in itertools.product((0, 1), repeat=n_blocks):
        v = np.array([1.0 + 0j])
        for b in bits:
            v = np.kron(v, ONE_L if b else ZERO_L)
        cols.append(v)
    return np.array(cols).T


def logical_action(ops: Sequence[PauliRotation], n_blocks: int) -> tuple[np.ndarray, float]:
    """Logical matrix of physical ops, plus leakage out of the code space."""
    enc = logical_basis(n_blocks)
    m = sequence_matrix(ops, 2 * n_blocks)
    img = m @ enc
    logical = enc.conj().T @ img
    leak = float(np.abs(img - enc @ logical).max())
    return logical, leak


# ------------------------------------------------------------ QECC tables


@dataclass(frozen=True)
class ConditionReport:
    entries: np.ndarray  # entries[a, b, i, j] = <psi_i| E_a^dag E_b |psi_j>
    c: np.ndarray  # c[a, b], read off i = j = 0
    violations: tuple[tuple[int, int, int, int], ...]

    @property
    def satisfied(self) -> bool:
        return not self.violations


def qecc_condition_table(codewords: Sequence[np.ndarray], errors: Sequence[np.ndarray],
                         tol: float = 1e-12) -> ConditionReport:
    """Check <psi_i| E_a^dag E_b |psi_j> = C_ab delta_ij for every a, b, i, j."""
    cw = [np.asarray(c, dtype=complex) for c in codewords]
    k, ne = len(cw), len(errors)
    ent = np.zeros((ne, ne, k, k), dtype=complex)
    for a, ea in enumerate(errors):
        for b, eb in enumerate(errors):
            op = np.asarray(ea).conj().T @ np.asarray(eb)
            for i in range(k):
                for j in range(k):
                    ent[a, b, i, j] = np.vdot(cw[i], op @ cw[j])
    c = ent[:, :, 0, 0].copy()
    bad = []
    for a, b, i, j in itertools.product(range(ne), range(ne), range(k), range(k)):
        expect = c[a, b] if i == j else 0.0
        if abs(ent[a, b, i, j] - expect) > tol:
            bad.append((a, b, i, j))
    return ConditionReport(ent, c, tuple(bad))


def z_projection_errors() -> list[np.ndarray]:
    """Identity, (1+Z)/2 x 1 and (1-Z)/2 x 1 on the 2-qubit code."""
    return [np.eye(4, dtype=complex),
            np.kron(0.5 * (I2 + Z), I2),
            np.kron(0.5 * (I2 - Z), I2)]


def table3() -> np.ndarray:
    """4x4 table: rows (i, j) in 00, 01, 10, 11; columns
    <i|E1^dag 1|j>, <i|E2^dag 1|j>, <i|E1^dag E2|j>, <i|E2^dag E1|j>."""
    rep = qecc_condition_table([ZERO_L, ONE_L], z_projection_errors())
    e = rep.entries
    rows = []
    for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
        rows.append([e[1, 0, i, j], e[2, 0, i, j], e[1, 2, i, j], e[2, 1, i, j]])
    return np.array(rows)


# ------------------------------------------------------ nice teleportation

Y_PLUS = np.array([1, 1j]) / math.sqrt(2)
Y_MINUS = np.array([1, -1j]) / math.sqrt(2)


def tx2_state() -> np.ndarray:
    """(Y2 Z3)_90 applied to |0>|Y+>: (|00> + i|01> + |10> - i|11>)/2."""
    return rot("YZ", (0, 1), 90).apply(np.kron([1, 0], Y_PLUS).astype(complex))


def nice_teleport_point_a(alpha: complex, beta: complex) -> np.ndarray:
    """State after the (Z1 Y2)_90 gate, qubits (1, 2, 3) -> indices (0, 1, 2)."""
    _check_amps(alpha, beta)
    psi = np.kron(np.array([alpha, beta], dtype=complex), tx2_state())
    return rot("ZY", (0, 1), 90).apply(psi)


def point_a_expected(alpha: complex, beta: complex) -> np.ndarray:
    return (1j * alpha * ket("001") + alpha * ket("010") + beta * ket("100")
            - 1j * beta * ket("111")) / math.sqrt(2)


def _project_qubit(state: np.ndarray, qubit: int, vec: np.ndarray) -> tuple[float, np.ndarray]:
    """Project ``qubit`` onto ``vec`` and drop it; returns (probability, residual)."""
    n = n_qubits(state)
    t = np.moveaxis(state.reshape((2,) * n), qubit, 0)
    rest = np.tensordot(np.conj(vec), t, axes=([0], [0])).reshape(-1)
    w = float(np.vdot(rest, rest).real)
    return w, rest / math.sqrt(w) if w > 1e-24 else rest


def nice_teleport(alpha: complex, beta: complex, injected_error: str = "none") -> dict[str, Any]:
    """Run the nice-teleport circuit and report every measurement branch.

    ``injected_error``: 'none', 'Z-on-1' (qubit 1 Z-measured at point A) or
    'Y-on-2' (qubit 2 Y-measured at point A).
    """
    a_state = nice_teleport_point_a(alpha, beta)
    report: dict[str, Any] = {"point_a": a_state, "injected_error": injected_error, "branches": []}
    if injected_error == "none":
        for s1, v1 in ((1, Y_PLUS), (-1, Y_MINUS)):
            p1, r1 = _project_qubit(a_state, 0, v1)
            for s2, v2 in ((1, np.array([1, 0])), (-1, np.array([0, 1]))):
                p2, out = _project_qubit(r1, 0, v2)
                pre = out.copy()
                corrections = []
                if s2 == 1:
                    out = X @ out
                    corrections.append("X")
                if s1 == 1:
                    out = Z @ out
                    corrections.append("Z")
                report["branches"].append({
                    "S1": s1, "S2": s2, "probability": p1 * p2, "pre_correction": pre,
                    "corrections": corrections, "output": out,
                    "fidelity": state_fidelity(np.array([alpha, beta]), out)})
    elif injected_error == "Z-on-1":
        for s, v in ((1, np.array([1, 0])), (-1, np.array([0, 1]))):
            p, rest = _project_qubit(a_state, 0, v)
            report["branches"].append({"outcome": s, "probability": p, "residual": rest})
    elif injected_error == "Y-on-2":
        for s, v in ((1, Y_PLUS), (-1, Y_MINUS)):
            p, rest = _project_qubit(a_state, 1, v)
            q1, q3 = _product_factors(rest)
            # Y+ leaves -i alpha|0> + beta|1>, Y- leaves i alpha|0> + beta|1>
            fix = rot("Z", (0,), -90 if s == 1 else 90).matrix(1)
            rec = fix @ q1
            rec = rec / np.linalg.norm(rec)
            report["branches"].append({"outcome": s, "probability": p, "residual": rest,
                                       "qubit1": q1, "qubit3": q3, "recovered": rec,
                                       "fidelity": state_fidelity(np.array([alpha, beta]), rec)})
    else:
        raise ValueError(f"unknown injected error {injected_error!r}")
    return report


def _product_factors(two_qubit: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factors (a, b) with a x b = state, if the state is a product."""
    m = two_qubit.reshape(2, 2)
    u, s, vh = np.linalg.svd(m)
    if s[1] > 1e-9 * max(s[0], 1e-300):
        raise ValueError("state is entangled")
    return u[:, 0] * s[0], vh[0]


def schmidt_rank(two_qubit: np.ndarray) -> int:
    s = np.linalg.svd(np.asarray(two_qubit).reshape(2, 2), compute_uv=False)
    return int(np.sum(s > 1e-9 * s[0]))


# ------------------------------------------------ recursions and threshold


def f_r(f: float) -> float:
    return f


def f_z(f: float) -> float:
    return (2 * f ** 2 - f ** 3) / (1 - f + f ** 2)


def _check_f(f: float) -> float:
    f = float(f)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"f must lie in [0, 1], got {f}")
    return f


def iterate_recursions(f: float, tol: float = 1e-12, max_iter: int = 100000) -> dict[str, float]:
    """Fixed points of F <- f F + (1-f) f and F <- f^2 + (1-f) f^2 + f (1-f) F, started at 1."""
    f = _check_f(f)
    out = {}
    for name, step in (("F_r", lambda F: f * F + (1 - f) * f),
                       ("F_z", lambda F: f * f + (1 - f) * f * f + f * (1 - f) * F)):
        F = 1.0
        for _ in range(max_iter):
            nxt = step(F)
            if abs(nxt - F) < tol:
                F = nxt
                break
            F = nxt
        out[name] = F
    return out


def failure_recursions(f: float) -> dict[str, float]:
    """Closed forms; F_zz is taken equal to F_z."""
    f = _check_f(f)
    z = f_z(f)
    return {"F_r": f_r(f), "F_z": z, "F_zz": z}


def threshold_solve(lo: float = 1e-3, hi: float = 1 - 1e-3, tol: float = 1e-12) -> float:
    """Nontrivial root of F_z(f) = f by bisection."""
    g = lambda x: f_z(x) - x  # noqa: E731
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise ValueError("no sign change on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


RETRY_CAP = 200
STREAM_R, STREAM_Z, STREAM_ZZ = 0, 1, 2


def monte_carlo_failure(f: float, trials: int, seed: int, zz: bool = False) -> dict[str, float]:
    """Branch-level simulation of the retry and recovery failure models.

    Every trial draws from its own counter-based stream keyed by
    (seed, model, trial), so results do not depend on how trials are split
    across threads.
    """
    f = _check_f(f)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    r = kernels.mc_retry(kernels.stream_key(seed, STREAM_R), f, trials, RETRY_CAP) / trials
    z = kernels.mc_recovery(kernels.stream_key(seed, STREAM_Z), f, trials, RETRY_CAP) / trials
    out = {"F_r_hat": r, "F_z_hat": z,
           "stderr_r": math.sqrt(r * (1 - r) / trials), "stderr_z": math.sqrt(z * (1 - z) / trials),
           "trials": trials}
    if zz:
        zzv = kernels.mc_recovery(kernels.stream_key(seed, STREAM_ZZ), f, trials, RETRY_CAP) / trials
        out["F_zz_hat"] = zzv
        out["stderr_zz"] = math.sqrt(zzv * (1 - zzv) / trials)
    return out


# -------------------------------------------------------- erasure channels


def _rho_qubits(rho: np.ndarray) -> int:
    rho = np.asarray(rho)
    n = int(round(math.log2(rho.shape[0])))
    if rho.shape != (2 ** n, 2 ** n):
        raise ValueError("density matrix must be 2^n x 2^n")
    if n > MAX_RHO_QUBITS:
        raise ValueError(f"at most {MAX_RHO_QUBITS} qubits are supported")
    return n


def _conj_1q(rho: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [qubit])), 0, qubit)
    t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [n + qubit])), 0, n + qubit)
    return t.reshape(2 ** n, 2 ** n)


def apply_erasure(rho: np.ndarray, qubit: int, kind: str = "full") -> np.ndarray:
    """Full erasure (rho + X rho X + Y rho Y + Z rho Z)/4 or Z erasure (rho + Z rho Z)/2."""
    rho = np.asarray(rho, dtype=complex)
    n = _rho_qubits(rho)
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} outside 0..{n - 1}")
    if kind == "full":
        out = 0.25 * sum(_conj_1q(rho, P, qubit, n) for P in (I2, X, Y, Z))
    elif kind == "Z":
        out = 0.5 * (rho + _conj_1q(rho, Z, qubit, n))
    else:
        raise ValueError(f"unknown erasure kind {kind!r}")
    # exact Hermiticity, rounding otherwise breaks the symmetry
    return 0.5 * (out + out.conj().T)


def z_projection_average(rho: np.ndarray, qubit: int) -> np.ndarray:
    """Z+ rho Z+ + Z- rho Z-, the unread Z measurement."""
    rho = np.asarray(rho, dtype=complex)
    n = _rho_qubits(rho)
    zp, zm = 0.5 * (I2 + Z), 0.5 * (I2 - Z)
    return _conj_1q(rho, zp, qubit, n) + _conj_1q(rho, zm, qubit, n)


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    n = _rho_qubits(rho)
    keep = sorted(keep)
    t = np.asarray(rho).reshape((2,) * (2 * n))
    drop = [q for q in range(n) if q not in keep]
    for q in reversed(drop):
        t = np.trace(t, axis1=q, axis2=q + t.ndim // 2)
    k = len(keep)
    return t.reshape(2 ** k, 2 ** k)


# ------------------------------------------------------------- Steane code


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString

    def symplectic(self) -> np.ndarray:
        return np.array([_to_symplectic(g) for g in self.generators], dtype=np.uint8)


def _to_symplectic(p: PauliString) -> np.ndarray:
    x = [1 if c in "XY" else 0 for c in p.letters]
    z = [1 if c in "ZY" else 0 for c in p.letters]
    return np.array(x + z, dtype=np.uint8)


def _masks(p: PauliString) -> tuple[int, int]:
    """(x, z) bitmasks with qubit 0 as the most significant bit."""
    n = len(p)
    xm = zm = 0
    for i, c in enumerate(p.letters):
        bit = 1 << (n - 1 - i)
        if c in "XY":
            xm |= bit
        if c in "ZY":
            zm |= bit
    return xm, zm


STEANE_GENERATORS = (
    "XXXXIII", "XXIIXXI", "XIXIXIX",
    "ZZZZIII", "ZZIIZZI", "ZIZIZIZ",
)


def steane_code() -> StabilizerCode:
    gens = tuple(PauliString(g) for g in STEANE_GENERATORS)
    return StabilizerCode(7, gens, PauliString("X" * 7), PauliString("Z" * 7))


def _stabilizer_group(code: StabilizerCode) -> list[tuple[int, int]]:
    """All 2^m stabilizer elements as (x, z) masks, phases dropped."""
    gens = [_masks(g) for g in code.generators]
    out = []
    for sel in itertools.product((0, 1), repeat=len(gens)):
        x = z = 0
        for s, (gx, gz) in zip(sel, gens):
            if s:
                x ^= gx
                z ^= gz
        out.append((x, z))
    return out


@lru_cache(maxsize=8)
def stabilizer_elements(code: StabilizerCode) -> tuple[PauliString, ...]:
    """Every product of generators, with phases."""
    out = []
    for sel in itertools.product((0, 1), repeat=len(code.generators)):
        p = PauliString("I" * code.n)
        for use, g in zip(sel, code.generators):
            if use:
                p = p * g
        out.append(p)
    return tuple(out)


@lru_cache(maxsize=8)
def _logical_supports(code: StabilizerCode) -> tuple[int, ...]:
    """Support masks of every representative of X-bar, Z-bar and Y-bar."""
    group = _stabilizer_group(code)
    lx, lz = _masks(code.logical_x), _masks(code.logical_z)
    ly = (lx[0] ^ lz[0], lx[1] ^ lz[1])
    out = set()
    for lo in (lx, lz, ly):
        for sx, sz in group:
            out.add((lo[0] ^ sx) | (lo[1] ^ sz))
    return tuple(sorted(out))


def min_weight_logicals(code: StabilizerCode) -> dict[str, PauliString]:
    """Lowest-weight representative of each logical class."""
    group = _stabilizer_group(code)
    lx, lz = _masks(code.logical_x), _masks(code.logical_z)
    ly = (lx[0] ^ lz[0], lx[1] ^ lz[1])
    out = {}
    for name, lo in (("X", lx), ("Z", lz), ("Y", ly)):
        best = None
        for sx, sz in group:
            x, z = lo[0] ^ sx, lo[1] ^ sz
            w = bin(x | z).count("1")
            if best is None or w < best[0]:
                best = (w, x, z)
        _, x, z = best
        letters = "".join("IXZY"[((x >> (code.n - 1 - i)) & 1) | (((z >> (code.n - 1 - i)) & 1) << 1)]
                          for i in range(code.n))
        out[name] = PauliString(letters)
    return out


def _set_mask(erased: Iterable[int], n: int) -> int:
    m = 0
    for q in erased:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} outside 0..{n - 1}")
        m |= 1 << (n - 1 - q)
    return m


def erasure_correctable(code: StabilizerCode, erased_set: Iterable[int]) -> bool:
    """True iff no nontrivial logical operator is supported inside the erased set."""
    e = _set_mask(erased_set, code.n)
    return not any((s & ~e) == 0 for s in _logical_supports(code))


def code_space(code: StabilizerCode) -> tuple[np.ndarray, np.ndarray]:
    """Dense |0-bar>, |1-bar> from projecting |0...0> onto the code space."""
    dim = 2 ** code.n
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    for g in code.generators:
        v = 0.5 * (v + apply_pauli(v, g))
    v /= np.linalg.norm(v)
    return v, apply_pauli(v, code.logical_x)


def _pauli_action(x: int, z: int, vecs: np.ndarray) -> np.ndarray:
    """Apply X^x Z^z (phase-free) to the columns of ``vecs``."""
    idx = np.arange(vecs.shape[0])
    parity = np.array([bin(i & z).count("1") & 1 for i in range(vecs.shape[0])])
    phased = vecs * np.where(parity, -1.0, 1.0)[:, None]
    return phased[idx ^ x]


@lru_cache(maxsize=8)
def _bad_pauli_supports(code: StabilizerCode) -> tuple[int, ...]:
    """Supports of Paulis P that break <i|P|j> = c_P delta_ij on the code space."""
    cw = np.array(code_space(code)).T  # dim x 2
    n = code.n
    bad = []
    for x in range(1 << n):
        for z in range(1 << n):
            m = cw.conj().T @ _pauli_action(x, z, cw)
            if abs(m[0, 1]) > 1e-9 or abs(m[1, 0]) > 1e-9 or abs(m[0, 0] - m[1, 1]) > 1e-9:
                bad.append(x | z)
    return tuple(sorted(set(bad)))


def erasure_correctable_dense(code: StabilizerCode, erased_set: Iterable[int]) -> bool:
    """True iff every product E_a^dag E_b of Paulis on the erased set meets the
    error-correction condition on the dense code space."""
    e = _set_mask(erased_set, code.n)
    return not any((s & ~e) == 0 for s in _bad_pauli_supports(code))


def count_correctable(code: StabilizerCode, k: int, method: str = "logical") -> tuple[int, int]:
    if not 0 <= k <= code.n:
        raise ValueError(f"k must lie in 0..{code.n}")
    test = erasure_correctable if method == "logical" else erasure_correctable_dense
    subsets = list(itertools.combinations(range(code.n), k))
    return sum(1 for s in subsets if test(code, s)), len(subsets)


@dataclass(frozen=True)
class RecoveryResult:
    state: np.ndarray
    probability: float
    generator: PauliString
    outcome: int
    generators_measured: int = 1


def steane_z_erasure_recovery(state7: np.ndarray, qubit: int, outcome: int,
                              code: StabilizerCode | None = None) -> RecoveryResult:
    """Undo a Z measurement on ``qubit`` by measuring one X-type generator.

    ``outcome`` selects the generator measurement branch; on -1 a Z is
    applied to the damaged qubit.
    """
    code = code or steane_code()
    state7 = _check_state(state7)
    if n_qubits(state7) != code.n:
        raise ValueError(f"expected a {code.n}-qubit state")
    _require_projected(state7, qubit)
    gen = next(g for g in code.generators if "Z" not in g.letters and g.letters[qubit] == "X")
    # a single Z on ``qubit`` leaves every stabilizer commuting with it intact
    zq = PauliString.on(code.n, {qubit: "Z"})
    for s in stabilizer_elements(code):
        if s.commutes_with(zq) and abs(np.vdot(state7, apply_pauli(state7, s)) - 1) > 1e-9:
            raise ValueError("state has damage beyond a single Z measurement")
    m = measure_pauli(state7, gen, outcome)
    out = m.state
    if out is not None and outcome == -1:
        out = apply_pauli(out, PauliString.on(code.n, {qubit: "Z"}))
    return RecoveryResult(out, m.probability, gen, outcome)
