"""Triangular (Reck) decomposition of mode unitaries.

A plan stores rotations T_{p,q} in the product order

    T_{N,N-1} T_{N,N-2} ... T_{N,1} T_{N-1,N-2} ... T_{2,1}

and a diagonal D, with U = (T_{N,N-1} ... T_{2,1} D)^{-1}. Each T_{p,q} (p > q)
is the identity except on rows/columns (q, p):

    [[cos t,              exp(-i f) sin t],
     [-exp(i f) sin t,    cos t          ]]

Indices are 0-based here.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .optics import BeamSplitter, Element, PhaseShifter, check_unitary


@dataclass(frozen=True)
class TwoModeRotation:
    p: int
    q: int
    theta: float
    phi: float

    def __post_init__(self):
        if not self.p > self.q >= 0:
            raise ValueError(f"need p > q >= 0, got p={self.p}, q={self.q}")

    def matrix(self, n: int) -> np.ndarray:
        if self.p >= n:
            raise ValueError(f"rotation on mode {self.p} does not fit in dimension {n}")
        c, s = math.cos(self.theta), math.sin(self.theta)
        m = np.eye(n, dtype=complex)
        m[self.q, self.q] = c
        m[self.q, self.p] = cmath.exp(-1j * self.phi) * s
        m[self.p, self.q] = -cmath.exp(1j * self.phi) * s
        m[self.p, self.p] = c
        return m


@dataclass(frozen=True)
class DecompositionPlan:
    n: int
    rotations: tuple[TwoModeRotation, ...]
    diagonal_phases: tuple[float, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "rotations": [{"p": r.p, "q": r.q, "theta_deg": math.degrees(r.theta),
                           "phi_deg": math.degrees(r.phi)} for r in self.rotations],
            "diagonal_phases_deg": [math.degrees(x) for x in self.diagonal_phases],
        }


def rotation_order(n: int) -> list[tuple[int, int]]:
    """(p, q) pairs in the order they appear in the product."""
    return [(p, q) for p in range(n - 1, 0, -1) for q in range(p - 1, -1, -1)]


def _wrap(angle: float) -> float:
    """Map to (-pi, pi]."""
    a = math.remainder(angle, 2 * math.pi)
    return math.pi if a <= -math.pi else a


def decompose(u: np.ndarray, tol: float = 1e-10) -> DecompositionPlan:
    u = check_unitary(u, tol)
    n = u.shape[0]
    m = u.conj().T.copy()  # = T_{N,N-1} ... T_{2,1} D
    rots = []
    for p, q in rotation_order(n):
        x, y = m[q, p], m[p, p]
        if abs(x) < 1e-15:
            theta, phi = 0.0, 0.0
        elif abs(y) < 1e-15:
            theta, phi = math.pi / 2, 0.0
        else:
            theta = math.atan2(abs(x), abs(y))
            phi = _wrap(cmath.phase(y) - cmath.phase(x))
        r = TwoModeRotation(p, q, theta, phi)
        m = r.matrix(n).conj().T @ m
        m[q, p] = 0.0
        rots.append(r)
    phases = tuple(_wrap(cmath.phase(m[k, k])) for k in range(n))
    return DecompositionPlan(n, tuple(rots), phases)


def reconstruct(plan: DecompositionPlan) -> np.ndarray:
    prod = np.eye(plan.n, dtype=complex)
    for r in plan.rotations:
        prod = prod @ r.matrix(plan.n)
    prod = prod @ np.diag(np.exp(1j * np.asarray(plan.diagonal_phases, dtype=float)))
    return prod.conj().T


def compile_to_elements(plan: DecompositionPlan, keep_zero_phases: bool = False) -> list[Element]:
    """Forward-executable netlist for ``reconstruct(plan)``.

    U = D^dag T_{2,1}^dag ... T_{N,N-1}^dag, so the first element executed is
    T_{N,N-1}^dag. On modes (q, p), T^dag is the beam splitter with theta and
    -phi; D^dag becomes one phase shifter of -phi_k per mode.
    """
    out: list[Element] = [BeamSplitter(r.q, r.p, r.theta, -r.phi) for r in plan.rotations]
    for k, ph in enumerate(plan.diagonal_phases):
        if keep_zero_phases or abs(_wrap(-ph)) > 1e-15:
            out.append(PhaseShifter(k, _wrap(-ph)))
    return out


def unitary_to_json(u: np.ndarray) -> dict[str, Any]:
    u = np.asarray(u, dtype=complex)
    return {"n": u.shape[0], "rows": [[{"re": z.real, "im": z.imag} for z in row] for row in u]}


def unitary_from_json(obj: dict[str, Any]) -> np.ndarray:
    try:
        n = int(obj["n"])
        rows = obj["rows"]
        u = np.array([[complex(float(z["re"]), float(z.get("im", 0.0))) for z in row] for row in rows])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed unitary JSON: {exc}") from None
    if u.shape != (n, n):
        raise ValueError(f"unitary JSON declares n={n} but has shape {u.shape}")
    return u
