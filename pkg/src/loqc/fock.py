"""Sparse multi-mode Fock states.

A state is an immutable map from occupation tuples to complex amplitudes.
Keys are kept in ascending lexicographic order, which is also the order used
for iteration and serialization.
"""
from __future__ import annotations

import cmath
import itertools
import math
from collections.abc import Iterable, Iterator, Mapping
from typing import Any

PRUNE_TOL = 1e-14
NORM_TOL = 1e-10

# largest value a signed 64-bit count can hold
_CAPACITY = (1 << 63) - 1

Occupation = tuple[int, ...]


class CapacityError(OverflowError):
    """A basis is too large to count or enumerate."""


def basis_dimension(n_modes: int, n_photons: int) -> int:
    """Number of ways to place ``n_photons`` bosons in ``n_modes`` modes."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    if n_photons < 0:
        raise ValueError("n_photons must be non-negative")
    dim = math.comb(n_photons + n_modes - 1, n_photons)
    if dim > _CAPACITY:
        raise CapacityError(f"basis of {n_modes} modes / {n_photons} photons has {dim} states")
    return dim


def enumerate_basis(n_modes: int, n_photons: int) -> list[Occupation]:
    """All occupation tuples with the given photon number, in canonical order."""
    basis_dimension(n_modes, n_photons)
    out = []
    for bars in itertools.combinations(range(n_photons + n_modes - 1), n_modes - 1):
        prev = -1
        occ = []
        for b in bars:
            occ.append(b - prev - 1)
            prev = b
        occ.append(n_photons + n_modes - 1 - prev - 1)
        out.append(tuple(occ))
    out.sort()
    return out


def _check_occ(occ: Iterable[int]) -> Occupation:
    t = tuple(int(c) for c in occ)
    if any(c < 0 for c in t):
        raise ValueError(f"negative occupation in {t}")
    return t


class FockState(Mapping):
    """Sparse complex superposition of occupation-number kets.

    Amplitudes with magnitude below ``PRUNE_TOL`` are dropped on construction.
    A state with zero modes is allowed; it appears as the conditional state
    when every mode has been measured.
    """

    __slots__ = ("_n_modes", "_amps")

    def __init__(self, n_modes: int, amplitudes: Mapping[Iterable[int], complex] | None = None,
                 prune: float = PRUNE_TOL):
        if n_modes < 0:
            raise ValueError("n_modes must be non-negative")
        amps: dict[Occupation, complex] = {}
        for occ, a in (amplitudes or {}).items():
            key = _check_occ(occ)
            if len(key) != n_modes:
                raise ValueError(f"occupation {key} does not have {n_modes} modes")
            a = complex(a)
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError(f"non-finite amplitude on {key}")
            amps[key] = amps.get(key, 0j) + a
        self._n_modes = n_modes
        self._amps = {k: amps[k] for k in sorted(amps) if abs(amps[k]) >= prune}

    # Mapping protocol
    def __getitem__(self, occ) -> complex:
        return self._amps.get(tuple(occ), 0j)

    def __iter__(self) -> Iterator[Occupation]:
        return iter(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def __contains__(self, occ) -> bool:
        return tuple(occ) in self._amps

    @property
    def n_modes(self) -> int:
        return self._n_modes

    def items(self):
        return self._amps.items()

    def __repr__(self) -> str:
        terms = " + ".join(f"({a:.6g})|{''.join(map(str, k))}>" for k, a in self._amps.items())
        return f"FockState({self._n_modes}, {terms or '0'})"

    # arithmetic
    def __add__(self, other: FockState) -> FockState:
        _same_modes(self, other)
        amps = dict(self._amps)
        for k, a in other.items():
            amps[k] = amps.get(k, 0j) + a
        return FockState(self._n_modes, amps)

    def __sub__(self, other: FockState) -> FockState:
        return self + (-1) * other

    def __mul__(self, c: complex) -> FockState:
        return FockState(self._n_modes, {k: c * a for k, a in self._amps.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: complex) -> FockState:
        return self * (1.0 / c)

    # queries
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def normalized(self) -> FockState:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return self / n

    def photon_numbers(self) -> set[int]:
        return {sum(k) for k in self._amps}

    def total_photons(self) -> int:
        """Photon number of a state with a definite photon number."""
        ns = self.photon_numbers()
        if len(ns) != 1:
            raise ValueError(f"state has no definite photon number: {sorted(ns)}")
        return ns.pop()

    def is_zero(self) -> bool:
        return not self._amps

    def permute_modes(self, order: Iterable[int]) -> FockState:
        """New state whose mode ``i`` is this state's mode ``order[i]``."""
        order = list(order)
        if sorted(order) != list(range(self._n_modes)):
            raise ValueError("order must be a permutation of the modes")
        return FockState(self._n_modes, {tuple(k[i] for i in order): a for k, a in self._amps.items()})

    def to_json(self) -> dict[str, Any]:
        return {
            "n_modes": self._n_modes,
            "terms": [{"occ": list(k), "re": a.real, "im": a.imag} for k, a in self._amps.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> FockState:
        try:
            n = int(obj["n_modes"])
            amps: dict[Occupation, complex] = {}
            for t in obj["terms"]:
                key = tuple(int(c) for c in t["occ"])
                amps[key] = amps.get(key, 0j) + complex(float(t["re"]), float(t.get("im", 0.0)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed state JSON: {exc}") from None
        return cls(n, amps)


def _same_modes(a: FockState, b: FockState) -> None:
    if a.n_modes != b.n_modes:
        raise ValueError(f"mode-count mismatch: {a.n_modes} vs {b.n_modes}")


def vacuum(n_modes: int) -> FockState:
    return FockState(n_modes, {(0,) * n_modes: 1.0})


def fock_basis_state(occ: Iterable[int]) -> FockState:
    key = _check_occ(occ)
    return FockState(len(key), {key: 1.0})


def apply_creation(state: FockState, mode: int) -> FockState:
    """a-dagger on ``mode``: |n> -> sqrt(n+1)|n+1>."""
    _check_mode(state, mode)
    out = {}
    for k, a in state.items():
        n = k[mode]
        out[k[:mode] + (n + 1,) + k[mode + 1:]] = a * math.sqrt(n + 1)
    return FockState(state.n_modes, out)


def apply_annihilation(state: FockState, mode: int) -> FockState:
    """a on ``mode``: |n> -> sqrt(n)|n-1>, vacuum goes to zero."""
    _check_mode(state, mode)
    out = {}
    for k, a in state.items():
        n = k[mode]
        if n:
            out[k[:mode] + (n - 1,) + k[mode + 1:]] = a * math.sqrt(n)
    return FockState(state.n_modes, out)


def inner_product(a: FockState, b: FockState) -> complex:
    """<a|b>, antilinear in ``a``."""
    _same_modes(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    acc = 0j
    for k in small:
        if k in large:
            acc += a[k].conjugate() * b[k]
    return acc


def tensor(a: FockState, b: FockState) -> FockState:
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            out[ka + kb] = va * vb
    return FockState(a.n_modes + b.n_modes, out)


def fidelity(a: FockState, b: FockState) -> float:
    """|<a|b>|^2 for normalized states; insensitive to global phase."""
    return abs(inner_product(a, b)) ** 2


def global_phase(reference: FockState, state: FockState) -> float:
    """Phase chi with ``state`` ~ exp(i chi) ``reference``."""
    return cmath.phase(inner_product(reference, state))


def _check_mode(state: FockState, mode: int) -> None:
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} outside 0..{state.n_modes - 1}")
