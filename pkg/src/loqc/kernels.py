"""Hot loops, each in a numba flavour (``*_nb``) and a numpy flavour (``*_np``).

The public wrappers at the bottom pick one according to ``loqc._accel.USE_NUMBA``.
Both flavours are importable and callable directly so the benchmark and the
tests can compare them.
"""
from __future__ import annotations

import math

import numpy as np

from . import _accel
from ._accel import njit, prange

# ---------------------------------------------------------------- permanents


def permanent_np(a: np.ndarray) -> complex:
    """Ryser's formula walked in Gray-code order, O(2^n n)."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    prev = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        diff = gray ^ prev
        j = 0
        while (diff >> j) & 1 == 0:
            j += 1
        if gray & diff:
            for i in range(n):
                rowsum[i] += a[i, j]
        else:
            for i in range(n):
                rowsum[i] -= a[i, j]
        prev = gray
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= rowsum[i]
        bits = 0
        g = gray
        while g:
            bits += g & 1
            g >>= 1
        if bits & 1:
            total -= prod
        else:
            total += prod
    if n & 1:
        return complex(-total)
    return complex(total)


# same loop compiled; sharing the source keeps both flavours bit-identical
permanent_nb = njit(cache=True)(permanent_np)


# ------------------------------------------------- two-mode Fock-space block


def _fact(n):
    out = 1.0
    for i in range(2, n + 1):
        out *= i
    return out


def _ipow(z, n):
    out = 1.0 + 0.0j
    for _ in range(n):
        out = out * z
    return out


def bs_block_np(total: int, theta: float, phi: float) -> np.ndarray:
    # Same operations in the same order as bs_block_nb, so both flavours
    # agree to the last bit.
    c = math.cos(theta)
    s = math.sin(theta)
    cp = math.cos(phi)
    sp = math.sin(phi)
    u11 = complex(c, 0.0)
    u21 = complex(cp * s, -sp * s)
    u12 = complex(-cp * s, -sp * s)
    u22 = complex(c, 0.0)
    out = np.zeros((total + 1, total + 1), dtype=np.complex128)
    for n1 in range(total + 1):
        n2 = total - n1
        for m1 in range(total + 1):
            m2 = total - m1
            acc = 0.0 + 0.0j
            for k in range(max(0, m1 - n2), min(n1, m1) + 1):
                j = m1 - k
                binom = (_fact(n1) / (_fact(k) * _fact(n1 - k))) * (_fact(n2) / (_fact(j) * _fact(n2 - j)))
                term = binom * _ipow(u11, k) * _ipow(u21, n1 - k) * _ipow(u12, j) * _ipow(u22, n2 - j)
                acc = acc + term
            scale = math.sqrt((_fact(m1) * _fact(m2)) / (_fact(n1) * _fact(n2)))
            out[m1, n1] = acc * scale
    return out


_fact_nb = njit(cache=True)(_fact)
_ipow_nb = njit(cache=True)(_ipow)


@njit(cache=True)
def bs_block_nb(total: int, theta: float, phi: float) -> np.ndarray:
    c = math.cos(theta)
    s = math.sin(theta)
    cp = math.cos(phi)
    sp = math.sin(phi)
    u11 = complex(c, 0.0)
    u21 = complex(cp * s, -sp * s)
    u12 = complex(-cp * s, -sp * s)
    u22 = complex(c, 0.0)
    out = np.zeros((total + 1, total + 1), dtype=np.complex128)
    for n1 in range(total + 1):
        n2 = total - n1
        for m1 in range(total + 1):
            m2 = total - m1
            acc = 0.0 + 0.0j
            for k in range(max(0, m1 - n2), min(n1, m1) + 1):
                j = m1 - k
                binom = ((_fact_nb(n1) / (_fact_nb(k) * _fact_nb(n1 - k)))
                         * (_fact_nb(n2) / (_fact_nb(j) * _fact_nb(n2 - j))))
                term = (binom * _ipow_nb(u11, k) * _ipow_nb(u21, n1 - k) * _ipow_nb(u12, j)
                        * _ipow_nb(u22, n2 - j))
                acc = acc + term
            scale = math.sqrt((_fact_nb(m1) * _fact_nb(m2)) / (_fact_nb(n1) * _fact_nb(n2)))
            out[m1, n1] = acc * scale
    return out


# ------------------------------------------------------ counter-based RNG

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TRIAL_MUL = 0xD1B54A32D192ED03

_U_GOLDEN = np.uint64(_GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U_TRIAL = np.uint64(_TRIAL_MUL)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 2.0 ** -53


def _mix_int(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    """64-bit key for one (seed, stream) pair; trials and draws hang off it."""
    return _mix_int((seed & MASK64) + _GOLDEN * (stream + 1))


@njit(cache=True)
def _mix_nb(z):
    z = (z ^ (z >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    return z ^ (z >> _S31)


@njit(cache=True)
def _uniform_nb(tkey, draw):
    z = _mix_nb(tkey + _U_GOLDEN * np.uint64(draw + 1))
    return np.float64(z >> _S11) * _INV53


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    return z ^ (z >> _S31)


def _trial_keys_np(key: int, trials: np.ndarray) -> np.ndarray:
    return _mix_np(np.uint64(key) ^ (trials.astype(np.uint64) * _U_TRIAL))


def _uniform_np(tkeys: np.ndarray, draw: int) -> np.ndarray:
    z = _mix_np(tkeys + np.uint64((_GOLDEN * (draw + 1)) & MASK64))
    return (z >> _S11).astype(np.float64) * _INV53


def uniforms(seed: int, stream: int, trial: int, draws: int) -> np.ndarray:
    """The first ``draws`` uniforms of one trial (reference implementation)."""
    tkeys = _trial_keys_np(stream_key(seed, stream), np.array([trial], dtype=np.uint64))
    return np.array([_uniform_np(tkeys, d)[0] for d in range(draws)])


# ----------------------------------------------------- Monte Carlo kernels
#
# retry model:    each attempt draws (u0, u1). u0 < f -> retry;
#                 otherwise the circuit fails iff u1 < f.
# recovery model: each attempt draws (a, b, c). a,b < f -> fail;
#                 a < f <= b -> retry; b < f <= a -> fail iff c < f;
#                 otherwise success.
# A trial that exhausts ``cap`` attempts counts as a failure.


@njit(parallel=True, cache=True)
def mc_retry_nb(key, f, trials, cap):
    fails = 0
    for t in prange(trials):
        tk = _mix_nb(key ^ (np.uint64(t) * _U_TRIAL))
        fail = 1
        for a in range(cap):
            if _uniform_nb(tk, 2 * a) < f:
                continue
            fail = 1 if _uniform_nb(tk, 2 * a + 1) < f else 0
            break
        fails += fail
    return fails


@njit(parallel=True, cache=True)
def mc_recovery_nb(key, f, trials, cap):
    fails = 0
    for t in prange(trials):
        tk = _mix_nb(key ^ (np.uint64(t) * _U_TRIAL))
        fail = 1
        for a in range(cap):
            a_bad = _uniform_nb(tk, 3 * a) < f
            b_bad = _uniform_nb(tk, 3 * a + 1) < f
            if a_bad and b_bad:
                fail = 1
                break
            if a_bad:
                continue
            if b_bad:
                fail = 1 if _uniform_nb(tk, 3 * a + 2) < f else 0
                break
            fail = 0
            break
        fails += fail
    return fails


_CHUNK = 1 << 18


def mc_retry_np(key, f, trials, cap):
    fails = 0
    for start in range(0, trials, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, trials), dtype=np.uint64)
        tk = _trial_keys_np(key, idx)
        active = np.ones(idx.size, dtype=bool)
        for a in range(cap):
            live = np.flatnonzero(active)
            if live.size == 0:
                break
            k = tk[live]
            retry = _uniform_np(k, 2 * a) < f
            done = live[~retry]
            fails += int(np.count_nonzero(_uniform_np(tk[done], 2 * a + 1) < f))
            active[done] = False
        fails += int(np.count_nonzero(active))
    return fails


def mc_recovery_np(key, f, trials, cap):
    fails = 0
    for start in range(0, trials, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, trials), dtype=np.uint64)
        tk = _trial_keys_np(key, idx)
        active = np.ones(idx.size, dtype=bool)
        for a in range(cap):
            live = np.flatnonzero(active)
            if live.size == 0:
                break
            k = tk[live]
            a_bad = _uniform_np(k, 3 * a) < f
            b_bad = _uniform_np(k, 3 * a + 1) < f
            both = a_bad & b_bad
            fails += int(np.count_nonzero(both))
            rec = ~a_bad & b_bad
            fails += int(np.count_nonzero(_uniform_np(k[rec], 3 * a + 2) < f))
            finished = live[~(a_bad & ~b_bad)]
            active[finished] = False
        fails += int(np.count_nonzero(active))
    return fails


# ---------------------------------------------------------------- dispatch


def permanent(a: np.ndarray) -> complex:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if _accel.USE_NUMBA:
        return complex(permanent_nb(a))
    return permanent_np(a)


def bs_block(total: int, theta: float, phi: float) -> np.ndarray:
    if _accel.USE_NUMBA:
        return bs_block_nb(int(total), float(theta), float(phi))
    return bs_block_np(int(total), float(theta), float(phi))


def mc_retry(key: int, f: float, trials: int, cap: int) -> int:
    if _accel.USE_NUMBA:
        _accel.numba.set_num_threads(_accel.thread_count())
        return int(mc_retry_nb(np.uint64(key), float(f), int(trials), int(cap)))
    return mc_retry_np(key, float(f), int(trials), int(cap))


def mc_recovery(key: int, f: float, trials: int, cap: int) -> int:
    if _accel.USE_NUMBA:
        _accel.numba.set_num_threads(_accel.thread_count())
        return int(mc_recovery_nb(np.uint64(key), float(f), int(trials), int(cap)))
    return mc_recovery_np(key, float(f), int(trials), int(cap))
