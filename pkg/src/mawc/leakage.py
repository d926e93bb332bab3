"""Exact eavesdropper leakage by exhaustive enumeration.

For a fixed public code, the joint law of a source block ``S_m^k`` and the
eavesdropper's word ``Z^n`` is built by summing over every source tuple; the
BSC noise is then applied exactly, one bit position at a time.  Nothing here
is sampled.  The enumeration is refused up front when it would exceed the
term budget (see :mod:`mawc.errors`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compcode import CompCode
from .errors import ConsistencyError, check_budget
from .source import JointPMF, binary_entropy, function_pmf, marginal

CLAMP_TOL = 1e-12
SANITY_TOL = 1e-9


def mutual_information(joint_table) -> float:
    """``I(X;Y)`` in bits from a 2-D table of ``P(x, y)``."""
    t = np.asarray(joint_table, dtype=float)
    if t.ndim != 2 or np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("joint table must be a finite non-negative 2-D array")
    if abs(t.sum() - 1.0) > SANITY_TOL:
        raise ValueError(f"joint table sums to {t.sum()!r}")
    px = t.sum(axis=1, keepdims=True)
    py = t.sum(axis=0, keepdims=True)
    nz = t > 0
    mi = float(np.sum(t[nz] * np.log2(t[nz] / (px * py)[nz])))
    if mi < 0.0:
        if mi < -CLAMP_TOL:
            raise ConsistencyError(f"mutual information came out as {mi!r}")
        mi = 0.0
    return mi


def apply_bsc(table: np.ndarray, crossover: float, nbits: int) -> np.ndarray:
    """Pass the last axis (``2**nbits`` words, MSB-first) through a memoryless BSC."""
    out = np.asarray(table, dtype=float)
    lead = out.shape[:-1]
    for j in range(nbits):
        # split the word axis into (high bits, bit j, low bits)
        v = out.reshape(*lead, 1 << (nbits - 1 - j), 2, 1 << j)
        out = ((1.0 - crossover) * v + crossover * v[..., ::-1, :]).reshape(*lead, 1 << nbits)
    return out


def _encoder_table(code: CompCode | None, k: int, n: int) -> np.ndarray:
    if code is None:
        if n != k:
            raise ValueError("uncoded transmission needs n == k")
        return np.arange(1 << k, dtype=np.uint64)
    if (code.k, code.n) != (k, n):
        raise ValueError(f"code is ({code.k}, {code.n}), leakage asked for ({k}, {n})")
    return code.composite


def _dims(code, k, n):
    if code is not None:
        return code.k if k is None else k, code.n if n is None else n
    if k is None:
        raise ValueError("uncoded leakage needs k")
    return k, k if n is None else n


def _tuple_probs_and_blocks(joint: JointPMF, k: int):
    """Probability of every M-tuple of length-k blocks, and the blocks themselves."""
    M = joint.M
    idx = np.arange(1 << (M * k), dtype=np.int64)
    mask = (1 << k) - 1
    blocks = [(idx >> (k * (M - 1 - m))) & mask for m in range(M)]
    probs = np.ones(idx.size)
    table = joint.table()
    for i in range(k):
        outcome = np.zeros(idx.size, dtype=np.int64)
        for m in range(M):
            outcome = (outcome << 1) | ((blocks[m] >> (k - 1 - i)) & 1)
        probs *= table[outcome]
    return probs, blocks


def source_eve_table(code: CompCode | None, joint: JointPMF, q: float, m: int,
                     k: int | None = None, n: int | None = None, cap: int | None = None) -> np.ndarray:
    """Exact ``P(S_m^k = s, Z^n = z)`` as a ``2**k x 2**n`` table."""
    k, n = _dims(code, k, n)
    if not 1 <= m <= joint.M:
        raise IndexError(f"source index {m} outside 1..{joint.M}")
    check_budget("source leakage enumeration", (1 << (joint.M * k)) * (1 << n), cap)
    enc = _encoder_table(code, k, n)
    probs, blocks = _tuple_probs_and_blocks(joint, k)
    x = np.zeros(probs.size, dtype=np.uint64)
    for b in blocks:
        x ^= enc[b]
    flat = np.bincount(blocks[m - 1] * (1 << n) + x.astype(np.int64), weights=probs,
                       minlength=(1 << k) * (1 << n))
    return apply_bsc(flat.reshape(1 << k, 1 << n), q, n)


def _sanity(mi: float, entropy_bound: float, n: int, what: str) -> None:
    if mi > entropy_bound + SANITY_TOL or mi > n + SANITY_TOL:
        raise ConsistencyError(f"{what}={mi!r} exceeds its bound (H={entropy_bound!r}, n={n})")


def exact_source_leakage(code: CompCode | None, joint: JointPMF, q: float, m: int,
                         k: int | None = None, n: int | None = None, cap: int | None = None) -> float:
    """``I(S_m^k; Z^n)`` for the public code ``code`` (``None`` = uncoded, ``n == k``)."""
    k, n = _dims(code, k, n)
    mi = mutual_information(source_eve_table(code, joint, q, m, k, n, cap))
    _sanity(mi, k * binary_entropy(float(marginal(joint, m)[1])), n, f"I(S_{m}; Z)")
    return mi


def exact_function_leakage(code: CompCode | None, joint: JointPMF, q: float,
                           k: int | None = None, n: int | None = None, cap: int | None = None) -> float:
    """``I(U^k; Z^n)``; the linear encoders put ``A B u`` on the air."""
    k, n = _dims(code, k, n)
    check_budget("function leakage enumeration", (1 << k) * (1 << n), cap)
    enc = _encoder_table(code, k, n)
    pu1 = float(function_pmf(joint)[1])
    u = np.arange(1 << k, dtype=np.int64)
    w = np.bitwise_count(u.astype(np.uint64)).astype(np.int64)
    pu = np.power(pu1, w) * np.power(1.0 - pu1, k - w)
    flat = np.zeros((1 << k) * (1 << n))
    flat[u * (1 << n) + enc[u].astype(np.int64)] = pu
    mi = mutual_information(apply_bsc(flat.reshape(1 << k, 1 << n), q, n))
    _sanity(mi, k * binary_entropy(pu1), n, "I(U; Z)")
    return mi


@dataclass
class LeakageReport:
    per_source_bits: list[float]
    total_bits: float
    function_leakage_bits: float
    enumeration_cost: int

    def to_json(self) -> dict:
        return {"per_source_bits": self.per_source_bits, "total_bits": self.total_bits,
                "function_leakage_bits": self.function_leakage_bits,
                "enumeration_cost": self.enumeration_cost}


def exact_total_leakage(code: CompCode | None, joint: JointPMF, q: float,
                        k: int | None = None, n: int | None = None, cap: int | None = None) -> LeakageReport:
    """Sum of ``I(S_m^k; Z^n)`` over all sources, plus ``I(U^k; Z^n)``."""
    k, n = _dims(code, k, n)
    per = [exact_source_leakage(code, joint, q, m, k, n, cap) for m in range(1, joint.M + 1)]
    func = exact_function_leakage(code, joint, q, k, n, cap)
    cost = joint.M * (1 << (joint.M * k)) * (1 << n) + (1 << k) * (1 << n)
    total = math.fsum(per)
    return LeakageReport(per, total, func, cost)
