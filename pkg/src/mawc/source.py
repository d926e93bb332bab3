"""Joint binary memoryless sources and the modulo-2 sum they are computed into.

A :class:`JointPMF` holds ``2**M`` probabilities indexed by the outcome
``(s_1, ..., s_M)`` read as an MSB-first binary number, so ``probs[0b01]`` for
``M = 2`` is ``P(s_1=0, s_2=1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

from .gf2 import BitVector
from .streams import SCAN, stream

PMF_TOL = 1e-12
STRUCT_TOL = 1e-9


def _as_pmf(probs, what="pmf") -> np.ndarray:
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{what} must be a non-empty 1-D table")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"{what} has negative or non-finite entries")
    if abs(arr.sum() - 1.0) > PMF_TOL:
        raise ValueError(f"{what} sums to {arr.sum()!r}, not 1")
    return arr


@dataclass(frozen=True)
class JointPMF:
    num_sources: int
    probs: tuple[float, ...]

    def __post_init__(self):
        if self.num_sources < 1:
            raise ValueError("need at least one source")
        if len(self.probs) != 1 << self.num_sources:
            raise ValueError(f"expected {1 << self.num_sources} probabilities, got {len(self.probs)}")
        _as_pmf(self.probs, "joint pmf")
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    @property
    def M(self) -> int:
        return self.num_sources

    def table(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @cached_property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.table())
        return c / c[-1]

    def to_json(self) -> dict:
        return {"M": self.num_sources, "probs": list(self.probs)}

    @classmethod
    def from_json(cls, doc: dict) -> JointPMF:
        return cls(int(doc["M"]), tuple(doc["probs"]))

    @classmethod
    def independent(cls, ps: Sequence[float]) -> JointPMF:
        """Product of ``Bern(p_m)`` factors."""
        table = np.ones(1)
        for p in ps:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"Bernoulli parameter {p} outside [0, 1]")
            table = np.outer(table, [1.0 - p, p]).ravel()
        return cls(len(ps), tuple(table))


@dataclass(frozen=True)
class SourceBlock:
    """``M`` length-``k`` source sequences, one per terminal."""

    sequences: tuple[BitVector, ...]
    k: int = field(init=False)

    def __post_init__(self):
        if not self.sequences:
            raise ValueError("empty source block")
        lengths = {s.length for s in self.sequences}
        if len(lengths) != 1:
            raise ValueError(f"unequal sequence lengths {sorted(lengths)}")
        object.__setattr__(self, "k", lengths.pop())

    @property
    def M(self) -> int:
        return len(self.sequences)

    def function_values(self) -> BitVector:
        u = 0
        for s in self.sequences:
            u ^= s.value
        return BitVector(self.k, u)


def mod2_sum(s) -> int:
    bits = list(s)
    if not bits:
        raise ValueError("mod2_sum of an empty sequence")
    out = 0
    for b in bits:
        out ^= int(b)
    return out


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy(pmf) -> float:
    """Shannon entropy in bits with ``0 log 0 = 0``."""
    arr = _as_pmf(pmf)
    nz = arr[arr > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


@lru_cache(maxsize=None)
def _outcome_bits(M: int) -> np.ndarray:
    """(2**M, M) array; row ``i`` holds the bits of outcome ``i``, source 1 first."""
    idx = np.arange(1 << M)
    out = ((idx[:, None] >> (M - 1 - np.arange(M))[None, :]) & 1).astype(np.int64)
    out.setflags(write=False)
    return out


def function_pmf(joint: JointPMF) -> np.ndarray:
    """Distribution ``(P_U(0), P_U(1))`` of the modulo-2 sum."""
    u = _outcome_bits(joint.M).sum(axis=1) & 1
    t = joint.table()
    return np.array([t[u == 0].sum(), t[u == 1].sum()])


def marginal(joint: JointPMF, m: int) -> np.ndarray:
    """Marginal of source ``m`` (1-based)."""
    if not 1 <= m <= joint.M:
        raise IndexError(f"source index {m} outside 1..{joint.M}")
    bits = _outcome_bits(joint.M)[:, m - 1]
    t = joint.table()
    return np.array([t[bits == 0].sum(), t[bits == 1].sum()])


def source_function_table(joint: JointPMF, m: int) -> np.ndarray:
    """2x2 table ``P(S_m = s, U = u)`` by enumeration of all outcomes."""
    if not 1 <= m <= joint.M:
        raise IndexError(f"source index {m} outside 1..{joint.M}")
    bits = _outcome_bits(joint.M)
    u = bits.sum(axis=1) & 1
    s = bits[:, m - 1]
    out = np.zeros((2, 2))
    np.add.at(out, (s, u), joint.table())
    return out


def independence_gap(joint: JointPMF) -> float:
    """``max_{m,s,u} |P(S_m=s, U=u) - P(S_m=s) P(U=u)|``."""
    gap = 0.0
    for m in range(1, joint.M + 1):
        t = source_function_table(joint, m)
        gap = max(gap, float(np.abs(t - np.outer(t.sum(axis=1), t.sum(axis=0))).max()))
    return gap


def condition_check(joint: JointPMF, tol: float = STRUCT_TOL) -> bool:
    """True when every source is independent of the modulo-2 sum, up to ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return independence_gap(joint) <= tol


def doubly_symmetric(theta: float) -> JointPMF:
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta {theta} outside [0, 1]")
    d = (1.0 - theta) / 2.0
    o = theta / 2.0
    return JointPMF(2, (d, o, o, d))


def is_doubly_symmetric(joint: JointPMF, tol: float = STRUCT_TOL) -> bool:
    if joint.M != 2:
        raise ValueError("double symmetry is only defined for two sources")
    p00, p01, p10, p11 = joint.probs
    return abs(p00 - p11) <= tol and abs(p01 - p10) <= tol


def random_simplex_pmf(size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the probability simplex via normalized exponentials."""
    e = rng.exponential(size=size)
    return e / e.sum()


@dataclass
class ScanReport:
    num_random: int
    num_grid: int
    disagreements: list[JointPMF]
    num_passing: int
    max_marginal_deviation: float
    min_rejected_gap: float | None
    max_rejected_gap: float | None

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_json(self) -> dict:
        return {
            "num_random": self.num_random,
            "num_grid": self.num_grid,
            "num_disagreements": len(self.disagreements),
            "disagreements": [j.to_json() for j in self.disagreements],
            "num_condition_passing": self.num_passing,
            "max_marginal_deviation_passing": self.max_marginal_deviation,
            "min_rejected_gap": self.min_rejected_gap,
            "max_rejected_gap": self.max_rejected_gap,
        }


def theorem2_scan(
    num_trials: int,
    master_seed: int,
    tol: float = STRUCT_TOL,
    grid_points: int = 101,
    checker: Callable[[JointPMF, float], bool] = condition_check,
) -> ScanReport:
    """Compare the independence condition with double symmetry for two sources.

    Draws ``num_trials`` joint PMFs uniformly from the simplex (trial ``i`` uses
    stream ``(SCAN, i, 0)`` of ``master_seed``) and adds ``grid_points``
    doubly-symmetric PMFs on an even theta grid.  Every PMF on which ``checker``
    and :func:`is_doubly_symmetric` disagree is reported.  The marginal
    deviation from ``Bern(1/2)`` is tracked over condition-passing PMFs, and
    the independence gap over rejected ones.
    """
    pmfs = [JointPMF(2, tuple(random_simplex_pmf(4, stream(master_seed, SCAN, i, 0))))
            for i in range(num_trials)]
    if grid_points:
        pmfs += [doubly_symmetric(t) for t in np.linspace(0.0, 1.0, grid_points)]
    bad: list[JointPMF] = []
    passing = 0
    max_dev = 0.0
    gaps: list[float] = []
    for j in pmfs:
        ok = checker(j, tol)
        if ok != is_doubly_symmetric(j, tol):
            bad.append(j)
        if ok:
            passing += 1
            for m in (1, 2):
                max_dev = max(max_dev, abs(float(marginal(j, m)[1]) - 0.5))
        else:
            gaps.append(independence_gap(j))
    return ScanReport(
        num_random=num_trials,
        num_grid=grid_points,
        disagreements=bad,
        num_passing=passing,
        max_marginal_deviation=max_dev,
        min_rejected_gap=min(gaps) if gaps else None,
        max_rejected_gap=max(gaps) if gaps else None,
    )


def sample_outcomes(joint: JointPMF, k: int, rng: np.random.Generator) -> np.ndarray:
    if k < 1:
        raise ValueError("block length must be at least 1")
    # inverse-cdf lookup; draw-for-draw identical to rng.choice(..., p=table)
    return np.searchsorted(joint.cdf, rng.random(k), side="right")


def sample_block(joint: JointPMF, k: int, rng: np.random.Generator) -> SourceBlock:
    """``k`` i.i.d. joint draws, split into one sequence per source."""
    outcomes = sample_outcomes(joint, k, rng)
    bits = _outcome_bits(joint.M)[outcomes]
    if k > 62:
        return SourceBlock(tuple(BitVector.from_bits(bits[:, m].tolist()) for m in range(joint.M)))
    packed = (bits << np.arange(k - 1, -1, -1)[:, None]).sum(axis=0)
    return SourceBlock(tuple(BitVector(k, int(v)) for v in packed))
