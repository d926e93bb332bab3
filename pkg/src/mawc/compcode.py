"""Random linear computation codes for the modulo-2 adder channel.

Every terminal sends ``x_m = A B s_m`` with the same pair of uniformly random
matrices ``A`` (n x ell) and ``B`` (ell x k).  The channel adds the codewords,
so the receiver sees ``A B u`` through a BSC, ``u`` being the XOR of the
source blocks.  Decoding is two-stage: maximum-likelihood channel decoding of
``w = B u`` over the 2**ell codewords of ``A``, then maximum-likelihood
selection of ``u`` inside the coset ``{u : B u = w}``.  A joint maximum
likelihood decoder over all 2**k candidates is provided as a reference.

All decoders break ties towards the lexicographically smallest candidate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .channel import MawcParams, transmit
from .errors import EmptyRateWindowError, PreconditionError, check_budget
from .gf2 import BitMatrix, BitVector, mat_vec_mul, popcount, random_matrix, span_table, weights
from .source import JointPMF, SourceBlock, binary_entropy, entropy, function_pmf, sample_block
from .streams import code_stream, trial_stream

DECODE_CAP = 1 << 20
DECODERS = ("two_stage", "joint_ml", "uncoded")
Z95 = 1.959963984540054


@dataclass(frozen=True)
class RateWindow:
    k: int
    n: int
    H_U: float
    C: float
    lo: float
    hi: float

    @property
    def ell_min(self) -> int:
        return math.floor(self.lo) + 1

    @property
    def ell_max(self) -> int:
        return math.ceil(self.hi) - 1

    @property
    def empty(self) -> bool:
        return self.ell_min > self.ell_max

    @property
    def admissible(self) -> range:
        return range(self.ell_min, self.ell_max + 1)

    def contains(self, ell: int) -> bool:
        return self.lo < ell < self.hi

    @property
    def midpoint(self) -> int:
        if self.empty:
            raise EmptyRateWindowError(self)
        return (self.ell_min + self.ell_max) // 2

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "H_U": self.H_U, "C": self.C, "lo": self.lo,
                "hi": self.hi, "admissible": list(self.admissible)}


def rate_window(k: int, n: int, H_U: float, p: float) -> RateWindow:
    """Integer ``ell`` with ``k H(U) < ell < n (1 - H(p))``."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be at least 1")
    if not 0.0 <= p <= 0.5:
        raise PreconditionError(f"p={p} outside [0, 1/2]")
    C = 1.0 - binary_entropy(p)
    return RateWindow(k, n, H_U, C, k * H_U, n * C)


@dataclass(frozen=True)
class CompCode:
    A: BitMatrix
    B: BitMatrix
    in_window: bool | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.A.cols != self.B.rows:
            raise ValueError(f"A is {self.A.shape}, B is {self.B.shape}: inner dimensions differ")

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def ell(self) -> int:
        return self.A.cols

    @property
    def k(self) -> int:
        return self.B.cols

    @cached_property
    def codebook(self) -> np.ndarray:
        """``A w`` for every ``w`` in {0,1}^ell."""
        return span_table(self.A.columns)

    @cached_property
    def syndromes(self) -> np.ndarray:
        """``B u`` for every ``u`` in {0,1}^k."""
        return span_table(self.B.columns)

    @cached_property
    def composite(self) -> np.ndarray:
        """``A B u`` for every ``u`` in {0,1}^k."""
        return span_table((self.A @ self.B).columns)

    def to_json(self) -> dict:
        return {"k": self.k, "ell": self.ell, "n": self.n,
                "A": [format(r, f"0{self.ell}b") for r in self.A.data],
                "B": [format(r, f"0{self.k}b") for r in self.B.data],
                "in_window": self.in_window}


def construct(k: int, n: int, ell: int, rng: np.random.Generator,
              window: RateWindow | None = None) -> CompCode:
    """Draw ``A`` then ``B`` from ``rng``.  ``ell`` may lie outside the window;
    pass ``window`` to have membership recorded on the code."""
    A = random_matrix(n, ell, rng)
    B = random_matrix(ell, k, rng)
    return CompCode(A, B, None if window is None else window.contains(ell))


def encode(code: CompCode, s: BitVector) -> BitVector:
    if s.length != code.k:
        raise ValueError(f"source block has length {s.length}, code expects {code.k}")
    return mat_vec_mul(code.A, mat_vec_mul(code.B, s))


def uncoded_transmit(block: SourceBlock) -> list[BitVector]:
    return list(block.sequences)


def _pu1(P_U) -> float:
    if np.ndim(P_U) == 0:
        v = float(P_U)
    else:
        t = np.asarray(P_U, dtype=float)
        if t.shape != (2,) or abs(t.sum() - 1.0) > 1e-12:
            raise ValueError("P_U must be P(U=1) or a length-2 pmf")
        v = float(t[1])
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"P(U=1)={v} outside [0, 1]")
    return v


@lru_cache(maxsize=512)
def likelihood_ranks(pu1: float, k: int, p: float, n: int) -> np.ndarray:
    """Integer table ``R[w, d]`` ordered exactly like
    ``pu1**w (1-pu1)**(k-w) * p**d (1-p)**(n-d)``.

    Equal likelihoods get equal ranks, so an ``argmax`` over ``R`` followed by
    the first-index rule implements lexicographic tie-breaking without any
    floating-point ambiguity.
    """
    a1 = Fraction(pu1)
    a0 = 1 - a1
    c1 = Fraction(p)
    c0 = 1 - c1
    src = [a1**w * a0 ** (k - w) for w in range(k + 1)]
    chan = [c1**d * c0 ** (n - d) for d in range(n + 1)]
    values = [[s * c for c in chan] for s in src]
    order = {v: i for i, v in enumerate(sorted({v for row in values for v in row}))}
    return np.array([[order[v] for v in row] for row in values], dtype=np.int64)


def _best(candidates: np.ndarray, score: np.ndarray) -> int:
    return int(candidates[np.argmax(score)])


def decode_inner(code: CompCode, y: BitVector, p: float, cap: int = DECODE_CAP) -> BitVector:
    """Nearest codeword of ``A`` (ML for ``p < 1/2``); returns its coefficient word."""
    if y.length != code.n:
        raise ValueError(f"received word has length {y.length}, code expects {code.n}")
    check_budget("inner decoder codebook", 1 << code.ell, cap)
    d = popcount(code.codebook ^ np.uint64(y.value))
    return BitVector(code.ell, int(np.argmin(d)))


def coset_ml(syndromes: np.ndarray, k: int, w: int, pu1: float) -> int:
    """Most likely ``u`` with syndrome ``w``; falls back to the nearest reachable syndrome."""
    mask = syndromes == np.uint64(w)
    if not mask.any():
        dist = popcount(syndromes ^ np.uint64(w))
        reachable = syndromes[dist == dist.min()]
        mask = syndromes == reachable.min()
    members = np.flatnonzero(mask)
    ranks = likelihood_ranks(pu1, k, 0.0, 0)[:, 0]
    return _best(members, ranks[weights(k)[members]])


def decode_outer(code: CompCode, w: BitVector, P_U, cap: int = DECODE_CAP) -> BitVector:
    if w.length != code.ell:
        raise ValueError(f"syndrome has length {w.length}, code expects {code.ell}")
    check_budget("outer decoder coset search", 1 << code.k, cap)
    return BitVector(code.k, coset_ml(code.syndromes, code.k, w.value, _pu1(P_U)))


def decode(code: CompCode, y: BitVector, p: float, P_U, cap: int = DECODE_CAP) -> BitVector:
    return decode_outer(code, decode_inner(code, y, p, cap), P_U, cap)


def joint_ml_decode(code: CompCode, y: BitVector, p: float, P_U, cap: int = DECODE_CAP) -> BitVector:
    """Maximize ``P_U^k(u) * P(y | A B u)`` over all ``u``."""
    if y.length != code.n:
        raise ValueError(f"received word has length {y.length}, code expects {code.n}")
    check_budget("joint ML enumeration", 1 << code.k, cap)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    d = popcount(code.composite ^ np.uint64(y.value))
    ranks = likelihood_ranks(_pu1(P_U), code.k, float(p), code.n)
    score = ranks[weights(code.k), d]
    return BitVector(code.k, int(np.argmax(score)))


# Monte Carlo


@dataclass(frozen=True)
class SimConfig:
    joint: JointPMF
    params: MawcParams
    k: int
    n: int
    ell: int | None = None
    decoder: str = "two_stage"

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; choose from {DECODERS}")
        if self.joint.M != self.params.M:
            raise ValueError(f"pmf has {self.joint.M} sources, channel has {self.params.M} inputs")
        if self.decoder == "uncoded" and self.n != self.k:
            raise ValueError("uncoded transmission needs n == k")
        if self.decoder != "uncoded" and self.ell is None:
            raise ValueError("coded schemes need ell")

    @property
    def P_U(self) -> np.ndarray:
        return function_pmf(self.joint)

    @property
    def H_U(self) -> float:
        return entropy(self.P_U)

    def window(self) -> RateWindow:
        return rate_window(self.k, self.n, min(self.H_U, 1.0), min(self.params.p, 0.5))

    def to_json(self) -> dict:
        return {"joint": self.joint.to_json(), "channel": self.params.to_json(),
                "k": self.k, "n": self.n, "ell": self.ell, "decoder": self.decoder}


@dataclass
class ErrorEstimate:
    config: SimConfig
    master_seed: int
    num_codes: int
    trials_per_code: int
    per_code_errors: list[int]
    in_window: bool | None

    @property
    def total_trials(self) -> int:
        return self.num_codes * self.trials_per_code

    @property
    def per_code_rates(self) -> list[float]:
        return [e / self.trials_per_code for e in self.per_code_errors]

    @property
    def mean(self) -> float:
        return sum(self.per_code_errors) / self.total_trials

    @property
    def half_width(self) -> float:
        m = self.mean
        return Z95 * math.sqrt(m * (1.0 - m) / self.total_trials)

    @property
    def ci(self) -> tuple[float, float]:
        return max(0.0, self.mean - self.half_width), min(1.0, self.mean + self.half_width)

    def to_json(self) -> dict:
        lo, hi = self.ci
        return {"config": self.config.to_json(), "seed": self.master_seed,
                "num_codes": self.num_codes, "trials_per_code": self.trials_per_code,
                "in_window": self.in_window, "per_code_error_rates": self.per_code_rates,
                "mean_error_rate": self.mean, "ci95": [lo, hi], "ci95_half_width": self.half_width}


def code_for(config: SimConfig, master_seed: int, code_index: int) -> CompCode | None:
    if config.decoder == "uncoded":
        return None
    return construct(config.k, config.n, config.ell, code_stream(master_seed, code_index),
                     window=config.window())


def run_trial(config: SimConfig, code: CompCode | None, rng: np.random.Generator) -> bool:
    """One block: sample, encode at every terminal, transmit, decode.  True on block error."""
    block = sample_block(config.joint, config.k, rng)
    u = block.function_values()
    if code is None:
        xs = uncoded_transmit(block)
    else:
        xs = [encode(code, s) for s in block.sequences]
    y, _ = transmit(xs, config.params, rng, eavesdropper=False)
    if code is None:
        u_hat = y
    elif config.decoder == "joint_ml":
        u_hat = joint_ml_decode(code, y, config.params.p, config.P_U)
    else:
        u_hat = decode(code, y, config.params.p, config.P_U)
    return u_hat != u


def _code_errors(config: SimConfig, master_seed: int, code_index: int, trials: int) -> int:
    code = code_for(config, master_seed, code_index)
    return sum(run_trial(config, code, trial_stream(master_seed, code_index, t)) for t in range(trials))


def simulate_error_prob(config: SimConfig, num_codes: int, trials_per_code: int,
                        master_seed: int, workers: int = 1, cap: int = DECODE_CAP) -> ErrorEstimate:
    """Block-error rate averaged over ``num_codes`` random codes.

    Code ``c`` is drawn from stream ``(CODE, c, 0)`` and its trial ``t`` from
    ``(TRIAL, c, t)``, so the result does not depend on ``workers``.
    """
    if num_codes < 1 or trials_per_code < 1:
        raise ValueError("need at least one code and one trial")
    if config.decoder == "two_stage":
        check_budget("inner decoder codebook", 1 << config.ell, cap)
        check_budget("outer decoder coset search", 1 << config.k, cap)
    elif config.decoder == "joint_ml":
        check_budget("joint ML enumeration", 1 << config.k, cap)
    in_window = None if config.decoder == "uncoded" else config.window().contains(config.ell)
    args = [(config, master_seed, c, trials_per_code) for c in range(num_codes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(_code_errors, *zip(*args)))
    else:
        errors = [_code_errors(*a) for a in args]
    return ErrorEstimate(config, master_seed, num_codes, trials_per_code, errors, in_window)

