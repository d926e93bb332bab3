"""Separation-based baseline for two terminals.

Each terminal compresses its block with the same linear map (Körner-Marton),
optionally adds a random-binning wiretap layer, and the two terminals take
turns on the channel.  The receiver decodes both compressed words, XORs them
and recovers ``u`` from the XOR of the syndromes.

Time-sharing uses strict alternation: odd channel uses (1st, 3rd, ...) carry
terminal 1 while terminal 2 sends 0, even uses carry terminal 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .channel import MawcParams, transmit
from .compcode import DECODE_CAP, Z95, coset_ml
from .errors import check_budget
from .gf2 import BitMatrix, BitVector, popcount, random_independent_columns, random_vector, span_table
from .leakage import apply_bsc, mutual_information
from .rates import separation_computation_rate, separation_secrecy_rate
from .source import doubly_symmetric, sample_block
from .streams import code_stream, trial_stream


@dataclass(frozen=True)
class KmCode:
    Bkm: BitMatrix

    @property
    def k(self) -> int:
        return self.Bkm.cols

    @property
    def ell(self) -> int:
        return self.Bkm.rows

    @cached_property
    def syndromes(self) -> np.ndarray:
        return span_table(self.Bkm.columns)


def random_km_code(k: int, ell: int, rng: np.random.Generator) -> KmCode:
    """Uniform ``ell x k`` compression matrix, full column rank whenever ``ell >= k``."""
    cols = random_independent_columns(ell, k, rng)
    return KmCode(BitMatrix.from_columns([BitVector(ell, c) for c in cols]))


def km_compress(code: KmCode, s: BitVector) -> BitVector:
    return code.Bkm @ s


def km_decode(code: KmCode, w: BitVector, theta: float, cap: int = DECODE_CAP) -> BitVector:
    """Most likely ``u`` (``P(U=1) = theta``) in the coset of ``w``; same rules as
    the computation-code outer decoder."""
    if w.length != code.ell:
        raise ValueError(f"syndrome has length {w.length}, code expects {code.ell}")
    check_budget("Körner-Marton coset search", 1 << code.k, cap)
    return BitVector(code.k, coset_ml(code.syndromes, code.k, w.value, theta))


@dataclass(frozen=True)
class WiretapBinningCode:
    """Linear binning: the codeword for message ``m`` and local randomness ``r``
    is ``G (m || r)``."""

    G: BitMatrix
    msg_len: int

    def __post_init__(self):
        if not 0 <= self.msg_len <= self.G.cols:
            raise ValueError("msg_len must not exceed the generator width")

    @property
    def rand_len(self) -> int:
        return self.G.cols - self.msg_len

    @property
    def n(self) -> int:
        return self.G.rows

    @cached_property
    def codebook(self) -> np.ndarray:
        return span_table(self.G.columns)


def random_binning_code(msg_len: int, rand_len: int, n: int, rng: np.random.Generator) -> WiretapBinningCode:
    """Message columns first, then randomness columns, all from ``rng``.

    The message part is full column rank when ``msg_len <= n``; each randomness
    column is independent of the earlier randomness columns while that is
    possible.  Codes drawn from identical streams share their message part,
    and the randomness part for ``rand_len = r`` is a prefix of the one for
    ``r + 1``.
    """
    msg_cols = random_independent_columns(n, msg_len, rng)
    rand_cols = random_independent_columns(n, rand_len, rng)
    cols = [BitVector(n, c) for c in msg_cols + rand_cols]
    return WiretapBinningCode(BitMatrix.from_columns(cols), msg_len)


def wiretap_encode(code: WiretapBinningCode, msg: BitVector, rng: np.random.Generator) -> BitVector:
    if msg.length != code.msg_len:
        raise ValueError(f"message has length {msg.length}, code expects {code.msg_len}")
    return code.G @ msg.concat(random_vector(code.rand_len, rng))


def wiretap_decode(code: WiretapBinningCode, y: BitVector, p: float, cap: int = DECODE_CAP) -> BitVector:
    """Nearest codeword over all ``(m, r)``; returns ``m``."""
    if y.length != code.n:
        raise ValueError(f"received word has length {y.length}, code expects {code.n}")
    check_budget("wiretap codebook", 1 << code.G.cols, cap)
    best = int(np.argmin(popcount(code.codebook ^ np.uint64(y.value))))
    return BitVector(code.msg_len, best >> code.rand_len)


def wiretap_exact_leakage(code: WiretapBinningCode, q: float, cap: int | None = None) -> float:
    """``I(M; Z^n)`` for a uniform message observed through ``BSC(q)``."""
    check_budget("wiretap leakage enumeration", (1 << code.G.cols) * (1 << code.n), cap)
    idx = np.arange(1 << code.G.cols, dtype=np.int64)
    msg = idx >> code.rand_len
    flat = np.bincount(msg * (1 << code.n) + code.codebook.astype(np.int64),
                       minlength=(1 << code.msg_len) * (1 << code.n)).astype(float)
    flat /= idx.size
    return mutual_information(apply_bsc(flat.reshape(1 << code.msg_len, 1 << code.n), q, code.n))


def interleave(a: BitVector, b: BitVector) -> BitVector:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")
    bits = []
    for x, y in zip(a, b):
        bits += (x, y)
    return BitVector.from_bits(bits)


def deinterleave(v: BitVector) -> tuple[BitVector, BitVector]:
    bits = v.bits()
    return BitVector.from_bits(bits[0::2]), BitVector.from_bits(bits[1::2])


def timeshare_transmit(x1: BitVector, x2: BitVector, params: MawcParams, rng: np.random.Generator,
                       eavesdropper: bool = True):
    """Alternate the two terminals on the adder channel; the idle one sends 0."""
    if params.M != 2:
        raise ValueError("time-sharing baseline is defined for two terminals")
    silent = BitVector.zeros(x1.length)
    return transmit([interleave(x1, silent), interleave(silent, x2)], params, rng, eavesdropper)


# end-to-end pipeline


@dataclass(frozen=True)
class SeparationConfig:
    theta: float
    params: MawcParams
    k: int
    ell: int
    n_per_terminal: int | None = None
    rand_len: int = 0

    def __post_init__(self):
        if self.params.M != 2:
            raise ValueError("separation pipeline needs M = 2")
        if self.n_per_terminal is None and self.rand_len:
            raise ValueError("the binning layer needs n_per_terminal")

    @property
    def coded(self) -> bool:
        return self.n_per_terminal is not None

    @property
    def n_w(self) -> int:
        return self.ell if self.n_per_terminal is None else self.n_per_terminal

    @property
    def n(self) -> int:
        return 2 * self.n_w

    def to_json(self) -> dict:
        return {"theta": self.theta, "channel": self.params.to_json(), "k": self.k, "ell": self.ell,
                "n_per_terminal": self.n_per_terminal, "rand_len": self.rand_len}


@dataclass(frozen=True)
class SeparationCodes:
    km: KmCode
    wiretap: WiretapBinningCode | None


def separation_codes(config: SeparationConfig, master_seed: int) -> SeparationCodes:
    km = random_km_code(config.k, config.ell, code_stream(master_seed, 0))
    wt = None
    if config.coded:
        wt = random_binning_code(config.ell, config.rand_len, config.n_per_terminal,
                                 code_stream(master_seed, 1))
    return SeparationCodes(km, wt)


def _channel_word(codes: SeparationCodes, w: BitVector, rng) -> BitVector:
    return w if codes.wiretap is None else wiretap_encode(codes.wiretap, w, rng)


def separation_trial(config: SeparationConfig, codes: SeparationCodes, rng: np.random.Generator) -> bool:
    """One block end to end; True on block error."""
    block = sample_block(doubly_symmetric(config.theta), config.k, rng)
    x1, x2 = (_channel_word(codes, km_compress(codes.km, s), rng) for s in block.sequences)
    y, _ = timeshare_transmit(x1, x2, config.params, rng, eavesdropper=False)
    y1, y2 = deinterleave(y)
    if codes.wiretap is not None:
        y1 = wiretap_decode(codes.wiretap, y1, config.params.p)
        y2 = wiretap_decode(codes.wiretap, y2, config.params.p)
    u_hat = km_decode(codes.km, y1 ^ y2, config.theta)
    return u_hat != block.function_values()


def separation_leakage(config: SeparationConfig, codes: SeparationCodes,
                       cap: int | None = None) -> list[float]:
    """Exact ``[I(S_1^k; Z^n), I(S_2^k; Z^n)]`` for the time-shared streams.

    The eavesdropper's word is handled as ``(Z', Z'')``, the two terminals'
    slots in order; that is a fixed permutation of the interleaved word and
    leaves every mutual information unchanged.
    """
    k, nw = config.k, config.n_w
    r = codes.wiretap.rand_len if codes.wiretap is not None else 0
    check_budget("separation leakage enumeration", (1 << (2 * k + 2 * r)) * (1 << (2 * nw)), cap)
    joint = doubly_symmetric(config.theta).table()

    # codewords for every (block, randomness) pair, shape (2**k, 2**r)
    syn = codes.km.syndromes.astype(np.int64)
    if codes.wiretap is None:
        words = syn[:, None]
    else:
        book = codes.wiretap.codebook.astype(np.int64)
        words = book[(syn[:, None] << r) | np.arange(1 << r)[None, :]]

    s = np.arange(1 << k)
    # P(s1, s2) as a product over time of the per-symbol joint pmf
    ps = np.ones((1 << k, 1 << k))
    for i in range(k):
        b = (s >> (k - 1 - i)) & 1
        ps *= joint[(b[:, None] << 1) | b[None, :]]

    # P(s1, s2, x1, x2) with x_m uniform over the bin of s_m
    X1 = words[:, None, :, None]
    X2 = words[None, :, None, :]
    weight = (ps[:, :, None, None] / float(1 << (2 * r))) * np.ones((1, 1, 1 << r, 1 << r))
    X = (X1 << nw) | X2
    S1 = np.broadcast_to(s[:, None, None, None], X.shape)
    S2 = np.broadcast_to(s[None, :, None, None], X.shape)
    out = []
    for S in (S1, S2):
        flat = np.bincount((S * (1 << (2 * nw)) + X).ravel(), weights=weight.ravel(),
                           minlength=(1 << k) * (1 << (2 * nw)))
        table = apply_bsc(flat.reshape(1 << k, 1 << (2 * nw)), config.params.q, 2 * nw)
        out.append(mutual_information(table))
    return out


@dataclass
class SeparationRecord:
    config: SeparationConfig
    master_seed: int
    num_trials: int
    errors: int
    leakage_bits: list[float] | None
    reference_rate: float | None
    reference_secrecy_rate: float | None

    @property
    def rate(self) -> float:
        return self.config.k / self.config.n

    @property
    def error_rate(self) -> float:
        return self.errors / self.num_trials

    @property
    def half_width(self) -> float:
        m = self.error_rate
        return Z95 * math.sqrt(m * (1.0 - m) / self.num_trials)

    @property
    def total_leakage(self) -> float | None:
        return None if self.leakage_bits is None else math.fsum(self.leakage_bits)

    def to_json(self) -> dict:
        return {"scheme": "separation", "config": self.config.to_json(), "seed": self.master_seed,
                "num_trials": self.num_trials, "rate": self.rate, "error_rate": self.error_rate,
                "ci95_half_width": self.half_width, "leakage_bits": self.leakage_bits,
                "total_leakage_bits": self.total_leakage, "reference_rate": self.reference_rate,
                "reference_secrecy_rate": self.reference_secrecy_rate}


def _number(x):
    return x if isinstance(x, float) else None


def separation_pipeline(config: SeparationConfig, num_trials: int, master_seed: int,
                        codes: SeparationCodes | None = None, leakage: bool = True,
                        cap: int | None = None) -> SeparationRecord:
    """Monte Carlo block-error rate plus exact leakage for one configuration.

    Reference lines: the best separation computation rate, and the best
    separation secrecy rate when the eavesdropper channel is a degraded
    version of the legitimate one (``None`` otherwise).
    """
    codes = codes or separation_codes(config, master_seed)
    errors = sum(separation_trial(config, codes, trial_stream(master_seed, 0, t)) for t in range(num_trials))
    leak = separation_leakage(config, codes, cap) if leakage else None
    p, q, theta = config.params.p, config.params.q, config.theta
    ref = _number(separation_computation_rate(min(p, 0.5), theta))
    try:
        ref_sec = _number(separation_secrecy_rate(p, q, theta))
    except ValueError:
        ref_sec = None
    return SeparationRecord(config, master_seed, num_trials, errors, leak, ref, ref_sec)
