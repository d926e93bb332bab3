"""The binary modulo-2 adder multiple-access wiretap channel.

Both receivers see the XOR of all inputs through their own BSC::

    y = x_1 ^ ... ^ x_M ^ n_y,   n_y ~ Bern(p) i.i.d.
    z = x_1 ^ ... ^ x_M ^ n_z,   n_z ~ Bern(q) i.i.d.

``n_y`` and ``n_z`` are drawn from two independent child streams of the
caller's generator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import check_budget
from .gf2 import BitVector, bernoulli_vector, weights

log = logging.getLogger(__name__)

GAP_TOL = 1e-12


@dataclass(frozen=True)
class MawcParams:
    M: int
    p: float
    q: float

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("need at least one transmitter")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def exploratory(self) -> bool:
        """Crossovers above 1/2 are accepted for sweeps but flagged."""
        return self.p > 0.5 or self.q > 0.5

    def to_json(self) -> dict:
        return {"M": self.M, "p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, doc: dict) -> MawcParams:
        return cls(int(doc["M"]), float(doc["p"]), float(doc["q"]))


def xor_all(xs: Sequence[BitVector]) -> BitVector:
    if not xs:
        raise ValueError("no channel inputs")
    n = xs[0].length
    acc = 0
    for x in xs:
        if x.length != n:
            raise ValueError(f"input lengths differ: {n} vs {x.length}")
        acc ^= x.value
    return BitVector(n, acc)


def _noisy(s: BitVector, prob: float, seq: np.random.SeedSequence, bitgen_type) -> BitVector:
    # same draws as Generator.spawn; a zero crossover needs no generator at all
    if prob == 0.0:
        return s
    return s ^ bernoulli_vector(s.length, prob, np.random.Generator(bitgen_type(seq)))


def transmit(xs: Sequence[BitVector], params: MawcParams, rng: np.random.Generator,
             eavesdropper: bool = True):
    """One block over the channel; returns ``(y, z)``.

    The two noise words come from two children spawned off ``rng``.  With
    ``eavesdropper=False`` the ``z`` branch is skipped and ``None`` returned;
    ``y`` is unchanged.  A block that needs no noise at all spawns nothing.
    """
    if len(xs) != params.M:
        raise ValueError(f"expected {params.M} inputs, got {len(xs)}")
    s = xor_all(xs)
    if params.p == 0.0 and (params.q == 0.0 or not eavesdropper):
        return s, (s if eavesdropper else None)
    bitgen = rng.bit_generator
    seq_y, seq_z = bitgen.seed_seq.spawn(2)
    y = _noisy(s, params.p, seq_y, type(bitgen))
    z = _noisy(s, params.q, seq_z, type(bitgen)) if eavesdropper else None
    return y, z


def noise_pmf(crossover: float, n: int, cap: int | None = None) -> np.ndarray:
    """Table of ``P(e)`` for every length-``n`` noise word, indexed MSB-first."""
    if not 0.0 <= crossover <= 1.0:
        raise ValueError(f"crossover {crossover} outside [0, 1]")
    check_budget(f"noise table of length {n}", 1 << n, cap)
    w = weights(n)
    # 0.0 ** 0 == 1.0 keeps the crossover 0 and 1 tables exact
    return np.power(crossover, w) * np.power(1.0 - crossover, n - w)


def compose_bsc(p: float, q_prime: float) -> float:
    """Crossover of ``BSC(p)`` followed by ``BSC(q_prime)``."""
    return p + q_prime - 2.0 * p * q_prime


def degradedness_gap(p: float, q: float) -> float | None:
    """Solve ``q = q'(1 - 2p) + p`` for ``q'``.

    Returns ``q'`` when it lies in ``(0, 1/2]`` (with a 1e-12 allowance at the
    upper end for rounding), otherwise ``None``: the eavesdropper channel is
    then not a strictly noisier cascade of the legitimate one.
    """
    if not 0.0 <= p < 0.5:
        log.debug("degradedness undefined for p=%r (need 0 <= p < 1/2)", p)
        return None
    qp = (q - p) / (1.0 - 2.0 * p)
    if qp <= 0.0 or qp > 0.5 + GAP_TOL:
        log.debug("q'=%r outside (0, 1/2] for p=%r, q=%r", qp, p, q)
        return None
    return qp
