"""Closed-form capacities and rates for computing the modulo-2 sum.

All rates are in function values per channel use, except
:func:`bsc_wiretap_secrecy_capacity` which is in bits per channel use.
A source whose function value is constant (zero entropy) needs no channel
uses at all; instead of returning infinity the rate functions return the
:data:`DEGENERATE` marker.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .channel import degradedness_gap
from .errors import PreconditionError
from .source import binary_entropy


@dataclass(frozen=True)
class DegenerateRate:
    reason: str = "degenerate: constant function"

    def __str__(self) -> str:
        return self.reason


DEGENERATE = DegenerateRate()

SECRECY_NOTE = "valid only when every source is independent of the modulo-2 sum"


class NegativeSecrecyWarning(UserWarning):
    """The eavesdropper's BSC is better than the legitimate one."""


@dataclass(frozen=True)
class RateQuery:
    p: float
    q: float
    H_U: float
    theta: float

    def __post_init__(self):
        for name in ("p", "q", "theta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if not 0.0 <= self.H_U <= 1.0:
            raise ValueError(f"H_U={self.H_U} outside [0, 1]")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 0.5:
        raise PreconditionError(f"p={p} outside [0, 1/2]")


def computation_capacity(p: float, H_U: float) -> float | DegenerateRate:
    """``(1 - H(p)) / H(U)``."""
    _check_p(p)
    if not 0.0 <= H_U <= 1.0:
        raise PreconditionError(f"H_U={H_U} outside [0, 1]")
    if H_U == 0.0:
        return DEGENERATE
    return (1.0 - binary_entropy(p)) / H_U


def secrecy_computation_capacity(p: float, H_U: float) -> float | DegenerateRate:
    """Same value as :func:`computation_capacity`; the eavesdropper crossover
    plays no role.  See :data:`SECRECY_NOTE` for the source condition."""
    return computation_capacity(p, H_U)


def separation_computation_rate(p: float, theta: float) -> float | DegenerateRate:
    """Best rate of compress-then-time-share for a doubly symmetric pair:
    ``(1 - H(p)) / (2 H(theta))``."""
    _check_p(p)
    h = binary_entropy(theta)
    if h == 0.0:
        return DEGENERATE
    return 0.5 * ((1.0 - binary_entropy(p)) / h)


def separation_secrecy_rate(p: float, q: float, theta: float) -> float | DegenerateRate:
    """``(H(q) - H(p)) / (2 H(theta))`` for a physically degraded eavesdropper.

    Raises :class:`PreconditionError` unless ``0 <= p < 1/2`` and
    ``q = q'(1 - 2p) + p`` for some ``q'`` in ``(0, 1/2]``.
    """
    if degradedness_gap(p, q) is None:
        raise PreconditionError(
            f"degradedness condition fails for p={p}, q={q}: need 0 <= p < 1/2 and "
            "q = q'(1-2p)+p with q' in (0, 1/2]"
        )
    h = binary_entropy(theta)
    if h == 0.0:
        return DEGENERATE
    return 0.5 * ((binary_entropy(q) - binary_entropy(p)) / h)


def bsc_wiretap_secrecy_capacity(p: float, q: float) -> float:
    """``max(H(q) - H(p), 0)``; warns with :class:`NegativeSecrecyWarning` when clipped."""
    gap = binary_entropy(q) - binary_entropy(p)
    if gap < 0.0:
        warnings.warn(f"H(q) < H(p) for p={p}, q={q}; secrecy capacity clipped to 0",
                      NegativeSecrecyWarning, stacklevel=2)
        return 0.0
    return gap
