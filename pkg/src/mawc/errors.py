"""Exception types and the enumeration budget shared by every module."""

from __future__ import annotations

import os

ENUM_CAP_ENV = "MAWC_ENUM_CAP"
DEFAULT_ENUM_CAP = 2**26


class PreconditionError(ValueError):
    """An operation was called outside the domain where it is defined."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed the configured term budget."""

    def __init__(self, what: str, required: int, cap: int):
        self.what = what
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what}: enumeration needs {required} terms but the cap is {cap}; "
            f"raise it with {ENUM_CAP_ENV}={required} or shrink the instance"
        )


class EmptyRateWindowError(PreconditionError):
    """No integer inner dimension satisfies k*H(U) < ell < n*C."""

    def __init__(self, window):
        self.window = window
        super().__init__(
            f"empty rate window for k={window.k}, n={window.n}: "
            f"need {window.lo:.6g} < ell < {window.hi:.6g}"
        )


class ConsistencyError(ArithmeticError):
    """A numerically impossible result, e.g. clearly negative mutual information."""


def enumeration_cap() -> int:
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_ENUM_CAP
    return int(float(raw))


def check_budget(what: str, required: int, cap: int | None = None) -> None:
    """Raise before any allocation if ``required`` terms exceed the cap."""
    cap = enumeration_cap() if cap is None else cap
    if required > cap:
        raise BudgetExceededError(what, required, cap)
