"""Scalar entropy functions eta, h2 and g.

All functions compute in nats and convert to the requested base on return.
They accept Python floats or numpy arrays.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import DomainError

_TINY = 1e-300


class LogBase(enum.Enum):
    NATURAL = "nat"
    TWO = "two"

    @property
    def factor(self) -> float:
        """ln of the base; divide a value in nats by this to convert."""
        return math.log(2.0) if self is LogBase.TWO else 1.0

    @classmethod
    def coerce(cls, base) -> "LogBase":
        if isinstance(base, cls):
            return base
        if base is None:
            return cls.NATURAL
        key = str(base).lower()
        aliases = {"nat": cls.NATURAL, "natural": cls.NATURAL, "e": cls.NATURAL,
                   "two": cls.TWO, "2": cls.TWO, "bit": cls.TWO, "bits": cls.TWO}
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown log base {base!r}") from None


def to_base(value_nats, base=LogBase.NATURAL):
    """Convert a quantity measured in nats to ``base``."""
    factor = LogBase.coerce(base).factor
    if factor == 1.0:
        return value_nats
    return value_nats / factor


def from_base(value, base=LogBase.NATURAL):
    """Convert a quantity measured in ``base`` to nats."""
    factor = LogBase.coerce(base).factor
    if factor == 1.0:
        return value
    return value * factor


def _as_scalar(out, x):
    return float(out) if np.ndim(x) == 0 else out


def _eta_nat(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x < _TINY, 1.0, x)
    return np.where(x < _TINY, 0.0, -safe * np.log(safe))


def _g_nat(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x <= 0, 1.0, x)
    # (x+1)log(x+1) - x log x loses all digits for large x; this form does not
    val = np.log1p(safe) + safe * np.log1p(1.0 / safe)
    return np.where(x <= 0, 0.0, val)


def _g_scalar(x: float) -> float:
    if x <= 0:
        return 0.0
    return math.log1p(x) + x * math.log1p(1.0 / x)


def _h2_scalar(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log(p) - (1 - p) * math.log1p(-p)


def eta(x, base=LogBase.NATURAL):
    """-x log x, with eta(0) = 0."""
    if np.any(np.asarray(x) < 0):
        raise DomainError("eta is defined for x >= 0")
    return _as_scalar(to_base(_eta_nat(x), base), x)


def binary_entropy(p, base=LogBase.NATURAL):
    """h2(p) = eta(p) + eta(1 - p)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise DomainError("binary_entropy is defined on [0, 1]")
    return _as_scalar(to_base(_eta_nat(arr) + _eta_nat(1.0 - arr), base), p)


def g_func(x, base=LogBase.NATURAL):
    """g(x) = (x+1) log(x+1) - x log x, with g(0) = 0."""
    if np.any(np.asarray(x) < 0):
        raise DomainError("g is defined for x >= 0")
    return _as_scalar(to_base(_g_nat(x), base), x)
