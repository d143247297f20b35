"""Cylindrical weight functions on H^d and the Koranyi gauge.

All weights are functions of r = |z| and t only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = ["WeightBase", "WeightSpec", "koranyi", "weight_eval"]


class WeightBase(str, Enum):
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"
    KORANYI = "Koranyi"
    ABS_Z = "AbsZ"
    INV_ABS_Z = "InvAbsZ"
    ONE = "One"


_SINGULAR = {WeightBase.W4, WeightBase.INV_ABS_Z}


@dataclass(frozen=True)
class WeightSpec:
    base: WeightBase
    exponent: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "base", WeightBase(self.base))
        if not np.isfinite(self.exponent):
            raise DomainError("weight exponent must be finite")

    @property
    def singular(self) -> bool:
        return self.base in _SINGULAR and self.exponent > 0

    def __call__(self, r, t):
        return weight_eval(self, r, t)


def koranyi(r, t):
    """(|z|^4 + t^2)^(1/4), rescaled by max(|z|, |t|^(1/2)) so tiny or huge inputs do not under/overflow."""
    r = np.abs(np.asarray(r, dtype=float))
    s = np.sqrt(np.abs(np.asarray(t, dtype=float)))
    q = np.maximum(r, s)
    safe = np.where(q > 0, q, 1.0)
    return q * np.sqrt(np.hypot((r / safe) ** 2, (s / safe) ** 2))


def _bracket(x):
    return np.sqrt(1.0 + x**2)


def weight_eval(spec: WeightSpec, r, t):
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    base = WeightBase(spec.base)
    if base is WeightBase.W1:
        val = r / (_bracket(r) * (1.0 + np.sqrt(r**4 + t**2)))
    elif base is WeightBase.W2:
        val = 1.0 / np.sqrt(1.0 + r**2 + t**2)
    elif base is WeightBase.W3:
        val = r / (1.0 + np.sqrt(r**4 + t**2))
    elif base is WeightBase.W4:
        rho2 = np.sqrt(r**4 + t**2)
        if np.any(rho2 == 0):
            raise DomainError("w4 is singular at the origin (r, t) = (0, 0)")
        val = r / rho2
    elif base is WeightBase.KORANYI:
        val = koranyi(r, t)
    elif base is WeightBase.ABS_Z:
        val = r.copy()
    elif base is WeightBase.INV_ABS_Z:
        if np.any(r == 0):
            raise DomainError("1/|z| is singular on the t-axis")
        val = 1.0 / r
    else:
        val = np.ones_like(r)
    if spec.exponent != 1.0:
        val = val**spec.exponent
    return val if val.ndim else float(val)
