"""Exact correspondence between signals on q^Z u {0} and on Z u {-inf_q}.

A sample set f on the quantum lattice lifts to its logarithmic-index form
s(n) = f(q**n); the inverse substitutes t = q**n back.  Both directions
are sample-exact bijections.  Dynamic equations transport with the
graininess factor (q-1)*q**n on the right-hand side; at the formal index
-inf_q both sides of the transported equation vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OverflowGuardError, WindowError
from .lattice import (
    MAX_ABS_EXPONENT,
    NEG_INF_Q,
    GridFunction,
    QLattice,
    qpow,
)


@dataclass(frozen=True)
class LogSignal:
    """Vector samples on an integer window of Z u {-inf_q}.

    ``ninf_value``, when present, stores the value at the formal index
    -inf_q (the lift of a quantum-scale signal's value at t = 0).  The
    -inf_q sample never participates in window suprema.
    """

    n_min: int
    n_max: int
    values: np.ndarray
    ninf_value: np.ndarray | None = None

    def __post_init__(self):
        if self.n_min > self.n_max:
            raise ValueError(f"empty window: [{self.n_min}, {self.n_max}]")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != self.n_max - self.n_min + 1:
            raise ValueError(
                f"need {self.n_max - self.n_min + 1} rows, got {vals.shape[0]}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.ninf_value is not None:
            nv = np.asarray(self.ninf_value, dtype=float).reshape(-1)
            if nv.shape[0] != vals.shape[1]:
                raise ValueError("ninf_value dimension mismatch")
            nv.setflags(write=False)
            object.__setattr__(self, "ninf_value", nv)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    @classmethod
    def from_callable(cls, n_min, n_max, fn: Callable, ninf_value=None) -> "LogSignal":
        rows = [np.atleast_1d(np.asarray(fn(n), dtype=float))
                for n in range(n_min, n_max + 1)]
        return cls(n_min, n_max, np.array(rows), ninf_value=ninf_value)

    def value(self, n) -> np.ndarray:
        if n is NEG_INF_Q:
            if self.ninf_value is None:
                raise WindowError("no value stored at -inf_q")
            return self.ninf_value
        if not (self.n_min <= n <= self.n_max):
            raise WindowError(
                f"index {n} outside window [{self.n_min}, {self.n_max}]",
                missing_min=n,
                missing_max=n,
            )
        return self.values[n - self.n_min]

    def covers(self, lo, hi) -> bool:
        return self.n_min <= lo and hi <= self.n_max

    def slice(self, lo, hi) -> "LogSignal":
        """Restriction to [lo, hi] (keeps the -inf_q value)."""
        if not self.covers(lo, hi):
            raise WindowError(
                f"window [{lo}, {hi}] not covered by [{self.n_min}, {self.n_max}]",
                missing_min=lo,
                missing_max=hi,
            )
        block = self.values[lo - self.n_min:hi - self.n_min + 1]
        return LogSignal(lo, hi, block, ninf_value=self.ninf_value)

    def sup_norm(self) -> float:
        """Largest |component| over the integer window (excludes -inf_q)."""
        return float(np.max(np.abs(self.values)))


def lift(f: GridFunction) -> LogSignal:
    """Logarithmic-index form: s(n) = f(q**n), sample for sample."""
    if not isinstance(f.lattice, QLattice):
        raise ValueError("lift expects a GridFunction on a QLattice")
    return LogSignal(
        f.lattice.n_min,
        f.lattice.n_max,
        np.array(f.values),
        ninf_value=None if f.zero_value is None else np.array(f.zero_value),
    )


def lower(s: LogSignal, q: float) -> GridFunction:
    """Inverse of ``lift``: place the samples back on the lattice of base q."""
    lat = QLattice(q, s.n_min, s.n_max, includes_zero=s.ninf_value is not None)
    return GridFunction(
        lat,
        np.array(s.values),
        zero_value=None if s.ninf_value is None else np.array(s.ninf_value),
    )


def transform_rhs(f: Callable, q: float) -> Callable:
    """Transport a quantum-scale right-hand side to the unit-step scale.

    ``f(t, x, delayed)`` on q^Z becomes ``F(n, x, delayed) =
    (q-1) * q**n * f(q**n, x, delayed)``; at ``NEG_INF_Q`` the transported
    side is identically the zero vector.  Failures inside ``f`` are
    re-raised with the offending index attached.
    """
    if not q > 1.0:
        raise ValueError(f"base q must satisfy q > 1, got {q}")

    def transformed(n, x, delayed=()):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if n is NEG_INF_Q:
            return np.zeros_like(x)
        if abs(n) > MAX_ABS_EXPONENT:
            raise OverflowGuardError(
                f"index {n} outside the supported |n| <= {MAX_ABS_EXPONENT} range"
            )
        factor = (q - 1.0) * qpow(q, n)
        try:
            val = f(qpow(q, n), x, delayed)
        except Exception as exc:
            raise type(exc)(f"rhs evaluation failed at index {n}: {exc}") from exc
        return factor * np.atleast_1d(np.asarray(val, dtype=float))

    return transformed
