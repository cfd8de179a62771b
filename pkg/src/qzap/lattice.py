"""Calculus on the quantum lattice q^Z (and its unit-step companion Z).

The quantum lattice is the point set {q**n : n in Z} together with the
accumulation point 0.  Points are addressed by their integer exponent n;
the point 0 gets the distinguished index ``NEG_INF_Q``.  All operations
work on a finite index window [n_min, n_max].

Provided here:

- ``QLattice`` / ``ZLattice``: the two supported scales (graininess
  (q-1)*q**n and 1 respectively).
- ``GridFunction``: vector-valued samples over a lattice window.
- jump operators ``sigma`` / ``rho``, graininess ``mu``.
- ``q_derivative`` / ``q_integral``: the forward difference quotient and
  the Riemann-type sum over scale points.
- ``ts_exponential``: the product-form scale exponential.
- ``gronwall_verify``: margin check for the scale Gronwall bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    RegressivityError,
    UndefinedAtZeroError,
    WindowError,
)

# Default floating comparison tolerances (absolute + relative), used by
# every verification-style operation in the package.
TOL_ABS = 1e-9
TOL_REL = 1e-9

# q**n overflow guard: |n| beyond this can exceed float64 range for q >= 2.
MAX_ABS_EXPONENT = 1024


class NegInfQ:
    """The formal index of the point 0, written -inf_q.

    Arithmetic follows the stipulations t + (-inf_q) = t - (-inf_q) = t
    and t > -inf_q for every integer t.  A single module-level instance
    ``NEG_INF_Q`` is used everywhere; do not construct new ones.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "-inf_q"

    # t + (-inf_q) = t, symmetrically
    def __add__(self, other):
        if isinstance(other, int):
            return other
        return NotImplemented

    __radd__ = __add__

    def __rsub__(self, other):
        if isinstance(other, int):
            return other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, int):
            return True
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, int) or other is self:
            return True
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, int):
            return False
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, int):
            return False
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf_q")


NEG_INF_Q = NegInfQ()


def qpow(q: float, n: int) -> float:
    """q**n by repeated multiplication outward from n = 0.

    Negative exponents take the reciprocal of the positive-side product.
    Windows with |n| > 1024 are refused so overflow is explicit rather
    than silent.
    """
    if abs(n) > MAX_ABS_EXPONENT:
        from .errors import OverflowGuardError

        raise OverflowGuardError(
            f"exponent {n} outside the supported range |n| <= {MAX_ABS_EXPONENT}"
        )
    acc = 1.0
    for _ in range(abs(n)):
        acc *= q
    return acc if n >= 0 else 1.0 / acc


def qpow_range(q: float, n_min: int, n_max: int) -> np.ndarray:
    """Array of q**n for n in [n_min, n_max], bitwise equal to ``qpow``."""
    return np.array([qpow(q, n) for n in range(n_min, n_max + 1)])


@dataclass(frozen=True)
class QLattice:
    """Finite window of the quantum scale: points q**n, n in [n_min, n_max].

    ``includes_zero`` marks that the accumulation point 0 (index
    ``NEG_INF_Q``) belongs to the modelled scale.
    """

    q: float
    n_min: int
    n_max: int
    includes_zero: bool = False

    def __post_init__(self):
        if not self.q > 1.0:
            raise ValueError(f"base q must satisfy q > 1, got {self.q}")
        if self.n_min > self.n_max:
            raise ValueError(f"empty window: [{self.n_min}, {self.n_max}]")
        if abs(self.n_min) > MAX_ABS_EXPONENT or abs(self.n_max) > MAX_ABS_EXPONENT:
            from .errors import OverflowGuardError

            raise OverflowGuardError(
                f"window [{self.n_min}, {self.n_max}] exceeds |n| <= {MAX_ABS_EXPONENT}"
            )

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    def indices(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def contains(self, n) -> bool:
        if n is NEG_INF_Q:
            return self.includes_zero
        return self.n_min <= n <= self.n_max

    def point(self, n) -> float:
        """The scale point addressed by index n; 0.0 at -inf_q."""
        if n is NEG_INF_Q:
            return 0.0
        return qpow(self.q, n)

    def mu(self, n) -> float:
        """Graininess (q-1)*q**n; 0 at the right-dense point 0."""
        if n is NEG_INF_Q:
            return 0.0
        return (self.q - 1.0) * qpow(self.q, n)

    def check_index(self, n, allow_ninf: bool = True):
        if n is NEG_INF_Q:
            if not allow_ninf:
                raise WindowError("operation needs a finite index, got -inf_q")
            if not self.includes_zero:
                raise WindowError("lattice does not include the point 0")
            return
        if not (self.n_min <= n <= self.n_max):
            raise WindowError(
                f"index {n} outside window [{self.n_min}, {self.n_max}]",
                missing_min=n,
                missing_max=n,
            )


@dataclass(frozen=True)
class ZLattice:
    """Unit-graininess scale Z (optionally with the formal point -inf_q).

    This is the image of the quantum scale under the logarithmic index
    map; graininess is identically 1 and point(n) = n.
    """

    n_min: int
    n_max: int
    includes_zero: bool = False

    def __post_init__(self):
        if self.n_min > self.n_max:
            raise ValueError(f"empty window: [{self.n_min}, {self.n_max}]")

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    def indices(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def contains(self, n) -> bool:
        if n is NEG_INF_Q:
            return self.includes_zero
        return self.n_min <= n <= self.n_max

    def point(self, n) -> float:
        if n is NEG_INF_Q:
            raise UndefinedAtZeroError("-inf_q has no finite coordinate on Z")
        return float(n)

    def mu(self, n) -> float:
        if n is NEG_INF_Q:
            return 0.0
        return 1.0

    def check_index(self, n, allow_ninf: bool = True):
        if n is NEG_INF_Q:
            if not allow_ninf:
                raise WindowError("operation needs a finite index, got -inf_q")
            if not self.includes_zero:
                raise WindowError("scale does not include the point -inf_q")
            return
        if not (self.n_min <= n <= self.n_max):
            raise WindowError(
                f"index {n} outside window [{self.n_min}, {self.n_max}]",
                missing_min=n,
                missing_max=n,
            )


@dataclass(frozen=True)
class GridFunction:
    """Vector-valued samples indexed by lattice exponent.

    ``values`` has one row per index in [n_min, n_max]; ``zero_value``
    optionally stores the declared right limit at the point 0.  Values at
    0 are always user-supplied, never extrapolated.
    """

    lattice: "QLattice | ZLattice"
    values: np.ndarray
    zero_value: np.ndarray | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != self.lattice.size:
            raise ValueError(
                f"need {self.lattice.size} rows for window "
                f"[{self.lattice.n_min}, {self.lattice.n_max}], got {vals.shape[0]}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.zero_value is not None:
            zv = np.asarray(self.zero_value, dtype=float).reshape(-1)
            if zv.shape[0] != vals.shape[1]:
                raise ValueError("zero_value dimension mismatch")
            if not np.all(np.isfinite(zv)):
                raise ValueError("zero_value must be finite")
            zv.setflags(write=False)
            object.__setattr__(self, "zero_value", zv)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_min(self) -> int:
        return self.lattice.n_min

    @property
    def n_max(self) -> int:
        return self.lattice.n_max

    @classmethod
    def from_callable(cls, lattice, fn: Callable, zero_value=None) -> "GridFunction":
        """Sample ``fn(t)`` at every lattice point of the window."""
        rows = [np.atleast_1d(np.asarray(fn(lattice.point(n)), dtype=float))
                for n in lattice.indices()]
        return cls(lattice, np.array(rows), zero_value=zero_value)

    def value(self, n) -> np.ndarray:
        if n is NEG_INF_Q:
            if self.zero_value is None:
                raise UndefinedAtZeroError(
                    "no value stored at t = 0; supply zero_value explicitly"
                )
            return self.zero_value
        self.lattice.check_index(n, allow_ninf=False)
        return self.values[n - self.lattice.n_min]


# ---------------------------------------------------------------------------
# jump operators and graininess


def sigma(lat, n):
    """Forward jump: n -> n + 1 (the point q*t); sigma(-inf_q) = -inf_q.

    The point 0 is right-dense, so its jump stays put.  The top window
    index has no stored successor and is refused.
    """
    lat.check_index(n)
    if n is NEG_INF_Q:
        return NEG_INF_Q
    if n >= lat.n_max:
        raise WindowError(
            f"sigma({n}) leaves the window [{lat.n_min}, {lat.n_max}]",
            missing_min=n + 1,
            missing_max=n + 1,
        )
    return n + 1


def rho(lat, n):
    """Backward jump: n -> n - 1; rho(-inf_q) = -inf_q."""
    lat.check_index(n)
    if n is NEG_INF_Q:
        return NEG_INF_Q
    if n <= lat.n_min:
        raise WindowError(
            f"rho({n}) leaves the window [{lat.n_min}, {lat.n_max}]",
            missing_min=n - 1,
            missing_max=n - 1,
        )
    return n - 1


def mu(lat, n) -> float:
    """Graininess at index n: (q-1)*q**n on q^Z, 1 on Z, 0 at -inf_q."""
    lat.check_index(n)
    return lat.mu(n)


# ---------------------------------------------------------------------------
# derivative and integral


def q_derivative(f: GridFunction, n, derivative_at_zero=None) -> np.ndarray:
    """Forward difference quotient (f(q*t) - f(t)) / ((q-1)*t) at index n.

    At ``NEG_INF_Q`` the derivative is a limit the samples cannot supply;
    it must be passed in via ``derivative_at_zero`` or the call fails.
    """
    if n is NEG_INF_Q:
        if derivative_at_zero is None:
            raise UndefinedAtZeroError(
                "derivative at t = 0 is a limit; supply derivative_at_zero"
            )
        return np.atleast_1d(np.asarray(derivative_at_zero, dtype=float))
    lat = f.lattice
    lat.check_index(n, allow_ninf=False)
    if n >= lat.n_max:
        raise WindowError(
            f"q_derivative at {n} needs the successor {n + 1} outside the window",
            missing_min=n + 1,
            missing_max=n + 1,
        )
    return (f.value(n + 1) - f.value(n)) / lat.mu(n)


def mu_array(lat) -> np.ndarray:
    """Graininess at every window index, bitwise equal to per-point mu."""
    if isinstance(lat, QLattice):
        return (lat.q - 1.0) * qpow_range(lat.q, lat.n_min, lat.n_max)
    return np.ones(lat.size)


def q_derivative_function(f: GridFunction) -> GridFunction:
    """All forward difference quotients as a GridFunction on [n_min, n_max-1]."""
    lat = f.lattice
    if lat.size < 2:
        raise WindowError("window too short to differentiate")
    mus = mu_array(lat)[:-1]
    rows = (f.values[1:] - f.values[:-1]) / mus[:, None]
    if isinstance(lat, QLattice):
        sub = QLattice(lat.q, lat.n_min, lat.n_max - 1, lat.includes_zero)
    else:
        sub = ZLattice(lat.n_min, lat.n_max - 1, lat.includes_zero)
    return GridFunction(sub, rows)


def q_integral(f: GridFunction, a, b, return_tail: bool = False):
    """Delta integral over [q**a, q**b): sum of mu(q**n)*f(q**n), n in [a, b).

    ``a`` may be ``NEG_INF_Q`` on a lattice with ``includes_zero``: the sum
    then starts at ``n_min`` and a bound on the dropped tail below the
    window is reported, so ``return_tail=True`` is mandatory in that case.
    The tail bound is sum(mu) below the window (= q**n_min exactly) times
    the largest sampled |f|; it is a proxy that assumes |f| does not exceed
    its in-window supremum below the window.

    Returns the integral vector, or ``(integral, tail_bound)`` when
    ``return_tail`` is set.
    """
    lat = f.lattice
    if a is NEG_INF_Q:
        if not lat.includes_zero:
            raise WindowError(
                "lower bound -inf_q requires a lattice with includes_zero"
            )
        if isinstance(lat, ZLattice):
            raise WindowError(
                "sum of graininess diverges below any window of Z; "
                "-inf_q lower bound is only meaningful on q^Z"
            )
        if not return_tail:
            raise ValueError(
                "integral from -inf_q must report its tail bound; "
                "pass return_tail=True"
            )
        lo = lat.n_min
    else:
        lat.check_index(a, allow_ninf=False)
        lo = a
    lat.check_index(b, allow_ninf=False)
    if not (a is NEG_INF_Q) and a > b:
        raise ValueError(f"reversed bounds: a={a} > b={b}")

    if b > lo:
        block = f.values[lo - lat.n_min:b - lat.n_min]
        mus = mu_array(lat)[lo - lat.n_min:b - lat.n_min]
        acc = np.sum(mus[:, None] * block, axis=0)
    else:
        acc = np.zeros(f.dim)

    if a is NEG_INF_Q:
        sup_f = float(np.max(np.abs(f.values)))
        if f.zero_value is not None:
            sup_f = max(sup_f, float(np.max(np.abs(f.zero_value))))
        tail_bound = qpow(lat.q, lat.n_min) * sup_f
        return acc, tail_bound
    if return_tail:
        return acc, 0.0
    return acc


# ---------------------------------------------------------------------------
# scale exponential and the Gronwall bound


def _regressivity_factors(lat, p: GridFunction) -> np.ndarray:
    """1 + mu(n)*p(n) over the window; raises if any factor vanishes."""
    if p.dim != 1:
        raise ValueError("exponential coefficient p must be scalar")
    factors = np.empty(lat.size)
    for k, n in enumerate(lat.indices()):
        factors[k] = 1.0 + lat.mu(n) * p.values[k, 0]
        if factors[k] == 0.0:
            raise RegressivityError(
                f"1 + mu*p vanishes at index {n}; p is not regressive", index=n
            )
    return factors


def ts_exponential(lat, p: GridFunction, n: int, s: int) -> float:
    """Scale exponential e_p(n, s) = prod over [s, n) of (1 + mu*p).

    For n < s the reciprocal of the product over [n, s) is returned;
    e_p(n, n) = 1.  The coefficient must be regressive on the whole
    window.  Improper lower limits (-inf_q) are refused: use a finite
    lower index and account for the tail separately.
    """
    if n is NEG_INF_Q or s is NEG_INF_Q:
        raise WindowError(
            "ts_exponential endpoints must be finite indices; "
            "-inf_q limits are refused to keep truncation explicit"
        )
    if p.lattice != lat:
        raise ValueError("coefficient p must live on the given lattice")
    lat.check_index(n, allow_ninf=False)
    lat.check_index(s, allow_ninf=False)
    factors = _regressivity_factors(lat, p)
    lo, hi = (s, n) if n >= s else (n, s)
    acc = 1.0
    for u in range(lo, hi):
        acc *= factors[u - lat.n_min]
    return acc if n >= s else 1.0 / acc


@dataclass(frozen=True)
class GronwallReport:
    """Outcome of a Gronwall-bound check on a window.

    ``margins[k]`` is bound(n) - y(n) at the k-th window index (NaN where
    the check was skipped because the hypothesis failed at that index).
    """

    n_min: int
    n_max: int
    hypothesis_violations: tuple
    margins: np.ndarray
    bound: np.ndarray
    verdict: str

    @property
    def hypothesis_ok(self) -> bool:
        return len(self.hypothesis_violations) == 0


def gronwall_verify(y: GridFunction, p: GridFunction, f: GridFunction,
                    atol: float = TOL_ABS, rtol: float = TOL_REL) -> GronwallReport:
    """Check y(t) <= y(t0)*e_p(t, t0) + integral of e_p(t, sigma(tau))*f(tau).

    The hypothesis D_q y <= p*y + f is checked first on [n_min, n_max-1];
    indices violating it are reported and excluded from the conclusion
    scan.  ``p`` must be positively regressive (1 + mu*p > 0).  Verdict is
    PASS when the hypothesis is clean and the bound holds everywhere
    within tolerance, HYPOTHESIS_VIOLATED when the premise fails somewhere,
    FAIL otherwise.
    """
    lat = y.lattice
    if p.lattice != lat or f.lattice != lat:
        raise ValueError("y, p, f must share one lattice")
    if y.dim != 1 or p.dim != 1 or f.dim != 1:
        raise ValueError("gronwall_verify is a scalar check")

    factors = _regressivity_factors(lat, p)
    for k, n in enumerate(lat.indices()):
        if factors[k] <= 0.0:
            raise RegressivityError(
                f"1 + mu*p must stay positive; fails at index {n}", index=n
            )

    yv = y.values[:, 0]
    pv = p.values[:, 0]
    fv = f.values[:, 0]
    mus = np.array([lat.mu(n) for n in lat.indices()])

    violations = []
    for k in range(lat.size - 1):
        dq = (yv[k + 1] - yv[k]) / mus[k]
        rhs = pv[k] * yv[k] + fv[k]
        if dq > rhs + (atol + rtol * abs(rhs)):
            violations.append(lat.n_min + k)

    # Bound by its defining recurrence: B(n+1) = (1 + mu*p)*B(n) + mu*f(n).
    bound = np.empty(lat.size)
    bound[0] = yv[0]
    for k in range(lat.size - 1):
        bound[k + 1] = factors[k] * bound[k] + mus[k] * fv[k]

    margins = bound - yv
    skipped = set(violations)
    ok = True
    for k, n in enumerate(lat.indices()):
        if n in skipped:
            margins[k] = np.nan
            continue
        if margins[k] < -(atol + rtol * abs(bound[k])):
            ok = False

    if violations:
        verdict = "HYPOTHESIS_VIOLATED"
    elif ok:
        verdict = "PASS"
    else:
        verdict = "FAIL"
    return GronwallReport(
        n_min=lat.n_min,
        n_max=lat.n_max,
        hypothesis_violations=tuple(violations),
        margins=margins,
        bound=bound,
        verdict=verdict,
    )
