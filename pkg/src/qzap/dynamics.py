"""Forward stepping of delayed difference systems and Lyapunov-style checks.

Systems are stated in logarithmic-index form (unit graininess): the
recurrence x(n+1) = x(n) + F(n, x(n), delayed states) is exact, so the
only numerical error along a trajectory is floating rounding.  A
quantum-scale equation enters through ``logmap.transform_rhs``, which
supplies the (q-1)*q**n factor.

Norms are sup-norms (largest component magnitude) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, RegressivityError, WindowError
from .lattice import TOL_ABS, TOL_REL
from .logmap import LogSignal


@dataclass(frozen=True)
class IntDelay:
    """Bounded nonnegative-integer-valued delay sequence.

    ``const`` delays return one value everywhere; ``cycle`` delays repeat
    a finite pattern (periodic, hence almost periodic).  ``bound`` is the
    largest value the delay can take.
    """

    kind: str
    values: tuple

    def __post_init__(self):
        if self.kind not in ("const", "cycle"):
            raise ValueError(f"unknown delay kind {self.kind!r}")
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise ValueError("delay needs at least one value")
        if any(v < 0 for v in vals):
            raise ValueError("delays must be nonnegative")
        object.__setattr__(self, "values", vals)

    @classmethod
    def const(cls, value: int) -> "IntDelay":
        return cls("const", (value,))

    @classmethod
    def cycle(cls, values) -> "IntDelay":
        return cls("cycle", tuple(values))

    @property
    def bound(self) -> int:
        return max(self.values)

    def __call__(self, n: int) -> int:
        if self.kind == "const":
            return self.values[0]
        return self.values[n % len(self.values)]


@dataclass(frozen=True)
class DynamicSystem:
    """Right-hand side in log form plus its delay structure.

    ``rhs(n, x, delayed)`` receives the current index, the state vector
    and one delayed state vector per entry of ``delays``.  ``max_delay``
    bounds every delay value; it is derived from ``IntDelay`` bounds when
    possible and must be declared for plain callables.
    """

    dim: int
    rhs: Callable
    delays: tuple = ()
    max_delay: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "delays", tuple(self.delays))
        if self.max_delay is None:
            if all(hasattr(d, "bound") for d in self.delays):
                bound = max((d.bound for d in self.delays), default=0)
                object.__setattr__(self, "max_delay", bound)
            else:
                raise ValueError(
                    "max_delay must be declared when delays are plain callables"
                )
        if self.max_delay < 0:
            raise ValueError("max_delay must be nonnegative")

    def delayed_indices(self, n: int):
        out = []
        for d_fn in self.delays:
            d = int(d_fn(n))
            if d < 0 or d > self.max_delay:
                raise ValueError(
                    f"delay value {d} at index {n} violates the declared "
                    f"max_delay {self.max_delay}"
                )
            out.append(n - d)
        return out


def solve_forward(sys: DynamicSystem, history: LogSignal, n_end: int) -> LogSignal:
    """Step x(n+1) = x(n) + F(n, x(n), delayed) from the end of ``history``.

    ``history`` must cover [n0 - max_delay, n0] where n0 is its last
    index; the returned trajectory covers [history.n_min, n_end].  A
    delayed lookup before the history start or a non-finite state aborts
    with the offending index.
    """
    if history.dim != sys.dim:
        raise ValueError("history dimension does not match the system")
    n0 = history.n_max
    if n_end < n0:
        raise ValueError(f"n_end {n_end} precedes the history end {n0}")
    if history.n_min > n0 - sys.max_delay:
        raise WindowError(
            f"history must start at or before {n0 - sys.max_delay} to cover "
            f"max_delay {sys.max_delay}",
            missing_min=n0 - sys.max_delay,
            missing_max=history.n_min - 1,
        )
    offset = history.n_min
    vals = np.empty((n_end - offset + 1, sys.dim))
    vals[:history.size] = history.values
    for n in range(n0, n_end):
        x = vals[n - offset]
        delayed = []
        for m in sys.delayed_indices(n):
            if m < offset:
                raise WindowError(
                    f"delayed lookup at index {m} precedes the stored history "
                    f"start {offset}",
                    missing_min=m,
                    missing_max=offset - 1,
                )
            delayed.append(vals[m - offset])
        step = np.atleast_1d(np.asarray(sys.rhs(n, x, delayed), dtype=float))
        nxt = x + step
        if not np.all(np.isfinite(nxt)):
            raise DivergenceError(
                f"state became non-finite at index {n + 1}",
                first_bad_index=n + 1,
            )
        vals[n + 1 - offset] = nxt
    return LogSignal(offset, n_end, vals, ninf_value=history.ninf_value)


def trajectory_residual(sys: DynamicSystem, traj: LogSignal) -> float:
    """sup over checkable n of |traj(n+1) - traj(n) - F(n, ...)|.

    Checkable means every delayed lookup lands inside the stored window;
    the scan therefore starts max_delay past the window start.
    """
    start = traj.n_min + sys.max_delay
    if start >= traj.n_max:
        raise WindowError("trajectory too short to evaluate its residual")
    worst = 0.0
    for n in range(start, traj.n_max):
        delayed = [traj.value(m) for m in sys.delayed_indices(n)]
        step = np.atleast_1d(np.asarray(sys.rhs(n, traj.value(n), delayed),
                                        dtype=float))
        resid = np.max(np.abs(traj.value(n + 1) - traj.value(n) - step))
        worst = max(worst, float(resid))
    return worst


@dataclass(frozen=True)
class LyapunovSpec:
    """Candidate Lyapunov data for the product system x' = f(t,x), y' = f(t,y).

    ``V(n, x, y)`` must be nonnegative; ``wedge_a``/``wedge_b`` are the
    lower/upper comparison functions (zero at zero, increasing);
    ``lip_V`` the Lipschitz constant of V in (x, y); ``decay_c`` the
    claimed decay rate, which must keep -c positively regressive on the
    unit-graininess scale (c < 1).
    """

    V: Callable
    wedge_a: Callable
    wedge_b: Callable
    lip_V: float
    decay_c: float

    def __post_init__(self):
        if not self.lip_V > 0:
            raise ValueError("lip_V must be positive")
        if not self.decay_c > 0:
            raise ValueError("decay_c must be positive")


def dini_derivative_V(spec: LyapunovSpec, sys: DynamicSystem, n: int,
                      x, y) -> float:
    """One-step Dini derivative of V along the product system.

    On the unit-graininess scale every point is right-scattered, so the
    derivative is the plain quotient
    ``V(n+1, x+, y+) - V(n, x, y)`` with graininess 1.  For delayed
    systems the pair (x, y) is treated as a constant history: every
    delayed lookup evaluates to the current state.  This matches how the
    decay condition is used in contraction estimates and is exact for
    delay-free systems.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    delayed_x = [x] * len(sys.delays)
    delayed_y = [y] * len(sys.delays)
    x1 = x + np.atleast_1d(np.asarray(sys.rhs(n, x, delayed_x), dtype=float))
    y1 = y + np.atleast_1d(np.asarray(sys.rhs(n, y, delayed_y), dtype=float))
    return float(spec.V(n + 1, x1, y1) - spec.V(n, x, y))


_WEDGE_RADII = tuple(float(r) for r in np.logspace(-6, 2, 17))


@dataclass(frozen=True)
class LyapunovReport:
    """Violations found while sampling the three Lyapunov conditions."""

    checked: int
    violations: tuple
    verdict: str
    window: tuple | None = None


def lyapunov_verify(spec: LyapunovSpec, sys: DynamicSystem,
                    sample_states: Sequence, window=None,
                    atol: float = TOL_ABS, rtol: float = TOL_REL) -> LyapunovReport:
    """Sample-check the wedge, Lipschitz and decay conditions.

    ``sample_states`` is a sequence of (n, x, y) triples.  Condition (i)
    is additionally probed on a log-spaced radius grid for wedge shape
    (zero at zero, nondecreasing, a <= b).  Violations are reported as
    data, not raised; the verdict is PASS only when none were found.
    A claimed decay rate >= 1 is rejected outright: -c would not be
    positively regressive on the unit-graininess scale.
    """
    if spec.decay_c >= 1.0:
        raise RegressivityError(
            f"decay rate {spec.decay_c} is not positively regressive on a "
            "unit-graininess scale (needs c < 1)",
        )
    if not sample_states:
        raise ValueError("sample_states must be nonempty")

    tol = lambda ref: atol + rtol * abs(ref)
    violations = []

    # wedge shape on the radius grid
    a0, b0 = float(spec.wedge_a(0.0)), float(spec.wedge_b(0.0))
    if abs(a0) > atol or abs(b0) > atol:
        violations.append(("wedge_shape", 0.0, max(abs(a0), abs(b0))))
    prev_a = prev_b = 0.0
    for r in _WEDGE_RADII:
        ar, br = float(spec.wedge_a(r)), float(spec.wedge_b(r))
        if ar < prev_a - tol(ar) or br < prev_b - tol(br):
            violations.append(("wedge_shape", r, min(ar - prev_a, br - prev_b)))
        if ar > br + tol(br):
            violations.append(("wedge_shape", r, ar - br))
        prev_a, prev_b = ar, br

    samples = [(int(n), np.atleast_1d(np.asarray(x, dtype=float)),
                np.atleast_1d(np.asarray(y, dtype=float)))
               for n, x, y in sample_states]

    for n, x, y in samples:
        r = float(np.max(np.abs(x - y)))
        v = float(spec.V(n, x, y))
        lo, hi = float(spec.wedge_a(r)), float(spec.wedge_b(r))
        if v < lo - tol(lo) or v > hi + tol(hi):
            violations.append(("wedge", (n, r), min(v - lo, hi - v)))
        dv = dini_derivative_V(spec, sys, n, x, y)
        decay_bound = -spec.decay_c * v
        if dv > decay_bound + tol(decay_bound):
            violations.append(("decay", n, dv - decay_bound))

    # Lipschitz: compare consecutive sample pairs at a common index.
    for (n, x1, y1), (_, x2, y2) in zip(samples, samples[1:]):
        lhs = abs(float(spec.V(n, x1, y1)) - float(spec.V(n, x2, y2)))
        rhs = spec.lip_V * float(np.max(np.abs(x1 - x2)) + np.max(np.abs(y1 - y2)))
        if lhs > rhs + tol(rhs):
            violations.append(("lipschitz", n, lhs - rhs))

    return LyapunovReport(
        checked=len(samples),
        violations=tuple(violations),
        verdict="PASS" if not violations else "FAIL",
        window=None if window is None else (int(window[0]), int(window[1])),
    )


@dataclass(frozen=True)
class StabilityReport:
    """Per-perturbation distance traces and fitted geometric rates."""

    distances: tuple
    rates: tuple
    burn_in: int
    verdict: str
    window: tuple | None = None


def stability_probe(sys: DynamicSystem, reference: LogSignal,
                    perturbations: Sequence, window=None, burn_in: int = 10,
                    tol_resid: float = 1e-8,
                    floor: float | None = None) -> StabilityReport:
    """Measure how perturbed starts fall back onto a reference trajectory.

    The reference is first re-checked to actually solve the system
    (residual <= tol_resid, else ValueError).  Each perturbation vector
    is added to the whole initial history segment; the distance trace is
    the sup-norm gap per step.  Verdict CONTRACTING requires every trace
    to decrease strictly after ``burn_in`` steps until it reaches the
    rounding ``floor`` (by default a few ulp of the reference magnitude),
    below which the gap cannot shrink further.  The rate is the slope of
    a least-squares line through the above-floor log distances past
    burn-in.
    """
    resid = trajectory_residual(sys, reference)
    if resid > tol_resid:
        raise ValueError(
            f"reference is not a trajectory of the system: residual {resid:.3e} "
            f"> tol_resid {tol_resid:.3e}"
        )
    if floor is None:
        floor = 64.0 * np.spacing(max(1.0, reference.sup_norm()))
    n_hist = reference.n_min + sys.max_delay
    if window is not None:
        lo, hi = int(window[0]), int(window[1])
        if lo < n_hist or hi > reference.n_max:
            raise WindowError(
                f"window [{lo}, {hi}] not covered by the reference",
                missing_min=lo,
                missing_max=hi,
            )
    else:
        lo, hi = n_hist, reference.n_max

    history = reference.slice(reference.n_min, n_hist)
    traces, rates = [], []
    all_contracting = True
    for delta in perturbations:
        delta = np.atleast_1d(np.asarray(delta, dtype=float))
        pert_hist = LogSignal(history.n_min, history.n_max,
                              history.values + delta)
        traj = solve_forward(sys, pert_hist, reference.n_max)
        ns = np.arange(lo, hi + 1)
        dist = np.array(
            [float(np.max(np.abs(traj.value(n) - reference.value(n)))) for n in ns]
        )
        traces.append(dist)
        tail = dist[burn_in:] if burn_in < dist.shape[0] else dist[-1:]
        contracting = len(tail) >= 2 and all(
            b < a or b <= floor for a, b in zip(tail, tail[1:])
        )
        all_contracting = all_contracting and contracting
        above = tail > floor
        if np.count_nonzero(above) >= 2:
            xs = (ns[burn_in:] if burn_in < dist.shape[0] else ns[-1:])[above]
            slope = np.polyfit(xs, np.log(tail[above]), 1)[0]
            rates.append(float(np.exp(slope)))
        else:
            rates.append(float("nan"))

    return StabilityReport(
        distances=tuple(traces),
        rates=tuple(rates),
        burn_in=burn_in,
        verdict="CONTRACTING" if all_contracting else "NOT_CONTRACTING",
        window=(lo, hi),
    )
