"""High-order Hopfield networks on the quantum lattice.

The network lives on the unit-graininess scale after the logarithmic
transport; coefficients are the hatted ones (already carrying the
(q-1)*q**n factor) supplied as almost periodic generators.  The solution
operator convolves the coupling sum against the scalar decaying kernel
prod(1 - c_i) and is a strict sup-norm contraction whenever the
certificate inequalities hold; its fixed point is computed by Picard
iteration from the zero signal.

The improper past of the solution integral is truncated after
``tail_length`` steps with an explicit geometric bound, so every computed
quantity carries a stated truncation budget instead of a silent cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .apgen import ApGenerator
from .dynamics import IntDelay
from .errors import (
    InfeasibleCertificateError,
    ConvergenceError,
    RegressivityError,
    WindowError,
)
from .logmap import LogSignal, lower

DEFAULT_TAIL_TOL = 1e-12
_MAX_TAIL = 100_000


@dataclass(frozen=True)
class Activation:
    """Activation pair (f, g) with its declared Lipschitz/bound data.

    ``lip_f``/``lip_g`` are Lipschitz constants, ``bound_g`` the global
    bound of |g|, ``f0``/``g0`` the values at zero.  ``custom_table``
    activations interpolate piecewise-linearly between knots and clamp
    beyond the first/last knot (which keeps them bounded and Lipschitz).
    """

    kind: str
    lip_f: float
    lip_g: float
    bound_g: float
    f0: float
    g0: float
    table: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("tanh", "custom_table"):
            raise ValueError(f"unknown activation kind {self.kind!r}")
        if self.kind == "custom_table" and self.table is None:
            raise ValueError("custom_table activation needs its table")

    @classmethod
    def tanh(cls) -> "Activation":
        return cls("tanh", lip_f=1.0, lip_g=1.0, bound_g=1.0, f0=0.0, g0=0.0)

    @classmethod
    def from_table(cls, xs, f_values, g_values) -> "Activation":
        xs = tuple(float(x) for x in xs)
        fv = tuple(float(v) for v in f_values)
        gv = tuple(float(v) for v in g_values)
        if len(xs) < 2 or len(fv) != len(xs) or len(gv) != len(xs):
            raise ValueError("table needs matching xs/f/g of length >= 2")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("table xs must be strictly increasing")
        dx = np.diff(xs)
        lip_f = float(np.max(np.abs(np.diff(fv) / dx)))
        lip_g = float(np.max(np.abs(np.diff(gv) / dx)))
        return cls(
            "custom_table",
            lip_f=lip_f,
            lip_g=lip_g,
            bound_g=float(np.max(np.abs(gv))),
            f0=float(np.interp(0.0, xs, fv)),
            g0=float(np.interp(0.0, xs, gv)),
            table=(xs, fv, gv),
        )

    def apply_f(self, u):
        if self.kind == "tanh":
            return np.tanh(u)
        xs, fv, _ = self.table
        return np.interp(u, xs, fv)

    def apply_g(self, u):
        if self.kind == "tanh":
            return np.tanh(u)
        xs, _, gv = self.table
        return np.interp(u, xs, gv)


def spot_check_activation(act: Activation, rng: np.random.Generator,
                          samples: int = 64, radius: float = 10.0):
    """Sampled consistency check of the declared Lipschitz/bound data.

    Returns a list of (condition, detail) violation tuples; empty when
    the declared constants survive the sampled pairs.
    """
    tol = 1e-12
    out = []
    us = rng.uniform(-radius, radius, size=samples)
    vs = rng.uniform(-radius, radius, size=samples)
    fu, fv = act.apply_f(us), act.apply_f(vs)
    gu, gv = act.apply_g(us), act.apply_g(vs)
    lip_f_hat = np.abs(fu - fv) - act.lip_f * np.abs(us - vs)
    lip_g_hat = np.abs(gu - gv) - act.lip_g * np.abs(us - vs)
    if np.any(lip_f_hat > tol):
        out.append(("lipschitz_f", float(np.max(lip_f_hat))))
    if np.any(lip_g_hat > tol):
        out.append(("lipschitz_g", float(np.max(lip_g_hat))))
    over = np.abs(gu) - act.bound_g
    if np.any(over > tol):
        out.append(("bound_g", float(np.max(over))))
    if abs(float(act.apply_f(0.0)) - act.f0) > tol:
        out.append(("f0", float(act.apply_f(0.0))))
    if abs(float(act.apply_g(0.0)) - act.g0) > tol:
        out.append(("g0", float(act.apply_g(0.0))))
    return out


def _check_scalar_grid(name, grids, shape):
    """Validate a nested tuple structure of scalar generators."""
    def walk(node, depth, idx):
        if depth == 0:
            if not isinstance(node, ApGenerator) or node.dim != 1:
                raise ValueError(f"{name}{list(idx)} must be a scalar generator")
            return node
        if len(node) != shape[len(idx)]:
            raise ValueError(
                f"{name} must have extent {shape[len(idx)]} at depth {len(idx)}"
            )
        return tuple(walk(sub, depth - 1, idx + (k,)) for k, sub in enumerate(node))

    return walk(tuple(grids), len(shape), ())


@dataclass(frozen=True)
class HopfieldSpec:
    """Network data: hatted coefficients, activations and delays.

    ``c_hat``/``I_hat`` are length-m tuples of scalar generators,
    ``a_hat`` is m x m and ``b_hat`` m x m x m.  ``gamma`` (m x m) and
    ``omega``/``v_delays`` (m x m x m) are ``IntDelay`` instances.  All
    coefficient generators are almost periodic by construction (finite
    trig sums); delays are periodic sequences.
    """

    m: int
    q: float
    c_hat: tuple
    a_hat: tuple
    b_hat: tuple
    I_hat: tuple
    activations: tuple
    gamma: tuple
    omega: tuple
    v_delays: tuple

    def __post_init__(self):
        m = self.m
        if m < 1:
            raise ValueError("need at least one neuron")
        if not self.q > 1.0:
            raise ValueError(f"base q must satisfy q > 1, got {self.q}")
        object.__setattr__(self, "c_hat", _check_scalar_grid("c_hat", self.c_hat, (m,)))
        object.__setattr__(self, "a_hat", _check_scalar_grid("a_hat", self.a_hat, (m, m)))
        object.__setattr__(self, "b_hat", _check_scalar_grid("b_hat", self.b_hat, (m, m, m)))
        object.__setattr__(self, "I_hat", _check_scalar_grid("I_hat", self.I_hat, (m,)))
        acts = tuple(self.activations)
        if len(acts) != m or not all(isinstance(a, Activation) for a in acts):
            raise ValueError("activations must be m Activation instances")
        object.__setattr__(self, "activations", acts)

        def check_delays(name, node, depth):
            if depth == 0:
                if not isinstance(node, IntDelay):
                    raise ValueError(f"{name} entries must be IntDelay instances")
                return node
            node = tuple(node)
            if len(node) != m:
                raise ValueError(f"{name} must have extent {m}")
            return tuple(check_delays(name, sub, depth - 1) for sub in node)

        object.__setattr__(self, "gamma", check_delays("gamma", self.gamma, 2))
        object.__setattr__(self, "omega", check_delays("omega", self.omega, 3))
        object.__setattr__(self, "v_delays", check_delays("v_delays", self.v_delays, 3))

    @property
    def max_delay(self) -> int:
        bounds = [0]
        for row in self.gamma:
            bounds.extend(d.bound for d in row)
        for plane in (self.omega, self.v_delays):
            for row in plane:
                for col in row:
                    bounds.extend(d.bound for d in col)
        return max(bounds)

    def validate_activations(self, seed: int = 0, samples: int = 64,
                             radius: float = 10.0):
        rng = np.random.default_rng(seed)
        problems = []
        for j, act in enumerate(self.activations):
            for cond, detail in spot_check_activation(act, rng, samples, radius):
                problems.append((j, cond, detail))
        return problems


def no_delays(m: int):
    """Zero-delay structure (gamma, omega, v) for an m-neuron spec."""
    zero = IntDelay.const(0)
    gamma = tuple(tuple(zero for _ in range(m)) for _ in range(m))
    cube = tuple(
        tuple(tuple(zero for _ in range(m)) for _ in range(m)) for _ in range(m)
    )
    return gamma, cube, cube


@dataclass(frozen=True)
class ContractionCertificate:
    """Analytic constants behind the two contraction inequalities.

    Coefficient sups/infs come from generator amplitudes, so all bounds
    are window-independent; the window minimum of c is kept separately
    and used only to size the truncation tail.  ``rho`` is the measured
    contraction ratio max(eta_bar) / min(c_minus).
    """

    r0: float
    window: tuple
    c_minus: np.ndarray
    c_plus: np.ndarray
    c_window_min: np.ndarray
    c_tail_inf: np.ndarray
    a_plus: np.ndarray
    b_plus: np.ndarray
    I_plus: np.ndarray
    eta: np.ndarray
    eta_bar: np.ndarray
    L: float
    rho: float
    h4_ball: bool
    h4_contraction: bool

    @property
    def feasible(self) -> bool:
        return self.h4_ball and self.h4_contraction

    @property
    def g_bound(self) -> np.ndarray:
        """Analytic bound of the coupling sum including the input term."""
        return self.eta + self.I_plus


def certificate(spec: HopfieldSpec, r0: float, window,
                seed: int = 0) -> ContractionCertificate:
    """Build the contraction certificate for ball radius r0.

    Checks positive regressivity first (analytic inf of each c above 0
    and 1 - c positive on the window), then evaluates

        eta_i     = sum_j [a+_ij (|f_j(0)| + lip_f_j r0)
                    + (|g_j(0)| + lip_g_j r0) sum_l b+_ijl (|g_l(0)| + lip_g_l r0)]
        eta_bar_i = sum_j a+_ij lip_f_j
                    + sum_jl b+_ijl (N_l lip_g_j + N_j lip_g_l)
        L         = max_i I+_i / c-_i

    and the two verdicts max(eta_i/c-_i) + L <= r0 and
    max(eta_bar) < min(c-).
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    w0, w1 = int(window[0]), int(window[1])
    if w0 > w1:
        raise ValueError("empty window")
    problems = spec.validate_activations(seed=seed)
    if problems:
        raise ValueError(f"activation spot checks failed: {problems}")

    m = spec.m
    c_minus = np.empty(m)
    c_plus = np.empty(m)
    c_window_min = np.empty(m)
    for i in range(m):
        gen = spec.c_hat[i]
        c_minus[i] = gen.inf_bound()[0]
        c_plus[i] = gen.sup_bound()[0]
        if c_minus[i] <= 0.0:
            raise RegressivityError(
                f"inf c_hat[{i}] = {c_minus[i]} is not positive", component=i
            )
        cw = gen.sample(w0, w1)[:, 0]
        bad = np.nonzero(1.0 - cw <= 0.0)[0]
        if bad.size:
            n_bad = w0 + int(bad[0])
            raise RegressivityError(
                f"1 - c_hat[{i}](n) <= 0 at n = {n_bad}; -c is not positively "
                "regressive on the window",
                index=n_bad,
                component=i,
            )
        c_window_min[i] = float(np.min(cw))
    c_tail_inf = np.maximum(c_minus, c_window_min)

    a_plus = np.array([[spec.a_hat[i][j].sup_bound()[0] for j in range(m)]
                       for i in range(m)])
    b_plus = np.array([[[spec.b_hat[i][j][l].sup_bound()[0] for l in range(m)]
                        for j in range(m)] for i in range(m)])
    I_plus = np.array([spec.I_hat[i].sup_bound()[0] for i in range(m)])

    lip_f = np.array([a.lip_f for a in spec.activations])
    lip_g = np.array([a.lip_g for a in spec.activations])
    bound_g = np.array([a.bound_g for a in spec.activations])
    f0 = np.array([abs(a.f0) for a in spec.activations])
    g0 = np.array([abs(a.g0) for a in spec.activations])

    fr = f0 + lip_f * r0
    gr = g0 + lip_g * r0
    # pair weight for the second-order terms: N_l lip_g_j + N_j lip_g_l
    pair = np.outer(lip_g, bound_g) + np.outer(bound_g, lip_g)
    eta = np.empty(m)
    eta_bar = np.empty(m)
    for i in range(m):
        eta[i] = float(np.sum(a_plus[i] * fr) + gr @ (b_plus[i] @ gr))
        eta_bar[i] = float(np.sum(a_plus[i] * lip_f) + np.sum(b_plus[i] * pair))

    L = float(np.max(I_plus / c_minus))
    rho = float(np.max(eta_bar) / np.min(c_minus))
    h4_ball = bool(np.max(eta / c_minus) + L <= r0)
    h4_contraction = bool(np.max(eta_bar) < np.min(c_minus))
    return ContractionCertificate(
        r0=float(r0),
        window=(w0, w1),
        c_minus=c_minus,
        c_plus=c_plus,
        c_window_min=c_window_min,
        c_tail_inf=c_tail_inf,
        a_plus=a_plus,
        b_plus=b_plus,
        I_plus=I_plus,
        eta=eta,
        eta_bar=eta_bar,
        L=L,
        rho=rho,
        h4_ball=h4_ball,
        h4_contraction=h4_contraction,
    )


def feasible_r0_interval(spec: HopfieldSpec, window):
    """Solve the ball inequality for r0 (it is quadratic in r0).

    Returns (lo, hi) with hi possibly inf, or None when no r0 > 0 works
    (including the case where the r0-independent contraction inequality
    already fails).
    """
    probe = certificate(spec, 1.0, window)
    if not probe.h4_contraction:
        return None
    m = spec.m
    lip_f = np.array([a.lip_f for a in spec.activations])
    lip_g = np.array([a.lip_g for a in spec.activations])
    f0 = np.array([abs(a.f0) for a in spec.activations])
    g0 = np.array([abs(a.g0) for a in spec.activations])

    lo_all, hi_all = 0.0, math.inf
    for i in range(m):
        # eta_i(r) = P + Q r + R r^2
        P = float(np.sum(probe.a_plus[i] * f0) + g0 @ probe.b_plus[i] @ g0)
        Q = float(np.sum(probe.a_plus[i] * lip_f)
                  + lip_g @ probe.b_plus[i] @ g0 + g0 @ probe.b_plus[i] @ lip_g)
        R = float(lip_g @ probe.b_plus[i] @ lip_g)
        c = float(probe.c_minus[i])
        # eta_i(r)/c + L <= r  <=>  R r^2 + (Q - c) r + (P + c L) <= 0
        a2, a1, a0 = R, Q - c, P + c * probe.L
        if a2 == 0.0:
            if a1 < 0.0:
                lo_all = max(lo_all, a0 / -a1)
            elif a0 > 0.0:
                return None
            continue
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc < 0.0:
            return None
        root = math.sqrt(disc)
        lo_all = max(lo_all, (-a1 - root) / (2.0 * a2))
        hi_all = min(hi_all, (-a1 + root) / (2.0 * a2))
    if hi_all < lo_all or hi_all <= 0.0:
        return None
    return (max(lo_all, 0.0), hi_all)


def tail_length(cert: ContractionCertificate, tail_tol: float) -> np.ndarray:
    """Per-neuron truncation depth making the dropped tail <= tail_tol.

    The dropped past is bounded by g_bound * (1-c)**T / c with c the
    tail inf estimate, giving T = ceil(log(tail_tol*c/g_bound)/log(1-c)).
    """
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    out = np.zeros(cert.c_minus.shape[0], dtype=int)
    for i in range(out.shape[0]):
        gb = cert.g_bound[i]
        if gb == 0.0:
            continue
        c = cert.c_tail_inf[i]
        x = tail_tol * c / gb
        if x >= 1.0:
            out[i] = 1
            continue
        decay = 1.0 - c
        if decay <= 0.0:
            out[i] = 1
            continue
        t = math.ceil(math.log(x) / math.log(decay))
        out[i] = max(1, t)
        if out[i] > _MAX_TAIL:
            raise ValueError(
                f"truncation depth {out[i]} for neuron {i} is impractical; "
                "raise tail_tol or the decay rates"
            )
    return out


def _delayed_column(phi: LogSignal, j: int, delay: IntDelay,
                    ns: np.ndarray) -> np.ndarray:
    d = np.fromiter((delay(int(n)) for n in ns), dtype=np.int64, count=ns.shape[0])
    rows = ns - d - phi.n_min
    if rows.min() < 0 or rows.max() >= phi.size:
        need = int((ns - d).min())
        raise WindowError(
            f"delayed state lookup needs index {need}; stored signal starts "
            f"at {phi.n_min}",
            missing_min=need,
            missing_max=phi.n_min - 1,
        )
    return phi.values[rows, j]


def _coupling_sum(spec: HopfieldSpec, phi: LogSignal, s_lo: int,
                  s_hi: int) -> np.ndarray:
    """G_i(s) over [s_lo, s_hi]: couplings of delayed activations plus input."""
    m = spec.m
    ns = np.arange(s_lo, s_hi + 1, dtype=np.int64)
    out = np.empty((ns.shape[0], m))
    for i in range(m):
        acc = spec.I_hat[i].sample(s_lo, s_hi)[:, 0].copy()
        for j in range(m):
            a_vals = spec.a_hat[i][j].sample(s_lo, s_hi)[:, 0]
            if np.any(a_vals != 0.0):
                u = _delayed_column(phi, j, spec.gamma[i][j], ns)
                acc += a_vals * spec.activations[j].apply_f(u)
            for l in range(m):
                b_vals = spec.b_hat[i][j][l].sample(s_lo, s_hi)[:, 0]
                if np.any(b_vals != 0.0):
                    uj = _delayed_column(phi, j, spec.omega[i][j][l], ns)
                    ul = _delayed_column(phi, l, spec.v_delays[i][j][l], ns)
                    acc += (b_vals * spec.activations[j].apply_g(uj)
                            * spec.activations[l].apply_g(ul))
        out[:, i] = acc
    return out


def _phi_core(spec: HopfieldSpec, cert: ContractionCertificate,
              tails: np.ndarray, phi: LogSignal, window) -> LogSignal:
    """Apply the truncated solution operator on the requested window."""
    w0, w1 = int(window[0]), int(window[1])
    t_max = int(np.max(tails)) if tails.size else 0
    d_max = spec.max_delay
    need_lo = w0 - t_max - d_max
    if t_max > 0 and not phi.covers(need_lo, w1 - 1):
        raise WindowError(
            f"operator input must cover [{need_lo}, {w1 - 1}]; stored window "
            f"is [{phi.n_min}, {phi.n_max}]",
            missing_min=need_lo,
            missing_max=phi.n_min - 1,
        )
    n_out = w1 - w0 + 1
    out = np.zeros((n_out, spec.m))
    if t_max == 0:
        return LogSignal(w0, w1, out)

    s_lo, s_hi = w0 - t_max, w1 - 1
    g_all = _coupling_sum(spec, phi, s_lo, s_hi)
    for i in range(spec.m):
        t_i = int(tails[i])
        if t_i == 0:
            continue
        c_vals = spec.c_hat[i].sample(s_lo, s_hi)[:, 0]
        decay = 1.0 - c_vals
        bad = np.nonzero(decay <= 0.0)[0]
        if bad.size:
            n_bad = s_lo + int(bad[0])
            raise RegressivityError(
                f"1 - c_hat[{i}](n) <= 0 at n = {n_bad}",
                index=n_bad,
                component=i,
            )
        offset = t_max - t_i
        col = np.empty(n_out)
        _kernels.trunc_conv(
            np.ascontiguousarray(decay[offset:]),
            np.ascontiguousarray(g_all[offset:, i]),
            t_i,
            col,
        )
        out[:, i] = col
    return LogSignal(w0, w1, out)


def phi_apply(phi: LogSignal, spec: HopfieldSpec, r0: float, window,
              tail_tol: float = DEFAULT_TAIL_TOL) -> LogSignal:
    """One application of the solution operator to a signal in the r0 ball.

    Output index n receives sum over s in [n - T, n) of
    prod(1 - c_i over (s, n)) * G_i(s) with G the delayed coupling sum;
    T is sized so the dropped past stays below ``tail_tol``.  The input
    must cover the window extended left by T + max_delay.
    """
    cert = certificate(spec, r0, window)
    if not cert.feasible:
        raise InfeasibleCertificateError(
            "certificate inequalities fail; the operator is not a verified "
            "contraction",
            certificate=cert,
        )
    slack = r0 * 1e-12 + 2.0 * tail_tol
    if phi.dim != spec.m:
        raise ValueError("signal dimension does not match the network")
    if phi.sup_norm() > r0 + slack:
        raise ValueError(
            f"input leaves the ball: sup {phi.sup_norm():.6g} > r0 {r0:.6g}"
        )
    tails = tail_length(cert, tail_tol)
    return _phi_core(spec, cert, tails, phi, window)


@dataclass(frozen=True)
class ConvergenceLog:
    """Per-iteration sup deltas and the constants governing them."""

    deltas: tuple
    iterations: int
    converged: bool
    rho: float
    tails: tuple
    max_delay: int
    tol: float
    tail_tol: float
    residual_constant: float
    residual_bound: float


def picard_solve(spec: HopfieldSpec, r0: float, tol: float, max_iter: int,
                 window, tail_tol: float = DEFAULT_TAIL_TOL,
                 start: float | np.ndarray = 0.0):
    """Iterate the solution operator to its fixed point on a window.

    Starts from the constant signal ``start`` (zero by default, always in
    the ball) and stops when consecutive iterates differ by less than
    ``tol`` in sup norm over the requested window.  Iterates are kept on
    windows that shrink from the left by T + max_delay per application,
    so every value returned is an honest evaluation of the truncated
    operator.  Returns ``(solution, log)`` with the solution covering
    [window_lo - (T + max_delay), window_hi].
    """
    cert = certificate(spec, r0, window)
    if not cert.feasible:
        raise InfeasibleCertificateError(
            "certificate inequalities fail; no contraction budget",
            certificate=cert,
        )
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    w0, w1 = int(window[0]), int(window[1])
    tails = tail_length(cert, tail_tol)
    step = int(np.max(tails)) + spec.max_delay if tails.size else spec.max_delay
    rho = cert.rho

    start_vec = np.broadcast_to(
        np.atleast_1d(np.asarray(start, dtype=float)), (spec.m,)
    )
    if np.max(np.abs(start_vec)) > r0:
        raise ValueError("start value leaves the ball")

    if rho == 0.0:
        budget = 2
    else:
        est = math.ceil(math.log(tol / (2.0 * r0)) / math.log(rho)) if tol < 2.0 * r0 else 1
        budget = max(2, est + 4)
    budget = min(budget, max_iter)

    # Window of iterate k: left edge recedes enough that even the last
    # allowed application still covers the requested window plus margin.
    def win_lo(k):
        return w0 - (budget + 1 - k) * step

    current = LogSignal(
        win_lo(0), w1,
        np.tile(start_vec, (w1 - win_lo(0) + 1, 1)),
    )
    deltas = []
    c_const = 2.0 + float(np.max(cert.c_plus)) + float(np.max(cert.eta_bar))
    converged = False
    for k in range(budget):
        nxt = _phi_core(spec, cert, tails, current, (win_lo(k + 1), w1))
        diff = np.abs(
            nxt.slice(w0, w1).values - current.slice(w0, w1).values
        )
        delta = float(np.max(diff))
        deltas.append(delta)
        current = nxt
        if delta < tol:
            converged = True
            break

    resid_bound = tail_tol + (
        c_const * rho * tol / (1.0 - rho) if rho < 1.0 else math.inf
    )
    log = ConvergenceLog(
        deltas=tuple(deltas),
        iterations=len(deltas),
        converged=converged,
        rho=rho,
        tails=tuple(int(t) for t in tails),
        max_delay=spec.max_delay,
        tol=tol,
        tail_tol=tail_tol,
        residual_constant=c_const,
        residual_bound=resid_bound,
    )
    if not converged:
        raise ConvergenceError(
            f"no convergence after {len(deltas)} iterations "
            f"(last delta {deltas[-1]:.3e}, tol {tol:.3e})",
            log=log,
        )
    solution = current.slice(w0 - step, w1)
    return solution, log


def residual(sol: LogSignal, spec: HopfieldSpec, window) -> float:
    """sup over i, n of |delta sol_i(n) - rhs_i(n)| along the window.

    rhs is -c_i(n) sol_i(n) plus the delayed coupling sum; the solution
    must cover the window plus max_delay history on the left.
    """
    w0, w1 = int(window[0]), int(window[1])
    if sol.dim != spec.m:
        raise ValueError("solution dimension does not match the network")
    if not sol.covers(w0 - spec.max_delay, w1):
        raise WindowError(
            f"solution must cover [{w0 - spec.max_delay}, {w1}]",
            missing_min=w0 - spec.max_delay,
            missing_max=w1,
        )
    g_all = _coupling_sum(spec, sol, w0, w1 - 1)
    worst = 0.0
    vals = sol.slice(w0, w1).values
    for i in range(spec.m):
        c_vals = spec.c_hat[i].sample(w0, w1 - 1)[:, 0]
        rhs = -c_vals * vals[:-1, i] + g_all[:, i]
        lhs = vals[1:, i] - vals[:-1, i]
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def back_to_quantum(sol: LogSignal, q: float):
    """Place a log-scale solution back on the quantum lattice of base q."""
    return lower(sol, q)


def as_dynamic_system(spec: HopfieldSpec):
    """The network as a steppable system (for simulation and probing).

    The delay list is ordered gamma (i, j), then omega (i, j, l), then the
    second-order v delays; the right-hand side picks the matching delayed
    component per term.
    """
    from .dynamics import DynamicSystem

    m = spec.m
    delays = []
    gamma_idx = {}
    for i in range(m):
        for j in range(m):
            gamma_idx[(i, j)] = len(delays)
            delays.append(spec.gamma[i][j])
    omega_idx = {}
    v_idx = {}
    for grid, index in ((spec.omega, omega_idx), (spec.v_delays, v_idx)):
        for i in range(m):
            for j in range(m):
                for l in range(m):
                    index[(i, j, l)] = len(delays)
                    delays.append(grid[i][j][l])

    def rhs(n, x, delayed):
        out = np.empty(m)
        for i in range(m):
            acc = -spec.c_hat[i].at(n)[0] * x[i] + spec.I_hat[i].at(n)[0]
            for j in range(m):
                aij = spec.a_hat[i][j].at(n)[0]
                if aij != 0.0:
                    u = delayed[gamma_idx[(i, j)]][j]
                    acc += aij * float(spec.activations[j].apply_f(u))
                for l in range(m):
                    bijl = spec.b_hat[i][j][l].at(n)[0]
                    if bijl != 0.0:
                        uj = delayed[omega_idx[(i, j, l)]][j]
                        ul = delayed[v_idx[(i, j, l)]][l]
                        acc += (bijl * float(spec.activations[j].apply_g(uj))
                                * float(spec.activations[l].apply_g(ul)))
            out[i] = acc
        return out

    return DynamicSystem(dim=m, rhs=rhs, delays=tuple(delays))
