"""Almost periodic signal generators and the translation-set analyzer.

Signals are analyzed on the logarithmic index n (the exponent of q**n),
where a shift by the integer tau corresponds to multiplying the scale
point by q**tau.  Two difference tests are supported:

- ``unweighted``: sup over the window of |f(n+tau) - f(n)|,
- ``weighted``:   sup over the window of |q**tau * f(n+tau) - f(n)|,

matching the two almost-periodicity notions.  Every verdict produced
here is finite-window evidence, never a proof: suprema run over a stated
window and shifts over a stated range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import UndefinedAtZeroError, WindowError
from .lattice import qpow
from .logmap import LogSignal

DEFAULT_WINDOW = (-500, 500)
DEFAULT_TAU_RANGE = (-200, 200)
DEFAULT_EPSILONS = (0.5, 0.2, 0.1, 0.05)

MODES = ("unweighted", "weighted")


@dataclass(frozen=True)
class ApGenerator:
    """Closed-form quasi-periodic signal on the log index.

    Component i evaluates to
    ``scale * (offset_i + sum_k amp cos(freq * (n + shift) + phase))``.
    ``shift`` and ``scale`` accumulate integer translations and weighted
    rescalings exactly; freshly built generators have shift 0, scale 1.
    ``zero_limit`` optionally declares the value at the formal index
    -inf_q for generators that are not constant in n.
    """

    components: tuple
    shift: int = 0
    scale: float = 1.0
    zero_limit: np.ndarray | None = None

    def __post_init__(self):
        comps = []
        for offset, terms in self.components:
            terms = tuple((float(a), float(f), float(p)) for a, f, p in terms)
            for a, f, p in terms:
                if not (math.isfinite(a) and math.isfinite(f) and math.isfinite(p)):
                    raise ValueError("generator terms must be finite")
            comps.append((float(offset), terms))
        object.__setattr__(self, "components", tuple(comps))
        if self.zero_limit is not None:
            zl = np.asarray(self.zero_limit, dtype=float).reshape(-1)
            if zl.shape[0] != len(comps):
                raise ValueError("zero_limit dimension mismatch")
            zl.setflags(write=False)
            object.__setattr__(self, "zero_limit", zl)

    @classmethod
    def scalar(cls, offset=0.0, terms=(), zero_limit=None) -> "ApGenerator":
        zl = None if zero_limit is None else [zero_limit]
        return cls(components=((offset, tuple(terms)),), zero_limit=zl)

    @classmethod
    def constant(cls, values) -> "ApGenerator":
        values = np.atleast_1d(np.asarray(values, dtype=float))
        return cls(components=tuple((float(v), ()) for v in values))

    @property
    def dim(self) -> int:
        return len(self.components)

    def is_constant(self) -> bool:
        return all(f == 0.0 for _, terms in self.components for _, f, _ in terms)

    def sample(self, n_min: int, n_max: int) -> np.ndarray:
        """Evaluate on every integer of [n_min, n_max]; shape (count, dim)."""
        ns = np.arange(n_min + self.shift, n_max + self.shift + 1, dtype=float)
        out = np.empty((ns.shape[0], self.dim))
        for i, (offset, terms) in enumerate(self.components):
            col = np.full(ns.shape[0], offset)
            for amp, freq, phase in terms:
                col = col + amp * np.cos(freq * ns + phase)
            out[:, i] = col
        return self.scale * out

    def at(self, n: int) -> np.ndarray:
        return self.sample(n, n)[0]

    def value_at_ninf(self) -> np.ndarray:
        """Value at -inf_q: the constant value, or the declared limit."""
        if self.is_constant():
            return self.at(0)
        if self.zero_limit is not None:
            return self.scale * self.zero_limit
        raise UndefinedAtZeroError(
            "generator is not constant in n and carries no explicit zero limit"
        )

    def sup_bound(self) -> np.ndarray:
        """Per-component analytic bound |scale| * (|offset| + sum |amp|)."""
        return np.array(
            [abs(self.scale) * (abs(c) + sum(abs(a) for a, _, _ in terms))
             for c, terms in self.components]
        )

    def inf_bound(self) -> np.ndarray:
        """Per-component analytic lower bound of the value (not |value|)."""
        out = np.empty(self.dim)
        for i, (c, terms) in enumerate(self.components):
            spread = sum(abs(a) for a, _, _ in terms)
            lo, hi = c - spread, c + spread
            out[i] = self.scale * lo if self.scale >= 0 else self.scale * hi
        return out

    def as_signal(self, n_min: int, n_max: int) -> LogSignal:
        ninf = None
        try:
            ninf = self.value_at_ninf()
        except UndefinedAtZeroError:
            pass
        return LogSignal(n_min, n_max, self.sample(n_min, n_max), ninf_value=ninf)


def translate(f, alpha: int):
    """Shift operator: n -> f(n + alpha).

    Exact on generators (the integer shift is accumulated, never rounded
    into phases).  For ``LogSignal`` the shifted window must overlap the
    stored window.
    """
    if isinstance(f, ApGenerator):
        return ApGenerator(f.components, shift=f.shift + alpha, scale=f.scale,
                           zero_limit=f.zero_limit)
    if isinstance(f, LogSignal):
        lo, hi = f.n_min - alpha, f.n_max - alpha
        if hi < f.n_min or lo > f.n_max:
            raise WindowError(
                f"shift {alpha} leaves no overlap with [{f.n_min}, {f.n_max}]"
            )
        return LogSignal(lo, hi, np.array(f.values), ninf_value=f.ninf_value)
    raise TypeError(f"cannot translate {type(f).__name__}")


def weighted_translate(f, alpha: int, q: float):
    """Weighted shift: n -> q**alpha * f(n + alpha)."""
    if not q > 1.0:
        raise ValueError(f"base q must satisfy q > 1, got {q}")
    w = qpow(q, alpha)
    if isinstance(f, ApGenerator):
        zl = f.zero_limit
        return ApGenerator(f.components, shift=f.shift + alpha, scale=w * f.scale,
                           zero_limit=zl)
    if isinstance(f, LogSignal):
        shifted = translate(f, alpha)
        return LogSignal(
            shifted.n_min,
            shifted.n_max,
            w * shifted.values,
            ninf_value=None if f.ninf_value is None else w * f.ninf_value,
        )
    raise TypeError(f"cannot translate {type(f).__name__}")


def _eval_range(f, lo: int, hi: int) -> np.ndarray:
    """Samples of f over [lo, hi] as a (count, dim) array."""
    if isinstance(f, ApGenerator):
        return f.sample(lo, hi)
    if isinstance(f, LogSignal):
        if not f.covers(lo, hi):
            raise WindowError(
                f"stored samples [{f.n_min}, {f.n_max}] do not cover the "
                f"required range [{lo}, {hi}]",
                missing_min=lo if lo < f.n_min else f.n_max + 1,
                missing_max=f.n_min - 1 if lo < f.n_min else hi,
            )
        return np.asarray(f.slice(lo, hi).values)
    raise TypeError(f"cannot evaluate {type(f).__name__}")


@dataclass(frozen=True)
class TranslationReport:
    """Shift-set scan result for one epsilon.

    ``members`` are the shifts whose supremum difference stays strictly
    below epsilon; ``inclusion_length`` is the largest gap between
    consecutive members (inf when fewer than two members exist).
    ``sup_diffs[k]`` is the supremum for shift tau_min + k.
    """

    epsilon: float
    mode: str
    tau_min: int
    tau_max: int
    window_min: int
    window_max: int
    members: tuple
    inclusion_length: float
    sup_diffs: np.ndarray


def translation_set(f, epsilon: float, mode: str = "unweighted",
                    tau_range=DEFAULT_TAU_RANGE, window=DEFAULT_WINDOW,
                    q: float | None = None) -> TranslationReport:
    """Scan a shift range for epsilon-almost periods of f.

    A shift tau is a member when the supremum over the window of the
    mode's difference is strictly below epsilon.  Ties at exactly epsilon
    are excluded.  For ``LogSignal`` input the stored samples must cover
    window + tau_range.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    t0, t1 = int(tau_range[0]), int(tau_range[1])
    w0, w1 = int(window[0]), int(window[1])
    if t0 > t1 or w0 > w1:
        raise ValueError("tau_range and window must be nonempty")
    if mode == "weighted":
        if q is None:
            raise ValueError("weighted mode needs the base q")
        if not q > 1.0:
            raise ValueError(f"base q must satisfy q > 1, got {q}")

    lo, hi = min(w0 + t0, w0), max(w1 + t1, w1)
    values = np.ascontiguousarray(_eval_range(f, lo, hi))
    n_shifts = t1 - t0 + 1
    if mode == "weighted":
        weights = np.array([qpow(q, tau) for tau in range(t0, t1 + 1)])
    else:
        weights = np.ones(n_shifts)
    sups = np.empty(n_shifts)
    _kernels.translation_sup(values, w1 - w0 + 1, w0 - lo, w0 + t0 - lo,
                             weights, sups)

    members = tuple(t0 + k for k in range(n_shifts) if sups[k] < epsilon)
    if len(members) < 2:
        incl = math.inf
    else:
        incl = max(b - a for a, b in zip(members, members[1:]))
    return TranslationReport(
        epsilon=float(epsilon),
        mode=mode,
        tau_min=t0,
        tau_max=t1,
        window_min=w0,
        window_max=w1,
        members=members,
        inclusion_length=incl,
        sup_diffs=sups,
    )


def _relatively_dense(report: TranslationReport) -> bool:
    """Every length-l subinterval of the scanned range contains a member."""
    if not math.isfinite(report.inclusion_length):
        return False
    l = report.inclusion_length
    first, last = report.members[0], report.members[-1]
    return first <= report.tau_min + l and last >= report.tau_max - l


@dataclass(frozen=True)
class ApClassification:
    """Multi-epsilon almost-periodicity evidence.

    Verdict AP_EVIDENCE means every epsilon produced a relatively dense
    member set inside the scanned shift range; it is evidence on a finite
    window, not a proof over the whole scale.
    """

    reports: tuple
    relatively_dense: tuple
    verdict: str
    note: str


def ap_classify(f, epsilon_list: Sequence[float] = DEFAULT_EPSILONS,
                tau_range=DEFAULT_TAU_RANGE, window=DEFAULT_WINDOW,
                q: float | None = None, mode: str = "unweighted") -> ApClassification:
    """Run translation_set per epsilon and judge relative density."""
    eps = [float(e) for e in epsilon_list]
    if not eps or any(e <= 0 for e in eps):
        raise ValueError("epsilon_list must be nonempty and positive")
    if any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon_list must be strictly descending")
    reports = tuple(
        translation_set(f, e, mode=mode, tau_range=tau_range, window=window, q=q)
        for e in eps
    )
    dense = tuple(_relatively_dense(r) for r in reports)
    verdict = "AP_EVIDENCE" if all(dense) else "NO_EVIDENCE"
    note = (
        f"finite-window evidence: suprema over [{reports[0].window_min}, "
        f"{reports[0].window_max}], shifts in [{reports[0].tau_min}, "
        f"{reports[0].tau_max}]; not a proof"
    )
    return ApClassification(reports=reports, relatively_dense=dense,
                            verdict=verdict, note=note)


@dataclass(frozen=True)
class SplitReport:
    """Decay check of a residual against an almost periodic part."""

    trailing_sups: tuple
    residual_sup: float
    decay_tol: float
    verdict: str


def asymptotic_split_check(phi: LogSignal, p: ApGenerator,
                           decay_tol: float) -> SplitReport:
    """Check that phi - p decays along the window tail.

    The residual supremum is taken over the three consecutive thirds of
    phi's window; PASS requires the three sups to be nonincreasing with
    the final one below ``decay_tol``.
    """
    n = phi.size
    if n < 9:
        raise WindowError("need at least 9 samples to judge decay")
    if p.dim != phi.dim:
        raise ValueError("dimension mismatch between signal and generator")
    resid = np.abs(phi.values - p.sample(phi.n_min, phi.n_max))
    third = n // 3
    cuts = (n - 2 * third, n - third)
    sups = (
        float(np.max(resid[:cuts[0]])),
        float(np.max(resid[cuts[0]:cuts[1]])),
        float(np.max(resid[cuts[1]:])),
    )
    ok = sups[0] >= sups[1] >= sups[2] and sups[2] < decay_tol
    return SplitReport(
        trailing_sups=sups,
        residual_sup=float(np.max(resid)),
        decay_tol=float(decay_tol),
        verdict="PASS" if ok else "FAIL",
    )


# ---------------------------------------------------------------------------
# closure checks (finite forms of the sum/product/quotient/composition and
# uniform-limit stability of the almost periodic class)


def sup_translation_diff(f, tau: int, window, mode: str = "unweighted",
                         q: float | None = None) -> float:
    """Supremum over the window of the mode's shifted difference for one tau."""
    w0, w1 = int(window[0]), int(window[1])
    lo, hi = w0 + min(tau, 0), w1 + max(tau, 0)
    vals = _eval_range(f, lo, hi)
    base = vals[w0 - lo:w1 - lo + 1]
    shifted = vals[w0 + tau - lo:w1 + tau - lo + 1]
    if mode == "weighted":
        if q is None:
            raise ValueError("weighted mode needs the base q")
        weight = qpow(q, tau)
    else:
        weight = 1.0
    return float(np.max(np.abs(weight * shifted - base)))


@dataclass(frozen=True)
class ClosureCheck:
    """One closure implication instance: premise sups, conclusion sup, verdict."""

    name: str
    premise_ok: bool
    conclusion_sup: float
    conclusion_bound: float

    @property
    def holds(self) -> bool:
        return (not self.premise_ok) or self.conclusion_sup < self.conclusion_bound


def _pair_eval(f, g, tau, window):
    w0, w1 = int(window[0]), int(window[1])
    lo, hi = w0 + min(tau, 0), w1 + max(tau, 0)
    fv = _eval_range(f, lo, hi)[:, 0]
    gv = _eval_range(g, lo, hi)[:, 0]
    base = slice(w0 - lo, w1 - lo + 1)
    shifted = slice(w0 + tau - lo, w1 + tau - lo + 1)
    return fv, gv, base, shifted


def check_sum_closure(f, g, tau: int, epsilon: float, window) -> ClosureCheck:
    """tau in E(eps, f) and E(eps, g)  =>  tau in E(2*eps, f + g)."""
    fv, gv, base, shifted = _pair_eval(f, g, tau, window)
    premise = (
        float(np.max(np.abs(fv[shifted] - fv[base]))) < epsilon
        and float(np.max(np.abs(gv[shifted] - gv[base]))) < epsilon
    )
    s = fv + gv
    conc = float(np.max(np.abs(s[shifted] - s[base])))
    return ClosureCheck("sum", premise, conc, 2.0 * epsilon)


def check_product_closure(f: ApGenerator, g: ApGenerator, tau: int,
                          epsilon: float, window) -> ClosureCheck:
    """tau in E(eps, f) and E(eps, g)  =>  tau in E(eps*(Mf + Mg), f*g).

    Mf, Mg are the analytic generator bounds, so the implication is exact
    from the definitions.
    """
    if f.dim != 1 or g.dim != 1:
        raise ValueError("product closure is a scalar check")
    fv, gv, base, shifted = _pair_eval(f, g, tau, window)
    premise = (
        float(np.max(np.abs(fv[shifted] - fv[base]))) < epsilon
        and float(np.max(np.abs(gv[shifted] - gv[base]))) < epsilon
    )
    prod = fv * gv
    conc = float(np.max(np.abs(prod[shifted] - prod[base])))
    bound = epsilon * float(f.sup_bound()[0] + g.sup_bound()[0])
    return ClosureCheck("product", premise, conc, bound)


def check_quotient_closure(g, tau: int, epsilon: float, m_lower: float,
                           window) -> ClosureCheck:
    """tau in E(M^2*eps, g) and inf|g| >= M  =>  tau in E(eps, 1/g)."""
    gv, _, base, shifted = _pair_eval(g, g, tau, window)
    inf_g = min(float(np.min(np.abs(gv[base]))), float(np.min(np.abs(gv[shifted]))))
    premise = (
        float(np.max(np.abs(gv[shifted] - gv[base]))) < m_lower**2 * epsilon
        and inf_g >= m_lower
    )
    inv = 1.0 / gv
    conc = float(np.max(np.abs(inv[shifted] - inv[base])))
    return ClosureCheck("quotient", premise, conc, epsilon)


def check_composition_closure(f, outer: Callable, lip: float, tau: int,
                              epsilon: float, window) -> ClosureCheck:
    """tau in E(eps, f) and outer L-Lipschitz  =>  tau in E(L*eps, outer o f)."""
    fv, _, base, shifted = _pair_eval(f, f, tau, window)
    premise = float(np.max(np.abs(fv[shifted] - fv[base]))) < epsilon
    comp = np.asarray(outer(fv), dtype=float)
    conc = float(np.max(np.abs(comp[shifted] - comp[base])))
    return ClosureCheck("composition", premise, conc, lip * epsilon)


def check_uniform_limit_closure(f, f_approx, tau: int, epsilon: float,
                                window) -> ClosureCheck:
    """sup|f - f_approx| < eps/3 and tau in E(eps/3, f_approx)  =>  tau in E(eps, f)."""
    fv, av, base, shifted = _pair_eval(f, f_approx, tau, window)
    premise = (
        float(np.max(np.abs(fv - av))) < epsilon / 3.0
        and float(np.max(np.abs(av[shifted] - av[base]))) < epsilon / 3.0
    )
    conc = float(np.max(np.abs(fv[shifted] - fv[base])))
    return ClosureCheck("uniform_limit", premise, conc, epsilon)
