"""Density evolution on the BEC for LDPC, IRA and ARA ensembles.

Iteration counting starts at l = 0 and "iterations to target" follows the
smallest-l-with-P_b^(l-1)<=target convention, with P_b^(-1) taken as the
pre-decoding bit erasure probability (p for transmitted information bits,
1 for punctured ones).
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .degree import (
    ARA_SYSTEMATIC,
    IRA_NONSYSTEMATIC,
    IRA_SYSTEMATIC,
    LDPC,
    edge_to_node,
)

TARGET_REACHED = "target_reached"
FIXED_POINT = "fixed_point"
ITERATION_CAP = "iteration_cap"

# a fixed point is declared only after this many consecutive sub-tolerance
# moves, to avoid mistaking a slow near-threshold plateau for convergence
FP_STREAK = 3


@dataclass(frozen=True)
class DEConfig:
    p: float
    target_pb: float = 1e-8
    max_iter: int = 50_000
    fp_tol: float = 1e-12

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p {self.p} outside [0,1]")
        if not (0.0 <= self.target_pb <= 1.0):
            raise ValueError(f"target_pb {self.target_pb} outside [0,1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.fp_tol <= 0:
            raise ValueError("fp_tol must be > 0")


class ARAState(NamedTuple):
    """The six message-erasure probabilities of the ARA layered decoder."""

    x0: float
    x1: float
    x2: float
    x3: float
    x4: float
    x5: float


ARA_ALL_ONES = ARAState(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True, eq=False)
class DETrajectory:
    """Per-iteration DE state sequence plus the target-hit bookkeeping.

    states has shape (T,) for one-dimensional recursions and (T, 6) for the
    full ARA system; row l is the state at iteration l.
    """

    states: np.ndarray
    pb_per_iter: np.ndarray
    iterations_to_target: int | None
    terminal: str
    fixed_point_target: float | None

    def __len__(self):
        return len(self.pb_per_iter)


def _drive(initial, step, pb_of, cfg, prior_pb):
    """Shared DE loop: record states, stop on target / fixed point / cap."""
    states = []
    pbs = []
    iterations = None
    terminal = ITERATION_CAP
    if prior_pb <= cfg.target_pb:
        iterations = 0
        terminal = TARGET_REACHED
    state = initial
    streak = 0
    for l in range(cfg.max_iter):
        states.append(state)
        pb = pb_of(state)
        pbs.append(pb)
        if iterations is None and pb <= cfg.target_pb:
            iterations = l + 1
            terminal = TARGET_REACHED
        if iterations is not None:
            break
        if l > 0:
            diff = _supdiff(state, states[-2])
            streak = streak + 1 if diff < cfg.fp_tol else 0
            if streak >= FP_STREAK:
                terminal = FIXED_POINT
                break
        state = step(state)
    return states, np.array(pbs), iterations, terminal


def _supdiff(a, b):
    if isinstance(a, tuple):
        return max(abs(x - y) for x, y in zip(a, b))
    return abs(a - b)


# ---------------------------------------------------------------------------
# LDPC


def ldpc_de_step(lam, rho, p, x):
    """One DE update x -> p lambda(1 - rho(1-x))."""
    return p * lam(1.0 - rho(1.0 - x))


def ldpc_bit_erasure(L, rho, p, x):
    """Bit erasure probability p L(1 - rho(1-x)) at message erasure x."""
    return p * L(1.0 - rho(1.0 - x))


def ldpc_de_run(lam, rho, cfg):
    L = edge_to_node(lam)
    p = cfg.p
    states, pbs, iters, terminal = _drive(
        p,
        lambda x: ldpc_de_step(lam, rho, p, x),
        lambda x: ldpc_bit_erasure(L, rho, p, x),
        cfg,
        prior_pb=p,
    )
    xstar = _invert_pb_map(lambda x: ldpc_bit_erasure(L, rho, p, x), cfg)
    return DETrajectory(np.array(states), pbs, iters, terminal, xstar)


def _invert_pb_map(g, cfg):
    """x* with g(x*) = target_pb, when the target lies in g's range."""
    try:
        lo, hi = g(0.0), g(1.0)
    except (ValueError, ZeroDivisionError):
        return None
    if not (lo <= cfg.target_pb <= hi) or hi <= lo:
        return None
    return inverse_monotone(g, cfg.target_pb, tol=1e-13)


# ---------------------------------------------------------------------------
# monotone inversion


def inverse_monotone(f, y, tol, lo=0.0, hi=1.0):
    """Bisection solve of f(x) = y for continuous strictly increasing f."""
    flo, fhi = f(lo), f(hi)
    if y < flo - 1e-12 or y > fhi + 1e-12:
        raise ValueError(f"target {y} outside range [{flo}, {fhi}]")
    y = min(max(y, flo), fhi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm - y) <= tol or (hi - lo) < 1e-16:
            return mid
        if fm < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# tilted (graph-reduced) distributions


def tilt_lambda(lam, L, p):
    """lambda~(x) = (p / (1 - (1-p) L(x)))^2 lambda(x)."""

    def lt(x):
        return (p / (1.0 - (1.0 - p) * L(x))) ** 2 * lam(x)

    return lt


def tilt_rho(rho, R, p):
    """rho~(x) = ((1-p) / (1 - p R(x)))^2 rho(x); identically 0 at p = 1."""
    if p == 1.0:
        return lambda x: 0.0 * rho(x)

    def rt(x):
        return ((1.0 - p) / (1.0 - p * R(x))) ** 2 * rho(x)

    return rt


def tilt_L(L, p):
    """L~(x) = p L(x) / (1 - (1-p) L(x))."""

    def Lt(x):
        Lx = L(x)
        return p * Lx / (1.0 - (1.0 - p) * Lx)

    return Lt


def tilt_R(R, p):
    """R~(x) = (1-p) R(x) / (1 - p R(x)); identically 0 at p = 1."""
    if p == 1.0:
        return lambda x: 0.0 * R(x)

    def Rt(x):
        Rx = R(x)
        return (1.0 - p) * Rx / (1.0 - p * Rx)

    return Rt


class TiltedEnsemble:
    """Equivalent-LDPC view of an accumulator-based ensemble at channel p.

    Holds the rational evaluators lambda_t, rho_t, L_t, R_t produced by graph
    reduction.  Requires lambda(0) = 0 so that lambda_t(0) = 0.
    """

    def __init__(self, e, p):
        if e.lam.coeff(1) > 0:
            raise ValueError("tilting requires lambda(0) = 0")
        self.p = p
        self.lam = e.lam
        self.rho = e.rho
        self.L = e.L
        self.R = e.R
        self.lambda_t = tilt_lambda(e.lam, self.L, p)
        self.rho_t = tilt_rho(e.rho, self.R, p)
        self.L_t = tilt_L(self.L, p)
        self.R_t = tilt_R(self.R, p)

    def rho_t_derivative(self, x):
        """Quotient-rule derivative of rho~ at x."""
        p = self.p
        Rx = self.R(x)
        den = 1.0 - p * Rx
        return (
            (1.0 - p) ** 2
            * (self.rho.derivative(x) * den + 2.0 * p * self.R.derivative(x) * self.rho(x))
            / den**3
        )

    @property
    def lambda_t_slope0(self):
        """lambda~'(0) = p^2 lambda_2."""
        return self.p**2 * self.lam.coeff(2)


# ---------------------------------------------------------------------------
# ARA


def ara_de_step(s, e, p):
    """One layered sweep of the six ARA message updates.

    Layer order follows the superscripts of the update system: x0 uses the
    previous x5; x1 the new x0 and previous x4; x2 the new x1 and previous
    x3; x3, x4, x5 use values from the current sweep.
    """
    if e.kind != ARA_SYSTEMATIC:
        raise ValueError("ara_de_step needs an ARA ensemble")
    L, R = e.L, e.R
    x0 = 1.0 - (1.0 - s.x5) * (1.0 - p)
    x1 = x0 * x0 * e.lam(s.x4)
    x2 = 1.0 - R(1.0 - x1) * (1.0 - s.x3)
    x3 = p * x2
    x4 = 1.0 - (1.0 - x3) ** 2 * e.rho(1.0 - x1)
    x5 = x0 * L(x4)
    return ARAState(x0, x1, x2, x3, x4, x5)


def ara_bit_erasure(s, p):
    """Systematic-bit erasure probability p (1 - (1 - x5)^2)."""
    return p * (1.0 - (1.0 - s.x5) ** 2)


def ara_de_run(e, cfg):
    """Full ARA DE from the all-erased start (x0^(0) = x1^(0) = 1)."""
    p = cfg.p
    initial = ara_de_step(ARA_ALL_ONES, e, p)
    states, pbs, iters, terminal = _drive(
        initial,
        lambda s: ara_de_step(s, e, p),
        lambda s: ara_bit_erasure(s, p),
        cfg,
        prior_pb=p,
    )
    xstar = _ara_fixed_point_target(e, cfg)
    return DETrajectory(np.array(states), pbs, iters, terminal, xstar)


def _ara_fixed_point_target(e, cfg):
    p = cfg.p
    if p <= 0.0 or cfg.target_pb > p:
        return None
    t = TiltedEnsemble(e, p)
    lhs = 1.0 - math.sqrt(1.0 - cfg.target_pb / p)
    g = lambda x: t.L_t(1.0 - t.rho_t(1.0 - x))
    if not (g(0.0) <= lhs <= g(1.0)):
        return None
    return inverse_monotone(g, lhs, tol=1e-13)


def tilted_recursion_run(e, cfg):
    """One-dimensional reduced recursion x -> lambda~(1 - rho~(1-x)), x^(0)=1.

    pb_per_iter carries the systematic-bit erasure recovered through L~, so
    the trajectory is directly comparable with ara_de_run and turbo_de_run.
    """
    t = TiltedEnsemble(e, cfg.p)
    p = cfg.p

    def pb_of(x):
        return p * (1.0 - (1.0 - t.L_t(1.0 - t.rho_t(1.0 - x))) ** 2)

    states, pbs, iters, terminal = _drive(
        1.0,
        lambda x: t.lambda_t(1.0 - t.rho_t(1.0 - x)),
        pb_of,
        cfg,
        prior_pb=p,
    )
    xstar = _ara_fixed_point_target(e, cfg)
    return DETrajectory(np.array(states), pbs, iters, terminal, xstar)


def turbo_step_functions(e, p):
    """(step, pb_of) for turbo-schedule decoding of a systematic ARA ensemble.

    Built from the inner/outer constituent-decoder fixed points (the
    cycle-free accumulator chains resolved exactly per iteration), not from
    the tilted evaluators, so agreement with the reduced recursion is a
    genuine cross-check of the graph-reduction algebra.
    """
    if e.kind != ARA_SYSTEMATIC:
        raise ValueError("turbo decoding needs an ARA ensemble")
    lam, rho, L, R = e.lam, e.rho, e.L, e.R

    def outer_check_msg(x):
        # erasure of parity-check-1 -> punctured messages at the outer
        # decoder's fixed point, a-priori erasure x on the repeated bits
        return p / (1.0 - (1.0 - p) * L(x))

    def inner_code_msg(x):
        # erasure of code-bit -> parity-check-2 messages at the inner
        # decoder's fixed point, a-priori erasure x on its input bits
        Rv = R(1.0 - x)
        return p * (1.0 - Rv) / (1.0 - p * Rv)

    def outer_bit_msg(x):
        # punctured -> parity-check-1 erasure at the outer fixed point
        Lx = L(x)
        return p * Lx / (1.0 - (1.0 - p) * Lx)

    def step(x0):
        x1 = 1.0 - (1.0 - inner_code_msg(x0)) ** 2 * rho(1.0 - x0)
        return outer_check_msg(x1) ** 2 * lam(x1)

    def pb_of(x0):
        x1 = 1.0 - (1.0 - inner_code_msg(x0)) ** 2 * rho(1.0 - x0)
        return p * (1.0 - (1.0 - outer_bit_msg(x1)) ** 2)

    return step, pb_of


def turbo_de_run(e, cfg):
    """Turbo-schedule DE for a systematic ARA ensemble (see
    turbo_step_functions); the state chain matches tilted_recursion_run."""
    step, pb_of = turbo_step_functions(e, cfg.p)
    states, pbs, iters, terminal = _drive(1.0, step, pb_of, cfg, prior_pb=cfg.p)
    xstar = _ara_fixed_point_target(e, cfg)
    return DETrajectory(np.array(states), pbs, iters, terminal, xstar)


# ---------------------------------------------------------------------------
# IRA (derived: only the lower accumulator is graph-reduced)


def ira_de_step(e, p, x):
    """One IRA DE update; systematic codes see the channel on the info bits."""
    t = TiltedEnsemble(e, p)
    inner = 1.0 - t.rho_t(1.0 - x)
    if e.kind == IRA_SYSTEMATIC:
        return p * e.lam(inner)
    if e.kind == IRA_NONSYSTEMATIC:
        return e.lam(inner)
    raise ValueError("ira_de_step needs an IRA ensemble")


def ira_bit_erasure(e, p, x):
    """Information-bit erasure at message erasure x."""
    t = TiltedEnsemble(e, p)
    inner = 1.0 - t.rho_t(1.0 - x)
    L = e.L
    if e.kind == IRA_SYSTEMATIC:
        return p * L(inner)
    return L(inner)


def ira_de_run(e, cfg):
    p = cfg.p
    t = TiltedEnsemble(e, p)
    lam, L = e.lam, e.L
    systematic = e.kind == IRA_SYSTEMATIC
    if not systematic and e.kind != IRA_NONSYSTEMATIC:
        raise ValueError("ira_de_run needs an IRA ensemble")
    x0 = p if systematic else 1.0
    prior = p if systematic else 1.0

    def step(x):
        inner = 1.0 - t.rho_t(1.0 - x)
        return p * lam(inner) if systematic else lam(inner)

    def pb_of(x):
        inner = 1.0 - t.rho_t(1.0 - x)
        return p * L(inner) if systematic else L(inner)

    states, pbs, iters, terminal = _drive(x0, step, pb_of, cfg, prior_pb=prior)
    xstar = _invert_pb_map(pb_of, cfg)
    return DETrajectory(np.array(states), pbs, iters, terminal, xstar)


def de_run(e, cfg):
    """Dispatch the family's DE run."""
    if e.kind == LDPC:
        return ldpc_de_run(e.lam, e.rho, cfg)
    if e.kind == ARA_SYSTEMATIC:
        return ara_de_run(e, cfg)
    return ira_de_run(e, cfg)


# ---------------------------------------------------------------------------
# EXIT-style curves and convergence predicates


@dataclass(frozen=True, eq=False)
class ConditionCurves:
    x: np.ndarray
    c: np.ndarray
    v: np.ndarray


def condition_curves(lam, rho, p, samples=512):
    """Sampled c(x) = 1 - rho(1-x) and v(x) = lambda^-1(x/p) (1 above x = p)."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    x = np.linspace(0.0, 1.0, samples)
    c = 1.0 - rho(1.0 - x)
    v = np.ones_like(x)
    if p > 0.0:
        below = x <= p
        v[below] = [
            inverse_monotone(lam, min(xi / p, 1.0), tol=1e-13) for xi in x[below]
        ]
    else:
        v[x > 0] = 1.0
        v[0] = 0.0
    return ConditionCurves(x, c, v)


def map_below_identity(f, hi, samples=4096, margin=1e-9):
    """True iff f(x) < x on a dense grid over (0, hi] (the c < v predicate)."""
    if hi <= 0.0:
        return True
    grid = np.unique(
        np.concatenate([np.geomspace(1e-14, hi, samples), np.linspace(hi / samples, hi, samples)])
    )
    fx = np.array([f(x) for x in grid])
    return bool(np.all(fx < grid * (1.0 - margin)))


def converges_by_curves(lam, rho, p, samples=4096):
    """Grid check of the successful-decoding predicate for an LDPC pair."""
    x = np.unique(
        np.concatenate([np.geomspace(1e-14, p, samples), np.linspace(p / samples, p, samples)])
    ) if p > 0 else np.array([])
    if len(x) == 0:
        return True
    fx = p * lam(1.0 - rho(1.0 - x))
    return bool(np.all(fx < x * (1.0 - 1e-9)))


def ensemble_map(e, p):
    """The family's one-dimensional DE map and its initial value."""
    if e.kind == LDPC:
        return (lambda x: ldpc_de_step(e.lam, e.rho, p, x)), p
    t = TiltedEnsemble(e, p)
    if e.kind == ARA_SYSTEMATIC:
        return (lambda x: t.lambda_t(1.0 - t.rho_t(1.0 - x))), 1.0
    if e.kind == IRA_SYSTEMATIC:
        return (lambda x: p * e.lam(1.0 - t.rho_t(1.0 - x))), p
    return (lambda x: e.lam(1.0 - t.rho_t(1.0 - x))), 1.0


# ---------------------------------------------------------------------------
# stability and threshold


class StabilityResult(NamedTuple):
    satisfied: bool
    margin: float


def stability_check(e, p):
    """Stability margin of the zero-erasure fixed point; satisfied iff >= 0.

    LDPC: 1 - p lambda_2 rho'(1).  ARA: 1 - p^2 lambda_2 (rho'(1)
    + 2 p R'(1)/(1-p)).  IRA margins use the reduced map's slope at zero.
    """
    lam2 = e.lam.coeff(2)
    if lam2 == 0.0:
        return StabilityResult(True, 1.0)
    if e.kind == LDPC:
        margin = 1.0 - p * lam2 * e.rho.derivative(1.0)
    elif e.kind == ARA_SYSTEMATIC:
        if p == 1.0:
            return StabilityResult(False, -math.inf)
        margin = 1.0 - p * p * lam2 * (
            e.rho.derivative(1.0) + 2.0 * p * e.R.derivative(1.0) / (1.0 - p)
        )
    else:
        if p == 1.0:
            return StabilityResult(False, -math.inf)
        rt1 = TiltedEnsemble(e, p).rho_t_derivative(1.0)
        slope = p * lam2 * rt1 if e.kind == IRA_SYSTEMATIC else lam2 * rt1
        margin = 1.0 - slope
    return StabilityResult(margin >= 0.0, margin)


def ara_stability_margin_tilted(e, p):
    """ARA stability margin through the reduced ensemble: 1 - p^2 lambda_2 rho~'(1)."""
    if p == 1.0:
        return -math.inf
    t = TiltedEnsemble(e, p)
    return 1.0 - p * p * e.lam.coeff(2) * t.rho_t_derivative(1.0)


# bisection budget for threshold_search and the convergence probe per the
# fixed-point/bit-erasure targets used by every probe
THRESHOLD_MAX_BISECT = 60
THRESHOLD_PROBE_TARGET = 1e-8
THRESHOLD_PROBE_ITER = 50_000


def threshold_search(e, tol):
    """Largest erasure probability with DE convergence, by bisection."""
    if tol <= 0:
        raise ValueError("tol must be > 0")

    def probe(p):
        cfg = DEConfig(
            p=p,
            target_pb=THRESHOLD_PROBE_TARGET,
            max_iter=THRESHOLD_PROBE_ITER,
        )
        return de_run(e, cfg).terminal == TARGET_REACHED

    lo, hi = 0.0, 1.0
    for _ in range(THRESHOLD_MAX_BISECT):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    pstar = 0.5 * (lo + hi)
    if pstar <= tol:
        raise ValueError("no convergent erasure probability found in (0,1)")
    return pstar


# ---------------------------------------------------------------------------
# trajectory export


def trajectory_to_csv(t):
    """CSV rendering: `l,x,pb` for scalar chains, `l,x0..x5,pb` for ARA."""
    wide = t.states.ndim == 2
    header = "l,x0,x1,x2,x3,x4,x5,pb" if wide else "l,x,pb"
    lines = [header]
    for l in range(len(t)):
        if wide:
            cells = [f"{v:.17g}" for v in t.states[l]]
        else:
            cells = [f"{t.states[l]:.17g}"]
        lines.append(",".join([str(l)] + cells + [f"{t.pb_per_iter[l]:.17g}"]))
    return "\n".join(lines) + "\n"
