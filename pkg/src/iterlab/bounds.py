"""Closed-form iteration lower bounds and the identities behind their proofs.

A bound evaluates to (value, applicable); when the family's precondition on
the target bit erasure probability fails, the bound is trivial and reported
as inapplicable with value 0 rather than raised.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .degree import (
    ARA_SYSTEMATIC,
    IRA_NONSYSTEMATIC,
    IRA_SYSTEMATIC,
    LDPC,
    Channel,
    EnsembleSpec,
    build_right_regular,
    capacity_gap,
    design_rate,
    fraction_degree2,
    mix_degree2,
    right_regular_design_p,
    right_regular_truncation_for_mass,
)
from .de import (
    DEConfig,
    TiltedEnsemble,
    converges_by_curves,
    de_run,
    inverse_monotone,
)

RECORD_SCHEMA = 1


@dataclass(frozen=True)
class BoundInput:
    epsilon: float
    p: float
    pb: float
    l2: float

    def __post_init__(self):
        for name in ("epsilon", "p", "pb", "l2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} = {v} outside [0,1]")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be > 0")


@dataclass(frozen=True)
class BoundResult:
    value: float
    applicable: bool
    precondition: str
    inputs: BoundInput


def ldpc_bound(b):
    """Iteration lower bound for LDPC ensembles, valid when pb < p L2."""
    if b.p == 1.0:
        raise ValueError("degenerate channel p = 1")
    tag = "pb < p*l2"
    if not b.pb < b.p * b.l2:
        return BoundResult(0.0, False, tag, b)
    value = (
        2.0
        / (1.0 - b.p)
        * (math.sqrt(b.p * b.l2) - math.sqrt(b.pb)) ** 2
        / b.epsilon
    )
    return BoundResult(value, True, tag, b)


def ara_bound(b):
    """Iteration lower bound for systematic ARA ensembles.

    Valid when 1 - sqrt(1 - pb/p) < p L2; pb measures the systematic bits, so
    pb > p is impossible and rejected.
    """
    if b.pb > b.p:
        raise ValueError(f"pb = {b.pb} exceeds p = {b.p}")
    tag = "1-sqrt(1-pb/p) < p*l2"
    if b.p == 0.0:
        return BoundResult(0.0, False, tag, b)
    lhs = 1.0 - math.sqrt(1.0 - b.pb / b.p)
    if not lhs < b.p * b.l2:
        return BoundResult(0.0, False, tag, b)
    value = (
        2.0
        * b.p
        * (1.0 - b.epsilon)
        * (math.sqrt(b.p * b.l2) - math.sqrt(lhs)) ** 2
        / b.epsilon
    )
    return BoundResult(value, True, tag, b)


def ira_bound(b, systematic):
    """Iteration lower bound for systematic / non-systematic IRA ensembles."""
    if systematic:
        tag = "pb < p*l2"
        if not b.pb < b.p * b.l2:
            return BoundResult(0.0, False, tag, b)
        gap = math.sqrt(b.p * b.l2) - math.sqrt(b.pb)
    else:
        tag = "pb < l2"
        if not b.pb < b.l2:
            return BoundResult(0.0, False, tag, b)
        gap = math.sqrt(b.l2) - math.sqrt(b.pb)
    value = 2.0 * (1.0 - b.epsilon) * gap**2 / b.epsilon
    return BoundResult(value, True, tag, b)


def turbo_bound_alias(b):
    """The ARA bound verbatim; it also covers the turbo-schedule decoder."""
    return ara_bound(b)


def bound_for(family, b):
    """Dispatch on a family name: ldpc | ara | turbo | ira_(non)systematic."""
    if family == LDPC:
        return ldpc_bound(b)
    if family == ARA_SYSTEMATIC:
        return ara_bound(b)
    if family == "turbo":
        return turbo_bound_alias(b)
    if family == IRA_SYSTEMATIC:
        return ira_bound(b, systematic=True)
    if family == IRA_NONSYSTEMATIC:
        return ira_bound(b, systematic=False)
    raise ValueError(f"unknown bound family {family!r}")


# ---------------------------------------------------------------------------
# area identities


def area_ldpc(e, p):
    """Closed-form area between the LDPC decoding curves: (C - R)/a_L."""
    if e.kind != LDPC:
        raise ValueError("area_ldpc needs an LDPC ensemble")
    return ((1.0 - p) - design_rate(e)) / e.a_L


def area_ldpc_quadrature(e, p):
    """Numeric integral of v - c over [0,1]; the oracle for area_ldpc."""
    lam, rho = e.lam, e.rho

    def integrand(x):
        c = 1.0 - rho(1.0 - x)
        if x >= p:
            v = 1.0
        elif p == 0.0:
            v = 1.0
        else:
            v = inverse_monotone(lam, x / p, tol=1e-13)
        return v - c

    val, _ = integrate.quad(integrand, 0.0, 1.0, points=[p], limit=200, epsabs=1e-10)
    return val


def area_ara(e, p):
    """Closed-form tilted-curve area: (C - R)/((1-R) a_R)."""
    if e.kind != ARA_SYSTEMATIC:
        raise ValueError("area_ara needs an ARA ensemble")
    rate = design_rate(e)
    return ((1.0 - p) - rate) / ((1.0 - rate) * e.a_R)


def area_ara_quadrature(e, p):
    """Numeric integral of lambda~^-1(x) - (1 - rho~(1-x)) over [0,1]."""
    t = TiltedEnsemble(e, p)

    def integrand(x):
        v = inverse_monotone(t.lambda_t, x, tol=1e-13)
        return v - (1.0 - t.rho_t(1.0 - x))

    val, _ = integrate.quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-10)
    return val


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=40):
    """Classic adaptive composite Simpson with an absolute tolerance."""

    def simpson(fa, fm, fb, a_, b_):
        return (b_ - a_) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a_, b_, fa, fm, fb, whole, tol_, depth):
        m = 0.5 * (a_ + b_)
        lm, rm = 0.5 * (a_ + m), 0.5 * (m + b_)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a_, m)
        right = simpson(fm, frm, fb, m, b_)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * tol_:
            return left + right + (left + right - whole) / 15.0
        half = 0.5 * tol_
        return recurse(a_, m, fa, flm, fm, left, half, depth + 1) + recurse(
            m, b_, fm, frm, fb, right, half, depth + 1
        )

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


def tilted_integrals(e, p, tol=1e-10):
    """(integral of lambda~, integral of rho~); equal p/a_L and (1-p)/a_R."""
    t = TiltedEnsemble(e, p)
    return (
        adaptive_simpson(t.lambda_t, 0.0, 1.0, tol),
        adaptive_simpson(t.rho_t, 0.0, 1.0, tol),
    )


def inv_L_lower_bound(x, l2):
    """Lower bound 1 - sqrt(x / L2) on 1 - L^-1(x)."""
    if x == 0.0:
        return 1.0
    if l2 == 0.0:
        return -math.inf
    return 1.0 - math.sqrt(x / l2)


# ---------------------------------------------------------------------------
# proof geometry


@dataclass(frozen=True, eq=False)
class TriangleDecomposition:
    v_lengths: np.ndarray
    a_areas: np.ndarray
    b_areas: np.ndarray
    total_area: float


# numerical slack for the prefix inequality; the geometric margin of real
# trajectories is many orders larger
_PREFIX_SLACK = 1e-9


def triangle_decompose(t, e, p):
    """Triangle areas under a DE trajectory, with the proof inequalities checked.

    Expects the one-dimensional chain of the family (for ARA, the tilted
    recursion).  Raises if a prefix of triangle areas exceeds the closed-form
    area or the Cauchy-Schwarz chain fails, since either falsifies the DE or
    the geometry.
    """
    if len(t) == 0:
        raise ValueError("empty trajectory")
    states = t.states
    if states.ndim != 1:
        raise ValueError("need a one-dimensional trajectory (tilted recursion for ARA)")
    lam2 = e.lam.coeff(2)
    if e.kind == LDPC:
        rho = e.rho
        c = lambda x: 1.0 - rho(1.0 - x)
        check_slope = e.rho.derivative(1.0)
        v_slope = p * lam2
        total = area_ldpc(e, p)
    else:
        tilted = TiltedEnsemble(e, p)
        c = lambda x: 1.0 - tilted.rho_t(1.0 - x)
        check_slope = tilted.rho_t_derivative(1.0)
        rate = design_rate(e)
        if e.kind == ARA_SYSTEMATIC:
            v_slope = p * p * lam2
            total = ((1.0 - p) - rate) / ((1.0 - rate) * e.a_R)
        elif e.kind == IRA_SYSTEMATIC:
            v_slope = p * lam2
            total = ((1.0 - p) - rate) / ((1.0 - rate) * e.a_R)
        else:
            v_slope = lam2
            total = ((1.0 - p) - rate) / e.a_R
    cvals = np.array([c(x) for x in states])
    v = np.empty(len(states))
    v[0] = 1.0 - cvals[0]
    v[1:] = cvals[:-1] - cvals[1:]
    v = np.maximum(v, 0.0)
    a_areas = v**2 / (2.0 * check_slope)
    b_areas = v_slope * v**2 / 2.0
    prefix = np.cumsum(a_areas + b_areas)
    if np.any(prefix > total + _PREFIX_SLACK):
        raise ValueError(
            f"triangle prefix sum {prefix.max()} exceeds total area {total}"
        )
    sums = np.cumsum(v)
    sq_sums = np.cumsum(v**2)
    ls = np.arange(1, len(v) + 1)
    if np.any(sums**2 > ls * sq_sums * (1.0 + 1e-12) + 1e-15):
        raise ValueError("Cauchy-Schwarz chain violated")
    return TriangleDecomposition(v, a_areas, b_areas, total)


# ---------------------------------------------------------------------------
# bound-vs-DE verification


def verify_bound(e, cfg):
    """Run the family's DE and compare measured iterations with its bound.

    Returns a schema-1 record; `status` distinguishes ok / inapplicable /
    violated / target_not_reached (the last holds the bound vacuously).
    """
    ch = Channel(cfg.p)
    eps = capacity_gap(e, ch) if ch.capacity > 0 else float("nan")
    l2 = fraction_degree2(e)
    traj = de_run(e, cfg)
    measured = traj.iterations_to_target
    if not (eps > 0.0):
        res = BoundResult(0.0, False, "epsilon > 0", None)
    else:
        try:
            res = bound_for(e.kind, BoundInput(eps, cfg.p, cfg.target_pb, l2))
        except ValueError:
            # e.g. an ARA target above p, which no decoder output can exceed
            res = BoundResult(0.0, False, "valid bound input", None)
    if not res.applicable:
        status = "inapplicable"
        satisfied = True
    elif measured is None:
        status = "target_not_reached"
        satisfied = True
    elif measured >= res.value:
        status = "ok"
        satisfied = True
    else:
        status = "violated"
        satisfied = False
    return {
        "schema": RECORD_SCHEMA,
        "family": e.kind,
        "epsilon": eps,
        "p": cfg.p,
        "pb": cfg.target_pb,
        "l2": l2,
        "measured_l": measured,
        "bound_l": res.value,
        "applicable": res.applicable,
        "satisfied": satisfied,
        "status": status,
    }


def pb_floor(l, epsilon, p, l2):
    """Smallest bit erasure probability consistent with the LDPC bound at l."""
    if l < 0:
        raise ValueError("l must be >= 0")
    root = math.sqrt(p * l2) - math.sqrt(epsilon * (1.0 - p) * l / 2.0)
    if root <= 0.0:
        return 0.0
    return root**2


# ---------------------------------------------------------------------------
# record rendering


def record_to_json(rec):
    return json.dumps(rec, sort_keys=True)


def record_to_csv(recs):
    if not recs:
        raise ValueError("no records")
    cols = list(recs[0].keys())
    lines = [",".join(cols)]
    for r in recs:
        cells = []
        for cname in cols:
            v = r[cname]
            cells.append(f"{v:.17g}" if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# gap-to-capacity sweep (the Omega(1/eps) experiment)

# the sweep walks the right-regular family along its capacity-approaching
# direction: the design point (kept series mass) is held near `design_point`
# while the check degree grows, and a small degree-2 edge fraction keeps the
# bounds non-trivial.  eta is split by (a-1) so the added mass does not break
# the stability condition as the check degree grows.
SCAN_DESIGN_POINT = 0.5
SCAN_ETA = 0.04
SCAN_DESIGN_MARGIN = 0.5


def scaling_ensemble(epsilon, eta=SCAN_ETA, design_point=SCAN_DESIGN_POINT,
                     margin=SCAN_DESIGN_MARGIN, a_max=128):
    """Pick the smallest family member that decodes at gap `epsilon`.

    Returns (ensemble, p) with p chosen so the capacity gap is exactly
    `epsilon`; raises when no member up to a_max works.
    """
    for a in range(4, a_max + 1):
        D = right_regular_truncation_for_mass(a, design_point)
        base = build_right_regular(a, D)
        lam = mix_degree2(base.lam, eta / (a - 1))
        e = EnsembleSpec(LDPC, lam, base.rho)
        rate = design_rate(e)
        p = 1.0 - rate / (1.0 - epsilon)
        if not (0.0 < p < 1.0):
            continue
        eps_design = 1.0 - rate / (1.0 - right_regular_design_p(a, D))
        if eps_design <= margin * epsilon and converges_by_curves(e.lam, e.rho, p):
            return e, p
    raise ValueError(f"no family member decodes at epsilon = {epsilon}")


def scaling_experiment(epsilons, target_pb=1e-6, eta=SCAN_ETA,
                       design_point=SCAN_DESIGN_POINT, max_iter=2_000_000):
    """Measure DE iterations against the LDPC bound across a gap sweep.

    One schema-1 record per epsilon, with the l * epsilon product and the
    graphical complexity a_L / R alongside the verify_bound fields.
    """
    if not epsilons:
        raise ValueError("empty epsilon sweep")
    rows = []
    for eps in epsilons:
        e, p = scaling_ensemble(eps, eta=eta, design_point=design_point)
        cfg = DEConfig(p=p, target_pb=target_pb, max_iter=max_iter)
        rec = verify_bound(e, cfg)
        measured = rec["measured_l"]
        rec["l_times_epsilon"] = None if measured is None else measured * eps
        rec["bound_constant"] = rec["bound_l"] * eps
        rec["delta"] = e.a_L / design_rate(e)
        rows.append(rec)
    return rows
