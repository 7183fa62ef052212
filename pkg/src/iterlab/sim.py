"""Finite-length validation: configuration-model sampling, BEC transmission,
and flooding-schedule erasure decoding.

The decoder passes known/unknown messages rather than peeling the residual
graph, so iteration counts line up with the DE superscript convention: an
LDPC iteration is one variable-to-check flood followed by one check-to-
variable flood, an ARA iteration is the full six-phase layer sweep.  Each
iteration computes one message per edge per direction, so the work per
trial is bounded by 2 * edges * iterations.
"""

from dataclasses import dataclass

import numpy as np

from .degree import ARA_SYSTEMATIC, LDPC, edge_to_node

VAR_SYSTEMATIC, VAR_PUNCTURED, VAR_CODE = 0, 1, 2
CHK_ACC1, CHK_ACC2 = 0, 1


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Bipartite graph as parallel edge arrays, plus ARA layer bookkeeping.

    For ARA graphs the node order is fixed: variables are [systematic(k),
    punctured(k), code(m)] and checks are [acc1(k), acc2(m)]; acc1 node j
    joins systematic j with punctured j and j-1, acc2 node t joins its
    punctured-layer sockets with code t and t-1.
    """

    n_var: int
    n_chk: int
    var_of_edge: np.ndarray
    chk_of_edge: np.ndarray
    kind: str = LDPC
    n_systematic: int = 0
    n_code: int = 0
    var_layer: np.ndarray | None = None
    chk_layer: np.ndarray | None = None

    @property
    def n_edges(self):
        return len(self.var_of_edge)

    @property
    def transmitted(self):
        """Mask of variable nodes that are part of the codeword."""
        if self.var_layer is None:
            return np.ones(self.n_var, dtype=bool)
        return self.var_layer != VAR_PUNCTURED


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def largest_remainder(weights, total):
    """Integer counts ~ weights * total, summing exactly to total."""
    raw = np.asarray(weights, dtype=float) * total
    base = np.floor(raw).astype(np.int64)
    short = int(total - base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:short]] += 1
    return base


def _node_degrees(dist, count):
    counts = largest_remainder(dist.coeffs, count)
    return np.repeat(np.arange(1, len(counts) + 1), counts)


def _check_degrees(dist, n_edges):
    """Check-side degree sequence matching n_edges sockets exactly.

    Largest-remainder counts first, then the mismatch is repaired on the
    highest-degree buckets so at most a couple of nodes move.
    """
    mean = float(np.sum(dist.coeffs * np.arange(1, len(dist.coeffs) + 1)))
    m = max(1, int(round(n_edges / mean)))
    counts = largest_remainder(dist.coeffs, m)
    dmax = len(counts)
    counts = np.concatenate([counts, [0]])  # scratch slot, trimmed below
    diff = int(n_edges - np.sum(counts[:dmax] * np.arange(1, dmax + 1)))
    while diff > 0:
        k = min(diff, dmax)
        counts[k - 1] += 1
        diff -= k
    while diff < 0:
        small = np.nonzero(counts[: min(-diff, dmax)])[0]
        if len(small):
            j = int(small[-1])
            counts[j] -= 1
            diff += j + 1
        else:
            j = int(np.nonzero(counts[:dmax])[0][-1])
            counts[j] -= 1
            counts[j + diff] += 1
            diff = 0
    degs = np.repeat(np.arange(1, dmax + 1), counts[:dmax])
    if degs.sum() != n_edges:
        raise ValueError("check degree realization cannot match edge count")
    return degs


def sample_ldpc_graph(n, lam, rho, seed):
    """Configuration-model (n, lambda, rho) graph; multi-edges are kept."""
    rng = _rng(seed)
    degs_v = _node_degrees(edge_to_node(lam), n)
    if len(degs_v) != n:
        raise ValueError("degree realization does not cover all variables")
    E = int(degs_v.sum())
    degs_c = _check_degrees(edge_to_node(rho), E)
    var_of_edge = np.repeat(np.arange(n, dtype=np.int64), degs_v)
    chk_of_edge = np.repeat(np.arange(len(degs_c), dtype=np.int64), degs_c)
    chk_of_edge = chk_of_edge[rng.permutation(E)]
    return TannerGraph(n, len(degs_c), var_of_edge, chk_of_edge)


def sample_ara_graph(n_systematic, lam, rho, seed):
    """Systematic ARA graph: two accumulator zigzags around a (lambda, rho) core.

    Punctured-bit and acc2 degrees are shuffled so neighboring zigzag
    positions carry independent degrees, matching the ensemble average.
    """
    rng = _rng(seed)
    k = int(n_systematic)
    if k < 2:
        raise ValueError("need at least 2 systematic bits")
    degs_p = _node_degrees(edge_to_node(lam), k)
    rng.shuffle(degs_p)
    E_mid = int(degs_p.sum())
    degs_c2 = _check_degrees(edge_to_node(rho), E_mid)
    rng.shuffle(degs_c2)
    m = len(degs_c2)

    sys_ids = np.arange(k, dtype=np.int64)
    punct_ids = k + sys_ids
    code_ids = 2 * k + np.arange(m, dtype=np.int64)
    chk1_ids = np.arange(k, dtype=np.int64)
    chk2_ids = k + np.arange(m, dtype=np.int64)

    # upper zigzag: acc1 j -- {systematic j, punctured j, punctured j-1}
    v_parts = [sys_ids, punct_ids, punct_ids[:-1]]
    c_parts = [chk1_ids, chk1_ids, chk1_ids[1:]]
    # middle core, sockets matched by a uniform permutation
    mid_v = np.repeat(punct_ids, degs_p)
    mid_c = np.repeat(chk2_ids, degs_c2)[rng.permutation(E_mid)]
    v_parts.append(mid_v)
    c_parts.append(mid_c)
    # lower zigzag: acc2 t -- {code t, code t-1}
    v_parts += [code_ids, code_ids[:-1]]
    c_parts += [chk2_ids, chk2_ids[1:]]

    var_of_edge = np.concatenate(v_parts)
    chk_of_edge = np.concatenate(c_parts)
    var_layer = np.concatenate(
        [
            np.full(k, VAR_SYSTEMATIC, dtype=np.uint8),
            np.full(k, VAR_PUNCTURED, dtype=np.uint8),
            np.full(m, VAR_CODE, dtype=np.uint8),
        ]
    )
    chk_layer = np.concatenate(
        [np.full(k, CHK_ACC1, dtype=np.uint8), np.full(m, CHK_ACC2, dtype=np.uint8)]
    )
    return TannerGraph(
        2 * k + m,
        k + m,
        var_of_edge,
        chk_of_edge,
        kind=ARA_SYSTEMATIC,
        n_systematic=k,
        n_code=m,
        var_layer=var_layer,
        chk_layer=chk_layer,
    )


def bec_transmit(graph, p, rng):
    """Erasure pattern over variable nodes; punctured bits are always unknown."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p {p} outside [0,1]")
    rng = _rng(rng)
    erased = rng.random(graph.n_var) < p
    erased[~graph.transmitted] = True
    return erased


def flooding_decode(graph, erasures, max_iter, target=0.0):
    """Run flooding-schedule erasure decoding; returns per-iteration residuals.

    Residuals count unresolved bits among all variables (LDPC) or among the
    systematic bits (ARA).  Decoding stops on the target residual fraction,
    on a message fixed point, or at the iteration cap.
    """
    if graph.kind == ARA_SYSTEMATIC:
        return _decode_ara(graph, erasures, max_iter, target)
    return _decode_ldpc(graph, erasures, max_iter, target)


def _decode_ldpc(graph, erasures, max_iter, target):
    n, m = graph.n_var, graph.n_chk
    var, chk = graph.var_of_edge, graph.chk_of_edge
    ch_known = ~np.asarray(erasures, dtype=bool)
    if ch_known.all():
        return np.array([], dtype=np.int64)  # nothing erased: zero iterations
    c2v = np.zeros(graph.n_edges, dtype=bool)
    residuals = []
    prev_known = -1
    for _ in range(max_iter):
        kin = np.bincount(var, weights=c2v, minlength=n)
        v2c = ch_known[var] | ((kin[var] - c2v) > 0.5)
        unk = np.bincount(chk, weights=~v2c, minlength=m)
        c2v = (unk[chk] - (~v2c)) < 0.5
        resolved = ch_known | (np.bincount(var, weights=c2v, minlength=n) > 0.5)
        residuals.append(n - int(resolved.sum()))
        if residuals[-1] <= target * n:
            break
        known = int(c2v.sum())
        if known == prev_known:
            break
        prev_known = known
    return np.array(residuals, dtype=np.int64)


def _decode_ara(graph, erasures, max_iter, target):
    k, m = graph.n_systematic, graph.n_code
    erased = np.asarray(erasures, dtype=bool)
    ch_sys = ~erased[:k]
    ch_code = ~erased[2 * k :]
    if ch_sys.all():
        return np.array([], dtype=np.int64)
    mid = (graph.var_layer[graph.var_of_edge] == VAR_PUNCTURED) & (
        graph.chk_layer[graph.chk_of_edge] == CHK_ACC2
    )
    pv = graph.var_of_edge[mid] - k  # punctured index per middle edge
    ct = graph.chk_of_edge[mid] - k  # acc2 index per middle edge

    x4 = np.zeros(mid.sum(), dtype=bool)  # acc2 -> punctured, per middle edge
    x5_up = np.zeros(k, dtype=bool)  # punctured j -> acc1 j
    x5_dn = np.zeros(k, dtype=bool)  # punctured j -> acc1 j+1
    x3_fwd = np.zeros(m, dtype=bool)  # code t -> acc2 t+1
    x3_bwd = np.zeros(m, dtype=bool)  # code t -> acc2 t
    residuals = []
    prev_known = -1
    for it in range(max_iter):
        # acc1 -> punctured (x0): needs the systematic bit and the other
        # punctured neighbor; boundary checks lack a neighbor, which counts
        # as known
        x5_dn_prev = np.concatenate([[True], x5_dn[:-1]])
        x0_left = ch_sys & x5_dn_prev  # acc1 j -> punctured j
        x0_right = np.zeros(k, dtype=bool)  # acc1 j+1 -> punctured j
        x0_right[:-1] = ch_sys[1:] & x5_up[1:]
        # punctured -> acc2 (x1), per middle edge
        kin = np.bincount(pv, weights=x4, minlength=k)
        x1 = (x0_left | x0_right)[pv] | ((kin[pv] - x4) > 0.5)
        # acc2 -> code (x2): all middle sockets plus the other code neighbor
        # (previous iteration's x3, per the layered schedule)
        unk = np.bincount(ct, weights=~x1, minlength=m)
        allmid = unk < 0.5
        x3f_in = np.concatenate([[True], x3_fwd[:-1]])  # code t-1 -> acc2 t
        x2_down = allmid & x3f_in  # acc2 t -> code t
        x2_up = allmid & x3_bwd  # acc2 t -> code t-1
        # code -> acc2 (x3): channel or the message through the other check
        x2_up_next = np.concatenate([x2_up[1:], [False]])
        x3_bwd = ch_code | x2_up_next
        x3_fwd = ch_code | x2_down
        # acc2 -> punctured (x4): other middle sockets and both code messages
        x3f_in = np.concatenate([[True], x3_fwd[:-1]])
        x4 = ((unk[ct] - (~x1)) < 0.5) & x3_bwd[ct] & x3f_in[ct]
        # punctured -> acc1 (x5)
        anymid = np.bincount(pv, weights=x4, minlength=k) > 0.5
        x5_up = x0_right | anymid
        x5_dn = x0_left | anymid
        # systematic residual
        x5_dn_in = np.concatenate([[True], x5_dn[:-1]])
        sys_known = ch_sys | (x5_up & x5_dn_in)
        residuals.append(k - int(sys_known.sum()))
        if residuals[-1] <= target * k:
            break
        known = (
            int(x1.sum()) + int(x4.sum()) + int(x5_up.sum()) + int(x5_dn.sum())
            + int(x3_fwd.sum()) + int(x3_bwd.sum())
        )
        if known == prev_known:
            break
        prev_known = known
    return np.array(residuals, dtype=np.int64)


# ---------------------------------------------------------------------------
# Monte Carlo driver


@dataclass(frozen=True)
class SimConfig:
    n: int
    p: float
    trials: int
    master_seed: int
    max_iter: int = 200
    target_pb: float = 0.0

    def __post_init__(self):
        if self.n < 10:
            raise ValueError("n must be >= 10")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p {self.p} outside [0,1]")


@dataclass(frozen=True, eq=False)
class SimResult:
    """Residual-fraction trajectories per trial, edge-padded to equal length."""

    n: int
    trials: int
    residual_fracs: np.ndarray  # (trials, L)
    iterations_used: np.ndarray  # (trials,)

    @property
    def mean_residual(self):
        return self.residual_fracs.mean(axis=0)

    @property
    def std_residual(self):
        return self.residual_fracs.std(axis=0)

    @property
    def mean_iterations(self):
        return float(self.iterations_used.mean())


def simulate(e, cfg):
    """Sample, transmit and decode cfg.trials independent codewords.

    Trial k's randomness comes from child k of the master seed, so results
    are identical however trials are scheduled.
    """
    if e.kind not in (LDPC, ARA_SYSTEMATIC):
        raise ValueError(f"no sampler for ensemble kind {e.kind!r}")
    children = np.random.SeedSequence(cfg.master_seed).spawn(cfg.trials)
    rows = []
    iters = np.empty(cfg.trials, dtype=np.int64)
    denom = cfg.n
    for t in range(cfg.trials):
        rng = np.random.default_rng(children[t])
        if e.kind == LDPC:
            g = sample_ldpc_graph(cfg.n, e.lam, e.rho, rng)
        else:
            g = sample_ara_graph(cfg.n, e.lam, e.rho, rng)
        erased = bec_transmit(g, cfg.p, rng)
        res = flooding_decode(g, erased, cfg.max_iter, cfg.target_pb)
        iters[t] = len(res)
        rows.append(res / denom)
    L = cfg.max_iter
    fracs = np.empty((cfg.trials, L))
    for t, r in enumerate(rows):
        fracs[t, : len(r)] = r
        fracs[t, len(r) :] = r[-1] if len(r) else 0.0
    return SimResult(cfg.n, cfg.trials, fracs, iters)


@dataclass(frozen=True, eq=False)
class ConcentrationReport:
    n: int
    trials: int
    tol: float
    deviations: np.ndarray
    ci_halfwidth: np.ndarray
    flagged: list

    @property
    def max_deviation(self):
        return float(self.deviations.max())


def concentration_report(sim, de_traj, tol=0.005):
    """Per-iteration deviation of the mean residual from the DE bit erasure.

    Iterations whose deviation exceeds `tol` are flagged; the 95% CI
    halfwidth of the per-iteration mean accompanies each deviation.
    """
    if sim.trials < 1:
        raise ValueError("no trials")
    L = sim.residual_fracs.shape[1]
    de = np.asarray(de_traj.pb_per_iter, dtype=float)
    if len(de) == 0:
        raise ValueError("empty DE trajectory")
    de_padded = np.concatenate([de, np.full(max(0, L - len(de)), de[-1])])[:L]
    dev = np.abs(sim.mean_residual - de_padded)
    ci = 1.96 * sim.std_residual / np.sqrt(sim.trials)
    flagged = [int(l) for l in np.nonzero(dev > tol)[0]]
    return ConcentrationReport(sim.n, sim.trials, tol, dev, ci, flagged)


# ---------------------------------------------------------------------------
# serialization


def graph_to_text(g):
    lines = [f"{g.n_var} {g.n_chk} {g.n_edges}"]
    for v, c in zip(g.var_of_edge, g.chk_of_edge):
        lines.append(f"{v} {c}")
    return "\n".join(lines) + "\n"


def graph_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n_var, n_chk, n_edges = (int(tok) for tok in lines[0].split())
    if len(lines) - 1 != n_edges:
        raise ValueError(f"expected {n_edges} edge lines, got {len(lines) - 1}")
    if n_edges == 0:
        empty = np.array([], dtype=np.int64)
        return TannerGraph(n_var, n_chk, empty, empty)
    pairs = np.array([[int(a), int(b)] for a, b in (ln.split() for ln in lines[1:])])
    var, chk = pairs[:, 0], pairs[:, 1]
    if var.min() < 0 or var.max() >= n_var or chk.min() < 0 or chk.max() >= n_chk:
        raise ValueError("edge endpoint out of range")
    return TannerGraph(n_var, n_chk, var.astype(np.int64), chk.astype(np.int64))


def simresult_to_csv(sim):
    lines = ["trial,l,residual_fraction"]
    for t in range(sim.trials):
        for l, frac in enumerate(sim.residual_fracs[t]):
            lines.append(f"{t},{l},{frac:.17g}")
    return "\n".join(lines) + "\n"
