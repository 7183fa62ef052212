"""Degree-distribution algebra for graph-based code ensembles on the BEC.

Distributions are polynomials with non-negative coefficients indexed by node
degree: edge-perspective lambda(x) = sum_i c_i x^(i-1) and node-perspective
L(x) = sum_i c_i x^i, both normalized to 1 at x = 1.  Coefficient vectors are
stored densely starting at degree 1.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_DEGREE = 10_000

# tolerances: coefficient sums are accepted and renormalized when the
# deviation from 1 looks like rounding noise, rejected when it looks like
# a malformed input
NORM_TOL = 1e-12
RENORM_TOL = 1e-9

LDPC = "ldpc"
IRA_SYSTEMATIC = "ira_systematic"
IRA_NONSYSTEMATIC = "ira_nonsystematic"
ARA_SYSTEMATIC = "ara_systematic"
KINDS = (LDPC, IRA_SYSTEMATIC, IRA_NONSYSTEMATIC, ARA_SYSTEMATIC)


class Degree1Warning(UserWarning):
    """A variable-side distribution carries degree-1 mass (lambda(0) > 0)."""


def _clean_coeffs(coeffs):
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0:
        raise ValueError("empty coefficient vector")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite coefficient")
    if np.any(c < 0):
        raise ValueError("negative coefficient")
    # trim trailing zero degrees but keep at least degree 1
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("all coefficients zero")
    c = c[: nz[-1] + 1]
    if c.size > MAX_DEGREE:
        raise ValueError(f"max degree {c.size} exceeds {MAX_DEGREE}")
    s = c.sum()
    dev = abs(s - 1.0)
    if dev > RENORM_TOL:
        raise ValueError(f"coefficients sum to {s!r}, not 1")
    if dev > NORM_TOL:
        c = c / s
    return c


@dataclass(frozen=True, eq=False)
class _Dist:
    coeffs: np.ndarray
    _tuple: tuple = field(repr=False, default=())

    def __post_init__(self):
        c = _clean_coeffs(self.coeffs)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "_tuple", tuple(c))

    @property
    def max_degree(self):
        return len(self._tuple)

    def coeff(self, degree):
        """Coefficient of the given node degree (0 outside support)."""
        if 1 <= degree <= len(self._tuple):
            return self._tuple[degree - 1]
        return 0.0

    def _poly(self, x):
        # Horner over coefficients in increasing degree
        if isinstance(x, np.ndarray):
            r = np.zeros_like(x, dtype=float)
            for a in reversed(self._tuple):
                r = r * x + a
            return r
        r = 0.0
        for a in reversed(self._tuple):
            r = r * x + a
        return r


class EdgeDist(_Dist):
    """Edge-perspective distribution: d(x) = sum_i d_i x^(i-1)."""

    def __call__(self, x):
        return self._poly(x)

    def derivative(self, x):
        """d'(x) = sum_i (i-1) d_i x^(i-2)."""
        if isinstance(x, np.ndarray):
            r = np.zeros_like(x, dtype=float)
        else:
            r = 0.0
        for k in range(len(self._tuple) - 1, 0, -1):
            r = r * x + k * self._tuple[k]
        return r

    @property
    def integral(self):
        """Exact antiderivative at 1: sum_i d_i / i."""
        return math.fsum(c / (k + 1) for k, c in enumerate(self._tuple))


class NodeDist(_Dist):
    """Node-perspective distribution: d(x) = sum_i d_i x^i."""

    def __call__(self, x):
        return x * self._poly(x)

    def derivative(self, x):
        """d'(x) = sum_i i d_i x^(i-1)."""
        if isinstance(x, np.ndarray):
            r = np.zeros_like(x, dtype=float)
        else:
            r = 0.0
        for k in range(len(self._tuple) - 1, -1, -1):
            r = r * x + (k + 1) * self._tuple[k]
        return r

    @property
    def mean_degree(self):
        """L'(1) = sum_i i L_i."""
        return math.fsum((k + 1) * c for k, c in enumerate(self._tuple))


@dataclass(frozen=True)
class Channel:
    """Binary erasure channel with erasure probability p; capacity 1 - p."""

    p: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"erasure probability {self.p} outside [0,1]")

    @property
    def capacity(self):
        return 1.0 - self.p


@dataclass(frozen=True)
class EnsembleSpec:
    """A code ensemble: family kind plus its (lambda, rho) edge distributions.

    For IRA/ARA kinds the distributions describe only the edges between the
    irregular bipartite layers; accumulator edges are excluded by convention.
    """

    kind: str
    lam: EdgeDist
    rho: EdgeDist

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.lam.coeff(1) > 0:
            warnings.warn(
                "lambda has degree-1 mass; the c/v curve construction "
                "assumes lambda(0) = 0",
                Degree1Warning,
                stacklevel=2,
            )

    @cached_property
    def L(self):
        return edge_to_node(self.lam)

    @cached_property
    def R(self):
        return edge_to_node(self.rho)

    @cached_property
    def a_L(self):
        return avg_degree(self.lam)

    @cached_property
    def a_R(self):
        return avg_degree(self.rho)


# ---------------------------------------------------------------------------
# operations


def eval_edge(d, x):
    """Evaluate an edge-perspective distribution at x in [0,1]."""
    _check_unit(x)
    return d(x)


def eval_node(d, x):
    """Evaluate a node-perspective distribution at x in [0,1]."""
    _check_unit(x)
    return d(x)


def _check_unit(x):
    xmin = np.min(x) if isinstance(x, np.ndarray) else x
    xmax = np.max(x) if isinstance(x, np.ndarray) else x
    if xmin < 0.0 or xmax > 1.0:
        raise ValueError(f"argument {x!r} outside [0,1]")


def edge_to_node(d):
    """Node perspective from edge perspective: L_i = (d_i/i) / sum_j d_j/j."""
    c = d.coeffs
    w = c / np.arange(1, len(c) + 1)
    return NodeDist(w / w.sum())


def node_to_edge(d):
    """Edge perspective from node perspective: d_i = i L_i / L'(1)."""
    c = d.coeffs
    w = c * np.arange(1, len(c) + 1)
    return EdgeDist(w / w.sum())


def avg_degree(d):
    """Average node degree 1 / integral of an edge distribution."""
    return 1.0 / d.integral


def design_rate(e):
    """Design rate of an ensemble; raises if the result leaves (0,1)."""
    if e.kind == LDPC:
        rate = 1.0 - e.rho.integral / e.lam.integral
    elif e.kind in (ARA_SYSTEMATIC, IRA_SYSTEMATIC):
        a_l, a_r = e.a_L, e.a_R
        rate = a_r / (a_l + a_r)
    elif e.kind == IRA_NONSYSTEMATIC:
        rate = e.a_R / e.a_L
    else:  # pragma: no cover - guarded by EnsembleSpec
        raise ValueError(e.kind)
    if not (0.0 < rate < 1.0):
        raise ValueError(f"design rate {rate} outside (0,1)")
    return rate


def capacity_gap(e, ch):
    """Multiplicative gap to capacity: 1 - R/C.  May be negative."""
    if ch.capacity == 0.0:
        raise ValueError("zero-capacity channel")
    return 1.0 - design_rate(e) / ch.capacity


def graphical_complexity(edge_count, n, rate):
    """Edges per information bit: E / (n R)."""
    if n <= 0 or rate <= 0:
        raise ValueError("need n > 0 and rate > 0")
    return edge_count / (n * rate)


def fraction_degree2(e):
    """Fraction of degree-2 variable (punctured/information) nodes, lambda_2 a_L / 2."""
    return e.lam.coeff(2) * e.a_L / 2.0


# ---------------------------------------------------------------------------
# right-regular reference family


def right_regular_series(a, terms):
    """First Taylor coefficients of 1 - (1-x)^(1/(a-1)) around 0.

    All coefficients are positive for a >= 2; the k'th one becomes the
    degree-(k+1) edge coefficient of the family's lambda.
    """
    if a < 2:
        raise ValueError("check degree a must be >= 2")
    alpha = 1.0 / (a - 1)
    out = np.empty(terms)
    ck = alpha
    for k in range(1, terms + 1):
        if k > 1:
            ck = ck * ((k - 1) - alpha) / k
        out[k - 1] = ck
    return out


def right_regular_design_p(a, D):
    """Design erasure probability of the truncated family: the kept series mass.

    Below this value the exact series identity lambda(1 - rho(1-x)) = x makes
    the truncated DE map a strict contraction, so the family threshold is at
    least this large.
    """
    return float(right_regular_series(a, D).sum())


def right_regular_truncation_for_mass(a, mass, d_max=8192):
    """Smallest truncation depth whose kept series mass reaches `mass`."""
    cs = right_regular_series(a, d_max)
    cum = np.cumsum(cs)
    idx = int(np.searchsorted(cum, mass))
    if idx >= d_max:
        raise ValueError(f"mass {mass} not reached within {d_max} terms")
    return idx + 1


def build_right_regular(a, D):
    """Right-regular LDPC ensemble: rho = x^(a-1), lambda a truncated series.

    lambda keeps the first D Taylor terms of 1 - (1-x)^(1/(a-1)), renormalized,
    so edge degrees run over 2..D+1.
    """
    if a < 3:
        raise ValueError("need a >= 3")
    if D < 2:
        raise ValueError("need D >= 2")
    cs = right_regular_series(a, D)
    if np.any(cs < 0):
        raise ValueError("negative series coefficient; construction invalid")
    lam = EdgeDist(np.concatenate([[0.0], cs / cs.sum()]))
    rho_c = np.zeros(a)
    rho_c[a - 1] = 1.0
    return EnsembleSpec(LDPC, lam, EdgeDist(rho_c))


def mix_degree2(lam, mass):
    """Move `mass` of the edge fraction onto degree 2 and renormalize."""
    if not (0.0 <= mass < 1.0):
        raise ValueError("mass outside [0,1)")
    c = (1.0 - mass) * lam.coeffs.copy()
    if len(c) < 2:
        c = np.concatenate([c, [0.0]])
    c[1] += mass
    return EdgeDist(c)


# ---------------------------------------------------------------------------
# plain-text serialization: a header naming the perspective, then one
# "degree<TAB>coefficient" line per non-zero degree


def dist_to_text(d):
    kind = "edge" if isinstance(d, EdgeDist) else "node"
    lines = [kind]
    for i, c in enumerate(d.coeffs, start=1):
        if c != 0.0:
            lines.append(f"{i}\t{c:.17g}")
    return "\n".join(lines) + "\n"


def dist_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty distribution text")
    kind = lines[0].strip().lower()
    if kind not in ("edge", "node"):
        raise ValueError(f"unknown perspective {kind!r}")
    pairs = []
    for ln in lines[1:]:
        deg_s, coeff_s = ln.split("\t") if "\t" in ln else ln.split()
        pairs.append((int(deg_s), float(coeff_s)))
    if not pairs:
        raise ValueError("no coefficients")
    dmax = max(d for d, _ in pairs)
    c = np.zeros(dmax)
    for deg, val in pairs:
        if deg < 1:
            raise ValueError(f"degree {deg} < 1")
        if c[deg - 1] != 0.0:
            raise ValueError(f"duplicate degree {deg}")
        c[deg - 1] = val
    return EdgeDist(c) if kind == "edge" else NodeDist(c)
