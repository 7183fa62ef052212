import numpy as np
import pytest

from iterlab import (
    ARA_SYSTEMATIC,
    IRA_NONSYSTEMATIC,
    IRA_SYSTEMATIC,
    LDPC,
    EdgeDist,
    EnsembleSpec,
    design_rate,
)


def random_edge_dist(rng, max_degree=8, min_degree=2, first_coeff=None):
    """Random valid edge distribution supported on min_degree..max_degree."""
    c = np.zeros(max_degree)
    c[min_degree - 1 :] = rng.random(max_degree - min_degree + 1)
    if first_coeff is not None:
        c[min_degree - 1] = first_coeff
    return EdgeDist(c / c.sum())


def random_ldpc(rng, max_var=8, max_chk=9, degree2=True):
    lam = random_edge_dist(rng, max_var, first_coeff=0.3 + 0.4 * rng.random() if degree2 else None)
    if not degree2:
        c = lam.coeffs.copy()
        c[1] = 0.0
        lam = EdgeDist(c / c.sum())
    rho = random_edge_dist(rng, max_chk, min_degree=4)
    return EnsembleSpec(LDPC, lam, rho)


def random_ara(rng, max_degree=7):
    """Random decodable ARA ensemble: lambda(0) = 0 and R_1 > 0."""
    lam = random_edge_dist(rng, max_degree)
    c = np.zeros(max_degree)
    c[0] = 0.05 + 0.25 * rng.random()
    c[1:] = rng.random(max_degree - 1)
    c[1:] *= (1.0 - c[0]) / c[1:].sum()
    return EnsembleSpec(ARA_SYSTEMATIC, lam, EdgeDist(c))


def random_ira(rng, systematic, max_degree=7):
    kind = IRA_SYSTEMATIC if systematic else IRA_NONSYSTEMATIC
    for _ in range(100):
        ara = random_ara(rng, max_degree)
        e = EnsembleSpec(kind, ara.lam, ara.rho)
        try:
            design_rate(e)
        except ValueError:
            continue
        return e
    raise RuntimeError("could not draw a valid IRA ensemble")


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture(scope="session")
def regular_3_6():
    return EnsembleSpec(LDPC, EdgeDist([0, 0, 1]), EdgeDist([0, 0, 0, 0, 0, 1]))
