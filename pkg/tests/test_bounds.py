import json
import math

import numpy as np
import pytest

from iterlab import (
    ARA_SYSTEMATIC,
    LDPC,
    BoundInput,
    DEConfig,
    EdgeDist,
    EnsembleSpec,
    ara_bound,
    area_ara,
    area_ara_quadrature,
    area_ldpc,
    area_ldpc_quadrature,
    bound_for,
    de_run,
    edge_to_node,
    inv_L_lower_bound,
    inverse_monotone,
    ira_bound,
    ldpc_bound,
    ldpc_de_run,
    pb_floor,
    record_to_csv,
    record_to_json,
    scaling_experiment,
    tilted_recursion_run,
    triangle_decompose,
    turbo_bound_alias,
    verify_bound,
)
from conftest import random_ara, random_ldpc


def test_ldpc_bound_spot_value():
    res = ldpc_bound(BoundInput(0.1, 0.4, 0.01, 0.5))
    assert res.applicable
    assert res.value == pytest.approx(4.0186, abs=1e-4)
    # independent arithmetic
    assert res.value == pytest.approx(
        2 / 0.6 * (math.sqrt(0.2) - 0.1) ** 2 * 10, abs=1e-12
    )


def test_ldpc_bound_inapplicable_and_errors():
    res = ldpc_bound(BoundInput(0.1, 0.4, 0.01, 0.0))
    assert not res.applicable and res.value == 0.0
    with pytest.raises(ValueError):
        ldpc_bound(BoundInput(0.1, 1.0, 0.01, 0.5))


def test_ldpc_bound_small_pb_limit():
    limit = 2 * 0.4 / 0.6 * 0.5 / 0.1
    res = ldpc_bound(BoundInput(0.1, 0.4, 1e-12, 0.5))
    assert res.value == pytest.approx(limit, rel=1e-4)


def test_ara_bound_spot_value():
    res = ara_bound(BoundInput(0.1, 0.5, 0.02, 0.5))
    assert res.applicable
    assert res.value == pytest.approx(1.1526, abs=1e-4)
    lhs = 1 - math.sqrt(1 - 0.02 / 0.5)
    assert res.value == pytest.approx(
        2 * 0.5 * 0.9 * (math.sqrt(0.25) - math.sqrt(lhs)) ** 2 * 10, abs=1e-12
    )


def test_ara_bound_limits_and_errors():
    limit = 2 * 0.5**2 * 0.9 * 0.5 / 0.1
    res = ara_bound(BoundInput(0.1, 0.5, 1e-13, 0.5))
    assert res.value == pytest.approx(limit, rel=1e-4)
    assert not ara_bound(BoundInput(0.1, 0.5, 0.02, 0.0)).applicable
    with pytest.raises(ValueError):
        ara_bound(BoundInput(0.1, 0.3, 0.4, 0.5))
    assert not ara_bound(BoundInput(0.1, 0.0, 0.0, 0.5)).applicable


def test_ira_bound_spot_values():
    sys = ira_bound(BoundInput(0.1, 0.4, 0.01, 0.5), systematic=True)
    assert sys.value == pytest.approx(2.1700, abs=1e-4)
    assert sys.value == pytest.approx(
        2 * 0.9 * (math.sqrt(0.2) - 0.1) ** 2 * 10, abs=1e-12
    )
    non = ira_bound(BoundInput(0.1, 0.4, 0.01, 0.5), systematic=False)
    # literal arithmetic of the non-systematic formula
    assert non.value == pytest.approx(
        2 * 0.9 * (math.sqrt(0.5) - 0.1) ** 2 * 10, abs=1e-12
    )
    assert non.value == pytest.approx(6.634416, abs=1e-4)
    assert not ira_bound(BoundInput(0.1, 0.4, 0.6, 0.5), systematic=False).applicable


def test_turbo_alias():
    b = BoundInput(0.1, 0.5, 0.02, 0.5)
    assert turbo_bound_alias(b) == ara_bound(b)
    assert bound_for("turbo", b) == ara_bound(b)


def test_bound_monotonicity(rng):
    for _ in range(50):
        eps = 0.02 + 0.3 * rng.random()
        p = 0.2 + 0.6 * rng.random()
        l2 = 0.2 + 0.6 * rng.random()
        pb = 0.5 * p * l2 * rng.random()
        base = BoundInput(eps, p, pb, l2)
        for fam in (LDPC, ARA_SYSTEMATIC, "ira_systematic", "ira_nonsystematic"):
            v0 = bound_for(fam, base).value
            up_pb = bound_for(fam, BoundInput(eps, p, min(pb * 1.5, 1.0), l2)).value
            up_eps = bound_for(fam, BoundInput(min(eps * 1.5, 1.0), p, pb, l2)).value
            up_l2 = bound_for(fam, BoundInput(eps, p, pb, min(l2 * 1.2, 1.0))).value
            assert up_pb <= v0 + 1e-12
            assert up_eps <= v0 + 1e-12
            assert up_l2 >= v0 - 1e-12


def test_area_ldpc_examples(regular_3_6):
    a = area_ldpc(regular_3_6, 0.4)
    assert a == pytest.approx(1 / 30, abs=1e-15)
    assert area_ldpc(regular_3_6, 0.5) == pytest.approx(0.0, abs=1e-15)
    q = area_ldpc_quadrature(regular_3_6, 0.4)
    assert q == pytest.approx(a, abs=1e-8)


def test_area_ldpc_random(rng):
    for _ in range(5):
        e = random_ldpc(rng)
        p = 0.1 + 0.6 * rng.random()
        assert area_ldpc_quadrature(e, p) == pytest.approx(area_ldpc(e, p), abs=1e-8)


def test_area_ara_examples():
    e = EnsembleSpec(ARA_SYSTEMATIC, EdgeDist([0, 0, 1]), EdgeDist([0, 0, 0, 0, 0, 1]))
    assert area_ara(e, 0.3) == pytest.approx(1 / 60, abs=1e-15)
    # zero-gap channel
    assert area_ara(e, 1 / 3) == pytest.approx(0.0, abs=1e-15)


def test_area_ara_random(rng):
    for _ in range(5):
        e = random_ara(rng)
        p = 0.1 + 0.6 * rng.random()
        assert area_ara_quadrature(e, p) == pytest.approx(area_ara(e, p), abs=1e-8)


def test_inv_L_lower_bound_examples():
    assert inv_L_lower_bound(0.3, 0.3) == pytest.approx(0.0, abs=1e-15)
    assert inv_L_lower_bound(0.0, 0.5) == 1.0
    L = edge_to_node(EdgeDist(np.array([0, 2 * 0.5, 3 * 0.5]) / 2.5))
    assert np.allclose(L.coeffs, [0, 0.5, 0.5])
    bound = inv_L_lower_bound(0.2, L.coeff(2))
    true = 1.0 - inverse_monotone(L, 0.2, tol=1e-12)
    assert true >= bound - 1e-12


def test_inv_L_lower_bound_random(rng):
    from conftest import random_edge_dist

    for _ in range(50):
        lam = random_edge_dist(rng, max_degree=7)
        L = edge_to_node(lam)
        l2 = L.coeff(2)
        x = rng.random()
        true = 1.0 - inverse_monotone(L, x, tol=1e-12)
        assert true >= inv_L_lower_bound(x, l2) - 1e-9


def test_triangle_decompose_single_iteration(regular_3_6):
    cfg = DEConfig(p=0.4, target_pb=0.4, max_iter=5)
    t = ldpc_de_run(regular_3_6.lam, regular_3_6.rho, cfg)
    dec = triangle_decompose(t, regular_3_6, 0.4)
    assert len(dec.v_lengths) == len(t)
    assert dec.total_area == pytest.approx(1 / 30, abs=1e-15)


def test_triangle_decompose_long_run(rng):
    # degree-2 mass present, sub-threshold: prefix inequalities hold over
    # a long trajectory (the call raising would fail the test)
    lam = EdgeDist([0, 0.3, 0.4, 0.3])
    rho = EdgeDist([0, 0, 0, 0, 0.5, 0.5])
    e = EnsembleSpec(LDPC, lam, rho)
    cfg = DEConfig(p=0.3, target_pb=0.0, max_iter=1000, fp_tol=1e-300)
    t = ldpc_de_run(lam, rho, cfg)
    dec = triangle_decompose(t, e, 0.3)
    # telescoping: 1 - sum |v_i| equals c(x^(l))
    c = lambda x: 1.0 - rho(1.0 - x)
    sums = np.cumsum(dec.v_lengths)
    for l in (0, 1, 5, len(t) - 1):
        assert 1.0 - sums[l] == pytest.approx(c(t.states[l]), abs=1e-12)
    assert np.sum(dec.a_areas + dec.b_areas) <= dec.total_area


def test_triangle_decompose_ara(rng):
    for _ in range(3):
        e = random_ara(rng)
        cfg = DEConfig(p=0.22, target_pb=0.0, max_iter=500, fp_tol=1e-300)
        t = tilted_recursion_run(e, cfg)
        dec = triangle_decompose(t, e, 0.22)
        # first drop from the (1,1) corner down to the check curve
        from iterlab import TiltedEnsemble

        tilted = TiltedEnsemble(e, 0.22)
        assert dec.v_lengths[0] == pytest.approx(tilted.rho_t(0.0), abs=1e-12)
        assert np.sum(dec.a_areas + dec.b_areas) <= dec.total_area + 1e-12


def test_triangle_decompose_errors(rng, regular_3_6):
    cfg = DEConfig(p=0.2, target_pb=1e-6)
    with pytest.raises(ValueError):
        ara_traj = de_run(random_ara(rng), cfg)
        triangle_decompose(ara_traj, random_ara(rng), 0.2)


def test_verify_bound_regular_inapplicable(regular_3_6):
    rec = verify_bound(regular_3_6, DEConfig(p=0.4, target_pb=1e-6))
    assert rec["status"] == "inapplicable"
    assert rec["satisfied"] is True
    assert rec["measured_l"] == 17
    assert rec["schema"] == 1


def test_verify_bound_degree2_grid(rng):
    ok = 0
    for _ in range(6):
        e = random_ldpc(rng)
        rec = verify_bound(e, DEConfig(p=0.15, target_pb=1e-5, max_iter=20_000))
        if rec["applicable"] and rec["measured_l"] is not None:
            assert rec["status"] == "ok"
            assert rec["measured_l"] >= rec["bound_l"]
            ok += 1
    assert ok >= 4


def test_verify_bound_perfect_channel(regular_3_6):
    rec = verify_bound(regular_3_6, DEConfig(p=0.0, target_pb=1e-6))
    assert rec["measured_l"] == 0
    assert rec["satisfied"] is True


def test_pb_floor():
    assert pb_floor(0, 0.1, 0.4, 0.5) == pytest.approx(0.2, abs=1e-15)
    # beyond the zero-erasure bound the floor vanishes
    big_l = math.ceil(2 * 0.4 * 0.5 / (0.6 * 0.1)) + 1
    assert pb_floor(big_l, 0.1, 0.4, 0.5) == 0.0
    with pytest.raises(ValueError):
        pb_floor(-1, 0.1, 0.4, 0.5)


def test_pb_floor_roundtrip(rng):
    for _ in range(100):
        eps = 0.02 + 0.3 * rng.random()
        p = 0.2 + 0.6 * rng.random()
        l2 = 0.2 + 0.7 * rng.random()
        l = int(rng.integers(0, 50))
        floor = pb_floor(l, eps, p, l2)
        res = ldpc_bound(BoundInput(eps, p, floor, l2))
        assert res.value <= l + 1e-9


def test_record_rendering():
    rec = {"schema": 1, "family": "ldpc", "epsilon": 0.25, "satisfied": True}
    assert json.loads(record_to_json(rec)) == rec
    csv = record_to_csv([rec])
    lines = csv.strip().splitlines()
    assert lines[0].split(",") == ["schema", "family", "epsilon", "satisfied"]
    assert lines[1].split(",")[1] == "ldpc"


def test_scaling_experiment_single_point():
    rows = scaling_experiment([0.1], target_pb=1e-5)
    (row,) = rows
    assert row["satisfied"]
    assert row["applicable"]
    assert row["epsilon"] == pytest.approx(0.1, abs=1e-12)
    assert row["l_times_epsilon"] == pytest.approx(row["measured_l"] * 0.1)
    assert row["delta"] > 1.0
    with pytest.raises(ValueError):
        scaling_experiment([])
