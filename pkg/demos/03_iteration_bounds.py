# Closed-form lower bounds on the number of decoding iterations, their
# area-theorem backbone, and verification against exact DE measurements.

import numpy as np

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
    inv_L_lower_bound,
    ira_bound,
    ldpc_bound,
    ldpc_de_run,
    pb_floor,
    record_to_json,
    triangle_decompose,
    verify_bound,
)

print("=== the bounds at a reference operating point ===")
b = BoundInput(epsilon=0.1, p=0.4, pb=0.01, l2=0.5)
print("LDPC     :", ldpc_bound(b).value)
print("IRA (sys):", ira_bound(b, systematic=True).value)
print("IRA (non):", ira_bound(b, systematic=False).value)
print("ARA      :", ara_bound(BoundInput(0.1, 0.5, 0.02, 0.5)).value)
print("without degree-2 nodes the bounds are trivial:")
print("  applicable:", ldpc_bound(BoundInput(0.1, 0.4, 0.01, 0.0)).applicable)

print()
print("=== reading the bound backwards: an erasure floor per iteration count ===")
for l in (0, 5, 20, 100):
    print(f"  l={l:3d}: pb floor {pb_floor(l, 0.1, 0.4, 0.5):.4e}")

print()
print("=== area identities behind the proofs ===")
e36 = EnsembleSpec(LDPC, EdgeDist([0, 0, 1]), EdgeDist([0, 0, 0, 0, 0, 1]))
print("LDPC closed form:", area_ldpc(e36, 0.4), " quadrature:",
      area_ldpc_quadrature(e36, 0.4))
ara = EnsembleSpec(ARA_SYSTEMATIC, EdgeDist([0, 0, 1]), EdgeDist([0, 0, 0, 0, 0, 1]))
print("ARA  closed form:", area_ara(ara, 0.3), " quadrature:",
      area_ara_quadrature(ara, 0.3))
print("inverse-L bound at x=0.2, L2=0.5:", inv_L_lower_bound(0.2, 0.5))

print()
print("=== triangle geometry under a DE trajectory ===")
lam = EdgeDist([0, 0.3, 0.4, 0.3])
rho = EdgeDist([0, 0, 0, 0, 0.5, 0.5])
e = EnsembleSpec(LDPC, lam, rho)
cfg = DEConfig(p=0.3, target_pb=1e-10, max_iter=5000)
traj = ldpc_de_run(lam, rho, cfg)
dec = triangle_decompose(traj, e, 0.3)
print(f"iterations: {len(traj)}; triangle area sum "
      f"{np.sum(dec.a_areas + dec.b_areas):.6f} <= total {dec.total_area:.6f}")

print()
print("=== bound vs measured iterations ===")
rec = verify_bound(e, DEConfig(p=0.3, target_pb=1e-6, max_iter=100_000))
print(record_to_json(rec))
