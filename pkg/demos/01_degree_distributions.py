# Degree-distribution algebra: perspectives, averages, rates, and the
# right-regular reference family.

from iterlab import (
    ARA_SYSTEMATIC,
    LDPC,
    Channel,
    EdgeDist,
    EnsembleSpec,
    avg_degree,
    build_right_regular,
    capacity_gap,
    design_rate,
    dist_to_text,
    edge_to_node,
    fraction_degree2,
    graphical_complexity,
    node_to_edge,
    right_regular_design_p,
)

print("=== the (3,6)-regular LDPC ensemble ===")
lam = EdgeDist([0, 0, 1])           # lambda(x) = x^2
rho = EdgeDist([0, 0, 0, 0, 0, 1])  # rho(x) = x^5
e36 = EnsembleSpec(LDPC, lam, rho)
print("lambda(0.5) =", lam(0.5))
print("average degrees: a_L =", avg_degree(lam), " a_R =", avg_degree(rho))
print("design rate:", design_rate(e36))
print("gap to capacity at p=0.4:", capacity_gap(e36, Channel(0.4)))
print("edges per information bit for n=1200:", graphical_complexity(3600, 1200, 0.5))

print()
print("=== node <-> edge perspective ===")
mixed = EdgeDist([0, 0.5, 0.5])     # lambda(x) = x/2 + x^2/2
L = edge_to_node(mixed)
print("lambda:", mixed.coeffs, "-> L:", L.coeffs)
print("round trip:", node_to_edge(L).coeffs)
print("degree-2 node fraction via lambda_2 a_L / 2:",
      fraction_degree2(EnsembleSpec(LDPC, mixed, rho)))

print()
print("=== right-regular family ===")
# rho = x^(a-1); lambda truncates the series of 1-(1-x)^(1/(a-1)).
# At the design erasure probability (the kept series mass) the gap to
# capacity shrinks as the truncation deepens.
for D in (2, 4, 8, 16, 32):
    fam = build_right_regular(3, D)
    p_design = right_regular_design_p(3, D)
    gap = capacity_gap(fam, Channel(p_design))
    print(f"  a=3 D={D:3d}: design p={p_design:.4f} rate={design_rate(fam):.4f} gap={gap:.4f}")

# along the capacity-approaching coupling a = D the degree-2 node fraction
# falls toward one half
print("degree-2 fraction along a = D:",
      [round(fraction_degree2(build_right_regular(D, D)), 4) for D in (50, 100, 200)])

print()
print("=== plain-text serialization ===")
print(dist_to_text(mixed))

print()
print("=== ARA / IRA design rates ===")
ara = EnsembleSpec(ARA_SYSTEMATIC, EdgeDist([0, 0, 1]), EdgeDist([0, 0, 0, 0, 0, 1]))
print("systematic ARA with a_L=3, a_R=6:", design_rate(ara))
