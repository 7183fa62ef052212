# Iterations scale like the inverse gap to capacity: walk a degree-2-mixed
# right-regular family toward capacity and watch l * epsilon stay above the
# bound's constant while l itself keeps doubling.

from iterlab import scaling_experiment

epsilons = [0.1, 0.05, 0.025]
rows = scaling_experiment(epsilons, target_pb=1e-6)

print(f"{'epsilon':>8} {'p':>8} {'L2':>8} {'measured l':>11} "
      f"{'bound l':>9} {'l*eps':>8} {'edges/info bit':>15}")
for r in rows:
    print(f"{r['epsilon']:>8.4g} {r['p']:>8.4f} {r['l2']:>8.4f} "
          f"{r['measured_l']:>11d} {r['bound_l']:>9.2f} "
          f"{r['l_times_epsilon']:>8.2f} {r['delta']:>15.2f}")

ls = [r["measured_l"] for r in rows]
print()
print("halving the gap multiplies the measured iteration count by:",
      [round(b / a, 2) for a, b in zip(ls, ls[1:])])
print("every point satisfied its lower bound:", all(r["satisfied"] for r in rows))
