# How CFTP cost grows with lattice size on either side of beta_c.
#
# Above critical the mean number of updates tracks N log N. Below critical
# the direct chains stop coalescing within any reasonable budget once the
# lattice is big enough, while the dual route stays cheap.

from exact_ising.cli import bench_rows

for beta, branch in ((0.6, "auto"), (1.5, "direct"), (1.5, "dual")):
    rows = bench_rows([8, 12, 16], beta, reps=5, seed=0, branch=branch, cap=10**7,
                      allow_cap=True, wall_time=False)
    print(f"\nbeta={beta} branch={branch}")
    for r in rows:
        if r["rep"] == "mean":
            print(f"  L={r['L']:3d}  mean updates={r['total_updates']:>10}  "
                  f"per N log N={r['ratio']:>8}  censored={r['censored']}")
