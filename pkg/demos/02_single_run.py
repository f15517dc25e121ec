"""One run of the process with snapshots, compared against the trajectories."""
from girth_triples import RunConfig, run_trial

cfg = RunConfig(n=300, ell=6, seed=1, snapshot_times=(0.02, 0.05, 0.10, 0.13, 0.15),
                pair_samples=200, triple_samples=20, w_ks=(0,))
rec = run_trial(cfg)
print(f"n={cfg.n} ell={cfg.ell}: m={rec.m} triples, {rec.remaining_edges} uncovered pairs, "
      f"covered fraction {rec.covered_fraction:.4f}, {rec.wall_time:.1f}s")
print(f"{'t':>6} {'|Q|':>9} {'q_hat':>11} {'err':>7} {'mean Y':>8} {'y_hat':>8} {'err':>7}")
for s in rec.snapshots:
    pr = s.predicted
    print(f"{s.t:6.3f} {s.q_size:9d} {pr.q_hat:11.1f} {s.rel_errors['q']:+7.3f} "
          f"{s.y_mean:8.2f} {pr.y_hat:8.2f} {s.rel_errors['y']:+7.3f}")
# the JSON and CSV forms carry the same data
print(rec.to_csv().splitlines()[0])
