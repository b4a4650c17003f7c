"""Monte Carlo against the predicted uncertainty for the three circuits."""
from spinsqueeze import MeasConfig, MZISpec, OATConfig, meas_metrics, monte_carlo, oat_metrics, sql

cases = [
    ("none", MZISpec(20, None, 0.01), sql(20)),
    ("interaction", MZISpec(40, OATConfig(0.177), 0.01), oat_metrics(40, 0.177).delta_phi_w),
    ("measurement", MZISpec(40, MeasConfig(2.06), 0.01), meas_metrics(40, 2.06).delta_phi_w),
]
for name, spec, predicted in cases:
    r = monte_carlo(spec, 100_000, seed=1)
    print(f"{name:12s} N={spec.n_electrons:3d}  rms={r.rms_error:.4f} +- {r.stderr:.4f}  predicted={predicted:.4f}")
