# A seeded sweep through the harness, written to disk as CSV plus JSON metadata.
import sys
import tempfile
from pathlib import Path

from erratic.harness import ExperimentConfig, run_regime

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp()) / "sweep"
cfg = ExperimentConfig(regime="lambda_over_n", n_values=[300, 1000, 3000], lambda_values=[1.0, 4.0],
                       replicates=2000, seed=42, depth=20, out=str(out))
res = run_regime(cfg)
for row in res.rows:
    print(f"lam={row['param']} n={row['n']:5d}  mean {row['mean']:.4f}  var {row['var']:.4f} "
          f"(limit {row['theory_var']:.4f})  d1 {row['d1']:.4f}  floor {row['d1_floor']:.4f}")
print("gates passed:", res.passed)
print("wrote", sorted(p.name for p in out.parent.iterdir()))
