"""Same number of SGD updates, different amounts of data.

Pass --full for the 10^6-update budget on a 6x40 net (minutes); the
default is a 10^5 budget so the demo finishes quickly.
"""
import sys
import tempfile

from resnet_ode.experiments import ExperimentConfig, run_density_study

budget = 1_000_000 if "--full" in sys.argv else 100_000
cfg = ExperimentConfig(experiment="density_study", system_id="pendulum", update_budget=budget,
                       density_J=[100, 500, 2000, 10000], trace_points=10,
                       output_dir=tempfile.mkdtemp(prefix="density_"))
rows = run_density_study(cfg)

for J in cfg.density_J:
    last = [r for r in rows if r["J"] == J][-1]
    print(f"J={J:5d}  K={last['iterations']:5d}  train {last['train_mean_l2']:.3e}"
          f"  held-out {last['test_mean_l2']:.3e}")
