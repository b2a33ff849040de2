"""Roll out pendulum nets trained on Euler and RK4 targets.

Both nets see the same inputs; only the targets differ.  The Euler net
inherits Euler's energy drift and leaves the training domain, the RK4 net
tracks the damped oscillation.
"""
import tempfile

import numpy as np

from resnet_ode.experiments import ExperimentConfig, run_trajectory
from resnet_ode.rollout import final_error

cfg = ExperimentConfig(experiment="trajectory", system_id="pendulum", schemes=["euler", "rk4"],
                       output_dir=tempfile.mkdtemp(prefix="pendulum_"))
res = run_trajectory(cfg)
ref = res["reference"]

for label in ("euler", "rk4"):
    tr = res[label]
    err = np.linalg.norm(tr.states - ref.states, axis=1)
    print(f"{label} net: error at t=2: {err[20]:.3g}   t=5: {err[50]:.3g}   t=10: {err[-1]:.3g}")

print("ratio of final errors (euler / rk4):",
      f"{final_error(res['euler'], ref) / final_error(res['rk4'], ref):.3g}")
print("csv files in", cfg.output_dir)
