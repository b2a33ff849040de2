"""Train one small ResNet per target scheme on the nodal sink.

The net never sees the reference solution, only scheme targets, yet its
error against the reference flattens out at the scheme's own target error.
"""
import numpy as np

from resnet_ode import (Architecture, TrainConfig, generate_pairs, generate_reference_pairs,
                        get_system, train)
from resnet_ode.metrics import target_mean_l2_error

system = get_system("nodal_sink")
reference = generate_reference_pairs(system, 0.1, 500, seed=0)
arch = Architecture(2, hidden_layers=1, hidden_width=6)
cfg = TrainConfig(iterations=500, learning_rate=0.1, lr_decay=0.999, seed=0)

for scheme in ["euler", "rk2", "rk4"]:
    learning = generate_pairs(system, scheme, 0.1, 500, seed=0)
    rec = train(arch, learning, reference, cfg)
    target = target_mean_l2_error(learning, reference)
    trace = np.array(rec.mean_l2_vs_reference)
    print(f"{scheme}: target error {target:.2e}")
    for k in (1, 10, 100, 500):
        print(f"   after {k:3d} passes  net error {trace[k - 1]:.2e}")
    print(f"   final / target = {trace[-1] / target:.2f}")
