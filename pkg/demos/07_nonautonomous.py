"""A time-dependent system learned as an autonomous one.

Appending t as a fourth coordinate with derivative 1 turns the 3-D
non-autonomous system into a 4-D autonomous one, so the same ResNet
machinery applies; the net has to learn that x4 just advances by dt.
"""
import numpy as np

from resnet_ode import (Architecture, TrainConfig, generate_pairs, generate_reference_pairs,
                        get_system, simulate_reference, simulate_resnet, train)

system = get_system("nonautonomous_4d")
learning = generate_pairs(system, "rk4", 0.05, 2000, seed=0)
reference = generate_reference_pairs(system, 0.05, 2000, seed=0)
rec = train(Architecture(4, 1, 8), learning, reference, TrainConfig(iterations=300, seed=0))
print(f"final mean L2 vs reference: {rec.final_mean_l2:.2e}")

x0 = [2.0, -9.0, 0.0, 1.1]
net = simulate_resnet(rec.final_params, x0, 1.1, 0.05, 18)
ref = simulate_reference(system, x0, 1.1, 0.05, 18)
print("time coordinate learned by the net:", np.round(net.states[::6, 3], 4))
print("max deviation over the run:", f"{np.max(np.linalg.norm(net.states - ref.states, axis=1)):.3g}")
