"""The toggle switch lives on [0, 20]^2; the net is trained on [0, 1]^2.

scale_system divides states by 20, training happens in scaled units, and
the rollout multiplies back, so the caller only ever sees physical values.
"""
import numpy as np

from resnet_ode import (Architecture, TrainConfig, generate_pairs, generate_reference_pairs,
                        get_system, simulate_reference, simulate_resnet, train)

scaled = get_system("toggle_scaled")
print("training domain:", scaled.domain.bounds.tolist(), " scale:", scaled.scale)

learning = generate_pairs(scaled, "rk4", 0.1, 2000, seed=0)
reference = generate_reference_pairs(scaled, 0.1, 2000, seed=0, substeps=200)
rec = train(Architecture(2, 2, 40), learning, reference, TrainConfig(iterations=500, learning_rate=0.1, seed=0))
print(f"mean L2 on scaled pairs after 500 passes: {rec.final_mean_l2:.2e}")

x0 = [19.0, 17.0]
net = simulate_resnet(rec.final_params, x0, 0.0, 0.1, 50, scale=scaled.scale)
ref = simulate_reference(get_system("toggle"), x0, 0.0, 0.1, 50)
for k in range(0, 51, 10):
    print(f"t={net.times[k]:.1f}  net {np.round(net.states[k], 3)}  reference {np.round(ref.states[k], 3)}")
