"""How accurate is one step of each scheme?

We compare single-step targets against a refined-mesh reference on the
nodal sink, halving dt three times, and fit the log-log slope.
"""
import numpy as np

from resnet_ode import fit_order, generate_pairs, generate_reference_pairs, get_system
from resnet_ode.metrics import target_mean_l2_error

system = get_system("nodal_sink")
dts = [0.2, 0.1, 0.05, 0.025]

refs = {dt: generate_reference_pairs(system, dt, 500, seed=0) for dt in dts}
print(f"{'scheme':8s}" + "".join(f"{dt:>12g}" for dt in dts) + "     slope")
for scheme in ["euler", "rk2", "rk4"]:
    errs = [target_mean_l2_error(generate_pairs(system, scheme, dt, 500, seed=0), refs[dt]) for dt in dts]
    print(f"{scheme:8s}" + "".join(f"{e:12.3e}" for e in errs) + f"  {fit_order(dts, errs):8.2f}")

# a single step carries the local error O(dt^(p+1)), so the slopes land near 2, 3 and 5
print("expected slopes: 2, 3, 5 (rk4 here is the 3/8-rule variant)")
