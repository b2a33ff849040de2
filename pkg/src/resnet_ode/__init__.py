"""Residual networks as learned one-step ODE solvers."""

__version__ = "0.1.0"

from .dataset import LearningSet, generate_pairs, generate_reference_pairs, sample_domain
from .integrators import (
    NonFiniteStateError,
    StepScheme,
    euler_step,
    get_scheme,
    reference_step,
    rk2_step,
    rk4_38_step,
)
from .metrics import ErrorReport, fit_order, max_linf_error, mean_l2_error, target_mean_l2_error
from .network import (
    Architecture,
    NetParams,
    backward,
    forward,
    init_params,
    resnet_forward,
    sgd_update,
)
from .rollout import Trajectory, simulate_reference, simulate_resnet, simulate_scheme
from .systems import Domain, OdeSystem, autonomize, catalog, get_system, scale_system
from .training import TrainConfig, TrainingDiverged, TrainRecord, train, train_multi_seed
