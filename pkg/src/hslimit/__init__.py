"""Exact inverse-power-law Boltzmann angular kernel, numerical
certification of its inequalities, and a homogeneous isotropic solver
demonstrating the O(s) hard-sphere limit."""

__version__ = "0.1.0"

from .kernel import (
    DomainError,
    ImplicitMapTable,
    InversionError,
    KernelValue,
    PotentialParam,
    b_bar_s,
    b_s,
    beta_s,
    beta_s_prime,
    build_map_table,
    c_s,
    eval_g,
    phi_s,
    phi_s_prime,
    wallis,
    y_s,
    y_s_prime,
)
from .bounds import InequalityCheck, run_all
from .collision import (
    CollisionGeometry,
    HardSphereKernel,
    InversePowerKernel,
    RadialDistribution,
    SolverConfig,
    bimodal,
    compact_bump,
    entropy,
    eval_Q,
    l1k_norm,
    llogl,
    loss_frequency,
    make_kernel,
    maxwellian,
    post_collision_speeds,
    povzner_sample_check,
    w11k_seminorm,
)
from .solver import (
    ConvergenceStudy,
    InstabilityError,
    TimeSeries,
    convergence_study,
    discretization_floor,
    moment_propagation_check,
    run_flow,
    run_pair,
    step,
)
