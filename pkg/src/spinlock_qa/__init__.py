"""Spin-lock quantum annealing: lab/rotating-frame state-vector simulation and
average-Hamiltonian analysis of rotating-wave-approximation violation."""

from spinlock_qa.operators import (
    GroundState,
    PauliString,
    all_up_state,
    basis_state,
    fidelity,
    ground_state,
    matrix_of,
    pauli_embed,
    plus_state,
    spectral_gap,
)
from spinlock_qa.model import (
    DrivenHamiltonian,
    Schedule,
    SystemSpec,
    build_hqa,
    build_ising,
    build_lab_frame,
    build_rot_frame,
    build_transverse,
    envelope,
    rotate_state,
)
from spinlock_qa.propagate import (
    IntegrationError,
    StepPolicy,
    Trajectory,
    propagate,
    run_anneal,
    step_rk4,
)
from spinlock_qa.magnus import (
    MagnusPair,
    PeriodInfo,
    average_hamiltonians,
    common_period,
    effective_ground_curve,
    h2_analytic,
    omega1_avg,
    omega2_avg,
)

__version__ = "0.1.0"
