from math import factorial

import numpy as np
import pytest
from scipy.integrate import solve_ivp

import oracles
from spinlock_qa.model import SystemSpec, hamiltonian_for, lab_frame_hamiltonian
from spinlock_qa.operators import basis_state, fidelity, plus_state
from spinlock_qa.propagate import (
    NORM_TOL,
    IntegrationError,
    StepPolicy,
    default_dt,
    propagate,
    run_anneal,
    step_rk4,
    to_rotating_frame,
)


def test_zero_hamiltonian_is_identity():
    psi = plus_state(2)
    traj = propagate(lambda t: np.zeros((4, 4)), psi, 0.0, 5.0, StepPolicy(0.1, 1.0), psi)
    np.testing.assert_allclose(traj.final_state, psi)
    assert np.all(traj.fidelities == 1.0)
    assert traj.times.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]


def test_larmor_precession():
    w = 2 * np.pi * 0.3
    H = w / 2 * oracles.X
    up = basis_state("0")
    traj = propagate(lambda t: H, up, 0.0, 4.0, StepPolicy(0.001, 0.5), up)
    np.testing.assert_allclose(traj.fidelities, np.cos(w * traj.times / 2) ** 2, atol=1e-10)


def test_step_rk4_matches_taylor_series():
    rng = np.random.default_rng(1)
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = (M + M.conj().T) / 2
    psi = plus_state(2)
    dt = 0.01
    # RK4 on a constant H is the 4th-order Taylor polynomial of exp(-i H dt)
    taylor = sum(np.linalg.matrix_power(-1j * H * dt, k) @ psi / factorial(k) for k in range(5))
    np.testing.assert_allclose(step_rk4(lambda t: H, psi, 0.0, dt), taylor, atol=1e-15)


def test_compiled_path_matches_python_path():
    spec = SystemSpec.chain(2, 2.4)
    ham = lab_frame_hamiltonian(spec)
    policy = StepPolicy(0.002, 1.0)
    psi = plus_state(2)
    fast = propagate(ham, psi, 0.0, 3.0, policy, psi)
    slow = propagate(ham.at, psi, 0.0, 3.0, policy, psi)
    np.testing.assert_allclose(fast.final_state, slow.final_state, atol=1e-12)
    np.testing.assert_allclose(fast.fidelities, slow.fidelities, atol=1e-12)


def test_against_adaptive_reference():
    spec = SystemSpec.chain(2, 2.4)
    t1 = 20.0

    def rhs(t, y):
        return -1j * (oracles.lab(spec, t) @ y)

    ref = solve_ivp(rhs, (0.0, t1), plus_state(2), method="DOP853", rtol=1e-11, atol=1e-12).y[:, -1]
    ham = lab_frame_hamiltonian(spec)
    traj = propagate(ham, plus_state(2), 0.0, t1, StepPolicy.for_hamiltonian(ham), plus_state(2))
    assert fidelity(ref, traj.final_state) == pytest.approx(1.0, abs=1e-9)


def test_default_policy_divides_sample_interval(chain4):
    for frame in ("lab", "rotating", "rwa"):
        ham = hamiltonian_for(chain4, frame)
        pol = StepPolicy.for_hamiltonian(ham, 1.0)
        n = 1.0 / pol.dt_ns
        assert abs(n - round(n)) < 1e-9
        assert pol.dt_ns <= default_dt(ham) * (1 + 1e-12)


def test_single_qubit_reaches_target():
    spec = SystemSpec.chain(1, 4.8, J_ghz=0.0)
    traj = run_anneal(spec, "lab")
    assert traj.final_fidelity > 0.999
    assert traj.max_norm_drift < NORM_TOL


def test_lab_and_rotating_states_agree():
    spec = SystemSpec.chain(2, 2.4, t_end_ns=40.0)
    lab = run_anneal(spec, "lab")
    rot = run_anneal(spec, "rotating")
    assert fidelity(to_rotating_frame(lab, spec), rot.final_state) == pytest.approx(1.0, abs=1e-8)
    # the two frames are discretized differently; agreement is at truncation level
    np.testing.assert_allclose(lab.fidelities, rot.fidelities, atol=1e-5)
    with pytest.raises(ValueError):
        to_rotating_frame(rot, spec)


def test_rwa_frame_is_nearly_adiabatic():
    traj = run_anneal(SystemSpec.chain(2, 2.4), "rwa")
    assert traj.final_infidelity < 1e-5


def test_trajectory_metadata(chain2):
    traj = run_anneal(chain2.with_(t_end_ns=10.0), "rotating")
    assert traj.frame == "rotating"
    assert traj.meta["spec"]["L"] == 2
    assert traj.n_steps == round(10.0 / traj.dt_ns)
    assert traj.fidelities[0] == pytest.approx(0.25)


@pytest.mark.parametrize(
    "policy,match",
    [
        (StepPolicy(0.3, 1.0), "whole number"),
        (StepPolicy(0.05, 1.0), "under-resolves"),
    ],
)
def test_bad_policies(chain2, policy, match):
    with pytest.raises(ValueError, match=match):
        run_anneal(chain2.with_(t_end_ns=2.0), "lab", policy)


def test_max_steps_and_bad_inputs(chain2):
    ham = lab_frame_hamiltonian(chain2)
    psi = plus_state(2)
    with pytest.raises(IntegrationError):
        propagate(ham, psi, 0.0, 1.0, StepPolicy(0.001, 1.0, max_steps=10), psi)
    with pytest.raises(ValueError, match="normalized"):
        propagate(ham, 2 * psi, 0.0, 1.0, StepPolicy(0.001), psi)
    with pytest.raises(ValueError):
        propagate(ham, psi, 1.0, 1.0, StepPolicy(0.001), psi)
    with pytest.raises(ValueError):
        StepPolicy(0.0)


def test_norm_guard_trips_for_coarse_steps():
    H = 50.0 * oracles.Z
    psi = plus_state(1)
    with pytest.raises(IntegrationError, match="norm drift"):
        propagate(lambda t: H, psi, 0.0, 1.0, StepPolicy(0.02, 1.0), psi)
