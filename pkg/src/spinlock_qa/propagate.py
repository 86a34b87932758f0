"""Fixed-step RK4 integration of ``d psi / dt = -i H(t) psi``.

RK4 is not unitary: its amplification factor for an eigenphase
``theta = E dt`` is ``|R(i theta)| ~ 1 - theta^6 / 144``. The default step is
therefore chosen from both the fastest drive frequency and a bound on
``||H||``, so that the norm lost between two samples stays well below the
acceptance threshold ``NORM_TOL``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from spinlock_qa.model import DrivenHamiltonian, SystemSpec, hamiltonian_for, rotate_state
from spinlock_qa.operators import all_up_state, fidelity, plus_state

log = logging.getLogger(__name__)

NORM_TOL = 1e-6
STEPS_PER_CYCLE = 40
MIN_STEPS_PER_CYCLE = 20
# per-sample norm-loss budget used to size the default step
NORM_BUDGET = 1e-7


class IntegrationError(RuntimeError):
    """Raised when a run blows up, drifts in norm, or exceeds its step budget."""


@dataclass(frozen=True)
class StepPolicy:
    dt_ns: float
    sample_every_ns: float = 1.0
    max_steps: int = 50_000_000

    def __post_init__(self):
        if not self.dt_ns > 0:
            raise ValueError("dt_ns must be positive")
        if not self.sample_every_ns >= self.dt_ns:
            raise ValueError("sample_every_ns must be at least one step")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    @classmethod
    def for_hamiltonian(
        cls,
        ham: DrivenHamiltonian,
        sample_every_ns: float = 1.0,
        max_steps: int = 50_000_000,
        steps_per_cycle: int = STEPS_PER_CYCLE,
    ) -> "StepPolicy":
        """Default step for ``ham``, snapped so a sample interval is a whole number of steps."""
        dt = default_dt(ham, sample_every_ns, steps_per_cycle)
        n = math.ceil(sample_every_ns / dt - 1e-9)
        return cls(sample_every_ns / n, sample_every_ns, max_steps)

    def scaled(self, factor: int) -> "StepPolicy":
        """Same sampling with ``dt / factor``."""
        return StepPolicy(self.dt_ns / factor, self.sample_every_ns, self.max_steps * factor)


def default_dt(ham: DrivenHamiltonian, sample_every_ns: float = 1.0, steps_per_cycle: int = STEPS_PER_CYCLE) -> float:
    f_max = ham.max_frequency / (2 * math.pi)
    dt = 1.0 / (steps_per_cycle * f_max) if f_max > 0 else sample_every_ns
    E = ham.norm_bound()
    if E > 0:
        # n steps of size dt lose ~ n (E dt)^6 / 144 of norm per sample
        dt_norm = (144.0 * NORM_BUDGET / (sample_every_ns * E**6)) ** 0.2
        dt = min(dt, dt_norm)
    return min(dt, sample_every_ns)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    fidelities: np.ndarray
    norm_drifts: np.ndarray
    final_state: np.ndarray
    frame: str = "custom"
    dt_ns: float = float("nan")
    n_steps: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def infidelities(self) -> np.ndarray:
        return 1.0 - self.fidelities

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelities[-1])

    @property
    def final_infidelity(self) -> float:
        return float(1.0 - self.fidelities[-1])

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(self.norm_drifts))


# ---------------------------------------------------------------------------
# stepping


def step_rk4(h_at: Callable[[float], np.ndarray], psi: np.ndarray, t_ns: float, dt_ns: float) -> np.ndarray:
    """One classical RK4 step of ``-i H(t) psi``; no renormalization."""
    k1 = -1j * (h_at(t_ns) @ psi)
    h_mid = h_at(t_ns + dt_ns / 2)
    k2 = -1j * (h_mid @ (psi + dt_ns / 2 * k1))
    k3 = -1j * (h_mid @ (psi + dt_ns / 2 * k2))
    k4 = -1j * (h_at(t_ns + dt_ns) @ (psi + dt_ns * k3))
    out = psi + dt_ns / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise IntegrationError(f"non-finite amplitudes after step at t={t_ns} ns (dt={dt_ns})")
    return out


@numba.njit(cache=True)
def _apply(t, gamma, psi, flips, phases, env, trig, freqs, out):
    a = math.exp(-((gamma * t) ** 2))
    dim = psi.shape[0]
    for k in range(dim):
        out[k] = 0.0
    for g in range(flips.shape[0]):
        c = 1.0
        if env[g] == 1:
            c = a
        elif env[g] == 2:
            c = 1.0 - a
        if trig[g] == 1:
            c *= math.cos(freqs[g] * t)
        elif trig[g] == 2:
            c *= math.sin(freqs[g] * t)
        if c == 0.0:
            continue
        f = flips[g]
        for k in range(dim):
            out[k] += c * phases[g, k] * psi[k ^ f]
    # -i H psi
    for k in range(dim):
        out[k] = -1j * out[k]


@numba.njit(cache=True)
def _rk4_steps(psi, t0, dt, n, gamma, flips, phases, env, trig, freqs):
    dim = psi.shape[0]
    k1 = np.empty(dim, dtype=np.complex128)
    k2 = np.empty(dim, dtype=np.complex128)
    k3 = np.empty(dim, dtype=np.complex128)
    k4 = np.empty(dim, dtype=np.complex128)
    tmp = np.empty(dim, dtype=np.complex128)
    for s in range(n):
        t = t0 + s * dt
        _apply(t, gamma, psi, flips, phases, env, trig, freqs, k1)
        for k in range(dim):
            tmp[k] = psi[k] + 0.5 * dt * k1[k]
        _apply(t + 0.5 * dt, gamma, tmp, flips, phases, env, trig, freqs, k2)
        for k in range(dim):
            tmp[k] = psi[k] + 0.5 * dt * k2[k]
        _apply(t + 0.5 * dt, gamma, tmp, flips, phases, env, trig, freqs, k3)
        for k in range(dim):
            tmp[k] = psi[k] + dt * k3[k]
        _apply(t + dt, gamma, tmp, flips, phases, env, trig, freqs, k4)
        for k in range(dim):
            psi[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k])
    return psi


def _whole_steps(span, dt, what):
    n = round(span / dt)
    if n < 1 or abs(n * dt - span) > 1e-9 * max(span, 1.0):
        raise ValueError(f"{what} ({span} ns) is not a whole number of steps of {dt} ns")
    return int(n)


def propagate(
    h_at,
    psi0: np.ndarray,
    t0_ns: float,
    t1_ns: float,
    policy: StepPolicy,
    target: np.ndarray,
    frame: str = "custom",
) -> Trajectory:
    """Integrate from ``t0`` to ``t1`` and record the fidelity with ``target``.

    ``h_at`` is any callable returning the Hamiltonian matrix at a time; a
    :class:`DrivenHamiltonian` is integrated by a compiled loop that performs
    the identical RK4 arithmetic. The state is renormalized at each sample
    point after its norm drift has been recorded; a drift above ``NORM_TOL``
    aborts the run.
    """
    psi = np.array(psi0, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-8:
        raise ValueError("initial state is not normalized")
    if psi.shape != np.shape(target):
        raise ValueError(f"state shape {psi.shape} does not match target {np.shape(target)}")
    if not t1_ns > t0_ns:
        raise ValueError("t1_ns must exceed t0_ns")
    dt = policy.dt_ns
    n_total = _whole_steps(t1_ns - t0_ns, dt, "integration span")
    stride = _whole_steps(policy.sample_every_ns, dt, "sample interval") if policy.sample_every_ns < t1_ns - t0_ns else n_total
    if n_total > policy.max_steps:
        raise IntegrationError(f"{n_total} steps exceed max_steps={policy.max_steps}")

    fast = isinstance(h_at, DrivenHamiltonian)
    if fast:
        f_max = h_at.max_frequency / (2 * math.pi)
        if f_max > 0 and dt > 1.0 / (MIN_STEPS_PER_CYCLE * f_max) * (1 + 1e-12):
            raise ValueError(
                f"dt={dt} ns under-resolves the {f_max:.3f} GHz drive; "
                f"need dt <= {1.0 / (MIN_STEPS_PER_CYCLE * f_max):.3g} ns"
            )
        arrays = h_at.kernel_arrays()
        gamma = h_at.gamma_per_ns

    times = [t0_ns]
    fids = [fidelity(target, psi)]
    drifts = [0.0]
    done = 0
    while done < n_total:
        n = min(stride, n_total - done)
        t = t0_ns + done * dt
        if fast:
            psi = _rk4_steps(psi, t, dt, n, gamma, *arrays)
            if not np.all(np.isfinite(psi)):
                raise IntegrationError(f"non-finite amplitudes between t={t} and t={t + n * dt} ns")
        else:
            for s in range(n):
                psi = step_rk4(h_at, psi, t + s * dt, dt)
        done += n
        norm = np.linalg.norm(psi)
        drift = abs(norm - 1.0)
        t_now = t0_ns + done * dt
        if drift > NORM_TOL:
            raise IntegrationError(
                f"norm drift {drift:.2e} at t={t_now:.4g} ns exceeds {NORM_TOL:g}; "
                f"reduce dt below {dt * (NORM_TOL / drift) ** 0.2:.3g} ns"
            )
        psi /= norm
        times.append(t_now)
        fids.append(fidelity(target, psi))
        drifts.append(drift)

    return Trajectory(
        times=np.array(times),
        fidelities=np.array(fids),
        norm_drifts=np.array(drifts),
        final_state=psi,
        frame=frame,
        dt_ns=dt,
        n_steps=n_total,
    )


def run_anneal(spec: SystemSpec, frame: str = "lab", policy: StepPolicy | None = None) -> Trajectory:
    """Anneal from ``|++...+>`` at t=0 to ``t_end`` and track overlap with ``|11...1>``.

    The target is diagonal in the z basis, so the recorded fidelity is the
    same in the lab and rotating frames.
    """
    ham = hamiltonian_for(spec, frame)
    if policy is None:
        policy = StepPolicy.for_hamiltonian(ham)
    log.info("anneal L=%d omega=%.3g GHz frame=%s dt=%.3g ns", spec.L, spec.omega_ghz, frame, policy.dt_ns)
    try:
        traj = propagate(ham, plus_state(spec.L), 0.0, spec.t_end_ns, policy, all_up_state(spec.L), frame)
    except (IntegrationError, ValueError) as exc:
        raise type(exc)(f"{exc} [L={spec.L}, omega={spec.omega_ghz} GHz, frame={frame}]") from exc
    traj.meta.update(spec=spec.as_dict(), frame=frame)
    return traj


def to_rotating_frame(traj: Trajectory, spec: SystemSpec) -> np.ndarray:
    """Final state of a lab-frame run expressed in the rotating frame."""
    if traj.frame != "lab":
        raise ValueError("trajectory is not a lab-frame run")
    return rotate_state(traj.final_state, float(traj.times[-1]), spec)
