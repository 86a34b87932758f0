"""First- and second-order average Hamiltonians of the rotating-frame drive.

Over one common drive period ``T`` the rotating-frame propagator is
approximated by ``exp(-i (Omega1 + Omega2))`` with

    Omega1 = int_0^T H(t) dt
    Omega2 = -(i/2) int_0^T dt2 int_0^t2 dt1 [H(t2), H(t1)]

and ``H_k = Omega_k / T``. The schedule envelope changes on a time scale
``1/gamma`` much longer than ``T`` and is frozen at a chosen schedule time;
oscillation phases are referenced to ``t = 0``, i.e. to the stroboscopic
times ``n T``.

Both integrals are evaluated with composite Gauss-Legendre panels. The inner
integral of ``Omega2`` is the running integral ``K(t2) = int_0^t2 H``,
obtained on the same nodes by exact integration of the panel interpolant, so
that ``Omega2 = -(i/2) int_0^T [H(t), K(t)] dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import legendre

from spinlock_qa.model import TWO_PI, SystemSpec, envelope, rot_frame_hamiltonian, rwa_hamiltonian
from spinlock_qa.operators import (
    PauliString,
    all_up_state,
    fidelity,
    ground_state,
    matrix_of,
)

MAX_MAGNUS_QUBITS = 4
PANEL_ORDER = 8
NODES_PER_CYCLE = 16


@dataclass(frozen=True)
class PeriodInfo:
    """Common period ``T`` with ``f_i T = cycles[i]`` for every frequency."""

    T_ns: float
    cycles: tuple[int, ...]
    tol: float
    residual: float = 0.0


@dataclass(frozen=True)
class MagnusPair:
    t_center_ns: float
    H1: np.ndarray
    H2: np.ndarray
    period: PeriodInfo


def common_period(frequencies_ghz: Sequence[float], tol: float = 1e-9, max_cycles: int = 10_000) -> PeriodInfo:
    """Smallest ``T`` (ns) on which every frequency completes whole cycles.

    Scans integer cycle counts of the slowest frequency and accepts the first
    ``T`` for which all ``f_i T`` are integers to relative tolerance ``tol``.
    """
    freqs = [float(f) for f in frequencies_ghz]
    if not freqs or any(not f > 0 for f in freqs):
        raise ValueError("need at least one positive frequency")
    f_min = min(freqs)
    best = (math.inf, None)
    for n in range(1, max_cycles + 1):
        T = n / f_min
        cycles = [max(1, round(f * T)) for f in freqs]
        resid = max(abs(f * T - m) / m for f, m in zip(freqs, cycles))
        if resid < tol:
            return PeriodInfo(T, tuple(int(m) for m in cycles), tol, resid)
        if resid < best[0]:
            best = (resid, T)
    raise ValueError(
        f"no common period within {max_cycles} cycles of {f_min} GHz; "
        f"closest candidate T={best[1]:.6g} ns has relative residual {best[0]:.2e}"
    )


def drive_period(spec: SystemSpec, tol: float = 1e-9) -> PeriodInfo:
    """Common period of the bare qubit frequencies, checked against ``0.1 / gamma``."""
    period = common_period(spec.qubit_freqs_ghz, tol)
    limit = 0.1 / spec.gamma_per_ns
    if period.T_ns > limit * (1 + 1e-9):
        raise ValueError(
            f"drive period {period.T_ns:.4g} ns is not short against the sweep "
            f"(need T <= 0.1/gamma = {limit:.4g} ns)"
        )
    return period


# ---------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=8)
def _panel_rule(order: int):
    """Gauss-Legendre nodes/weights on [-1, 1] and the running-integral matrix.

    ``S[j, k] = int_{-1}^{x_j} l_k(x) dx`` for the Lagrange basis ``l_k`` on
    the nodes, so ``S @ f`` integrates the interpolant of ``f`` up to each node.
    """
    x, w = legendre.leggauss(order)
    V = legendre.legvander(x, order - 1)
    coeffs = np.linalg.inv(V)  # column k: Legendre coefficients of l_k
    S = np.empty((order, order))
    for k in range(order):
        anti = legendre.legint(coeffs[:, k], lbnd=-1)
        S[:, k] = legendre.legval(x, anti)
    return x, w, S


def _grid(T: float, f_fast_ghz: float, nodes_per_cycle: int, order: int = PANEL_ORDER):
    if nodes_per_cycle < 8:
        raise ValueError("need at least 8 nodes per fastest cycle")
    n_panels = max(1, math.ceil(T * max(f_fast_ghz, 1.0 / T) * nodes_per_cycle / order))
    x, w, S = _panel_rule(order)
    h = T / n_panels
    starts = h * np.arange(n_panels)
    times = (starts[:, None] + h * (x + 1) / 2).ravel()
    weights = np.tile(w * h / 2, n_panels)
    return times, weights, S * h / 2, n_panels


def _sampled(spec: SystemSpec, t_center: float, nodes_per_cycle: int):
    if spec.L > MAX_MAGNUS_QUBITS:
        raise ValueError(f"average Hamiltonians are limited to L <= {MAX_MAGNUS_QUBITS}")
    if t_center < 0:
        raise ValueError("t_center must be non-negative")
    period = drive_period(spec)
    ham = rot_frame_hamiltonian(spec)
    f_fast = ham.max_frequency / TWO_PI
    times, weights, S, n_panels = _grid(period.T_ns, f_fast, nodes_per_cycle)
    H = ham.matrices(times, a=envelope(t_center, spec.schedule))
    return period, H, weights, S, n_panels


def _omega1(H, weights):
    return np.tensordot(weights, H, axes=(0, 0))


def _omega2(H, weights, S, n_panels):
    N, d, _ = H.shape
    order = N // n_panels
    Hp = H.reshape(n_panels, order, d, d)
    # running integral: whole previous panels + partial integral inside the panel
    panel_totals = np.tensordot(weights[:order], Hp, axes=(0, 1))
    before = np.cumsum(panel_totals, axis=0) - panel_totals
    K = before[:, None] + np.einsum("jk,pkab->pjab", S, Hp)
    K = K.reshape(N, d, d)
    comm = H @ K - K @ H
    return -0.5j * np.tensordot(weights, comm, axes=(0, 0))


def _hermitize(A):
    return (A + A.conj().T) / 2


def omega1_avg(spec: SystemSpec, t_center: float, nodes_per_cycle: int = NODES_PER_CYCLE) -> np.ndarray:
    """``Omega1(T) / T`` of the rotating-frame Hamiltonian; the RWA Hamiltonian."""
    period, H, w, _, _ = _sampled(spec, t_center, nodes_per_cycle)
    return _omega1(H, w) / period.T_ns


def omega2_avg(spec: SystemSpec, t_center: float, nodes_per_cycle: int = NODES_PER_CYCLE) -> np.ndarray:
    """``Omega2(T) / T``, the leading correction beyond the RWA."""
    period, H, w, S, n_panels = _sampled(spec, t_center, nodes_per_cycle)
    return _omega2(H, w, S, n_panels) / period.T_ns


def average_hamiltonians(spec: SystemSpec, t_center: float, nodes_per_cycle: int = NODES_PER_CYCLE) -> MagnusPair:
    period, H, w, S, n_panels = _sampled(spec, t_center, nodes_per_cycle)
    T = period.T_ns
    return MagnusPair(
        t_center_ns=t_center,
        H1=_hermitize(_omega1(H, w) / T),
        H2=_hermitize(_omega2(H, w, S, n_panels) / T),
        period=period,
    )


# ---------------------------------------------------------------------------
# closed form for two qubits


def _op(factors, coef):
    return matrix_of(PauliString(factors, coef))


def h2_analytic(spec: SystemSpec, t_ns: float) -> np.ndarray:
    """Closed-form second-order average Hamiltonian for two qubits.

    Four contributions: the light shift, field and coupling corrections at
    ``1/(w + dw_i)``, the antisymmetric ``1/(dw_1 - dw_2)`` cross term, and
    the ``J^2`` detuning term. The last carries the literature sign, opposite
    to the integrated average. ``J = J_12`` follows the per-bond convention of
    :mod:`spinlock_qa.model`.
    """
    if spec.L != 2:
        raise ValueError("the closed form exists for L = 2 only")
    if spec.delta_ghz[0] == spec.delta_ghz[1]:
        raise ValueError("the closed form diverges for equal detunings")
    if t_ns < 0:
        raise ValueError("time must be non-negative")
    lam = TWO_PI * spec.lambda_ghz
    w1, w2 = spec.qubit_freqs
    h1, h2 = (TWO_PI * h for h in spec.h_ghz)
    J = TWO_PI * spec.coupling_ghz[0][1]
    delta = TWO_PI * (spec.delta_ghz[0] - spec.delta_ghz[1])
    A = envelope(t_ns, spec.schedule)
    B = 1.0 - A
    # factors[0] acts on qubit 1
    out = -(lam**2) / 8 * A**2 * (_op("ZI", 1 / w1) + _op("IZ", 1 / w2))
    out = out + lam / 4 * A * B * (
        _op("XI", h1 / w1) + _op("IX", h2 / w2) + J * (_op("XZ", 1 / w1) + _op("ZX", 1 / w2))
    )
    out = out + J * lam / (2 * delta) * A * B * (_op("XZ", 1) - _op("ZX", 1))
    out = out + B**2 * J**2 / (2 * delta) * (_op("IZ", 1) - _op("ZI", 1))
    return out


# ---------------------------------------------------------------------------
# effective ground-state curve


@dataclass(frozen=True)
class EffectiveCurve:
    times: np.ndarray
    infidelities: np.ndarray
    degenerate: np.ndarray
    method: str


def effective_ground_curve(
    spec: SystemSpec,
    times: Sequence[float],
    method: str = "analytic",
    nodes_per_cycle: int = NODES_PER_CYCLE,
) -> EffectiveCurve:
    """Infidelity between ``|11...1>`` and the ground state of ``H1 + H2`` at each time.

    ``method="analytic"`` takes H2 from :func:`h2_analytic` (L = 2 only);
    ``method="quadrature"`` integrates it numerically (L <= 4). H1 is the
    conventional annealing Hamiltonian at the frozen envelope in both cases.
    """
    if method not in ("analytic", "quadrature"):
        raise ValueError("method must be 'analytic' or 'quadrature'")
    rwa = rwa_hamiltonian(spec)
    target = all_up_state(spec.L)
    times = np.asarray(times, dtype=float)
    infid = np.empty(len(times))
    degen = np.zeros(len(times), dtype=bool)
    for k, t in enumerate(times):
        if method == "analytic":
            H2 = h2_analytic(spec, t)
        else:
            H2 = _hermitize(omega2_avg(spec, t, nodes_per_cycle))
        gs = ground_state(rwa.at(t) + H2)
        infid[k] = 1.0 - fidelity(target, gs.state)
        degen[k] = gs.degenerate
    return EffectiveCurve(times, infid, degen, method)
