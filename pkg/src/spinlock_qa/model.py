"""Hamiltonians of conventional and spin-lock quantum annealing.

Parameters are given the way hardware people quote them, as ``f = w / 2pi``
in GHz, and enter every matrix as angular frequencies in rad/ns (hbar = 1,
time in ns). The sweep rate ``gamma`` is used directly in ``exp(-gamma^2 t^2)``.

Pair terms follow ``-sum_{i,i'} (J_{i,i'} / 2) sigma sigma`` with the coupling
defined once per bond (``J_{i,i+1} = J`` for a chain). Each coupled pair
``i < i'`` therefore carries ``-(J / 2) sigma_z sigma_z`` and
``-(J / 2)(sigma_x sigma_x + sigma_y sigma_y)``. The symmetric ``coupling_ghz``
matrix stores the same per-bond value in both triangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from spinlock_qa.operators import (
    MAX_QUBITS,
    PauliString,
    matrix_of,
    pauli_action,
)

TWO_PI = 2.0 * math.pi

ENVELOPES = ("one", "a", "b")
TRIGS = ("one", "cos", "sin")


# ---------------------------------------------------------------------------
# parameters and schedule


def _as_tuple(values, L, name):
    values = tuple(float(v) for v in values)
    if len(values) != L:
        raise ValueError(f"{name} has {len(values)} entries, expected L={L}")
    return values


@dataclass(frozen=True)
class SystemSpec:
    """Physical parameters of an L-qubit spin-lock annealer.

    All ``*_ghz`` values are ordinary frequencies (angular frequency / 2pi).
    ``coupling_ghz`` is a symmetric L x L matrix with zero diagonal.
    """

    L: int
    omega_ghz: float
    delta_ghz: tuple[float, ...]
    h_ghz: tuple[float, ...]
    coupling_ghz: tuple[tuple[float, ...], ...]
    lambda_ghz: float
    gamma_per_ns: float
    t_end_ns: float

    def __post_init__(self):
        L = self.L
        if not isinstance(L, (int, np.integer)) or not 1 <= L <= MAX_QUBITS:
            raise ValueError(f"L must be an integer in 1..{MAX_QUBITS}, got {L!r}")
        object.__setattr__(self, "L", int(L))
        object.__setattr__(self, "delta_ghz", _as_tuple(self.delta_ghz, L, "delta_ghz"))
        object.__setattr__(self, "h_ghz", _as_tuple(self.h_ghz, L, "h_ghz"))
        rows = tuple(_as_tuple(row, L, "coupling_ghz row") for row in self.coupling_ghz)
        if len(rows) != L:
            raise ValueError(f"coupling_ghz has {len(rows)} rows, expected L={L}")
        J = np.array(rows)
        if not np.array_equal(J, J.T):
            raise ValueError("coupling_ghz must be symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("coupling_ghz must have a zero diagonal")
        object.__setattr__(self, "coupling_ghz", rows)
        for name in ("omega_ghz", "lambda_ghz", "gamma_per_ns", "t_end_ns"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.gamma_per_ns <= 0:
            raise ValueError("gamma_per_ns must be positive")
        if self.lambda_ghz < 0:
            raise ValueError("lambda_ghz must be non-negative")
        if self.t_end_ns <= 0:
            raise ValueError("t_end_ns must be positive")
        if any(f <= 0 for f in self.qubit_freqs_ghz):
            raise ValueError("bare qubit frequencies omega + delta_i must be positive")

    @classmethod
    def chain(
        cls,
        L: int = 4,
        omega_ghz: float = 2.4,
        *,
        detuning_step_ghz: float = 1.9,
        h_ghz: float = 0.03,
        J_ghz: float = 0.05,
        lambda_ghz: float = 1.0,
        gamma_per_ns: float = 0.01,
        t_end_ns: float = 500.0,
    ) -> "SystemSpec":
        """Homogeneous open ferromagnetic chain with staggered detunings.

        Defaults are CSFQ-typical values:
        ``delta_j = detuning_step * (j - 1)``, uniform ``h``, nearest-neighbour ``J``.
        """
        coupling = np.zeros((L, L))
        for i in range(L - 1):
            coupling[i, i + 1] = coupling[i + 1, i] = J_ghz
        return cls(
            L=L,
            omega_ghz=omega_ghz,
            delta_ghz=tuple(detuning_step_ghz * j for j in range(L)),
            h_ghz=(h_ghz,) * L,
            coupling_ghz=tuple(map(tuple, coupling)),
            lambda_ghz=lambda_ghz,
            gamma_per_ns=gamma_per_ns,
            t_end_ns=t_end_ns,
        )

    def with_(self, **changes) -> "SystemSpec":
        return replace(self, **changes)

    @property
    def dim(self) -> int:
        return 2**self.L

    @property
    def qubit_freqs_ghz(self) -> tuple[float, ...]:
        return tuple(self.omega_ghz + d for d in self.delta_ghz)

    @property
    def qubit_freqs(self) -> np.ndarray:
        """Bare angular frequencies ``omega + delta_i`` in rad/ns."""
        return TWO_PI * np.array(self.qubit_freqs_ghz)

    @property
    def pairs(self) -> list[tuple[int, int, float]]:
        """Coupled pairs ``(i, j, J_ij)`` with 1-based ``i < j``, J in rad/ns."""
        return [
            (i + 1, j + 1, TWO_PI * self.coupling_ghz[i][j])
            for i in range(self.L)
            for j in range(i + 1, self.L)
            if self.coupling_ghz[i][j] != 0
        ]

    @property
    def schedule(self) -> "Schedule":
        return Schedule(self.gamma_per_ns)

    def as_dict(self) -> dict:
        return {
            "L": self.L,
            "omega_ghz": self.omega_ghz,
            "delta_ghz": list(self.delta_ghz),
            "h_ghz": list(self.h_ghz),
            "coupling_ghz": [list(r) for r in self.coupling_ghz],
            "lambda_ghz": self.lambda_ghz,
            "gamma_per_ns": self.gamma_per_ns,
            "t_end_ns": self.t_end_ns,
        }


@dataclass(frozen=True)
class Schedule:
    """Gaussian annealing schedule: ``A(t) = exp(-gamma^2 t^2)``, ``B = 1 - A``."""

    gamma_per_ns: float

    def __post_init__(self):
        if not self.gamma_per_ns > 0:
            raise ValueError("gamma_per_ns must be positive")

    def a(self, t_ns: float) -> float:
        return math.exp(-((self.gamma_per_ns * t_ns) ** 2))

    def b(self, t_ns: float) -> float:
        return 1.0 - self.a(t_ns)


def envelope(t_ns: float, schedule: Schedule) -> float:
    """Transverse-field weight ``exp(-gamma^2 t^2)`` at time ``t_ns >= 0``."""
    if t_ns < 0:
        raise ValueError(f"time must be non-negative, got {t_ns}")
    return schedule.a(t_ns)


# ---------------------------------------------------------------------------
# time-dependent Pauli sums


@dataclass(frozen=True)
class Term:
    """One Pauli string with a scheduled, possibly oscillating, coefficient.

    The coefficient at time t is ``weight * env(t) * trig(freq * t)``, where
    ``env`` is 1, A(t) or B(t) and ``trig`` is 1, cos or sin.
    """

    factors: str
    weight: float
    envelope: str = "one"
    trig: str = "one"
    freq: float = 0.0

    def __post_init__(self):
        if self.envelope not in ENVELOPES:
            raise ValueError(f"envelope must be one of {ENVELOPES}")
        if self.trig not in TRIGS:
            raise ValueError(f"trig must be one of {TRIGS}")


@dataclass(frozen=True, eq=False)
class DrivenHamiltonian:
    """``H(t) = sum_k c_k(t) P_k`` for a fixed list of Pauli strings.

    Calling the object returns the dense matrix at time ``t``. The constant
    Pauli matrices are built once and reused, so repeated evaluation costs a
    weighted sum. ``kernel_arrays`` exposes the same sum as signed
    permutations for the compiled propagator.
    """

    L: int
    terms: tuple[Term, ...]
    gamma_per_ns: float
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return 2**self.L

    @property
    def schedule(self) -> Schedule:
        return Schedule(self.gamma_per_ns)

    @cached_property
    def _weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms], dtype=float)

    @cached_property
    def _env_code(self) -> np.ndarray:
        return np.array([ENVELOPES.index(t.envelope) for t in self.terms], dtype=np.int64)

    @cached_property
    def _trig_code(self) -> np.ndarray:
        return np.array([TRIGS.index(t.trig) for t in self.terms], dtype=np.int64)

    @cached_property
    def _freqs(self) -> np.ndarray:
        return np.array([t.freq for t in self.terms], dtype=float)

    @cached_property
    def unit_matrices(self) -> np.ndarray:
        """Stack of the bare Pauli matrices, shape ``(K, dim, dim)``."""
        if not self.terms:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return np.array([matrix_of(PauliString(t.factors)) for t in self.terms])

    def coefficients(self, t, a: float | None = None) -> np.ndarray:
        """Term coefficients at time(s) ``t``; shape ``(K,)`` or ``(N, K)``.

        ``a`` freezes the envelope at a fixed value of A (and B = 1 - A)
        instead of evaluating it at ``t``.
        """
        t = np.asarray(t, dtype=float)
        A = np.exp(-((self.gamma_per_ns * t) ** 2)) if a is None else np.full_like(t, a)
        env = np.stack([np.ones_like(A), A, 1.0 - A], axis=-1)
        env = np.take(env, self._env_code, axis=-1)
        phase = np.multiply.outer(t, self._freqs)
        trig = np.where(
            self._trig_code == 0, 1.0, np.where(self._trig_code == 1, np.cos(phase), np.sin(phase))
        )
        return self._weights * env * trig

    def __call__(self, t_ns: float) -> np.ndarray:
        return self.at(t_ns)

    def at(self, t_ns: float, a: float | None = None) -> np.ndarray:
        c = self.coefficients(t_ns, a)
        return np.tensordot(c, self.unit_matrices, axes=(0, 0))

    def matrices(self, times, a: float | None = None) -> np.ndarray:
        """Dense matrices at many times, shape ``(N, dim, dim)``."""
        c = self.coefficients(np.asarray(times, dtype=float), a)
        return np.tensordot(c, self.unit_matrices, axes=(1, 0))

    def apply(self, t_ns: float, psi: np.ndarray) -> np.ndarray:
        return self.at(t_ns) @ psi

    @property
    def max_frequency(self) -> float:
        """Fastest oscillation frequency among the terms, rad/ns."""
        osc = [abs(t.freq) for t in self.terms if t.trig != "one"]
        return max(osc, default=0.0)

    def norm_bound(self) -> float:
        """Upper bound on ``||H(t)||_2`` valid for every t.

        Single-site terms are grouped per site, where
        ``||a X + b Y + c Z|| = sqrt(a^2 + b^2 + c^2)``; everything else is
        bounded by the triangle inequality.
        """
        per_site = np.zeros((self.L, 3))
        rest = 0.0
        for term in self.terms:
            support = [q for q, c in enumerate(term.factors) if c != "I"]
            if len(support) == 1:
                per_site[support[0], "XYZ".index(term.factors[support[0]])] += abs(term.weight)
            elif support:
                rest += abs(term.weight)
        return float(np.sum(np.linalg.norm(per_site, axis=1)) + rest)

    def kernel_arrays(self):
        """Terms merged into signed permutations for the compiled RK4 loop.

        Terms sharing a flip mask and a coefficient function are merged.
        Returns ``(flips, phases, env_code, trig_code, freqs)`` where
        ``phases[g]`` already includes the term weights.
        """
        if "kernel" in self._cache:
            return self._cache["kernel"]
        groups: dict[tuple, np.ndarray] = {}
        for term in self.terms:
            flip, phase = pauli_action(term.factors)
            key = (flip, ENVELOPES.index(term.envelope), TRIGS.index(term.trig), term.freq)
            groups[key] = groups.get(key, 0) + term.weight * phase
        keys = list(groups)
        dim = self.dim
        out = (
            np.array([k[0] for k in keys], dtype=np.int64),
            np.array([groups[k] for k in keys], dtype=complex).reshape(len(keys), dim),
            np.array([k[1] for k in keys], dtype=np.int64),
            np.array([k[2] for k in keys], dtype=np.int64),
            np.array([k[3] for k in keys], dtype=float),
        )
        self._cache["kernel"] = out
        return out


# ---------------------------------------------------------------------------
# term lists


def _single(axis, site, L):
    return PauliString.single(axis, site, L).factors


def _pair(axes, i, j, L):
    return PauliString.pair(axes, (i, j), L).factors


def _h0_terms(spec):
    return [
        Term(_single("Z", i + 1, spec.L), w / 2)
        for i, w in enumerate(spec.qubit_freqs)
        if w != 0
    ]


def _ising_terms(spec, env):
    L = spec.L
    terms = [
        Term(_single("Z", i + 1, L), -TWO_PI * h / 2, env)
        for i, h in enumerate(spec.h_ghz)
        if h != 0
    ]
    terms += [Term(_pair("ZZ", i, j, L), -J / 2, env) for i, j, J in spec.pairs]
    return terms


def _transverse_terms(spec, env):
    lam = TWO_PI * spec.lambda_ghz
    if lam == 0:
        return []
    return [Term(_single("X", i + 1, spec.L), -lam / 2, env) for i in range(spec.L)]


def _lab_drive_terms(spec):
    lam = TWO_PI * spec.lambda_ghz
    if lam == 0:
        return []
    return [
        Term(_single("X", i + 1, spec.L), -lam, "a", "cos", w)
        for i, w in enumerate(spec.qubit_freqs)
    ]


def _flip_flop_terms(spec):
    L = spec.L
    terms = []
    for i, j, J in spec.pairs:
        terms += [Term(_pair("XX", i, j, L), -J / 2, "b"), Term(_pair("YY", i, j, L), -J / 2, "b")]
    return terms


def _counter_rotating_terms(spec):
    lam = TWO_PI * spec.lambda_ghz
    if lam == 0:
        return []
    terms = []
    for i, w in enumerate(spec.qubit_freqs):
        terms.append(Term(_single("X", i + 1, spec.L), -lam / 2, "a", "cos", 2 * w))
        terms.append(Term(_single("Y", i + 1, spec.L), lam / 2, "a", "sin", 2 * w))
    return terms


def _rotating_flip_flop_terms(spec):
    L = spec.L
    w = spec.qubit_freqs
    terms = []
    for i, j, J in spec.pairs:
        detune = w[i - 1] - w[j - 1]
        terms += [
            Term(_pair("XX", i, j, L), -J / 2, "b", "cos", detune),
            Term(_pair("YY", i, j, L), -J / 2, "b", "cos", detune),
            Term(_pair("XY", i, j, L), -J / 2, "b", "sin", detune),
            Term(_pair("YX", i, j, L), J / 2, "b", "sin", detune),
        ]
    return terms


@lru_cache(maxsize=64)
def ising_hamiltonian(spec: SystemSpec) -> DrivenHamiltonian:
    return DrivenHamiltonian(spec.L, tuple(_ising_terms(spec, "one")), spec.gamma_per_ns, "ising")


@lru_cache(maxsize=64)
def transverse_hamiltonian(spec: SystemSpec) -> DrivenHamiltonian:
    return DrivenHamiltonian(
        spec.L, tuple(_transverse_terms(spec, "one")), spec.gamma_per_ns, "transverse"
    )


@lru_cache(maxsize=64)
def rwa_hamiltonian(spec: SystemSpec) -> DrivenHamiltonian:
    """Conventional annealing Hamiltonian ``A H_TR + B H_Ising``."""
    terms = _transverse_terms(spec, "a") + _ising_terms(spec, "b")
    return DrivenHamiltonian(spec.L, tuple(terms), spec.gamma_per_ns, "rwa")


@lru_cache(maxsize=64)
def lab_frame_hamiltonian(spec: SystemSpec) -> DrivenHamiltonian:
    """``H0 + A H_D(t) + B (H_Ising + H_xy)`` with a resonant cosine drive."""
    terms = (
        _h0_terms(spec)
        + _lab_drive_terms(spec)
        + _ising_terms(spec, "b")
        + _flip_flop_terms(spec)
    )
    return DrivenHamiltonian(spec.L, tuple(terms), spec.gamma_per_ns, "lab")


@lru_cache(maxsize=64)
def rot_frame_hamiltonian(spec: SystemSpec) -> DrivenHamiltonian:
    """Lab Hamiltonian seen from the frame rotating with ``exp(i H0 t)``.

    Equals the conventional annealing Hamiltonian plus counter-rotating drive
    terms at ``2 w_i`` and flip-flop terms oscillating at ``w_i - w_j``.
    """
    terms = (
        _transverse_terms(spec, "a")
        + _ising_terms(spec, "b")
        + _counter_rotating_terms(spec)
        + _rotating_flip_flop_terms(spec)
    )
    return DrivenHamiltonian(spec.L, tuple(terms), spec.gamma_per_ns, "rotating")


FRAMES = {"lab": lab_frame_hamiltonian, "rotating": rot_frame_hamiltonian, "rwa": rwa_hamiltonian}


def hamiltonian_for(spec: SystemSpec, frame: str) -> DrivenHamiltonian:
    try:
        return FRAMES[frame](spec)
    except KeyError:
        raise ValueError(f"unknown frame {frame!r}; expected one of {sorted(FRAMES)}") from None


# ---------------------------------------------------------------------------
# dense builders


def _check_time(t_ns):
    if t_ns < 0:
        raise ValueError(f"time must be non-negative, got {t_ns}")


def build_ising(spec: SystemSpec) -> np.ndarray:
    return ising_hamiltonian(spec).at(0.0)


def build_transverse(spec: SystemSpec) -> np.ndarray:
    return transverse_hamiltonian(spec).at(0.0)


def build_hqa(spec: SystemSpec, t_ns: float) -> np.ndarray:
    _check_time(t_ns)
    return rwa_hamiltonian(spec).at(t_ns)


def build_lab_frame(spec: SystemSpec, t_ns: float) -> np.ndarray:
    _check_time(t_ns)
    return lab_frame_hamiltonian(spec).at(t_ns)


def build_rot_frame(spec: SystemSpec, t_ns: float) -> np.ndarray:
    _check_time(t_ns)
    return rot_frame_hamiltonian(spec).at(t_ns)


def h0_diagonal(spec: SystemSpec) -> np.ndarray:
    """Diagonal of ``H0 = sum (w_i / 2) sigma_z_i`` in rad/ns."""
    idx = np.arange(spec.dim)
    diag = np.zeros(spec.dim)
    for q, w in enumerate(spec.qubit_freqs):
        diag += np.where((idx >> q) & 1, w / 2, -w / 2)
    return diag


def build_h0(spec: SystemSpec) -> np.ndarray:
    return np.diag(h0_diagonal(spec)).astype(complex)


def rotate_state(psi_lab: np.ndarray, t_ns: float, spec: SystemSpec) -> np.ndarray:
    """Map a lab-frame state into the rotating frame: ``exp(+i H0 t) psi``."""
    psi_lab = np.asarray(psi_lab, dtype=complex)
    if psi_lab.shape != (spec.dim,):
        raise ValueError(f"state has shape {psi_lab.shape}, expected ({spec.dim},)")
    return np.exp(1j * h0_diagonal(spec) * t_ns) * psi_lab


def commensurate_frequencies(spec: SystemSpec) -> Sequence[float]:
    """Bare qubit frequencies in GHz, whose common period is a drive period."""
    return spec.qubit_freqs_ghz
