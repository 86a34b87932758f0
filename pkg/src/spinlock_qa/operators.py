"""Pauli-string algebra, dense operators and small-Hilbert-space spectral tools.

Basis convention: qubit ``i`` (1-based) is bit ``i - 1`` of the basis index,
so qubit 1 is the least significant bit. ``sigma_z |1> = +|1>`` and
``sigma_z |0> = -|0>``; the Pauli matrices below are written in index order
``|0>, |1>`` and satisfy ``X @ Y = 1j * Z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

MAX_QUBITS = 12
HERMITIAN_TOL = 1e-10
DEGENERACY_TOL = 1e-9

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "Z": np.array([[-1, 0], [0, 1]], dtype=complex),
}


def _check_qubits(L: int) -> None:
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise ValueError(f"qubit count must be a positive integer, got {L!r}")
    if L > MAX_QUBITS:
        raise ValueError(f"L={L} exceeds the dense-matrix limit of {MAX_QUBITS} qubits")


@dataclass(frozen=True)
class PauliString:
    """A real multiple of a tensor product of single-qubit Pauli factors.

    ``factors[0]`` acts on qubit 1. The string ``"XIZ"`` therefore means
    ``sigma_x`` on qubit 1 and ``sigma_z`` on qubit 3.
    """

    factors: str
    coefficient: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "factors", self.factors.upper())
        _check_qubits(len(self.factors))
        bad = set(self.factors) - set(PAULI)
        if bad:
            raise ValueError(f"unknown Pauli labels {sorted(bad)} in {self.factors!r}")

    @property
    def L(self) -> int:
        return len(self.factors)

    @classmethod
    def single(cls, axis: str, site: int, L: int, coefficient: float = 1.0) -> "PauliString":
        _check_site(site, L)
        chars = ["I"] * L
        chars[site - 1] = axis.upper()
        return cls("".join(chars), coefficient)

    @classmethod
    def pair(cls, axes: str, sites: tuple[int, int], L: int, coefficient: float = 1.0) -> "PauliString":
        chars = ["I"] * L
        for axis, site in zip(axes, sites):
            _check_site(site, L)
            if chars[site - 1] != "I":
                raise ValueError(f"site {site} used twice")
            chars[site - 1] = axis.upper()
        return cls("".join(chars), coefficient)

    def matrix(self) -> np.ndarray:
        return matrix_of(self)


def _check_site(site: int, L: int) -> None:
    _check_qubits(L)
    if not 1 <= site <= L:
        raise ValueError(f"site {site} out of range 1..{L}")


@lru_cache(maxsize=None)
def _unit_matrix(factors: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    # kron(factor_L, ..., factor_1): qubit 1 ends up as the lowest bit
    for label in factors:
        out = np.kron(PAULI[label], out)
    out.setflags(write=False)
    return out


def matrix_of(p: PauliString) -> np.ndarray:
    """Dense ``2**L`` matrix of ``p.coefficient * factors``."""
    return p.coefficient * _unit_matrix(p.factors)


def pauli_embed(axis: str, site: int, L: int) -> np.ndarray:
    """Pauli ``axis`` acting on ``site`` (1-based), identity elsewhere."""
    axis = axis.upper()
    if axis not in ("X", "Y", "Z"):
        raise ValueError(f"axis must be X, Y or Z, got {axis!r}")
    return matrix_of(PauliString.single(axis, site, L))


def pauli_action(factors: str) -> tuple[int, np.ndarray]:
    """Represent a Pauli string as a signed permutation.

    Returns ``(flip, phase)`` such that
    ``(P @ psi)[k] == phase[k] * psi[k ^ flip]`` for every basis index ``k``.
    """
    L = len(factors)
    idx = np.arange(2**L)
    flip = 0
    phase = np.ones(2**L, dtype=complex)
    for q, label in enumerate(factors):
        bit = (idx >> q) & 1
        if label == "X":
            flip |= 1 << q
        elif label == "Y":
            flip |= 1 << q
            phase *= np.where(bit == 1, -1j, 1j)
        elif label == "Z":
            phase *= np.where(bit == 1, 1.0, -1.0)
    return flip, phase


def pauli_decompose(op: np.ndarray, tol: float = 0.0) -> dict[str, complex]:
    """Expand ``op`` in the Pauli basis: ``op = sum_s c_s P_s``.

    Coefficients with magnitude ``<= tol`` are dropped.
    """
    op = np.asarray(op, dtype=complex)
    dim = op.shape[0]
    L = int(round(np.log2(dim)))
    if 2**L != dim or op.shape != (dim, dim):
        raise ValueError(f"operator shape {op.shape} is not 2^L square")
    out = {}
    for labels in np.ndindex(*(4,) * L):
        factors = "".join("IXYZ"[k] for k in labels)
        coef = np.vdot(_unit_matrix(factors), op) / dim
        if abs(coef) > tol:
            out[factors] = complex(coef)
    return out


def hermiticity_error(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def _check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    err = hermiticity_error(h)
    if err > tol * scale:
        raise ValueError(f"operator is not Hermitian (max |H - H^dag| = {err:.3e})")
    return h


# ---------------------------------------------------------------------------
# states


def basis_state(bits: str | int, L: int | None = None) -> np.ndarray:
    """Computational basis state.

    ``bits`` is either an integer index or a string read qubit 1 first, so
    ``basis_state("10")`` has qubit 1 in ``|1>`` and qubit 2 in ``|0>``.
    """
    if isinstance(bits, str):
        L = len(bits) if L is None else L
        if len(bits) != L or set(bits) - {"0", "1"}:
            raise ValueError(f"bad bit string {bits!r} for L={L}")
        index = sum(1 << q for q, b in enumerate(bits) if b == "1")
    else:
        if L is None:
            raise ValueError("L is required for an integer basis index")
        index = int(bits)
    _check_qubits(L)
    if not 0 <= index < 2**L:
        raise ValueError(f"basis index {index} out of range for L={L}")
    psi = np.zeros(2**L, dtype=complex)
    psi[index] = 1.0
    return psi


def all_up_state(L: int) -> np.ndarray:
    """``|11...1>``, the ferromagnetic Ising ground state for h, J > 0."""
    return basis_state(2**L - 1, L)


def plus_state(L: int) -> np.ndarray:
    """``|++...+>``, the ground state of ``-sum sigma_x``."""
    _check_qubits(L)
    return np.full(2**L, 2.0 ** (-L / 2), dtype=complex)


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n = np.linalg.norm(psi)
    if n == 0 or not np.isfinite(n):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return psi / n


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Squared overlap ``|<a|b>|**2`` of two state vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


# ---------------------------------------------------------------------------
# spectra


class GroundState(NamedTuple):
    energy: float
    state: np.ndarray
    degenerate: bool


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def ground_state(h: np.ndarray) -> GroundState:
    """Lowest eigenpair of a Hermitian matrix.

    The eigenvector is normalized and its largest-magnitude amplitude is made
    real and positive. ``degenerate`` is set when the two lowest eigenvalues
    are closer than ``DEGENERACY_TOL``; the returned vector is then an
    arbitrary member of the ground space.
    """
    h = _check_hermitian(h)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    degenerate = len(w) > 1 and (w[1] - w[0]) < DEGENERACY_TOL
    return GroundState(float(w[0]), _fix_phase(v[:, 0]), bool(degenerate))


def spectral_gap(h: np.ndarray) -> float:
    """``E1 - E0`` with degeneracy counted.

    Gaps below ``DEGENERACY_TOL`` are reported as exactly 0.
    """
    h = _check_hermitian(h)
    w = np.linalg.eigvalsh(h)
    if len(w) < 2:
        return 0.0
    gap = float(w[1] - w[0])
    return 0.0 if gap < DEGENERACY_TOL else gap
