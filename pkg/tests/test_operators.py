import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from spinlock_qa.operators import (
    MAX_QUBITS,
    PauliString,
    all_up_state,
    basis_state,
    fidelity,
    ground_state,
    matrix_of,
    normalize,
    pauli_action,
    pauli_decompose,
    pauli_embed,
    plus_state,
    spectral_gap,
)

AXES = {"X": oracles.X, "Y": oracles.Y, "Z": oracles.Z}


def test_single_site_convention():
    # qubit 1 is the least significant bit; sigma_z = diag(-1, +1)
    np.testing.assert_array_equal(pauli_embed("Z", 1, 2), np.diag([-1, 1, -1, 1]).astype(complex))
    np.testing.assert_array_equal(pauli_embed("Z", 2, 2), np.diag([-1, -1, 1, 1]).astype(complex))


def test_x1_on_two_qubits():
    expected = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        expected[k ^ 1, k] = 1
    np.testing.assert_array_equal(pauli_embed("X", 1, 2), expected)


@pytest.mark.parametrize("L", [1, 2, 3])
@pytest.mark.parametrize("axis", "XYZ")
def test_embed_matches_kron_oracle(axis, L):
    for site in range(1, L + 1):
        np.testing.assert_array_equal(pauli_embed(axis, site, L), oracles.site_op(AXES[axis], site, L))


def test_product_rule_xy_is_iz():
    x, y, z = (pauli_embed(a, 1, 1) for a in "XYZ")
    np.testing.assert_allclose(x @ y, 1j * z)


@pytest.mark.parametrize("a,b", [("X", "Y"), ("Y", "Z"), ("Z", "X")])
def test_same_site_anticommute_and_square_to_one(a, b):
    for site in (1, 2, 3):
        pa, pb = pauli_embed(a, site, 3), pauli_embed(b, site, 3)
        np.testing.assert_allclose(pa @ pb + pb @ pa, 0, atol=1e-15)
        np.testing.assert_allclose(pa @ pa, np.eye(8))


def test_different_sites_commute():
    pa, pb = pauli_embed("X", 1, 3), pauli_embed("Y", 3, 3)
    np.testing.assert_allclose(pa @ pb, pb @ pa)


def test_pair_factors_and_matrix():
    p = PauliString.pair("XZ", (1, 3), 3, coefficient=0.5)
    assert p.factors == "XIZ" and p.L == 3
    expected = 0.5 * oracles.two_site(oracles.X, 1, oracles.Z, 3, 3)
    np.testing.assert_allclose(matrix_of(p), expected)


@pytest.mark.parametrize(
    "call",
    [
        lambda: pauli_embed("Z", 0, 2),
        lambda: pauli_embed("Z", 3, 2),
        lambda: pauli_embed("W", 1, 2),
        lambda: PauliString.pair("XX", (2, 2), 3),
        lambda: PauliString("IXQ"),
        lambda: PauliString("I" * (MAX_QUBITS + 1)),
    ],
)
def test_invalid_operators_raise(call):
    with pytest.raises(ValueError):
        call()


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="IXYZ", min_size=1, max_size=5), st.integers(0, 10_000))
def test_signed_permutation_matches_matrix(factors, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2 ** len(factors)) + 1j * rng.normal(size=2 ** len(factors))
    flip, phase = pauli_action(factors)
    idx = np.arange(len(psi))
    np.testing.assert_allclose(phase * psi[idx ^ flip], matrix_of(PauliString(factors)) @ psi, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="IXYZ", min_size=1, max_size=4))
def test_pauli_strings_are_hermitian_unitary(factors):
    m = matrix_of(PauliString(factors))
    np.testing.assert_allclose(m, m.conj().T)
    np.testing.assert_allclose(m @ m, np.eye(len(m)), atol=1e-14)


def test_decompose_round_trip():
    rng = np.random.default_rng(3)
    op = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    coeffs = pauli_decompose(op)
    rebuilt = sum(c * matrix_of(PauliString(s)) for s, c in coeffs.items())
    np.testing.assert_allclose(rebuilt, op, atol=1e-12)


def test_basis_states():
    assert basis_state("10")[1] == 1  # qubit 1 set -> index 1
    assert basis_state("01")[2] == 1
    np.testing.assert_array_equal(all_up_state(3), basis_state("111"))
    with pytest.raises(ValueError):
        basis_state("12")
    with pytest.raises(ValueError):
        basis_state(4, 2)


def test_plus_state_is_ground_state_of_minus_sigma_x():
    L = 3
    H = -sum(pauli_embed("X", i, L) for i in range(1, L + 1))
    gs = ground_state(H)
    assert fidelity(gs.state, plus_state(L)) == pytest.approx(1.0, abs=1e-12)
    assert gs.energy == pytest.approx(-3.0)


def test_fidelity_examples():
    assert fidelity(plus_state(2), all_up_state(2)) == pytest.approx(0.25)
    assert fidelity(basis_state("0"), basis_state("1")) == 0.0
    with pytest.raises(ValueError):
        fidelity(plus_state(1), plus_state(2))
    with pytest.raises(ValueError):
        normalize(np.zeros(2))


def test_ising_ground_state_two_qubits(chain2):
    from spinlock_qa.model import build_ising

    gs = ground_state(build_ising(chain2))
    # -h/2 (z1+z2) - J/2 z1 z2 at z=+1: -2pi (0.03 + 0.025)
    assert gs.energy == pytest.approx(-2 * np.pi * 0.055, rel=1e-12)
    assert gs.energy == pytest.approx(-0.34557519189487723, rel=1e-12)
    assert fidelity(gs.state, all_up_state(2)) == pytest.approx(1.0)
    assert not gs.degenerate


def test_ground_state_phase_and_degeneracy():
    gs = ground_state(-np.eye(4))
    assert gs.degenerate
    assert spectral_gap(-np.eye(4)) == 0.0
    gs = ground_state(np.array([[0.0, 2j], [-2j, 1.0]]))
    k = int(np.argmax(np.abs(gs.state)))
    assert gs.state[k].imag == 0 and gs.state[k].real > 0


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        ground_state(np.array([[0, 1], [0, 0]], dtype=complex))


def test_spectral_gap_transverse_only(chain2):
    from spinlock_qa.model import build_hqa

    # at t=0: -(lam/2) sum sigma_x, gap = lam
    assert spectral_gap(build_hqa(chain2, 0.0)) == pytest.approx(2 * np.pi * 1.0, rel=1e-12)
