from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyncirc.gates import ALPHABET, InvalidParameter, adjoint, unitary_of

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)


def test_pauli_x_matrix():
    assert np.array_equal(unitary_of("x"), [[0, 1], [1, 0]])


def test_hadamard_squares_to_identity():
    h = unitary_of("h")
    assert np.allclose(h @ h, np.eye(2), atol=1e-12)


def test_ry_rz_pi_sends_zero_to_one():
    # the single-qubit end state of a compiled BV iteration with bit 1
    psi = unitary_of("ry", (-math.pi,)) @ unitary_of("rz", (-math.pi,)) @ np.array([1, 0])
    assert abs(abs(psi[1]) - 1.0) < 1e-12


def test_cx_is_first_qubit_controlled():
    cx = unitary_of("cx")
    # |10> -> |11>
    assert cx[3, 2] == 1 and cx[2, 3] == 1


def test_ccx_flips_only_last_pair():
    m = unitary_of("ccx")
    expected = np.eye(8)
    expected[[6, 7]] = expected[[7, 6]]
    assert np.array_equal(m, expected)


@pytest.mark.parametrize("name", sorted(ALPHABET))
def test_every_gate_is_unitary(name):
    spec = ALPHABET[name]
    params = tuple(0.3 * (i + 1) for i in range(spec.n_params))
    u = unitary_of(name, params)
    assert u.shape == (2**spec.arity, 2**spec.arity)
    assert np.allclose(u.conj().T @ u, np.eye(2**spec.arity), atol=1e-12)


@given(name=st.sampled_from(sorted(ALPHABET)), a=angles, b=angles, c=angles)
def test_adjoint_inverts(name, a, b, c):
    params = (a, b, c)[: ALPHABET[name].n_params]
    adj_name, adj_params = adjoint(name, params)
    assert adj_name in ALPHABET
    prod = unitary_of(adj_name, adj_params) @ unitary_of(name, params)
    assert np.allclose(prod, np.eye(prod.shape[0]), atol=1e-9)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_parameter_rejected(bad):
    with pytest.raises(InvalidParameter):
        unitary_of("rz", (bad,))


def test_wrong_parameter_count_rejected():
    with pytest.raises(InvalidParameter):
        unitary_of("u", (0.1,))


def test_unknown_gate():
    with pytest.raises(KeyError):
        unitary_of("iswap")
