import itertools

import numpy as np
import pytest

from qer.channel import apply, identity_channel, is_cptp, tensor_power, amplitude_damping
from qer.codes import (
    CodeIsometry,
    StabilizerCode,
    code_from_dict,
    five_qubit_code,
    leung4_code,
    leung4_stabilizer,
    logical_states,
    pauli_matrix,
    spreading_transform,
)

from conftest import random_cptp, random_density


def test_pauli_matrix_examples():
    np.testing.assert_array_equal(pauli_matrix("II"), np.eye(4))
    np.testing.assert_array_equal(pauli_matrix("X"), [[0, 1], [1, 0]])
    m = pauli_matrix("XZZXI")
    assert m.shape == (32, 32)
    np.testing.assert_allclose(m @ m, np.eye(32))
    np.testing.assert_allclose(m, m.conj().T)
    with pytest.raises(ValueError):
        pauli_matrix("XQ")
    with pytest.raises(ValueError):
        pauli_matrix("")


def test_pauli_leftmost_is_most_significant():
    # X on qubit 1 flips the top bit of the basis index
    assert pauli_matrix("XI")[0b10, 0b00] == 1


def test_five_qubit_code_definition():
    code = five_qubit_code()
    assert len(code.generators) == 4
    assert code.generators == ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
    assert (code.logical_z, code.logical_x) == ("ZZZZZ", "XXXXX")
    for a, b in itertools.combinations(code.generators, 2):
        ma, mb = pauli_matrix(a), pauli_matrix(b)
        np.testing.assert_allclose(ma @ mb, mb @ ma)


def test_non_commuting_generators_rejected():
    with pytest.raises(ValueError):
        StabilizerCode(2, ("XI", "ZI"), "ZZ", "XX")


@pytest.fixture(scope="module")
def five_enc():
    return logical_states(five_qubit_code())


def test_logical_states(five_enc):
    code = five_qubit_code()
    assert five_enc.u.shape == (32, 2)
    for g in code.generators:
        np.testing.assert_allclose(pauli_matrix(g) @ five_enc.u, five_enc.u, atol=1e-12)
    zl = pauli_matrix(code.logical_z)
    np.testing.assert_allclose(zl @ five_enc.u[:, 0], five_enc.u[:, 0], atol=1e-12)
    np.testing.assert_allclose(zl @ five_enc.u[:, 1], -five_enc.u[:, 1], atol=1e-12)
    flipped = pauli_matrix(code.logical_x) @ five_enc.u[:, 0]
    assert np.isclose(abs(np.vdot(five_enc.u[:, 1], flipped)), 1, atol=1e-12)


def test_logical_state_phase_convention(five_enc):
    for k in range(2):
        col = five_enc.u[:, k]
        first = col[np.flatnonzero(np.abs(col) > 1e-10)[0]]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_codespace_dimension_checked():
    with pytest.raises(ValueError):
        logical_states(StabilizerCode(3, ("ZZI",), "ZZZ", "XXX"))


def test_isometry_properties(five_enc):
    u = five_enc.u
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    p = five_enc.projector
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    gens = [pauli_matrix(g) for g in five_qubit_code().generators]
    proj = np.eye(32)
    for g in gens:
        proj = proj @ (np.eye(32) + g) / 2
    np.testing.assert_allclose(p, proj, atol=1e-12)


def test_code_space_densities_fixed_by_projector(five_enc, rng):
    for _ in range(10):
        rho = five_enc.encode(random_density(rng, 2))
        np.testing.assert_allclose(five_enc.projector @ rho @ five_enc.projector, rho, atol=1e-12)


def test_leung4_states():
    enc = leung4_code()
    col0 = np.zeros(16)
    col0[[0, 15]] = 1 / np.sqrt(2)
    col1 = np.zeros(16)
    col1[[3, 12]] = 1 / np.sqrt(2)
    np.testing.assert_allclose(enc.u[:, 0], col0)
    np.testing.assert_allclose(enc.u[:, 1], col1)
    assert np.vdot(enc.u[:, 0], enc.u[:, 1]) == 0


def test_leung4_stabilizer_matches_states():
    ls = logical_states(leung4_stabilizer())
    np.testing.assert_allclose(ls.u, leung4_code().u, atol=1e-12)


def test_spreading_identity_noise(five_enc):
    out = spreading_transform(identity_channel(32), five_enc)
    assert len(out) == 1
    np.testing.assert_allclose(out.elements[0], five_enc.u)


def test_spreading_five_qubit_dims(five_enc):
    spread = spreading_transform(tensor_power(amplitude_damping(0.1), 5), five_enc)
    assert len(spread) == 32
    assert all(e.shape == (32, 2) for e in spread.elements)
    assert is_cptp(spread)
    # Hermitian recovery variable: (32*32)^2 = 2^20 reals before, (2*32)^2 = 2^12 after
    assert (spread.dim_in * spread.dim_out) ** 2 == 2**12
    assert (32 * 32) ** 2 == 2**20


@pytest.mark.parametrize("which", ["five", "leung4"])
def test_spreading_equivalence(which, rng):
    enc = logical_states(five_qubit_code()) if which == "five" else leung4_code()
    n = int(np.log2(enc.dim_code))
    noise = tensor_power(amplitude_damping(0.23), n)
    spread = spreading_transform(noise, enc)
    for _ in range(50):
        src = random_density(rng, 2)
        lhs = apply(spread, src)
        rhs = apply(noise, enc.u @ src @ enc.u.conj().T)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_spreading_preserves_cptp(rng):
    enc = leung4_code()
    noise = random_cptp(rng, 16, 16, n_kraus=2)
    assert is_cptp(spreading_transform(noise, enc), tol=1e-10)


def test_spreading_dimension_mismatch(five_enc):
    with pytest.raises(ValueError):
        spreading_transform(identity_channel(16), five_enc)


def test_code_from_dict():
    code, enc = code_from_dict(
        {"n": 5, "generators": list(five_qubit_code().generators), "logical_z": "ZZZZZ", "logical_x": "XXXXX"}
    )
    assert code == five_qubit_code()
    u = leung4_code().u
    none, enc = code_from_dict({"isometry": np.stack([u.real, u.imag], axis=-1).tolist()})
    assert none is None
    np.testing.assert_array_equal(enc.u, u)


def test_isometry_validation():
    with pytest.raises(ValueError):
        CodeIsometry(np.ones((4, 2)))
