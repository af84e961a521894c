import numpy as np
import pytest

from dwfstokes.exceptions import DimensionError, InvariantError
from dwfstokes.phasespace import QuantumNet, point_index, translate
from dwfstokes.quantops import (
    build_frame,
    build_operators,
    density_from_dwf,
    dwf_from_density,
    dwf_of_operator,
    line_probabilities,
    pauli_tensor,
    translation_unitary,
)
from dwfstokes.states import (
    A,
    D,
    H,
    L,
    R,
    V,
    DensityMatrix,
    DwfVector,
    product_state,
    random_density_matrix,
)

# DWFs of I, X, Y, Z for one qubit under the canonical net, index q * 2 + p
PAULI_DWF = 0.5 * np.array([
    [1, 1, 1, 1],
    [1, -1, 1, -1],
    [1, -1, -1, 1],
    [1, 1, -1, -1],
])


def same_ray(u, v):
    return np.isclose(abs(np.vdot(u, v)), 1.0)


def test_pauli_tensor():
    assert np.allclose(pauli_tensor([0]), np.eye(2))
    assert np.allclose(pauli_tensor([3]), np.diag([1, -1]))
    assert np.allclose(pauli_tensor([1, 1]), np.fliplr(np.eye(4)))
    with pytest.raises(DimensionError):
        pauli_tensor([4])


def test_translation_unitary_single_qubit():
    basis = build_frame(1).basis
    assert np.allclose(translation_unitary(0, 0, basis), np.eye(2))
    assert np.allclose(translation_unitary(1, 0, basis), pauli_tensor([1]))
    assert np.allclose(translation_unitary(1, 1, basis), -1j * pauli_tensor([2]))


def test_single_qubit_bases():
    mubs = build_frame(1).mubs
    expected = [(H, V), (D, A), (R, L)]
    for striation, (plus, minus) in enumerate(expected):
        assert same_ray(mubs.vector(striation, 0), plus)
        assert same_ray(mubs.vector(striation, 1), minus)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mubs_are_unbiased(n):
    mubs = build_frame(n).mubs
    assert mubs.orthonormality_residual() < 1e-10
    assert mubs.unbiasedness_residual() < 1e-10


def test_table_of_pauli_dwfs():
    ops = build_operators(1, 0)
    table = np.array([dwf_of_operator(pauli_tensor([i]), ops) for i in range(4)])
    assert np.allclose(table, PAULI_DWF, atol=1e-12)


def test_horizontal_polarization_dwf():
    ops = build_operators(1, 0)
    w = dwf_from_density(product_state("H"), ops)
    assert np.allclose(w.values, [0.5, 0.5, 0, 0], atol=1e-12)
    assert np.allclose(density_from_dwf(w, ops).mat, np.diag([1, 0]), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_operator_algebra(n):
    frame = build_frame(n)
    net = QuantumNet.from_index(n, 0)
    ops = frame.operators(net).check(tol=1e-8)
    assignment = frame.assignment(net)
    N = frame.N
    for line in frame.space.lines:
        total = sum(ops.ops[point_index(pt, N)] for pt in line.points)
        assert np.allclose(total, N * assignment.projector(line), atol=1e-8)


@pytest.mark.parametrize("striation, offset", [(0, 1), (2, 3), (4, 2)])
def test_changing_one_offset_moves_only_that_striation(striation, offset):
    frame = build_frame(2)
    net = QuantumNet.from_index(2, 300)
    assert net.offsets[striation] != offset
    moved = net.with_offset(striation, offset)
    before, after = frame.assignment(net), frame.assignment(moved)
    for s in frame.space.striations:
        for line in s.lines:
            same = np.allclose(before.projector(line), after.projector(line), atol=1e-10)
            assert same == (s.index != striation), f"striation {s.index}, line c={line.c}"


@pytest.mark.parametrize("net_index", [0, 5, 517, 1023])
def test_operators_are_translation_covariant(net_index):
    frame = build_frame(2)
    ops = frame.operators_for(net_index)
    space = frame.space
    for alpha, beta in [(1, 0), (0, 2), (3, 1), (2, 3)]:
        u = translation_unitary(alpha, beta, frame.basis)
        for pt in space.points:
            moved = point_index(translate(space.field, pt, alpha, beta), 4)
            assert np.allclose(u @ ops.ops[point_index(pt, 4)] @ u.conj().T, ops.ops[moved], atol=1e-8)


def test_maximally_mixed_is_uniform():
    ops = build_operators(2, 0)
    w = dwf_from_density(DensityMatrix.maximally_mixed(2), ops)
    assert np.allclose(w.values, 1 / 16)
    assert np.allclose(density_from_dwf(DwfVector(np.full(16, 1 / 16)), ops).mat, np.eye(4) / 4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_density_round_trip(n):
    rng = np.random.default_rng(7)
    ops = build_operators(n, 0)
    for _ in range(100):
        rho = random_density_matrix(n, rng)
        back = density_from_dwf(dwf_from_density(rho, ops), ops)
        assert np.max(np.abs(back.mat - rho.mat)) < 1e-10


def test_inner_product_rule():
    rng = np.random.default_rng(3)
    ops = build_operators(2, 9)
    rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
    w, v = dwf_from_density(rho, ops), dwf_from_density(sigma, ops)
    assert np.isclose(np.real(np.trace(rho.mat @ sigma.mat)), 4 * w.values @ v.values)


def test_line_sums_are_probabilities():
    rng = np.random.default_rng(11)
    frame = build_frame(2)
    net = QuantumNet.from_index(2, 300)
    ops = frame.operators(net)
    assignment = frame.assignment(net)
    rho = random_density_matrix(2, rng)
    w = dwf_from_density(rho, ops)
    for s in frame.space.striations:
        probs = line_probabilities(rho, assignment, s.index)
        sums = [sum(w.values[point_index(pt, 4)] for pt in line.points) for line in s.lines]
        assert np.allclose(probs, sums, atol=1e-10)
        assert np.isclose(probs.sum(), 1.0)


def test_dwf_must_sum_to_one():
    ops = build_operators(1, 0)
    with pytest.raises(InvariantError):
        density_from_dwf(DwfVector(np.array([0.5, 0.5, 0.5, 0.0])), ops)


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        dwf_of_operator(np.eye(4), build_operators(1, 0))
