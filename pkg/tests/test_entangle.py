import numpy as np
import pytest

from dwfstokes.entangle import (
    concurrence_pure,
    hilbert_schmidt_distance_sq,
    indistinguishability,
    minkowski_sq_from_dwf,
    minkowski_sq_from_stokes,
    mixedness,
    purity,
    state_scalars,
)
from dwfstokes.exceptions import DimensionError, InvariantError
from dwfstokes.quantops import build_frame, build_operators, dwf_from_density
from dwfstokes.states import (
    DensityMatrix,
    StokesVector,
    bell_state,
    partially_entangled,
    product_state,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
    stokes_from_density,
)
from dwfstokes.transform import build_H, build_T, spin_flip_operator


def dwf_and_t(rho, net_index=0):
    ops = build_operators(rho.n, net_index)
    return dwf_from_density(rho, ops), build_T(ops)


def test_minkowski_from_stokes_examples():
    assert np.isclose(minkowski_sq_from_stokes(StokesVector(np.array([0.5, 0, 0, 0.5]))), 0.0)
    assert np.isclose(minkowski_sq_from_stokes(stokes_from_density(bell_state())), 1.0)
    for n in (1, 2, 3):
        mixed = stokes_from_density(DensityMatrix.maximally_mixed(n))
        assert np.isclose(minkowski_sq_from_stokes(mixed), 1 / 2**n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_minkowski_routes_agree(n):
    rng = np.random.default_rng(n + 20)
    ops = build_operators(n, 0)
    t = build_T(ops)
    for _ in range(100):
        rho = random_density_matrix(n, rng)
        w = dwf_from_density(rho, ops)
        by_density = np.real(np.trace(rho.mat @ spin_flip_operator(rho.mat)))
        assert abs(minkowski_sq_from_dwf(w, t) - by_density) < 1e-10
        assert abs(minkowski_sq_from_stokes(stokes_from_density(rho)) - by_density) < 1e-10


def test_single_qubit_pure_states_have_zero_norm():
    rng = np.random.default_rng(8)
    for _ in range(10):
        w, t = dwf_and_t(random_pure_state(1, rng))
        assert abs(minkowski_sq_from_dwf(w, t)) < 1e-10


def test_bell_and_product_concurrence():
    w, t = dwf_and_t(bell_state())
    assert abs(concurrence_pure(w, t) - 1) < 1e-10
    assert abs(indistinguishability(w, t) - 1) < 1e-10
    w, t = dwf_and_t(product_state("HH"))
    assert abs(concurrence_pure(w, t)) < 1e-10


@pytest.mark.parametrize("theta", np.linspace(0, np.pi, 13))
def test_concurrence_sweep(theta):
    w, t = dwf_and_t(partially_entangled(theta), net_index=333)
    assert abs(concurrence_pure(w, t) - abs(np.sin(2 * theta))) < 1e-8


@pytest.mark.parametrize("labels", ["VV", "DR", "HV", "AL"])
@pytest.mark.parametrize("net_index", [0, 5, 333, 1023])
def test_product_state_concurrence_is_exactly_zero(labels, net_index):
    w, t = dwf_and_t(product_state(labels), net_index)
    assert concurrence_pure(w, t) == 0.0


def test_concurrence_local_unitary_invariance():
    rng = np.random.default_rng(12)
    psi = random_pure_state(2, rng)
    w, t = dwf_and_t(psi)
    base = concurrence_pure(w, t)
    assert 0 <= base <= 1
    for _ in range(10):
        u = random_local_unitary(2, rng)
        moved = DensityMatrix(u @ psi.mat @ u.conj().T)
        w, t = dwf_and_t(moved)
        assert abs(concurrence_pure(w, t) - base) < 1e-8


def test_concurrence_does_not_depend_on_net():
    rng = np.random.default_rng(13)
    psi = random_pure_state(2, rng)
    values = [concurrence_pure(*dwf_and_t(psi, k)) for k in (0, 42, 511, 1023)]
    assert np.allclose(values, values[0], atol=1e-10)


def test_concurrence_requires_pure_state():
    w, t = dwf_and_t(DensityMatrix.maximally_mixed(2))
    with pytest.raises(InvariantError):
        concurrence_pure(w, t)


def test_mixedness():
    rho = DensityMatrix(np.diag([0.75, 0.25]))
    w, _ = dwf_and_t(rho)
    assert np.isclose(mixedness(w), 3 / 8)
    w, _ = dwf_and_t(DensityMatrix.maximally_mixed(2))
    assert np.isclose(mixedness(w), 3 / 4)
    w, _ = dwf_and_t(bell_state())
    assert abs(mixedness(w)) < 1e-10
    assert np.isclose(purity(w), 1.0)


def test_indistinguishability_of_horizontal_photon():
    w, t = dwf_and_t(product_state("H"))
    assert abs(indistinguishability(w, t)) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_scalar_identity(n):
    rng = np.random.default_rng(n + 40)
    ops = build_operators(n, 0)
    t = build_T(ops)
    for _ in range(100):
        scalars = state_scalars(dwf_from_density(random_density_matrix(n, rng), ops), t)
        assert scalars.residual < 1e-10
        assert scalars.concurrence is None


def test_state_scalars_for_maximally_mixed_pair():
    w, t = dwf_and_t(DensityMatrix.maximally_mixed(2))
    scalars = state_scalars(w, t)
    assert np.isclose(scalars.minkowski_sq, 0.25)
    assert np.isclose(scalars.mixedness, 0.75)
    assert np.isclose(scalars.indistinguishability, 1.0)


def test_scalars_need_spin_flip_matrix():
    ops = build_operators(1, 0)
    w = dwf_from_density(product_state("H"), ops)
    with pytest.raises(DimensionError):
        minkowski_sq_from_dwf(w, build_H(ops))
    with pytest.raises(DimensionError):
        indistinguishability(w, build_T(build_frame(2).operators_for(0)))


def test_hilbert_schmidt_distance_of_horizontal_photon():
    # |H><H| - |V><V| has Tr[(.)^2] = 2, so the squared distance is 1
    w, t = dwf_and_t(product_state("H"))
    assert np.isclose(hilbert_schmidt_distance_sq(w, t), 1.0)
