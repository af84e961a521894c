"""
The three state representations and the reference states used across the package.

Index orders:
  Stokes: (i_1, ..., i_n) in {0,1,2,3}^n, row-major (base-4, i_1 most significant),
          0/1/2/3 = I, sigma_x, sigma_y, sigma_z; qubit 1 is the leftmost tensor factor.
  DWF:    int(q) * N + int(p).
"""
import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.stats import unitary_group

from dwfstokes.config import settings
from dwfstokes.exceptions import DimensionError, InvariantError

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

PAULI_LABELS = ("I", "X", "Y", "Z")

# Single-photon polarization vectors in the computational (H, V) basis
H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)
D = (H + V) / np.sqrt(2)
A = (H - V) / np.sqrt(2)
R = (H + 1j * V) / np.sqrt(2)
L = (H - 1j * V) / np.sqrt(2)
POLARIZATIONS = {"H": H, "V": V, "D": D, "A": A, "R": R, "L": L}


def qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise DimensionError(f"Dimension {dim} is not a power of two")
    return n


@lru_cache(maxsize=None)
def stokes_indices(n: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(itertools.product(range(4), repeat=n))


def stokes_label(indices: Sequence[int]) -> str:
    return "".join(PAULI_LABELS[i] for i in indices)


@lru_cache(maxsize=None)
def stokes_weights(n: int) -> npt.NDArray[np.int64]:
    """Number of non-identity factors of each Stokes index."""
    return np.array([sum(1 for i in idx if i) for idx in stokes_indices(n)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: ComplexMatrix

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"Density matrix must be square, got shape {mat.shape}")
        qubit_count(mat.shape[0])
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n(self) -> int:
        return qubit_count(self.dim)

    def check(self, tol: Optional[float] = None, psd_tol: Optional[float] = None) -> "DensityMatrix":
        """Raises InvariantError unless Hermitian, unit-trace and positive semidefinite."""
        tol = settings.exact_tolerance if tol is None else tol
        psd_tol = settings.numeric_tolerance if psd_tol is None else psd_tol
        if not np.allclose(self.mat, self.mat.conj().T, rtol=0, atol=tol):
            raise InvariantError("Density matrix is not Hermitian")
        trace = np.trace(self.mat)
        if abs(trace - 1) > tol:
            raise InvariantError(f"Density matrix trace is {trace.real:.12g}, expected 1")
        smallest = np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2)[0]
        if smallest < -psd_tol:
            raise InvariantError(f"Density matrix has negative eigenvalue {smallest:.3e}")
        return self

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    @classmethod
    def from_pure(cls, psi: npt.ArrayLike) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        N = 1 << n
        return cls(np.eye(N, dtype=complex) / N)


@dataclass(frozen=True, eq=False)
class StokesVector:
    values: RealVector

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DimensionError(f"Stokes vector must be flat, got shape {values.shape}")
        n = (values.size.bit_length() - 1) // 2
        if n < 1 or 4**n != values.size:
            raise DimensionError(f"Stokes vector length {values.size} is not 4^n")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return (self.values.size.bit_length() - 1) // 2

    @property
    def N(self) -> int:
        return 1 << self.n

    def check(self, tol: Optional[float] = None) -> "StokesVector":
        tol = settings.exact_tolerance if tol is None else tol
        if abs(self.values[0] - 1 / self.N) > tol:
            raise InvariantError(f"S_0...0 = {self.values[0]:.12g}, expected 1/{self.N}")
        if np.any(np.abs(self.values) > 1 / self.N + tol):
            raise InvariantError(f"Stokes components exceed 1/{self.N} in magnitude")
        return self


@dataclass(frozen=True, eq=False)
class DwfVector:
    values: RealVector

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DimensionError(f"DWF must be flat, got shape {values.shape}")
        N = int(round(np.sqrt(values.size)))
        if N * N != values.size:
            raise DimensionError(f"DWF length {values.size} is not N^2")
        qubit_count(N)
        object.__setattr__(self, "values", values)

    @property
    def N(self) -> int:
        return int(round(np.sqrt(self.values.size)))

    @property
    def n(self) -> int:
        return qubit_count(self.N)

    def check(self, tol: Optional[float] = None) -> "DwfVector":
        tol = settings.numeric_tolerance if tol is None else tol
        total = self.values.sum()
        if abs(total - 1) > tol:
            raise InvariantError(f"DWF sums to {total:.12g}, expected 1")
        return self

    def grid(self) -> RealVector:
        """The DWF as an N x N array indexed [q, p]."""
        return self.values.reshape(self.N, self.N)


# Pauli matrices in the computational basis
PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def kron_all(factors: Sequence[ComplexMatrix]) -> ComplexMatrix:
    return reduce(np.kron, factors)


def stokes_from_density(rho: DensityMatrix) -> StokesVector:
    """Density route: S_i = (1/2^n) Tr(rho sigma_i1 x ... x sigma_in)."""
    n = rho.n
    values = [
        np.real(np.trace(rho.mat @ kron_all([PAULIS[i] for i in idx]))) / rho.dim
        for idx in stokes_indices(n)
    ]
    return StokesVector(np.array(values))


def density_from_stokes(s: StokesVector) -> DensityMatrix:
    """rho = sum_i S_i sigma_i1 x ... x sigma_in."""
    mat = sum(
        value * kron_all([PAULIS[i] for i in idx])
        for value, idx in zip(s.values, stokes_indices(s.n))
    )
    return DensityMatrix(mat)


def product_state(labels: str) -> DensityMatrix:
    """Product of single-photon polarizations, e.g. "HH" or "DR"."""
    try:
        return DensityMatrix.from_pure(kron_all([POLARIZATIONS[c] for c in labels]))
    except KeyError as e:
        raise DimensionError(f"Unknown polarization label {e} in {labels!r}") from e


def partially_entangled(theta: float) -> DensityMatrix:
    """cos(theta)|HH> + sin(theta)|VV>."""
    psi = np.cos(theta) * np.kron(H, H) + np.sin(theta) * np.kron(V, V)
    return DensityMatrix.from_pure(psi)


def bell_state() -> DensityMatrix:
    return partially_entangled(np.pi / 4)


def random_pure_state(n: int, rng: np.random.Generator) -> DensityMatrix:
    U = unitary_group.rvs(1 << n, random_state=rng)
    return DensityMatrix.from_pure(U[:, 0])


def random_density_matrix(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Random mixed state: random eigenvalues on a Haar-random eigenbasis."""
    N = 1 << n
    rank = N if rank is None else rank
    U = unitary_group.rvs(N, random_state=rng)
    weights = np.zeros(N)
    weights[:rank] = rng.dirichlet(np.ones(rank))
    mat = (U * weights) @ U.conj().T
    return DensityMatrix((mat + mat.conj().T) / 2)


def random_local_unitary(n: int, rng: np.random.Generator) -> ComplexMatrix:
    return kron_all([unitary_group.rvs(2, random_state=rng) for _ in range(n)])
