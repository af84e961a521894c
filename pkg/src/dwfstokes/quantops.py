"""
Operator algebra on the N = 2^n dimensional Hilbert space.

Translation unitaries T(alpha, beta) = (x)_i X^(a_i) Z^(b_i), with alpha expanded in
the field basis and beta in its trace dual. The common eigenbasis of the N-1
translations that leave a striation invariant is the MUB attached to that
striation; a quantum net then places those vectors on lines, and the
phase-point operators A_alpha = sum_{lambda through alpha} Q(lambda) - I follow.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from dwfstokes.config import settings
from dwfstokes.exceptions import ConstructionError, DimensionError, InvariantError
from dwfstokes.gf2n import FieldBasis, FieldElement, GF2n
from dwfstokes.phasespace import (
    Line,
    PhaseSpace,
    QuantumNet,
    Translation,
    build_phase_space,
    point_index,
)
from dwfstokes.states import (
    PAULIS,
    ComplexMatrix,
    DensityMatrix,
    DwfVector,
    RealVector,
    kron_all,
    stokes_indices,
)

logger = logging.getLogger(__name__)


def pauli_tensor(indices: Sequence[int]) -> ComplexMatrix:
    if len(indices) < 1:
        raise DimensionError("A Pauli tensor needs at least one factor")
    if any(i not in (0, 1, 2, 3) for i in indices):
        raise DimensionError(f"Pauli indices must lie in 0..3, got {list(indices)}")
    return kron_all([PAULIS[i] for i in indices])


@lru_cache(maxsize=None)
def pauli_basis(n: int) -> npt.NDArray[np.complex128]:
    """All 4^n Pauli tensors stacked in Stokes index order."""
    stack = np.array([pauli_tensor(idx) for idx in stokes_indices(n)])
    stack.flags.writeable = False
    return stack


def translation_unitary(alpha: FieldElement, beta: FieldElement, basis: FieldBasis) -> ComplexMatrix:
    gf = basis.field
    a_bits = gf.coordinates(alpha, basis)
    b_bits = gf.dual_coordinates(beta, basis)
    factors = [
        np.linalg.matrix_power(PAULIS[1], a) @ np.linalg.matrix_power(PAULIS[3], b)
        for a, b in zip(a_bits, b_bits)
    ]
    return kron_all(factors)


def _hermitian(P: ComplexMatrix) -> ComplexMatrix:
    """Scales a Pauli-type unitary by 1 or i so that it squares to the identity."""
    identity = np.eye(P.shape[0])
    if np.allclose(P @ P, identity):
        return P
    if np.allclose(P @ P, -identity):
        return 1j * P
    raise ConstructionError("Translation unitary does not square to +-I")


def _normalize_phase(vec: npt.NDArray[np.complex128], tol: float = 1e-9) -> npt.NDArray[np.complex128]:
    """Unit norm, first non-negligible entry real positive."""
    vec = vec / np.linalg.norm(vec)
    lead = vec[np.flatnonzero(np.abs(vec) > tol)[0]]
    return vec * (abs(lead) / lead)


def line_projector(vec: npt.NDArray[np.complex128]) -> ComplexMatrix:
    return np.outer(vec, vec.conj())


@dataclass(frozen=True, eq=False)
class MubSystem:
    """bases[i, k] is vector k of the basis attached to striation i."""
    n: int
    bases: npt.NDArray[np.complex128]
    generators: Tuple[Tuple[Translation, ...], ...]

    @property
    def N(self) -> int:
        return 1 << self.n

    def vector(self, striation: int, k: int) -> npt.NDArray[np.complex128]:
        return self.bases[striation, k]

    def orthonormality_residual(self) -> float:
        gram = np.einsum("skd,sjd->skj", self.bases.conj(), self.bases)
        return float(np.max(np.abs(gram - np.eye(self.N))))

    def unbiasedness_residual(self) -> float:
        worst = 0.0
        for i in range(self.N + 1):
            for j in range(i + 1, self.N + 1):
                overlaps = np.abs(self.bases[i].conj() @ self.bases[j].T) ** 2
                worst = max(worst, float(np.max(np.abs(overlaps - 1 / self.N))))
        return worst


def build_mubs(space: PhaseSpace, basis: FieldBasis) -> MubSystem:
    """
    One basis per striation: the joint eigenvectors of the striation's invariant
    translation unitaries. Generators are t*d for t = 1, x, x^2, ...; vectors are
    ordered by their eigenvalue signs under the Hermitian-scaled generators,
    generator 0 most significant and +1 before -1.
    """
    gf = space.field
    n, N = space.n, space.N
    identity = np.eye(N, dtype=complex)
    bases = np.zeros((N + 1, N, N), dtype=complex)
    all_generators = []
    for s in space.striations:
        d_q, d_p = s.direction
        generators = tuple((gf.mul(t, d_q), gf.mul(t, d_p)) for t in gf.polynomial_basis())
        hermitian = [_hermitian(translation_unitary(a, b, basis)) for a, b in generators]
        for g, h in enumerate(hermitian):
            for other in hermitian[g + 1:]:
                if not np.allclose(h @ other, other @ h):
                    raise ConstructionError(f"Generators of striation {s.index} do not commute")
        for k in range(N):
            proj = identity.copy()
            for g, h in enumerate(hermitian):
                sign = -1 if (k >> (n - 1 - g)) & 1 else 1
                proj = proj @ (identity + sign * h) / 2
            eigvals, eigvecs = np.linalg.eigh((proj + proj.conj().T) / 2)
            if abs(eigvals[-1] - 1) > settings.numeric_tolerance or abs(eigvals[-2]) > settings.numeric_tolerance:
                raise ConstructionError(
                    f"Striation {s.index}: joint eigenspace {k} is not one-dimensional"
                )
            bases[s.index, k] = _normalize_phase(eigvecs[:, -1])
        all_generators.append(generators)
        logger.debug(f"Striation {s.index}: basis from generators {generators}")
    mubs = MubSystem(n, bases, tuple(all_generators))
    if mubs.orthonormality_residual() > settings.exact_tolerance:
        raise ConstructionError("MUB construction produced a non-orthonormal basis")
    return mubs


@dataclass(frozen=True, eq=False)
class NetAssignment:
    net: QuantumNet
    space: PhaseSpace
    vectors: Dict[Line, npt.NDArray[np.complex128]]

    def __getitem__(self, line: Line) -> npt.NDArray[np.complex128]:
        return self.vectors[line]

    def projector(self, line: Line) -> ComplexMatrix:
        return line_projector(self.vectors[line])


def assign_net(mubs: MubSystem, space: PhaseSpace, basis: FieldBasis, net: QuantumNet) -> NetAssignment:
    """
    The line through the origin of striation i carries vector offsets[i]; every
    other line receives T(tau) applied to it, tau being any translation onto
    that line. Each alternative tau must yield the same projector.
    """
    if net.n != space.n:
        raise DimensionError(f"Net for n={net.n} used with phase space n={space.n}")
    gf = space.field
    vectors: Dict[Line, npt.NDArray[np.complex128]] = {}
    for s in space.striations:
        origin_vec = mubs.vector(s.index, net.offsets[s.index])
        for line in s.lines:
            tau = space.translation_to(line)
            vec = _normalize_phase(translation_unitary(*tau, basis) @ origin_vec)
            for g_q, g_p in mubs.generators[s.index]:
                alt = translation_unitary(gf.add(tau[0], g_q), gf.add(tau[1], g_p), basis) @ origin_vec
                if abs(abs(np.vdot(alt, vec)) - 1) > settings.numeric_tolerance:
                    raise ConstructionError(
                        f"Covariance check failed on striation {s.index}, line c={line.c}"
                    )
            vectors[line] = vec
    return NetAssignment(net, space, vectors)


@dataclass(frozen=True, eq=False)
class PhasePointOperators:
    """ops[int(q) * N + int(p)] is A_(q, p)."""
    net: QuantumNet
    ops: npt.NDArray[np.complex128]

    @property
    def N(self) -> int:
        return self.ops.shape[1]

    @property
    def n(self) -> int:
        return self.net.n

    def gram(self) -> RealVector:
        return np.real(np.einsum("aij,bji->ab", self.ops, self.ops))

    def check(self, tol: Optional[float] = None) -> "PhasePointOperators":
        tol = settings.numeric_tolerance if tol is None else tol
        N = self.N
        if not np.allclose(self.ops, self.ops.conj().transpose(0, 2, 1), rtol=0, atol=tol):
            raise InvariantError("Phase-point operators are not Hermitian")
        traces = np.einsum("aii->a", self.ops)
        if np.max(np.abs(traces - 1)) > tol:
            raise InvariantError("Phase-point operators do not have unit trace")
        if np.max(np.abs(self.gram() - N * np.eye(N * N))) > tol:
            raise InvariantError("Tr(A_a A_b) != N delta_ab")
        if np.max(np.abs(self.ops.sum(axis=0) - N * np.eye(N))) > tol:
            raise InvariantError("Phase-point operators do not sum to N * I")
        return self


def phase_point_operators(assignment: NetAssignment) -> PhasePointOperators:
    space = assignment.space
    N = space.N
    ops = np.zeros((N * N, N, N), dtype=complex)
    for pt in space.points:
        total = -np.eye(N, dtype=complex)
        for s in space.striations:
            total += assignment.projector(space.line_through(pt, s.index))
        ops[point_index(pt, N)] = total
    return PhasePointOperators(assignment.net, ops).check()


def dwf_of_operator(op: ComplexMatrix, ops: PhasePointOperators) -> RealVector:
    """The linear map X -> Tr(X A_alpha) / N, for any Hermitian X."""
    op = np.asarray(op)
    if op.shape != (ops.N, ops.N):
        raise DimensionError(f"Operator shape {op.shape} does not match dimension {ops.N}")
    values = np.einsum("ij,aji->a", op, ops.ops) / ops.N
    if np.max(np.abs(values.imag)) > settings.numeric_tolerance:
        raise InvariantError("Tr(X A_alpha) has a non-negligible imaginary part")
    return values.real


def operator_from_dwf(values: npt.ArrayLike, ops: PhasePointOperators) -> ComplexMatrix:
    """sum_alpha W_alpha A_alpha, for any real vector W."""
    values = np.asarray(values, dtype=float)
    if values.shape != (ops.N * ops.N,):
        raise DimensionError(f"DWF length {values.size} does not match N^2 = {ops.N ** 2}")
    return np.einsum("a,aij->ij", values, ops.ops)


def dwf_from_density(rho: DensityMatrix, ops: PhasePointOperators) -> DwfVector:
    return DwfVector(dwf_of_operator(rho.mat, ops))


def density_from_dwf(w: DwfVector, ops: PhasePointOperators) -> DensityMatrix:
    total = w.values.sum()
    if abs(total - 1) > settings.numeric_tolerance:
        raise InvariantError(f"DWF sums to {total:.12g}, expected 1")
    mat = operator_from_dwf(w.values, ops)
    if not np.allclose(mat, mat.conj().T, rtol=0, atol=settings.exact_tolerance):
        raise InvariantError("Reconstructed density matrix is not Hermitian")
    return DensityMatrix(mat)


def line_probabilities(rho: DensityMatrix, assignment: NetAssignment, striation: int) -> RealVector:
    """Tr(rho Q(lambda)) for every line of a striation, ordered by intercept."""
    s = assignment.space.striation(striation)
    return np.array([
        np.real(np.vdot(assignment[line], rho.mat @ assignment[line])) for line in s.lines
    ])


@dataclass(frozen=True, eq=False)
class PhaseSpaceFrame:
    """Field, basis, geometry and MUBs for one n; hands out per-net operator sets."""
    basis: FieldBasis
    space: PhaseSpace
    mubs: MubSystem
    _operators: Dict[int, PhasePointOperators] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def N(self) -> int:
        return self.space.N

    def assignment(self, net: QuantumNet) -> NetAssignment:
        return assign_net(self.mubs, self.space, self.basis, net)

    def operators(self, net: QuantumNet) -> PhasePointOperators:
        cached = self._operators.get(net.net_index)
        if cached is None:
            logger.debug(f"Building phase-point operators for n={self.n}, net {net.net_index}")
            cached = phase_point_operators(self.assignment(net))
            self._operators[net.net_index] = cached
        return cached

    def operators_for(self, net_index: int) -> PhasePointOperators:
        return self.operators(QuantumNet.from_index(self.n, net_index))

    def meta(self) -> Dict[str, object]:
        return {
            "modulus": self.basis.modulus,
            "field_basis": list(self.basis.basis),
        }


@lru_cache(maxsize=None)
def build_frame(n: int, modulus: Optional[int] = None, basis: Optional[Tuple[int, ...]] = None) -> PhaseSpaceFrame:
    gf = GF2n(n, modulus) if modulus is not None else GF2n.default(n)
    field_basis = FieldBasis.make(gf, basis)
    space = build_phase_space(n, gf)
    mubs = build_mubs(space, field_basis)
    logger.info(f"Built frame n={n}, modulus={gf.modulus:#b}, basis={field_basis.basis}")
    return PhaseSpaceFrame(field_basis, space, mubs)


def build_operators(n: int, net_index: int = 0) -> PhasePointOperators:
    return build_frame(n).operators_for(net_index)
