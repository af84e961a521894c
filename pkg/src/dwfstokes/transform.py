"""
The Hadamard family relating DWFs and Stokes vectors.

For a net k, H(k) has rows indexed by Stokes index and columns by phase-space
point; row P is the DWF of the Pauli tensor P, so S = H W. Every entry is
exactly +-1/N, so transforms are stored as an integer sign matrix plus the
scale 1/N. H is orthogonal, hence W = H^T S.
"""
import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import Dict, Iterable, Optional

import numpy as np
import numpy.typing as npt

from dwfstokes.config import settings
from dwfstokes.exceptions import ConstructionError, DimensionError, InvariantError
from dwfstokes.phasespace import QuantumNet
from dwfstokes.quantops import (
    PhasePointOperators,
    PhaseSpaceFrame,
    dwf_of_operator,
    pauli_basis,
    pauli_tensor,
)
from dwfstokes.states import (
    ComplexMatrix,
    DensityMatrix,
    DwfVector,
    StokesVector,
    stokes_weights,
)

logger = logging.getLogger(__name__)


class HadamardKind(StrEnum):
    STOKES_FROM_DWF = "stokes_from_dwf"
    SPIN_FLIP_DWF = "spin_flip_dwf"
    SPIN_FLIP_STOKES = "spin_flip_stokes"


@dataclass(frozen=True, eq=False)
class HadamardTransform:
    n: int
    net_index: int
    kind: HadamardKind
    signs: npt.NDArray[np.int64]

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.int64)
        size = 4**self.n
        if signs.shape != (size, size):
            raise DimensionError(f"Sign matrix must be {size}x{size}, got {signs.shape}")
        if not np.all(np.abs(signs) == 1):
            raise InvariantError("Sign matrix has entries other than +-1")
        if not np.array_equal(signs @ signs.T, size * np.eye(size, dtype=np.int64)):
            raise InvariantError("Sign matrix rows are not orthogonal (not a Hadamard matrix)")
        signs.flags.writeable = False
        object.__setattr__(self, "signs", signs)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def mat(self) -> npt.NDArray[np.float64]:
        return self.signs / self.N

    def same_signs(self, other: "HadamardTransform") -> bool:
        return np.array_equal(self.signs, other.signs)

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "net_index": self.net_index,
            "kind": self.kind.value,
            "scale": "1/N",
            "signs": self.signs.tolist(),
        }


def _signs_from_values(values: npt.NDArray[np.float64], N: int, what: str) -> npt.NDArray[np.int64]:
    scaled = values * N
    signs = np.rint(scaled).astype(np.int64)
    deviation = float(np.max(np.abs(scaled - signs))) / N if scaled.size else 0.0
    if deviation > settings.numeric_tolerance or not np.all(np.abs(signs) == 1):
        raise InvariantError(f"{what}: entries deviate from +-1/N (max deviation {deviation:.3e})")
    return signs


def build_H(ops: PhasePointOperators) -> HadamardTransform:
    """Row i is the DWF of the Pauli tensor with Stokes index i under the given net."""
    N = ops.N
    rows = np.einsum("pij,aji->pa", pauli_basis(ops.n), ops.ops) / N
    if np.max(np.abs(rows.imag)) > settings.numeric_tolerance:
        raise InvariantError("DWF of a Pauli tensor has an imaginary part")
    signs = _signs_from_values(rows.real, N, f"H for net {ops.net.net_index}")
    return HadamardTransform(ops.n, ops.net.net_index, HadamardKind.STOKES_FROM_DWF, signs)


def _require_kind(h: HadamardTransform, kind: HadamardKind):
    if h.kind != kind:
        raise DimensionError(f"Expected a {kind.value} transform, got {h.kind.value}")


def stokes_from_dwf(w: DwfVector, h: HadamardTransform) -> StokesVector:
    _require_kind(h, HadamardKind.STOKES_FROM_DWF)
    if w.values.size != h.signs.shape[1]:
        raise DimensionError(f"DWF length {w.values.size} does not match transform size {h.signs.shape[1]}")
    return StokesVector(h.mat @ w.values)


def dwf_from_stokes(s: StokesVector, h: HadamardTransform) -> DwfVector:
    _require_kind(h, HadamardKind.STOKES_FROM_DWF)
    if s.values.size != h.signs.shape[0]:
        raise DimensionError(f"Stokes length {s.values.size} does not match transform size {h.signs.shape[0]}")
    # (N H)(N H)^T = N^2 I, so H^-1 = H^T
    return DwfVector(h.mat.T @ s.values)


def spin_flip_operator(op: ComplexMatrix) -> ComplexMatrix:
    """X -> Y^(x)n X* Y^(x)n, complex conjugation in the computational basis."""
    op = np.asarray(op)
    y = pauli_tensor([2] * (op.shape[-1].bit_length() - 1))
    return y @ op.conj() @ y


def spin_flip_density(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(spin_flip_operator(rho.mat))


def spin_flip_stokes(s: StokesVector) -> StokesVector:
    """Spin flip in Stokes space: components with an odd number of Pauli factors change sign."""
    parity = np.where(stokes_weights(s.n) % 2, -1.0, 1.0)
    return StokesVector(parity * s.values)


def _probe_spin_flip(ops: PhasePointOperators) -> npt.NDArray[np.float64]:
    """Column beta: DWF of the spin flip of the operator whose DWF is the unit vector e_beta, i.e. of A_beta."""
    size = ops.N * ops.N
    columns = [dwf_of_operator(spin_flip_operator(ops.ops[beta]), ops) for beta in range(size)]
    return np.column_stack(columns)


def build_T(ops: PhasePointOperators, cross_check: Iterable[PhasePointOperators] = ()) -> HadamardTransform:
    """
    The spin-flip matrix T with W~ = T W. It must not depend on the net, so each
    operator set in `cross_check` is probed as well and compared entrywise.
    """
    values = _probe_spin_flip(ops)
    for other in cross_check:
        deviation = float(np.max(np.abs(_probe_spin_flip(other) - values)))
        if deviation > settings.exact_tolerance:
            raise ConstructionError(
                f"Spin-flip matrix differs between nets {ops.net.net_index} and "
                f"{other.net.net_index} by {deviation:.3e}"
            )
    signs = _signs_from_values(values, ops.N, "T")
    return HadamardTransform(ops.n, ops.net.net_index, HadamardKind.SPIN_FLIP_DWF, signs)


def build_H_tilde(h: HadamardTransform, t: HadamardTransform) -> HadamardTransform:
    """H~ = H T, taking a DWF straight to the Stokes vector of the spin-flipped state."""
    _require_kind(h, HadamardKind.STOKES_FROM_DWF)
    _require_kind(t, HadamardKind.SPIN_FLIP_DWF)
    if h.n != t.n:
        raise DimensionError(f"Cannot combine transforms for n={h.n} and n={t.n}")
    product = h.signs @ t.signs
    signs, remainder = np.divmod(product, h.N)
    if np.any(remainder):
        raise InvariantError("H T is not a multiple of a sign matrix")
    return HadamardTransform(h.n, h.net_index, HadamardKind.SPIN_FLIP_STOKES, signs)


def spin_flip_dwf(w: DwfVector, t: HadamardTransform) -> DwfVector:
    _require_kind(t, HadamardKind.SPIN_FLIP_DWF)
    if w.values.size != t.signs.shape[1]:
        raise DimensionError(f"DWF length {w.values.size} does not match transform size {t.signs.shape[1]}")
    return DwfVector(t.mat @ w.values)


def spin_flipped_stokes(w: DwfVector, h_tilde: HadamardTransform) -> StokesVector:
    """S~ = H~ W."""
    _require_kind(h_tilde, HadamardKind.SPIN_FLIP_STOKES)
    if w.values.size != h_tilde.signs.shape[1]:
        raise DimensionError(f"DWF length {w.values.size} does not match transform size {h_tilde.signs.shape[1]}")
    return StokesVector(h_tilde.mat @ w.values)


@dataclass(frozen=True, eq=False)
class HadamardFamily:
    """A set of H(k) keyed by their sign pattern, for membership lookups."""
    n: int
    by_signs: Dict[bytes, int]

    def __len__(self) -> int:
        return len(self.by_signs)

    def find_net(self, h: HadamardTransform) -> Optional[int]:
        return self.by_signs.get(h.signs.tobytes())

    def __contains__(self, h: HadamardTransform) -> bool:
        return self.find_net(h) is not None


def build_family(frame: PhaseSpaceFrame, nets: Iterable[QuantumNet]) -> HadamardFamily:
    by_signs: Dict[bytes, int] = {}
    for net in nets:
        h = build_H(frame.operators(net))
        key = h.signs.tobytes()
        if key in by_signs:
            raise ConstructionError(f"Nets {by_signs[key]} and {net.net_index} share a Hadamard matrix")
        by_signs[key] = net.net_index
    logger.debug(f"Built Hadamard family of {len(by_signs)} members for n={frame.n}")
    return HadamardFamily(frame.n, by_signs)


def flipped_net(frame: PhaseSpaceFrame, net: QuantumNet) -> QuantumNet:
    """
    The net that attaches to every line the spin flip of the state `net` puts there.
    Its Hadamard matrix is H~ = H T of the original net.
    """
    y = pauli_tensor([2] * frame.n)
    offsets = []
    for striation, offset in enumerate(net.offsets):
        flipped = y @ frame.mubs.vector(striation, offset).conj()
        overlaps = np.abs(frame.mubs.bases[striation].conj() @ flipped)
        k = int(np.argmax(overlaps))
        if abs(overlaps[k] - 1) > settings.numeric_tolerance:
            raise ConstructionError(f"Spin flip leaves the basis of striation {striation}")
        offsets.append(k)
    return QuantumNet(net.n, tuple(offsets))


def hadamard_for(frame: PhaseSpaceFrame, net_index: int, kind: HadamardKind) -> HadamardTransform:
    ops = frame.operators_for(net_index)
    if kind == HadamardKind.STOKES_FROM_DWF:
        return build_H(ops)
    t = build_T(ops)
    if kind == HadamardKind.SPIN_FLIP_DWF:
        return t
    return build_H_tilde(build_H(ops), t)
