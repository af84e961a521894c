"""
Entanglement and state-quality scalars computed straight from a DWF.

All of them rest on the inner-product rule Tr(rho sigma) = N sum_alpha W_alpha V_alpha
and on the spin-flip matrix T (W~ = T W).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from dwfstokes.config import settings
from dwfstokes.exceptions import DimensionError, InvariantError
from dwfstokes.states import DwfVector, StokesVector, stokes_weights
from dwfstokes.transform import HadamardKind, HadamardTransform

logger = logging.getLogger(__name__)

PURITY_TOLERANCE = 1e-6
CLAMP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class StateScalars:
    minkowski_sq: float
    mixedness: float
    indistinguishability: float
    purity: float
    concurrence: Optional[float] = None

    @property
    def residual(self) -> float:
        """|S^2 + M - I|, zero up to round-off."""
        return abs(self.minkowski_sq + self.mixedness - self.indistinguishability)


def _check_t(w: DwfVector, t: HadamardTransform):
    if t.kind != HadamardKind.SPIN_FLIP_DWF:
        raise DimensionError(f"Expected a {HadamardKind.SPIN_FLIP_DWF.value} transform, got {t.kind.value}")
    if w.values.size != t.signs.shape[1]:
        raise DimensionError(f"DWF length {w.values.size} does not match transform size {t.signs.shape[1]}")


def minkowski_sq_from_stokes(s: StokesVector) -> float:
    """
    Alternating-sign square sum: components with an odd number of Pauli factors
    enter negatively. With S normalized by 1/2^n the form carries a factor 2^n,
    which makes it equal to Tr(rho rho~).
    """
    signs = np.where(stokes_weights(s.n) % 2, -1.0, 1.0)
    return float(s.N * np.sum(signs * s.values**2))


def minkowski_sq_from_dwf(w: DwfVector, t: HadamardTransform) -> float:
    """N W^T T W = Tr(rho rho~), for pure and mixed states alike."""
    _check_t(w, t)
    return float(w.N * w.values @ (t.mat @ w.values))


def purity(w: DwfVector) -> float:
    """Tr(rho^2) = N sum W^2."""
    return float(w.N * np.sum(w.values**2))


def mixedness(w: DwfVector) -> float:
    return 1.0 - purity(w)


def concurrence_pure(w: DwfVector, t: HadamardTransform) -> float:
    p = purity(w)
    if abs(p - 1) > PURITY_TOLERANCE:
        raise InvariantError(f"Concurrence needs a pure state, Tr(rho^2) = {p:.9g}")
    value = minkowski_sq_from_dwf(w, t)
    if value < -CLAMP_TOLERANCE:
        raise InvariantError(f"N W^T T W = {value:.3e} is negative for a pure state")
    # The square root would turn 1e-16 of round-off into 1e-8
    if abs(value) <= CLAMP_TOLERANCE:
        if value:
            logger.debug(f"Clamping round-off {value:.3e} under the concurrence square root")
        value = 0.0
    return float(np.sqrt(value))


def indistinguishability(w: DwfVector, t: HadamardTransform) -> float:
    """1 - (1/2) Tr[(rho - rho~)^2], evaluated as 1 - (N/2) |W - W~|^2."""
    _check_t(w, t)
    diff = w.values - t.mat @ w.values
    return float(1.0 - w.N / 2 * diff @ diff)


def hilbert_schmidt_distance_sq(w: DwfVector, t: HadamardTransform) -> float:
    return 1.0 - indistinguishability(w, t)


def state_scalars(w: DwfVector, t: HadamardTransform) -> StateScalars:
    """Every scalar at once; concurrence is left out unless the state is pure."""
    p = purity(w)
    concurrence = concurrence_pure(w, t) if abs(p - 1) <= PURITY_TOLERANCE else None
    scalars = StateScalars(
        minkowski_sq=minkowski_sq_from_dwf(w, t),
        mixedness=1.0 - p,
        indistinguishability=indistinguishability(w, t),
        purity=p,
        concurrence=concurrence,
    )
    if scalars.residual > settings.exact_tolerance:
        logger.warning(f"S^2 + M - I residual {scalars.residual:.3e} exceeds tolerance")
    return scalars
