import logging
from typing import Dict, Optional, Union

import numpy as np

from dwfstokes.entangle import state_scalars
from dwfstokes.exceptions import UsageError
from dwfstokes.models import (
    HadamardExport,
    MeasurementReport,
    Representation,
    ScalarReport,
    StateFile,
    FileMeta,
    sig15,
)
from dwfstokes.phasespace import QuantumNet, geometry_dict, point_index
from dwfstokes.quantops import (
    PhaseSpaceFrame,
    build_frame,
    density_from_dwf,
    dwf_from_density,
    line_probabilities,
)
from dwfstokes.states import (
    DensityMatrix,
    DwfVector,
    StokesVector,
    density_from_stokes,
    stokes_from_density,
)
from dwfstokes.transform import (
    HadamardKind,
    build_H,
    build_T,
    dwf_from_stokes,
    hadamard_for,
    stokes_from_dwf,
)

State = Union[DensityMatrix, StokesVector, DwfVector]

# CLI spelling of the three transform kinds
KIND_NAMES: Dict[str, HadamardKind] = {
    "H": HadamardKind.STOKES_FROM_DWF,
    "T": HadamardKind.SPIN_FLIP_DWF,
    "H_tilde": HadamardKind.SPIN_FLIP_STOKES,
}


def _frame(n: int) -> PhaseSpaceFrame:
    return build_frame(n)


def _frame_for(input: StateFile) -> PhaseSpaceFrame:
    """The frame a file was written under, taken from its `meta` block."""
    frame = _frame(input.n)
    modulus = input.meta.modulus
    basis = None if input.meta.field_basis is None else tuple(input.meta.field_basis)
    if modulus is None and basis is None:
        return frame
    if (modulus is None or modulus == frame.basis.modulus) and (basis is None or basis == frame.basis.basis):
        return frame
    logging.warning(f"Input uses a non-canonical field: modulus={modulus}, basis={basis}")
    return build_frame(input.n, modulus, basis)


def _net(n: int, net_index: int) -> QuantumNet:
    return QuantumNet.from_index(n, net_index)


def to_density(state: State, frame: PhaseSpaceFrame, net_index: Optional[int] = None) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, StokesVector):
        return density_from_stokes(state)
    return density_from_dwf(state, frame.operators_for(net_index))


def to_dwf(state: State, frame: PhaseSpaceFrame, net_index: int, source_net: Optional[int] = None) -> DwfVector:
    """DWF under `net_index`; Stokes input goes through W = H^T S, DWF input through its own net's H."""
    target_ops = frame.operators_for(net_index)
    if isinstance(state, DensityMatrix):
        return dwf_from_density(state, target_ops)
    if isinstance(state, DwfVector):
        if source_net == net_index:
            return state
        state = stokes_from_dwf(state, build_H(frame.operators_for(source_net)))
    return dwf_from_stokes(state, build_H(target_ops))


def to_stokes(state: State, frame: PhaseSpaceFrame, net_index: Optional[int] = None) -> StokesVector:
    if isinstance(state, StokesVector):
        return state
    if isinstance(state, DwfVector):
        return stokes_from_dwf(state, build_H(frame.operators_for(net_index)))
    return stokes_from_density(state)


def cmd_convert(input: StateFile, target: Representation, net_index: Optional[int] = None) -> StateFile:
    """
    Converts a state file to another representation. A DWF target needs a net,
    either from `net_index` or, for DWF input, from the file itself.
    """
    frame = _frame_for(input)
    state = input.to_state()
    logging.info(f"Converting n={input.n} {input.representation} -> {target}")

    if target == "dwf":
        if net_index is None:
            if input.representation != "dwf":
                raise UsageError("Converting to dwf requires a net index")
            net_index = input.net_index
        _net(input.n, net_index)
        result = to_dwf(state, frame, net_index, source_net=input.net_index)
        out = StateFile.from_state(result, frame.meta(), net_index=net_index)
    else:
        if net_index is not None and input.representation != "dwf":
            logging.warning(f"Ignoring net index {net_index}: neither source nor target is a dwf")
        if target == "stokes":
            result = to_stokes(state, frame, input.net_index)
        else:
            result = to_density(state, frame, input.net_index)
        out = StateFile.from_state(result, frame.meta())

    # Every emitted file must reload cleanly
    out.to_state()
    return out


def cmd_export_hadamard(n: int, net_index: int, kind: Union[str, HadamardKind]) -> HadamardExport:
    if isinstance(kind, str) and kind in KIND_NAMES:
        kind = KIND_NAMES[kind]
    try:
        kind = HadamardKind(kind)
    except ValueError:
        raise UsageError(f"Unknown transform kind {kind!r}; expected one of {sorted(KIND_NAMES)}")
    if n > 3:
        raise UsageError(f"Hadamard export supports n <= 3, got n={n}")
    if n == 3 and net_index != 0:
        raise UsageError("For n=3 only net 0 can be exported")
    frame = _frame(n)
    _net(n, net_index)
    h = hadamard_for(frame, net_index, kind)
    logging.info(f"Exporting {kind.value} for n={n}, net {net_index}")
    return HadamardExport(
        n=n,
        net_index=net_index,
        kind=kind.value,
        signs=h.signs.tolist(),
        meta=FileMeta(**frame.meta()),
    )


def cmd_measure(
    input: StateFile,
    striation_index: int,
    shots: Optional[int] = None,
    seed: Optional[int] = None,
    net_index: Optional[int] = None,
) -> MeasurementReport:
    """
    Outcome probabilities of the projective measurement attached to a striation,
    one per line in intercept order. DWF input uses the line-sum rule directly.
    Passing `shots` draws multinomial counts from a seeded generator.
    """
    frame = _frame_for(input)
    state = input.to_state()
    if input.representation == "dwf":
        net_index = input.net_index
    elif net_index is None:
        net_index = 0
    net = _net(input.n, net_index)
    striation = frame.space.striation(striation_index)

    if isinstance(state, DwfVector):
        N = frame.N
        probabilities = np.array([
            sum(state.values[point_index(pt, N)] for pt in line.points) for line in striation.lines
        ])
    else:
        rho = to_density(state, frame)
        probabilities = line_probabilities(rho, frame.assignment(net), striation_index)

    report = MeasurementReport(
        n=input.n,
        net_index=net_index,
        striation_index=striation_index,
        probabilities=[sig15(p) for p in probabilities],
    )
    if shots is None:
        return report
    if shots <= 0:
        raise UsageError(f"shots must be positive, got {shots}")

    rng = np.random.default_rng(seed)
    weights = np.clip(probabilities, 0, None)
    counts = rng.multinomial(shots, weights / weights.sum())
    logging.debug(f"Sampled {shots} shots on striation {striation_index}: {counts.tolist()}")
    report.shots = shots
    report.seed = seed
    report.counts = counts.tolist()
    report.estimates = (counts / shots).tolist()
    return report


def cmd_report(input: StateFile, net_index: Optional[int] = None) -> ScalarReport:
    frame = _frame_for(input)
    state = input.to_state()
    if input.representation == "dwf":
        net_index = input.net_index
    elif net_index is None:
        net_index = 0
    _net(input.n, net_index)
    w = to_dwf(state, frame, net_index, source_net=input.net_index)
    t = build_T(frame.operators_for(net_index))
    scalars = state_scalars(w, t)
    return ScalarReport(
        n=input.n,
        net_index=net_index,
        minkowski_sq=sig15(scalars.minkowski_sq),
        mixedness=sig15(scalars.mixedness),
        indistinguishability=sig15(scalars.indistinguishability),
        purity=sig15(scalars.purity),
        concurrence=None if scalars.concurrence is None else sig15(scalars.concurrence),
        identity_residual=sig15(scalars.residual),
    )


def cmd_dump_geometry(n: int) -> Dict[str, object]:
    frame = _frame(n)
    geometry = geometry_dict(frame.space)
    geometry["field_basis"] = list(frame.basis.basis)
    geometry["dual_basis"] = list(frame.basis.dual_basis)
    return geometry
