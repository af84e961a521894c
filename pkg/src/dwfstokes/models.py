import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from dwfstokes import __version__
from dwfstokes.config import settings
from dwfstokes.states import DensityMatrix, DwfVector, StokesVector

Representation = Literal["density", "stokes", "dwf"]

INDEX_ORDER = {
    "stokes": "row-major over (i_1..i_n) in {0:I,1:X,2:Y,3:Z}^n, i_1 most significant",
    "dwf": "index = int(q) * N + int(p)",
    "density": "computational basis, qubit 1 most significant",
}


def sig15(x: float) -> float:
    """Rounds to 15 significant digits for reporting."""
    return float(f"{x:.15g}")


class FileMeta(BaseModel):
    model_config = ConfigDict(extra="allow")

    modulus: Optional[int] = None
    field_basis: Optional[List[int]] = None
    tool_version: str = __version__
    index_order: Optional[str] = None


class DensityPayload(BaseModel):
    re: List[List[float]]
    im: List[List[float]]


class StateFile(BaseModel):
    representation: Representation
    n: int = Field(ge=1, le=4)
    net_index: Optional[int] = None
    data: Union[DensityPayload, List[float]]
    meta: FileMeta = Field(default_factory=FileMeta)

    @model_validator(mode="after")
    def check_layout(self) -> "StateFile":
        N = 1 << self.n
        if self.representation == "dwf":
            if self.net_index is None:
                raise ValueError("net_index is required for dwf files")
        elif self.net_index is not None:
            raise ValueError(f"net_index is not allowed for {self.representation} files")

        if self.representation == "density":
            if not isinstance(self.data, DensityPayload):
                raise ValueError("density data must be an object with 're' and 'im' arrays")
            for part in (self.data.re, self.data.im):
                if len(part) != N or any(len(row) != N for row in part):
                    raise ValueError(f"density payload must be {N}x{N}")
        else:
            if not isinstance(self.data, list):
                raise ValueError(f"{self.representation} data must be a flat array")
            expected = N * N
            if len(self.data) != expected:
                raise ValueError(f"{self.representation} payload must have {expected} entries, got {len(self.data)}")
        return self

    def to_state(self) -> Union[DensityMatrix, StokesVector, DwfVector]:
        """The domain object, with its state invariants checked at load tolerance."""
        tol = settings.load_tolerance
        if self.representation == "density":
            mat = np.array(self.data.re) + 1j * np.array(self.data.im)
            return DensityMatrix(mat).check(tol=tol, psd_tol=tol)
        if self.representation == "stokes":
            return StokesVector(np.array(self.data)).check(tol=tol)
        return DwfVector(np.array(self.data)).check(tol=tol)

    @classmethod
    def from_state(
        cls,
        state: Union[DensityMatrix, StokesVector, DwfVector],
        meta: Dict[str, object],
        net_index: Optional[int] = None,
    ) -> "StateFile":
        if isinstance(state, DensityMatrix):
            representation, data = "density", DensityPayload(re=state.mat.real.tolist(), im=state.mat.imag.tolist())
            net_index = None
        elif isinstance(state, StokesVector):
            representation, data = "stokes", state.values.tolist()
            net_index = None
        else:
            representation, data = "dwf", state.values.tolist()
        return cls(
            representation=representation,
            n=state.n,
            net_index=net_index,
            data=data,
            meta=FileMeta(**meta, index_order=INDEX_ORDER[representation]),
        )


class HadamardExport(BaseModel):
    n: int
    net_index: int
    kind: str
    scale: str = "1/N"
    signs: List[List[int]]
    meta: FileMeta = Field(default_factory=FileMeta)


class MeasurementReport(BaseModel):
    n: int
    net_index: int
    striation_index: int
    probabilities: List[float]
    shots: Union[int, Literal["exact"]] = "exact"
    seed: Optional[int] = None
    counts: Optional[List[int]] = None
    estimates: Optional[List[float]] = None


class ScalarReport(BaseModel):
    n: int
    net_index: int
    minkowski_sq: float
    mixedness: float
    indistinguishability: float
    purity: float
    concurrence: Optional[float] = None
    identity_residual: float


class CheckResult(BaseModel):
    name: str
    passed: bool
    max_residual: Optional[float] = None
    detail: Optional[str] = None


class VerifyReport(BaseModel):
    n: int
    depth: Literal["quick", "full"]
    checks: List[CheckResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def load_model(source: Union[str, Path], model: type[BaseModel]) -> BaseModel:
    """Reads a JSON document from a path, or stdin when the path is '-'."""
    if str(source) == "-":
        text = sys.stdin.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    logging.debug(f"Loading {model.__name__} from {source}")
    return model.model_validate_json(text)


def dump_model(obj: BaseModel, target: Optional[Union[str, Path]] = None) -> str:
    text = obj.model_dump_json(indent=2)
    if target is not None and str(target) != "-":
        Path(target).write_text(text + "\n", encoding="utf-8")
    return text


def dump_json(obj: Dict[str, object], target: Optional[Union[str, Path]] = None) -> str:
    text = json.dumps(obj, indent=2)
    if target is not None and str(target) != "-":
        Path(target).write_text(text + "\n", encoding="utf-8")
    return text
