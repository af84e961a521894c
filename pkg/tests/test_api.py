import logging

import numpy as np
import pytest
from pydantic import ValidationError

from dwfstokes.api import cmd_convert, cmd_dump_geometry, cmd_export_hadamard, cmd_measure, cmd_report
from dwfstokes.exceptions import FieldError, GeometryError, InvariantError, UsageError
from dwfstokes.models import FileMeta, StateFile
from dwfstokes.quantops import build_frame, dwf_from_density
from dwfstokes.states import (
    DensityMatrix,
    bell_state,
    product_state,
    random_density_matrix,
    stokes_from_density,
)


def density_file(rho: DensityMatrix) -> StateFile:
    return StateFile.from_state(rho, build_frame(rho.n).meta())


def test_density_to_stokes():
    out = cmd_convert(density_file(product_state("H")), "stokes")
    assert out.representation == "stokes"
    assert out.net_index is None
    assert np.allclose(out.data, [0.5, 0, 0, 0.5])
    assert "row-major" in out.meta.index_order


def test_stokes_to_dwf():
    stokes = StateFile(representation="stokes", n=1, data=[0.5, 0, 0, 0.5])
    out = cmd_convert(stokes, "dwf", net_index=0)
    assert out.net_index == 0
    assert np.allclose(out.data, [0.5, 0.5, 0, 0])


def test_dwf_target_needs_a_net():
    with pytest.raises(UsageError):
        cmd_convert(density_file(product_state("H")), "dwf")


@pytest.mark.parametrize("net_index", [0, 6, 250, 1000])
def test_conversion_is_path_independent(net_index):
    rng = np.random.default_rng(net_index)
    source = density_file(random_density_matrix(2, rng))
    direct = cmd_convert(source, "dwf", net_index=net_index)
    via_stokes = cmd_convert(cmd_convert(source, "stokes"), "dwf", net_index=net_index)
    assert np.max(np.abs(np.array(direct.data) - np.array(via_stokes.data))) < 1e-10
    back = cmd_convert(cmd_convert(direct, "density"), "dwf", net_index=net_index)
    assert np.max(np.abs(np.array(back.data) - np.array(direct.data))) < 1e-10


def test_dwf_between_nets():
    rng = np.random.default_rng(1)
    source = density_file(random_density_matrix(2, rng))
    w_a = cmd_convert(source, "dwf", net_index=12)
    w_b = cmd_convert(w_a, "dwf", net_index=700)
    assert np.allclose(w_b.data, cmd_convert(source, "dwf", net_index=700).data, atol=1e-10)
    # A dwf file with no --net keeps its own net
    assert cmd_convert(w_a, "dwf").net_index == 12


def test_convert_uses_the_field_in_file_meta(caplog):
    rho = random_density_matrix(3, np.random.default_rng(11))
    frame = build_frame(3, 0b1101)
    dwf = StateFile.from_state(dwf_from_density(rho, frame.operators_for(0)), frame.meta(), net_index=0)
    with caplog.at_level(logging.WARNING):
        stokes = cmd_convert(dwf, "stokes")
    assert np.allclose(stokes.data, stokes_from_density(rho).values, atol=1e-10)
    assert stokes.meta.modulus == 0b1101
    assert "non-canonical" in caplog.text

    back = cmd_convert(cmd_convert(dwf, "density"), "dwf")
    assert back.meta.modulus == 0b1101
    assert np.allclose(back.data, dwf.data, atol=1e-10)


def test_convert_under_a_non_polynomial_basis():
    rho = random_density_matrix(2, np.random.default_rng(5))
    source = StateFile.from_state(rho, build_frame(2, basis=(1, 3)).meta())
    dwf = cmd_convert(source, "dwf", net_index=9)
    assert dwf.meta.field_basis == [1, 3]
    assert np.allclose(cmd_convert(dwf, "stokes").data, stokes_from_density(rho).values, atol=1e-10)
    assert np.allclose(cmd_convert(dwf, "density").data.re, rho.mat.real, atol=1e-10)


@pytest.mark.parametrize("meta", [{"modulus": 0b1111}, {"modulus": 0b1101, "field_basis": [3, 5, 6]}])
def test_unusable_field_meta_is_rejected(meta):
    source = density_file(random_density_matrix(3, np.random.default_rng(2)))
    source.meta = FileMeta(**meta)
    with pytest.raises(FieldError):
        cmd_convert(source, "stokes")


def test_state_file_layout_is_validated():
    with pytest.raises(ValidationError):
        StateFile(representation="dwf", n=1, data=[0.25] * 4)
    with pytest.raises(ValidationError):
        StateFile(representation="stokes", n=1, net_index=0, data=[0.5, 0, 0, 0.5])
    with pytest.raises(ValidationError):
        StateFile(representation="stokes", n=2, data=[0.25, 0, 0, 0.25])
    with pytest.raises(InvariantError):
        StateFile(representation="stokes", n=1, data=[1.0, 0, 0, 0]).to_state()


def test_net_out_of_range():
    with pytest.raises(GeometryError):
        cmd_convert(density_file(product_state("H")), "dwf", net_index=8)


def test_export_hadamard():
    h = cmd_export_hadamard(1, 0, "H")
    assert h.signs == [[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]]
    assert h.scale == "1/N"
    t = cmd_export_hadamard(1, 5, "T")
    assert t.signs == cmd_export_hadamard(1, 0, "T").signs
    t_signs = np.array(t.signs)
    assert np.array_equal(t_signs @ t_signs, 4 * np.eye(4))
    family = {tuple(map(tuple, cmd_export_hadamard(1, k, "H").signs)) for k in range(8)}
    assert tuple(map(tuple, cmd_export_hadamard(1, 0, "H_tilde").signs)) in family


def test_export_limits():
    with pytest.raises(UsageError):
        cmd_export_hadamard(3, 1, "H")
    with pytest.raises(UsageError):
        cmd_export_hadamard(4, 0, "H")
    with pytest.raises(UsageError):
        cmd_export_hadamard(1, 0, "S")


def test_measure_exact():
    source = density_file(product_state("H"))
    z_basis = cmd_measure(source, 0)
    assert np.allclose(z_basis.probabilities, [1, 0])
    x_basis = cmd_measure(source, 1)
    assert np.allclose(x_basis.probabilities, [0.5, 0.5])
    assert z_basis.shots == "exact"


def test_measure_dwf_uses_line_sums():
    rng = np.random.default_rng(9)
    source = density_file(random_density_matrix(2, rng))
    dwf = cmd_convert(source, "dwf", net_index=77)
    for striation in range(5):
        from_density = cmd_measure(source, striation, net_index=77).probabilities
        from_dwf = cmd_measure(dwf, striation).probabilities
        assert np.allclose(from_density, from_dwf, atol=1e-10)
        assert np.isclose(sum(from_dwf), 1.0, atol=1e-8)


def test_measure_sampling_converges():
    rng = np.random.default_rng(10)
    source = density_file(random_density_matrix(2, rng))
    shots = 10**6
    report = cmd_measure(source, 3, shots=shots, seed=0)
    assert sum(report.counts) == shots
    p = np.array(report.probabilities)
    sigma = np.sqrt(p * (1 - p) / shots)
    assert np.all(np.abs(np.array(report.estimates) - p) <= 5 * sigma + 1e-12)
    again = cmd_measure(source, 3, shots=shots, seed=0)
    assert again.counts == report.counts


def test_measure_errors():
    source = density_file(product_state("H"))
    with pytest.raises(GeometryError):
        cmd_measure(source, 3)
    with pytest.raises(UsageError):
        cmd_measure(source, 0, shots=0)


def test_report_bell_state():
    report = cmd_report(density_file(bell_state()))
    assert np.isclose(report.concurrence, 1.0)
    assert abs(report.mixedness) < 1e-10
    assert np.isclose(report.indistinguishability, 1.0)
    assert report.identity_residual < 1e-10


def test_report_mixed_and_product():
    report = cmd_report(density_file(DensityMatrix.maximally_mixed(2)))
    assert np.isclose(report.minkowski_sq, 0.25)
    assert np.isclose(report.mixedness, 0.75)
    assert np.isclose(report.indistinguishability, 1.0)
    assert report.concurrence is None
    assert abs(cmd_report(density_file(product_state("HH"))).concurrence) < 1e-10


def test_dump_geometry():
    geometry = cmd_dump_geometry(2)
    assert len(geometry["points"]) == 16
    assert len(geometry["striations"]) == 5
    assert geometry["modulus"] == 0b111
