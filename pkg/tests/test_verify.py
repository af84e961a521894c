import pytest

from dwfstokes.exceptions import UsageError
from dwfstokes.verify import cmd_verify


def test_single_qubit_quick():
    report = cmd_verify(1, "quick")
    assert report.passed, [c for c in report.checks if not c.passed]
    assert all(c.max_residual is None or c.max_residual < 1e-8 for c in report.checks)


def test_two_qubit_quick():
    report = cmd_verify(2, "quick", seed=4)
    assert report.passed, [c for c in report.checks if not c.passed]
    names = {c.name for c in report.checks}
    assert "entangle.bell_concurrence" in names
    assert "operators.covariance" in names


@pytest.mark.slow
def test_two_qubit_full():
    report = cmd_verify(2, "full")
    assert report.passed, [c for c in report.checks if not c.passed]


@pytest.mark.slow
def test_three_qubit_quick():
    assert cmd_verify(3, "quick").passed


def test_out_of_range():
    with pytest.raises(UsageError):
        cmd_verify(3, "full")
    with pytest.raises(UsageError):
        cmd_verify(4, "quick")
    with pytest.raises(UsageError):
        cmd_verify(1, "deep")
