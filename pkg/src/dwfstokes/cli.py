import logging
import sys
from typing import Callable, Optional

import typer
from pydantic import BaseModel, ValidationError

from dwfstokes.config import settings
from dwfstokes.exceptions import (
    ConstructionError,
    DimensionError,
    FieldError,
    GeometryError,
    InvariantError,
    UsageError,
)
from dwfstokes.models import StateFile, dump_json, dump_model, load_model

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3

app = typer.Typer(help="Discrete Wigner functions and Stokes vectors for n-qubit states.")


def setup_logging():
    level_str = settings.log_level.upper()
    level = getattr(logging, level_str, logging.INFO)

    # Clear existing handlers
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)

    # stdout carries the JSON output
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=level,
        stream=sys.stderr,
    )
    logging.info(f"Logging initialized with level: {level_str}")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
):
    if verbose:
        settings.log_level = "DEBUG"
    setup_logging()


def _fail(message: str, code: int):
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(code=code)


def _run(action: Callable[[], object]) -> object:
    try:
        return action()
    except (UsageError, GeometryError, DimensionError, FieldError, OSError) as e:
        _fail(str(e), EXIT_USAGE)
    except (ValidationError, InvariantError) as e:
        _fail(str(e), EXIT_VALIDATION)
    except ConstructionError as e:
        logging.error(f"Construction failed: {e}")
        _fail(str(e), EXIT_VERIFICATION)


def _emit(obj, out: Optional[str]):
    dump = dump_model if isinstance(obj, BaseModel) else dump_json
    text = _run(lambda: dump(obj, out))
    if out is None or out == "-":
        typer.echo(text)
    else:
        logging.info(f"Wrote {out}")


def _parse_shots(shots: str) -> Optional[int]:
    if shots == "exact":
        return None
    try:
        return int(shots)
    except ValueError:
        raise UsageError(f"--shots must be 'exact' or a positive integer, got {shots!r}")


@app.command()
def convert(
    input: str = typer.Argument(..., help="State file path, or '-' for stdin"),
    to: str = typer.Option(..., "--to", help="Target representation: density, stokes or dwf"),
    net: Optional[int] = typer.Option(None, "--net", help="Net index for a dwf target"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output path (stdout by default)"),
):
    """
    Convert a state between density, Stokes and DWF representations.
    """
    from dwfstokes.api import cmd_convert

    def action():
        if to not in ("density", "stokes", "dwf"):
            raise UsageError(f"Unknown representation {to!r}")
        return cmd_convert(load_model(input, StateFile), to, net)

    _emit(_run(action), out)


@app.command("export-hadamard")
def export_hadamard(
    n: int = typer.Option(..., "--n", help="Number of qubits (1-3)"),
    net: int = typer.Option(0, "--net", help="Net index"),
    kind: str = typer.Option("H", "--kind", help="H, T or H_tilde"),
    out: Optional[str] = typer.Option(None, "--out", "-o"),
):
    """
    Export a Hadamard transform as an integer sign matrix with scale 1/N.
    """
    from dwfstokes.api import cmd_export_hadamard

    _emit(_run(lambda: cmd_export_hadamard(n, net, kind)), out)


@app.command()
def measure(
    input: str = typer.Argument(..., help="State file path, or '-' for stdin"),
    striation: int = typer.Option(..., "--striation", help="Striation index 0..N"),
    net: Optional[int] = typer.Option(None, "--net", help="Net index (defaults to 0, or the file's net)"),
    shots: str = typer.Option("exact", "--shots", help="'exact' or a number of simulated shots"),
    seed: int = typer.Option(settings.default_seed, "--seed"),
    out: Optional[str] = typer.Option(None, "--out", "-o"),
):
    """
    Outcome probabilities for the measurement attached to a striation.
    """
    from dwfstokes.api import cmd_measure

    def action():
        return cmd_measure(load_model(input, StateFile), striation, _parse_shots(shots), seed, net)

    _emit(_run(action), out)


@app.command()
def report(
    input: str = typer.Argument(..., help="State file path, or '-' for stdin"),
    net: Optional[int] = typer.Option(None, "--net"),
    out: Optional[str] = typer.Option(None, "--out", "-o"),
):
    """
    Minkowski norm, mixedness, indistinguishability and (for pure states) concurrence.
    """
    from dwfstokes.api import cmd_report

    _emit(_run(lambda: cmd_report(load_model(input, StateFile), net)), out)


@app.command()
def verify(
    n: int = typer.Option(..., "--n", help="Number of qubits"),
    depth: str = typer.Option("quick", "--depth", help="quick or full"),
    seed: int = typer.Option(settings.default_seed, "--seed"),
    out: Optional[str] = typer.Option(None, "--out", "-o"),
):
    """
    Run the self-verification suite and exit non-zero if any check fails.
    """
    from dwfstokes.verify import cmd_verify

    result = _run(lambda: cmd_verify(n, depth, seed))
    _emit(result, out)
    if not result.passed:
        _fail(f"{sum(not c.passed for c in result.checks)} verification checks failed", EXIT_VERIFICATION)


@app.command("dump-geometry")
def dump_geometry(
    n: int = typer.Option(..., "--n", help="Number of qubits (1-4)"),
    out: Optional[str] = typer.Option(None, "--out", "-o"),
):
    """
    Dump the field, points, lines and striations of the phase space.
    """
    from dwfstokes.api import cmd_dump_geometry

    _emit(_run(lambda: cmd_dump_geometry(n)), out)


if __name__ == "__main__":
    app()
