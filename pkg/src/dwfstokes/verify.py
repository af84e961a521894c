"""
Self-verification suite behind `dwfstokes verify`.

Every check returns a CheckResult with the largest residual it saw; the
report passes iff every check does. Per-net work fans out to a thread pool
and is aggregated in net-index order.
"""
import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Literal, Sequence

import numpy as np

from dwfstokes.config import settings
from dwfstokes.entangle import (
    concurrence_pure,
    indistinguishability,
    minkowski_sq_from_dwf,
    minkowski_sq_from_stokes,
    mixedness,
)
from dwfstokes.exceptions import DwfStokesError, UsageError
from dwfstokes.gf2n import FieldBasis
from dwfstokes.models import CheckResult, VerifyReport
from dwfstokes.phasespace import (
    QuantumNet,
    enumerate_nets,
    invariant_translations,
    net_count,
    point_index,
    translate,
)
from dwfstokes.quantops import (
    PhaseSpaceFrame,
    build_frame,
    dwf_from_density,
    dwf_of_operator,
    pauli_basis,
    pauli_tensor,
    translation_unitary,
)
from dwfstokes.states import (
    DensityMatrix,
    bell_state,
    partially_entangled,
    product_state,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
    stokes_from_density,
)
from dwfstokes.transform import (
    HadamardFamily,
    HadamardTransform,
    build_H,
    build_H_tilde,
    build_T,
    build_family,
    flipped_net,
    spin_flip_operator,
)

logger = logging.getLogger(__name__)

Depth = Literal["quick", "full"]

# Single qubit, net 0: DWFs of I, X, Y, Z over (W00, W01, W10, W11)
SINGLE_QUBIT_PAULI_DWF = 0.5 * np.array([
    [1, 1, 1, 1],
    [1, -1, 1, -1],
    [1, -1, -1, 1],
    [1, 1, -1, -1],
])
SINGLE_QUBIT_INVERSE = 0.5 * np.array([
    [1, 1, 1, 1],
    [1, -1, -1, 1],
    [1, 1, -1, -1],
    [1, -1, 1, -1],
])

QUICK_SAMPLED_NETS = {2: 64, 3: 16}
STATE_COUNT = {"quick": 100, "full": 200}


@dataclass
class NetResidual:
    net_index: int
    algebra: float
    line_sum: float
    covariance: float
    stokes_routes: float
    round_trip: float
    spin_flip: float
    flipped_net: float


def _result(name: str, residual: float, tol: float, detail: str = "") -> CheckResult:
    passed = bool(residual <= tol)
    if not passed:
        logger.error(f"Check {name} failed: residual {residual:.3e} > {tol:.1e}")
    return CheckResult(name=name, passed=passed, max_residual=float(residual), detail=detail or None)


def _flag(name: str, passed: bool, detail: str = "") -> CheckResult:
    if not passed:
        logger.error(f"Check {name} failed: {detail}")
    return CheckResult(name=name, passed=bool(passed), detail=detail or None)


def _guarded(name: str, check: Callable[[], List[CheckResult]]) -> List[CheckResult]:
    try:
        return check()
    except DwfStokesError as e:
        logger.error(f"Check {name} raised: {e}")
        return [CheckResult(name=name, passed=False, detail=str(e))]


def _check_field(frame: PhaseSpaceFrame) -> List[CheckResult]:
    gf = frame.space.field
    elements = list(gf.elements())
    axioms_ok = all(
        gf.mul(a, gf.mul(b, c)) == gf.mul(gf.mul(a, b), c)
        and gf.mul(a, b) == gf.mul(b, a)
        and gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
        for a, b, c in itertools.product(elements, repeat=3)
    )
    inverse_ok = all(gf.mul(a, gf.inv(a)) == 1 for a in elements[1:])
    trace_ok = all(
        gf.trace(gf.add(a, b)) == gf.trace(a) ^ gf.trace(b)
        for a, b in itertools.product(elements, repeat=2)
    )
    basis = frame.basis
    redual = FieldBasis.make(gf, basis.dual_basis)
    dual_ok = redual.dual_basis == basis.basis and all(
        gf.trace(gf.mul(e, f)) == int(i == j)
        for (i, e), (j, f) in itertools.product(enumerate(basis.basis), enumerate(basis.dual_basis))
    )
    return [
        _flag("field.axioms", axioms_ok, "associativity, commutativity, distributivity"),
        _flag("field.inverse", inverse_ok),
        _flag("field.trace_linear", trace_ok),
        _flag("field.dual_basis", dual_ok, f"basis {basis.basis}, dual {basis.dual_basis}"),
    ]


def _check_geometry(frame: PhaseSpaceFrame) -> List[CheckResult]:
    space = frame.space
    N = space.N
    all_points = set(space.points)
    partition_ok = all(
        sum(len(line.points) for line in s.lines) == N * N
        and set().union(*(line.points for line in s.lines)) == all_points
        for s in space.striations
    )
    counts_ok = len(space.points) == N * N and len(space.lines) == N * (N + 1)
    results = [
        _flag("geometry.counts", counts_ok, f"{len(space.points)} points, {len(space.lines)} lines"),
        _flag("geometry.striations_partition", partition_ok),
    ]
    if space.n <= 3:
        unique_ok = all(
            sum(1 for line in space.lines if p1 in line and p2 in line) == 1
            for p1, p2 in itertools.combinations(space.points, 2)
        )
        results.append(_flag("geometry.unique_line_through_two_points", unique_ok))
    subgroup_ok = True
    for s in space.striations:
        group = set(invariant_translations(space.field, s)) | {(0, 0)}
        closed = all((space.field.add(a, c), space.field.add(b, d)) in group for (a, b), (c, d) in itertools.product(group, repeat=2))
        preserved = all(
            space.translate_line(line, *tau) == line for line in s.lines for tau in group
        )
        subgroup_ok = subgroup_ok and closed and len(group) == N and preserved
    results.append(_flag("geometry.invariant_translations", subgroup_ok))
    return results


def _check_mubs(frame: PhaseSpaceFrame) -> List[CheckResult]:
    return [
        _result("mub.orthonormal", frame.mubs.orthonormality_residual(), settings.exact_tolerance),
        _result("mub.unbiased", frame.mubs.unbiasedness_residual(), settings.exact_tolerance),
    ]


def _check_fixtures(frame: PhaseSpaceFrame) -> List[CheckResult]:
    ops = frame.operators_for(0)
    table = np.array([dwf_of_operator(pauli_tensor([i]), ops) for i in range(4)])
    h = build_H(ops)
    inverse = np.linalg.inv(h.mat)
    return [
        _result("fixture.single_qubit_pauli_dwf", float(np.max(np.abs(table - SINGLE_QUBIT_PAULI_DWF))), 1e-12),
        _result("fixture.single_qubit_H", float(np.max(np.abs(h.mat - SINGLE_QUBIT_PAULI_DWF))), 0.0),
        _result("fixture.single_qubit_H_inverse", float(np.max(np.abs(inverse - SINGLE_QUBIT_INVERSE))), 1e-12),
    ]


def _net_residuals(
    frame: PhaseSpaceFrame,
    net: QuantumNet,
    rhos: np.ndarray,
    stokes_ref: np.ndarray,
    t_ref: HadamardTransform,
) -> NetResidual:
    space = frame.space
    N = space.N
    ops = frame.operators(net)
    assignment = frame.assignment(net)

    gram = ops.gram()
    algebra = max(
        float(np.max(np.abs(np.einsum("aii->a", ops.ops) - 1))),
        float(np.max(np.abs(gram - N * np.eye(N * N)))),
        float(np.max(np.abs(ops.ops.sum(axis=0) - N * np.eye(N)))),
    )

    line_sum = 0.0
    for line in space.lines:
        total = sum(ops.ops[point_index(pt, N)] for pt in line.points)
        line_sum = max(line_sum, float(np.max(np.abs(total - N * assignment.projector(line)))))

    covariance = 0.0
    if space.n <= 2:
        for alpha, beta in itertools.product(space.field.elements(), repeat=2):
            u = translation_unitary(alpha, beta, frame.basis)
            for pt in space.points:
                moved = point_index(translate(space.field, pt, alpha, beta), N)
                conj = u @ ops.ops[point_index(pt, N)] @ u.conj().T
                covariance = max(covariance, float(np.max(np.abs(conj - ops.ops[moved]))))

    h = build_H(ops)
    dwfs = np.real(np.einsum("aij,sji->sa", ops.ops, rhos)) / N
    stokes_routes = float(np.max(np.abs(dwfs @ h.mat.T - stokes_ref)))
    back = np.einsum("sa,aij->sij", dwfs, ops.ops)
    round_trip = max(
        float(np.max(np.abs(back - rhos))),
        float(np.max(np.abs((stokes_ref @ h.mat) @ h.mat.T - stokes_ref))),
    )

    t = build_T(ops)
    spin_flip = float(np.max(np.abs(t.mat - t_ref.mat)))
    h_tilde = build_H_tilde(h, t)
    flipped = build_H(frame.operators(flipped_net(frame, net)))
    flipped_residual = 0.0 if h_tilde.same_signs(flipped) else 1.0

    logger.debug(f"Verified net {net.net_index}")
    return NetResidual(net.net_index, algebra, line_sum, covariance, stokes_routes, round_trip, spin_flip, flipped_residual)


def _select_nets(n: int, depth: Depth, rng: np.random.Generator) -> List[QuantumNet]:
    if depth == "full" or n == 1:
        return list(enumerate_nets(n))
    count = net_count(n)
    sampled = rng.choice(count, size=QUICK_SAMPLED_NETS[n], replace=False)
    indices = sorted({0, *(int(i) for i in sampled)})
    return [QuantumNet.from_index(n, i) for i in indices]


def _check_nets(frame: PhaseSpaceFrame, nets: Sequence[QuantumNet], depth: Depth, rng: np.random.Generator) -> List[CheckResult]:
    n = frame.n
    rhos = np.array([random_density_matrix(n, rng).mat for _ in range(STATE_COUNT[depth])])
    stokes_ref = np.real(np.einsum("pij,sji->sp", pauli_basis(n), rhos)) / frame.N
    t_ref = build_T(frame.operators(nets[0]))

    with ThreadPoolExecutor(max_workers=max(1, settings.verify_workers)) as pool:
        residuals = list(pool.map(lambda net: _net_residuals(frame, net, rhos, stokes_ref, t_ref), nets))
    residuals.sort(key=lambda r: r.net_index)

    def worst(attr: str) -> float:
        return max(getattr(r, attr) for r in residuals)

    detail = f"{len(nets)} nets, {len(rhos)} random states"
    tol = settings.numeric_tolerance
    results = [
        _result("operators.algebra", worst("algebra"), tol, detail),
        _result("operators.line_sum", worst("line_sum"), tol, detail),
        _result("stokes.dual_route", worst("stokes_routes"), settings.exact_tolerance, detail),
        _result("state.round_trip", worst("round_trip"), settings.exact_tolerance, detail),
        _result("spin_flip.net_independent", worst("spin_flip"), settings.exact_tolerance, detail),
        _result("spin_flip.flipped_net", worst("flipped_net"), 0.0, detail),
    ]
    if n <= 2:
        results.append(_result("operators.covariance", worst("covariance"), tol, detail))

    t_signs = t_ref.signs
    size = t_signs.shape[0]
    results.append(_flag(
        "spin_flip.involution",
        np.array_equal(t_signs @ t_signs, size * np.eye(size, dtype=np.int64)),
    ))
    # Row 0 of every H(k) is the all-ones DWF of the identity
    results.append(_flag("spin_flip.not_in_family", not np.all(t_signs[0] == 1)))

    if depth == "full":
        results.extend(_check_family_closure(frame, nets, t_ref))
    return results


def _check_family_closure(frame: PhaseSpaceFrame, nets: Sequence[QuantumNet], t: HadamardTransform) -> List[CheckResult]:
    family: HadamardFamily = build_family(frame, nets)
    images: Dict[int, int] = {}
    for net in nets:
        h_tilde = build_H_tilde(build_H(frame.operators(net)), t)
        match = family.find_net(h_tilde)
        if match is None:
            return [_flag("spin_flip.family_closure", False, f"H~ of net {net.net_index} is not in the family")]
        images[net.net_index] = match
    bijective = sorted(images.values()) == sorted(images)
    involution = all(images[images[k]] == k for k in images)
    return [
        _flag("spin_flip.family_closure", True, f"{len(family)} members"),
        _flag("spin_flip.family_bijection", bijective and involution),
    ]


def _check_entanglement(frame: PhaseSpaceFrame, nets: Sequence[QuantumNet], depth: Depth, rng: np.random.Generator) -> List[CheckResult]:
    n = frame.n
    ops = frame.operators(nets[0])
    t = build_T(ops)
    route = identity = 0.0
    for _ in range(STATE_COUNT[depth]):
        rho = random_density_matrix(n, rng)
        w = dwf_from_density(rho, ops)
        by_density = float(np.real(np.trace(rho.mat @ spin_flip_operator(rho.mat))))
        by_dwf = minkowski_sq_from_dwf(w, t)
        by_stokes = minkowski_sq_from_stokes(stokes_from_density(rho))
        route = max(route, abs(by_dwf - by_density), abs(by_stokes - by_density))
        identity = max(identity, abs(by_dwf + mixedness(w) - indistinguishability(w, t)))
    results = [
        _result("entangle.minkowski_routes", route, settings.exact_tolerance),
        _result("entangle.scalar_identity", identity, settings.exact_tolerance),
    ]
    if n != 2:
        return results

    bell = concurrence_pure(dwf_from_density(bell_state(), ops), t)
    product = concurrence_pure(dwf_from_density(product_state("HH"), ops), t)
    sweep = max(
        abs(concurrence_pure(dwf_from_density(partially_entangled(theta), ops), t) - abs(np.sin(2 * theta)))
        for theta in np.linspace(0, np.pi, 25)
    )
    local = 0.0
    psi = random_pure_state(n, rng)
    base = concurrence_pure(dwf_from_density(psi, ops), t)
    for _ in range(10):
        u = random_local_unitary(n, rng)
        moved = DensityMatrix(u @ psi.mat @ u.conj().T)
        local = max(local, abs(concurrence_pure(dwf_from_density(moved, ops), t) - base))
    across = max(
        abs(concurrence_pure(dwf_from_density(psi, frame.operators(net)), build_T(frame.operators(net))) - base)
        for net in nets
    )
    results.extend([
        _result("entangle.bell_concurrence", abs(bell - 1), settings.exact_tolerance),
        _result("entangle.product_concurrence", abs(product), settings.exact_tolerance),
        _result("entangle.concurrence_sweep", sweep, settings.numeric_tolerance),
        _result("entangle.local_unitary_invariance", local, settings.numeric_tolerance),
        _result("entangle.net_independence", across, settings.numeric_tolerance),
    ])
    return results


def cmd_verify(n: int, depth: Depth = "quick", seed: int | None = None) -> VerifyReport:
    if depth not in ("quick", "full"):
        raise UsageError(f"Unknown depth {depth!r}; expected 'quick' or 'full'")
    if depth == "full" and n > 2:
        raise UsageError(f"Full verification enumerates every net and supports n <= 2, got n={n}")
    if not 1 <= n <= 3:
        raise UsageError(f"Verification supports 1 <= n <= 3, got n={n}")

    started = time.perf_counter()
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    frame = build_frame(n)
    nets = _select_nets(n, depth, rng)
    logger.info(f"Verifying n={n} ({depth}) over {len(nets)} nets")

    checks: List[CheckResult] = []
    checks += _guarded("field", lambda: _check_field(frame))
    checks += _guarded("geometry", lambda: _check_geometry(frame))
    checks += _guarded("mub", lambda: _check_mubs(frame))
    if n == 1:
        checks += _guarded("fixture", lambda: _check_fixtures(frame))
    checks += _guarded("nets", lambda: _check_nets(frame, nets, depth, rng))
    checks += _guarded("entangle", lambda: _check_entanglement(frame, nets, depth, rng))

    report = VerifyReport(n=n, depth=depth, checks=checks)
    failed = [c.name for c in checks if not c.passed]
    logger.info(
        f"Verification finished in {time.perf_counter() - started:.2f}s: "
        f"{len(checks) - len(failed)}/{len(checks)} checks passed"
    )
    return report
