"""
Discrete phase space over GF(2^n): points, lines aq + bp = c, striations and quantum nets.

Striation order is fixed:
  0      vertical lines   q = c          direction (0, 1)
  1      horizontal lines p = c          direction (1, 0)
  1 + s  lines p = s*q + c, s = 1..N-1   direction (1, s)
Lines inside a striation are indexed by their intercept c.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from dwfstokes.config import settings
from dwfstokes.exceptions import GeometryError
from dwfstokes.gf2n import FieldElement, GF2n

logger = logging.getLogger(__name__)

Translation = Tuple[FieldElement, FieldElement]


@dataclass(frozen=True, order=True)
class PhasePoint:
    q: FieldElement
    p: FieldElement


def point_index(point: PhasePoint, N: int) -> int:
    """DWF vector position of a point: int(q) * N + int(p)."""
    return point.q * N + point.p


@dataclass(frozen=True)
class Line:
    a: FieldElement
    b: FieldElement
    c: FieldElement
    striation: int
    points: FrozenSet[PhasePoint]

    def __contains__(self, point: PhasePoint) -> bool:
        return point in self.points


@dataclass(frozen=True)
class Striation:
    index: int
    direction: Translation
    lines: Tuple[Line, ...]

    @property
    def a(self) -> FieldElement:
        return self.lines[0].a

    @property
    def b(self) -> FieldElement:
        return self.lines[0].b


def translate(field: GF2n, pt: PhasePoint, alpha: FieldElement, beta: FieldElement) -> PhasePoint:
    return PhasePoint(field.add(pt.q, alpha), field.add(pt.p, beta))


def _line_coefficients(index: int) -> Tuple[FieldElement, FieldElement, Translation]:
    if index == 0:
        return 1, 0, (0, 1)
    if index == 1:
        return 0, 1, (1, 0)
    slope = index - 1
    # p = s*q + c  <=>  s*q + p = c
    return slope, 1, (1, slope)


def _make_line(field: GF2n, a: FieldElement, b: FieldElement, c: FieldElement, striation: int) -> Line:
    points = frozenset(
        PhasePoint(q, p)
        for q in field.elements()
        for p in field.elements()
        if field.add(field.mul(a, q), field.mul(b, p)) == c
    )
    return Line(a, b, c, striation, points)


@dataclass(frozen=True)
class PhaseSpace:
    field: GF2n
    points: Tuple[PhasePoint, ...]
    striations: Tuple[Striation, ...]

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def N(self) -> int:
        return self.field.order

    @cached_property
    def lines(self) -> Tuple[Line, ...]:
        return tuple(line for s in self.striations for line in s.lines)

    def striation(self, index: int) -> Striation:
        if not 0 <= index <= self.N:
            raise GeometryError(f"Striation index {index} out of range [0, {self.N}]")
        return self.striations[index]

    def intercept(self, point: PhasePoint, striation: int) -> FieldElement:
        s = self.striation(striation)
        return self.field.add(self.field.mul(s.a, point.q), self.field.mul(s.b, point.p))

    def line_through(self, point: PhasePoint, striation: int) -> Line:
        return self.striations[striation].lines[self.intercept(point, striation)]

    def translate_line(self, line: Line, alpha: FieldElement, beta: FieldElement) -> Line:
        shift = self.field.add(self.field.mul(line.a, alpha), self.field.mul(line.b, beta))
        return self.striations[line.striation].lines[self.field.add(line.c, shift)]

    def translation_to(self, line: Line) -> Translation:
        """A translation carrying the line through the origin onto `line`."""
        if line.b:
            return 0, self.field.mul(line.c, self.field.inv(line.b))
        return self.field.mul(line.c, self.field.inv(line.a)), 0


def build_phase_space(n: int, field: Optional[GF2n] = None) -> PhaseSpace:
    if not 1 <= n <= settings.max_degree:
        raise GeometryError(f"Degree n={n} out of range [1, {settings.max_degree}]")
    field = field or GF2n.default(n)
    if field.n != n:
        raise GeometryError(f"Field degree {field.n} does not match n={n}")
    points = tuple(PhasePoint(q, p) for q in field.elements() for p in field.elements())
    striations = []
    for index in range(field.order + 1):
        a, b, direction = _line_coefficients(index)
        lines = tuple(_make_line(field, a, b, c, index) for c in field.elements())
        striations.append(Striation(index, direction, lines))
    logger.debug(f"Built phase space n={n}: {len(points)} points, {len(striations)} striations")
    return PhaseSpace(field, points, tuple(striations))


def invariant_translations(field: GF2n, s: Striation) -> List[Translation]:
    """The N-1 nonzero translations along the striation direction, ordered by multiplier."""
    d_q, d_p = s.direction
    return [(field.mul(t, d_q), field.mul(t, d_p)) for t in range(1, field.order)]


def net_count(n: int) -> int:
    N = 1 << n
    return N ** (N + 1)


@dataclass(frozen=True)
class QuantumNet:
    """
    One offset per striation: the MUB vector index attached to the striation's
    line through the origin. net_index reads the offsets as base-N digits,
    striation 0 most significant.
    """
    n: int
    offsets: Tuple[FieldElement, ...]

    def __post_init__(self):
        N = 1 << self.n
        if len(self.offsets) != N + 1:
            raise GeometryError(f"A net for n={self.n} needs {N + 1} offsets, got {len(self.offsets)}")
        if any(not 0 <= k < N for k in self.offsets):
            raise GeometryError(f"Net offsets {self.offsets} out of range [0, {N})")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def net_index(self) -> int:
        index = 0
        for k in self.offsets:
            index = index * self.N + k
        return index

    @classmethod
    def from_index(cls, n: int, net_index: int) -> "QuantumNet":
        N = 1 << n
        if not 0 <= net_index < net_count(n):
            raise GeometryError(f"Net index {net_index} out of range [0, {net_count(n)}) for n={n}")
        digits = []
        for _ in range(N + 1):
            net_index, k = divmod(net_index, N)
            digits.append(k)
        return cls(n, tuple(reversed(digits)))

    def with_offset(self, striation: int, offset: FieldElement) -> "QuantumNet":
        offsets = list(self.offsets)
        offsets[striation] = offset
        return QuantumNet(self.n, tuple(offsets))


def enumerate_nets(n: int) -> Iterator[QuantumNet]:
    count = net_count(n)
    if count > settings.exhaustive_net_limit:
        raise GeometryError(
            f"Refusing to enumerate {count} nets for n={n}; use QuantumNet.from_index for indexed access"
        )
    for net_index in range(count):
        yield QuantumNet.from_index(n, net_index)


def geometry_dict(space: PhaseSpace) -> Dict[str, object]:
    """JSON-ready description of the points, lines and striations."""
    N = space.N
    return {
        "n": space.n,
        "modulus": space.field.modulus,
        "point_order": "index = int(q) * N + int(p)",
        "points": [{"index": point_index(pt, N), "q": pt.q, "p": pt.p} for pt in space.points],
        "striations": [
            {
                "index": s.index,
                "direction": list(s.direction),
                "lines": [
                    {
                        "a": line.a,
                        "b": line.b,
                        "c": line.c,
                        "points": sorted(point_index(pt, N) for pt in line.points),
                    }
                    for line in s.lines
                ],
            }
            for s in space.striations
        ],
    }
