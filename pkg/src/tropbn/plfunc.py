"""Divisors and piecewise linear functions with integer slopes on a chain of loops."""
import bisect
import itertools
import typing as ty
import logging

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError, StructureError
from .graph import ChainOfLoops, Edge, EdgeKind, GraphPoint, TangentVector
from .utils import format_rational, parse_rational, RationalLike

logger = logging.getLogger(__name__)

Breakpoints = tuple[tuple[Fraction, Fraction], ...]

def _same_chain(a: ChainOfLoops, b: ChainOfLoops) -> bool:
    return a is b or a == b

class Divisor:
    __slots__ = ("chain", "_support")

    def __init__(self, chain: ChainOfLoops, support: ty.Mapping[GraphPoint, int] | None = None):
        self.chain = chain
        data: dict[GraphPoint, int] = {}
        for p, mult in (support or {}).items():
            if chain.canonical(p) != p:
                raise StructureError(f"Divisor point {p} is not canonical")
            if mult:
                data[p] = data.get(p, 0) + int(mult)
        self._support = {p: m for p, m in data.items() if m}

    @property
    def support(self) -> dict[GraphPoint, int]:
        return dict(self._support)

    @property
    def degree(self) -> int:
        return sum(self._support.values())

    def points(self) -> list[GraphPoint]:
        return sorted(self._support, key=lambda p: p.sort_key)

    def at(self, p: GraphPoint) -> int:
        return self._support.get(self.chain.canonical(p), 0)

    def is_effective(self) -> bool:
        return all(m > 0 for m in self._support.values())

    def _combine(self, other: "Divisor", sign: int) -> "Divisor":
        if not _same_chain(self.chain, other.chain):
            raise StructureError("Divisors live on different chains")
        support = dict(self._support)
        for p, m in other._support.items():
            support[p] = support.get(p, 0) + sign * m
        return Divisor(self.chain, support)

    def __add__(self, other: "Divisor") -> "Divisor":
        return self._combine(other, 1)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self._combine(other, -1)

    def __mul__(self, n: int) -> "Divisor":
        return Divisor(self.chain, {p: n * m for p, m in self._support.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "Divisor":
        return self * -1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Divisor):
            return NotImplemented
        return _same_chain(self.chain, other.chain) and self._support == other._support

    def __repr__(self) -> str:
        terms = " + ".join(f"{m}·{p}" for p, m in
                           ((p, self._support[p]) for p in self.points()))
        return f"Divisor({terms or '0'})"

    def to_dict(self) -> dict[str, ty.Any]:
        return {"points": [
            {**p.to_dict(), "mult": self._support[p]} for p in self.points()
        ]}

    @staticmethod
    def from_dict(chain: ChainOfLoops, data: dict[str, ty.Any]) -> "Divisor":
        support: dict[GraphPoint, int] = {}
        for item in data.get("points", []):
            p = chain.point(Edge.parse(item["edge"]), parse_rational(item["offset"]))
            support[p] = support.get(p, 0) + int(item["mult"])
        return Divisor(chain, support)

def _canonical_breakpoints(edge: Edge, length: Fraction,
                           points: ty.Sequence[tuple[Fraction, Fraction]]) -> Breakpoints:
    if len(points) < 2 or points[0][0] != 0 or points[-1][0] != length:
        raise StructureError(f"Breakpoints on {edge} must span [0, {length}]")
    result: list[tuple[Fraction, Fraction]] = [points[0]]
    last_slope = None
    for (o1, v1), (o2, v2) in itertools.pairwise(points):
        if o2 <= o1:
            raise StructureError(f"Breakpoint offsets on {edge} must increase")
        slope = (v2 - v1) / (o2 - o1)
        if slope.denominator != 1:
            raise StructureError(f"Non-integer slope {slope} on {edge} at {o1}")
        if slope == last_slope:
            result[-1] = (o2, v2)
        else:
            result.append((o2, v2))
        last_slope = slope
    return tuple(result)

class PLFunction:
    """A continuous piecewise linear function with integer slopes.

    Each edge carries sorted (offset, value) breakpoints including both
    endpoints. Collinear interior breakpoints are merged on construction.
    """
    __slots__ = ("chain", "_edges", "_offsets", "_lines")

    def __init__(self, chain: ChainOfLoops,
                 edges: ty.Mapping[Edge, ty.Sequence[tuple[RationalLike, RationalLike]]]):
        self.chain = chain
        unknown = set(edges) - set(chain.edges())
        if unknown:
            raise StructureError(f"Edges {sorted(map(str, unknown))} are not on the chain")
        self._edges: dict[Edge, Breakpoints] = {}
        for edge in chain.edges():
            if edge not in edges:
                raise StructureError(f"Missing breakpoints for {edge}")
            pts = [(Fraction(o), Fraction(v)) for o, v in edges[edge]]
            self._edges[edge] = _canonical_breakpoints(edge, chain.length(edge), pts)
        self._offsets = {e: tuple(o for o, _ in pts) for e, pts in self._edges.items()}
        self._lines: dict[Edge, tuple[tuple[Fraction, Fraction, int], ...]] = {}
        self._check_continuity()

    def _check_continuity(self):
        for k in range(1, self.chain.genus + 1):
            v = self._edges[Edge.bridge(k)][-1][1]
            w = self._edges[Edge.bridge(k + 1)][0][1]
            for edge in (Edge.top(k), Edge.bottom(k)):
                pts = self._edges[edge]
                if pts[0][1] != v or pts[-1][1] != w:
                    raise StructureError(f"Discontinuity on {edge}")

    @staticmethod
    def constant(chain: ChainOfLoops, value: RationalLike = 0) -> "PLFunction":
        return PLFunction(chain, {
            e: ((0, value), (chain.length(e), value)) for e in chain.edges()
        })

    @staticmethod
    def from_slopes(chain: ChainOfLoops, value_at_w0: RationalLike,
                    edge_segments: ty.Mapping[Edge, ty.Sequence[tuple[RationalLike, int]]]
                    ) -> "PLFunction":
        """Builds a function from (start offset, slope) segments per edge.

        Edges that are not listed get slope 0.
        """
        value = Fraction(value_at_w0)
        at_v = value
        data: dict[Edge, list[tuple[Fraction, Fraction]]] = {}
        for edge in chain.edges():
            length = chain.length(edge)
            segments = sorted((Fraction(o), s) for o, s in edge_segments.get(edge, ((0, 0),)))
            current = value if edge.is_bridge else at_v
            pts = []
            for (start, slope), end in zip(segments,
                    [o for o, _ in segments[1:]] + [length]):
                pts.append((start, current))
                current += slope * (end - start)
            pts.append((length, current))
            data[edge] = pts
            if edge.is_bridge:
                at_v = current
            elif edge.kind is EdgeKind.BOTTOM:
                value = current
        return PLFunction(chain, data)

    def breakpoints(self, edge: Edge) -> Breakpoints:
        return self._edges[edge]

    def value_at(self, edge: Edge, offset: Fraction) -> Fraction:
        offsets, pts = self._offsets[edge], self._edges[edge]
        i = bisect.bisect_right(offsets, offset) - 1
        o, v = pts[i]
        if o == offset:
            return v
        o2, v2 = pts[i + 1]
        return v + (v2 - v) * (offset - o) / (o2 - o)

    def value(self, p: GraphPoint) -> Fraction:
        return self.value_at(p.edge, p.offset)

    def right_slope(self, edge: Edge, offset: Fraction) -> int:
        """Slope of the segment leaving ``offset`` towards larger offsets."""
        offsets, pts = self._offsets[edge], self._edges[edge]
        if offset >= offsets[-1]:
            raise StructureError(f"No segment to the right of {offset} on {edge}")
        i = bisect.bisect_right(offsets, offset) - 1
        (o1, v1), (o2, v2) = pts[i], pts[i + 1]
        return int((v2 - v1) / (o2 - o1))

    def left_slope(self, edge: Edge, offset: Fraction) -> int:
        """Slope (rightward) of the segment arriving at ``offset`` from the left."""
        offsets, pts = self._offsets[edge], self._edges[edge]
        if offset <= 0:
            raise StructureError(f"No segment to the left of {offset} on {edge}")
        i = bisect.bisect_left(offsets, offset) - 1
        (o1, v1), (o2, v2) = pts[i], pts[i + 1]
        return int((v2 - v1) / (o2 - o1))

    def slopes(self, edge: Edge) -> tuple[tuple[Fraction, Fraction, int], ...]:
        return tuple(
            (o1, o2, int((v2 - v1) / (o2 - o1)))
            for (o1, v1), (o2, v2) in itertools.pairwise(self._edges[edge])
        )

    def lines(self, edge: Edge) -> tuple[tuple[Fraction, Fraction, int], ...]:
        """(start offset, value, slope) of each segment on ``edge``, cached."""
        cached = self._lines.get(edge)
        if cached is None:
            cached = self._lines[edge] = tuple(
                (o1, v1, int((v2 - v1) / (o2 - o1)))
                for (o1, v1), (o2, v2) in itertools.pairwise(self._edges[edge])
            )
        return cached

    def bridge_slope(self, k: int) -> int | None:
        segments = self.slopes(Edge.bridge(k))
        return segments[0][2] if len(segments) == 1 else None

    def min_value(self) -> Fraction:
        return min(v for pts in self._edges.values() for _, v in pts)

    def _pointwise(self, other: "PLFunction", sign: int) -> "PLFunction":
        if not _same_chain(self.chain, other.chain):
            raise StructureError("Functions live on different chains")
        data = {}
        for edge in self.chain.edges():
            offsets = sorted(set(self._offsets[edge]) | set(other._offsets[edge]))
            data[edge] = [(o, self.value_at(edge, o) + sign * other.value_at(edge, o))
                          for o in offsets]
        return PLFunction(self.chain, data)

    def shift(self, c: RationalLike) -> "PLFunction":
        c = Fraction(c)
        if c == 0:
            return self
        return PLFunction(self.chain, {
            e: [(o, v + c) for o, v in pts] for e, pts in self._edges.items()
        })

    def __add__(self, other: "PLFunction | RationalLike") -> "PLFunction":
        if isinstance(other, PLFunction):
            return self._pointwise(other, 1)
        return self.shift(other)

    __radd__ = __add__

    def __sub__(self, other: "PLFunction | RationalLike") -> "PLFunction":
        if isinstance(other, PLFunction):
            return self._pointwise(other, -1)
        return self.shift(-Fraction(other))

    def __neg__(self) -> "PLFunction":
        return PLFunction(self.chain, {
            e: [(o, -v) for o, v in pts] for e, pts in self._edges.items()
        })

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PLFunction):
            return NotImplemented
        return _same_chain(self.chain, other.chain) and self._edges == other._edges

    __hash__ = None # type: ignore

    def __repr__(self) -> str:
        return f"PLFunction(genus={self.chain.genus}, breakpoints={sum(map(len, self._edges.values()))})"

    def to_dict(self) -> dict[str, ty.Any]:
        return {"edges": {
            e.id: [{"o": format_rational(o), "v": format_rational(v)} for o, v in pts]
            for e, pts in self._edges.items()
        }}

    @staticmethod
    def from_dict(chain: ChainOfLoops, data: dict[str, ty.Any]) -> "PLFunction":
        try:
            return PLFunction(chain, {
                Edge.parse(eid): [(parse_rational(p["o"]), parse_rational(p["v"])) for p in pts]
                for eid, pts in data["edges"].items()
            })
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, StructureError):
                raise
            raise StructureError(f"Malformed PL function: {e}") from e

@dataclass(frozen=True)
class SlopeVectorPair:
    """Incoming slopes s_1..s_{g+1} at v_k and outgoing slopes s′_0..s′_g at w_k."""
    s: tuple[tuple[int, ...], ...]
    s_prime: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for row in (*self.s, *self.s_prime):
            if any(a >= b for a, b in itertools.pairwise(row)):
                raise StructureError(f"Slope vector {row} is not strictly increasing")

    @property
    def genus(self) -> int:
        return len(self.s) - 1

    @property
    def rank(self) -> int:
        return len(self.s[0]) - 1

    def at(self, k: int) -> tuple[int, ...]:
        """s_k, for k = 1..g+1."""
        return self.s[k - 1]

    def outgoing(self, k: int) -> tuple[int, ...]:
        """s′_k, for k = 0..g."""
        return self.s_prime[k]

def slope_along(phi: PLFunction, germ: TangentVector) -> int:
    offset = phi.chain.offset_on(germ.edge, germ.base)
    if offset is None:
        raise StructureError(f"{germ.base} is not on {germ.edge}")
    if germ.direction > 0:
        return phi.right_slope(germ.edge, offset)
    return -phi.left_slope(germ.edge, offset)

def ord_at(phi: PLFunction, p: GraphPoint) -> int:
    return -sum(slope_along(phi, germ) for germ in phi.chain.germs(p))

def principal_divisor(phi: PLFunction) -> Divisor:
    chain = phi.chain
    points = {
        chain.point(edge, o) for edge in chain.edges()
        for o, _ in phi.breakpoints(edge)
    }
    support = {p: ord_at(phi, p) for p in points}
    return Divisor(chain, support)

def is_section(phi: PLFunction, divisor: Divisor) -> bool:
    return (divisor + principal_divisor(phi)).is_effective()

def break_divisor_coordinates(divisor: Divisor, d: int) -> tuple[Fraction, ...]:
    chain, g = divisor.chain, divisor.chain.genus
    if divisor.degree != d:
        raise StructureError(f"Divisor has degree {divisor.degree}, expected {d}")
    w0 = chain.w(0)
    if divisor.at(w0) != d - g:
        raise StructureError(f"Break divisor needs multiplicity {d - g} at w_0")
    coords: dict[int, Fraction] = {}
    for p, mult in divisor.support.items():
        if p == w0:
            continue
        loc = chain.loop_coordinate(p)
        if loc is None or mult != 1 or loc[0] in coords:
            raise StructureError(f"Not a break divisor: {mult}·{p}")
        coords[loc[0]] = loc[1]
    if len(coords) != g:
        raise StructureError("Break divisor needs exactly one point on each loop")
    return tuple(coords[k] for k in range(1, g + 1))

@dataclass(frozen=True)
class EnvelopePiece:
    """A maximal stretch of an overlay segment on which the same
    functions attain the minimum; ``indices`` minimize on the open piece."""
    edge: Edge
    start: Fraction
    end: Fraction
    indices: tuple[int, ...]
    value: Fraction
    slope: int

    @property
    def midpoint(self) -> Fraction:
        return (self.start + self.end) / 2

def _check_inputs(functions: ty.Sequence[PLFunction], coefficients: ty.Sequence[RationalLike]):
    if not functions:
        raise ParameterError("A tropical combination needs at least one function")
    if len(functions) != len(coefficients):
        raise ParameterError(
            f"Got {len(functions)} functions but {len(coefficients)} coefficients"
        )
    chain = functions[0].chain
    if any(not _same_chain(f.chain, chain) for f in functions[1:]):
        raise StructureError("Functions live on different chains")

def _segment_envelope(edge: Edge, lo: Fraction, hi: Fraction,
                      lines: ty.Sequence[tuple[int, Fraction, int]]) -> ty.Iterator[EnvelopePiece]:
    """Envelope of (index, value at lo, slope) lines over [lo, hi]."""
    width = hi - lo
    # A line whose lowest value exceeds some other line's highest value never minimizes
    ceiling = min(max(v, v + s * width) for _, v, s in lines)
    lines = [line for line in lines if min(line[1], line[1] + line[2] * width) <= ceiling]
    x = lo
    while x < hi:
        values = [v + s * (x - lo) for _, v, s in lines]
        low = min(values)
        tied = [n for n, v in enumerate(values) if v == low]
        slope = min(lines[n][2] for n in tied)
        active = tuple(lines[n][0] for n in tied if lines[n][2] == slope)
        end = hi
        for (_, _, s), value in zip(lines, values):
            if s < slope:
                crossing = x + (value - low) / (slope - s)
                if crossing < end:
                    end = crossing
        yield EnvelopePiece(edge, x, end, active, low, slope)
        x = end

def lower_envelope(functions: ty.Sequence[PLFunction],
                   coefficients: ty.Sequence[RationalLike],
                   edges: ty.Iterable[Edge] | None = None) -> list[EnvelopePiece]:
    """Pieces of min(f_i + c_i), edge by edge, over the overlay of all breakpoints."""
    _check_inputs(functions, coefficients)
    coefficients = [Fraction(c) for c in coefficients]
    chain = functions[0].chain
    pieces: list[EnvelopePiece] = []
    for edge in (chain.edges() if edges is None else edges):
        tracks = [f.lines(edge) for f in functions]
        cursors = [0] * len(functions)
        cuts = sorted(set().union(*(f._offsets[edge] for f in functions)))
        for lo, hi in itertools.pairwise(cuts):
            lines = []
            for n, (track, c) in enumerate(zip(tracks, coefficients)):
                i = cursors[n]
                while i + 1 < len(track) and track[i + 1][0] <= lo:
                    i += 1
                cursors[n] = i
                o, v, s = track[i]
                lines.append((n, v + s * (lo - o) + c, s))
            pieces.extend(_segment_envelope(edge, lo, hi, lines))
    return pieces

def envelope_function(chain: ChainOfLoops, pieces: ty.Sequence[EnvelopePiece]) -> PLFunction:
    """The function traced by the pieces of a lower envelope over every edge."""
    data: dict[Edge, list[tuple[Fraction, Fraction]]] = {e: [] for e in chain.edges()}
    last: dict[Edge, EnvelopePiece] = {}
    for piece in pieces:
        data[piece.edge].append((piece.start, piece.value))
        last[piece.edge] = piece
    for edge, piece in last.items():
        data[edge].append((piece.end, piece.value + piece.slope * (piece.end - piece.start)))
    return PLFunction(chain, data)

def tropical_combination(functions: ty.Sequence[PLFunction],
                         coefficients: ty.Sequence[RationalLike]) -> PLFunction:
    pieces = lower_envelope(functions, coefficients)
    return envelope_function(functions[0].chain, pieces)
