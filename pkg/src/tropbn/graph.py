"""The chain of loops: g loops joined left to right by g+1 bridges.

Loop k has a top edge of length ℓ_k and a bottom edge of length m_k, both
running from v_k to w_k. Bridge k runs from w_{k-1} to v_k and has length
n_k. Vertices are not stored; each vertex is addressed by its canonical
bridge endpoint, v_k = (bridge k, n_k) and w_k = (bridge k+1, 0).
"""
import enum
import typing as ty
import logging

from dataclasses import dataclass
from fractions import Fraction

from .config import config
from .errors import ParameterError, StructureError
from .utils import format_rational, parse_rational, RationalLike

logger = logging.getLogger(__name__)

DEFAULT_SEPARATION = Fraction(64)

class EdgeKind(enum.Enum):
    BRIDGE = "bridge"
    TOP = "top"
    BOTTOM = "bottom"

_KIND_ORDER = {EdgeKind.BRIDGE: 0, EdgeKind.TOP: 1, EdgeKind.BOTTOM: 2}

@dataclass(frozen=True)
class Edge:
    kind: EdgeKind
    k: int

    @staticmethod
    def bridge(k: int) -> "Edge":
        return Edge(EdgeKind.BRIDGE, k)

    @staticmethod
    def top(k: int) -> "Edge":
        return Edge(EdgeKind.TOP, k)

    @staticmethod
    def bottom(k: int) -> "Edge":
        return Edge(EdgeKind.BOTTOM, k)

    @property
    def is_bridge(self) -> bool:
        return self.kind is EdgeKind.BRIDGE

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.k, _KIND_ORDER[self.kind])

    @property
    def id(self) -> str:
        if self.is_bridge:
            return f"bridge-{self.k}"
        return f"loop-{self.k}-{self.kind.value}"

    def __str__(self) -> str:
        return self.id

    @staticmethod
    def parse(text: str) -> "Edge":
        parts = text.strip().split("-")
        try:
            if len(parts) == 2 and parts[0] == "bridge":
                return Edge.bridge(int(parts[1]))
            if len(parts) == 3 and parts[0] == "loop":
                return Edge(EdgeKind(parts[2]), int(parts[1]))
        except ValueError:
            pass
        raise StructureError(f"Invalid edge id {text!r}")

@dataclass(frozen=True)
class GraphPoint:
    edge: Edge
    offset: Fraction

    @property
    def sort_key(self) -> tuple[tuple[int, int], Fraction]:
        return (self.edge.sort_key, self.offset)

    def to_dict(self) -> dict[str, str]:
        return {"edge": self.edge.id, "offset": format_rational(self.offset)}

    def __str__(self) -> str:
        return f"{self.edge.id}@{format_rational(self.offset)}"

@dataclass(frozen=True)
class TangentVector:
    """A germ of a directed edge: leaves ``base`` along ``edge``,
    towards increasing offsets when ``direction`` is +1."""
    base: GraphPoint
    edge: Edge
    direction: int

@dataclass(frozen=True)
class ChainOfLoops:
    genus: int
    top: tuple[Fraction, ...]
    bottom: tuple[Fraction, ...]
    bridges: tuple[Fraction, ...]
    separation: Fraction

    def __post_init__(self):
        g = self.genus
        if g < 1:
            raise ParameterError(f"Genus must be positive, got {g}")
        if len(self.top) != g or len(self.bottom) != g or len(self.bridges) != g + 1:
            raise StructureError(
                f"Expected {g} loops and {g + 1} bridges, got "
                f"{len(self.top)}/{len(self.bottom)} loop edges and {len(self.bridges)} bridges"
            )
        for length in (*self.top, *self.bottom, *self.bridges):
            if length <= 0:
                raise StructureError(f"Edge lengths must be positive, got {length}")

    def length(self, edge: Edge) -> Fraction:
        self._check_edge(edge)
        if edge.kind is EdgeKind.BRIDGE:
            return self.bridges[edge.k - 1]
        elif edge.kind is EdgeKind.TOP:
            return self.top[edge.k - 1]
        return self.bottom[edge.k - 1]

    def edges(self) -> tuple[Edge, ...]:
        result = []
        for k in range(1, self.genus + 1):
            result.extend((Edge.bridge(k), Edge.top(k), Edge.bottom(k)))
        result.append(Edge.bridge(self.genus + 1))
        return tuple(result)

    def loop_length(self, k: int) -> Fraction:
        return self.top[k - 1] + self.bottom[k - 1]

    def total_length(self) -> Fraction:
        return sum(self.top, Fraction(0)) + sum(self.bottom, Fraction(0)) \
            + sum(self.bridges, Fraction(0))

    def v(self, k: int) -> GraphPoint:
        if not 1 <= k <= self.genus + 1:
            raise StructureError(f"No vertex v_{k} on a chain of genus {self.genus}")
        return GraphPoint(Edge.bridge(k), self.bridges[k - 1])

    def w(self, k: int) -> GraphPoint:
        if not 0 <= k <= self.genus:
            raise StructureError(f"No vertex w_{k} on a chain of genus {self.genus}")
        return GraphPoint(Edge.bridge(k + 1), Fraction(0))

    def point(self, edge: Edge, offset: RationalLike) -> GraphPoint:
        offset = Fraction(offset)
        length = self.length(edge)
        if not 0 <= offset <= length:
            raise StructureError(f"Offset {offset} is off edge {edge} of length {length}")
        if not edge.is_bridge:
            if offset == 0:
                return self.v(edge.k)
            if offset == length:
                return self.w(edge.k)
        return GraphPoint(edge, offset)

    def canonical(self, p: GraphPoint) -> GraphPoint:
        return self.point(p.edge, p.offset)

    def loop_point(self, k: int, x: Fraction) -> GraphPoint:
        """The point at counterclockwise coordinate ``x`` on loop k,
        measured from v_k along the bottom edge first."""
        L, m = self.loop_length(k), self.bottom[k - 1]
        x = Fraction(x) % L
        if x <= m:
            return self.point(Edge.bottom(k), x)
        return self.point(Edge.top(k), L - x)

    def loop_coordinate(self, p: GraphPoint) -> tuple[int, Fraction] | None:
        """Inverse of ``loop_point`` for points on a loop, else None."""
        if not p.edge.is_bridge:
            k = p.edge.k
            if p.edge.kind is EdgeKind.BOTTOM:
                return k, p.offset
            return k, (self.loop_length(k) - p.offset) % self.loop_length(k)
        # Loop vertices are addressed through bridges
        if p.offset == 0 and p.edge.k >= 2:
            return p.edge.k - 1, self.bottom[p.edge.k - 2]
        if p.offset == self.bridges[p.edge.k - 1] and p.edge.k <= self.genus:
            return p.edge.k, Fraction(0)
        return None

    def offset_on(self, edge: Edge, p: GraphPoint) -> Fraction | None:
        """Offset of ``p`` on the closure of ``edge``, or None."""
        if p.edge == edge:
            return p.offset
        if edge.is_bridge:
            return None
        if p == self.v(edge.k):
            return Fraction(0)
        if p == self.w(edge.k):
            return self.length(edge)
        return None

    def germs(self, p: GraphPoint) -> tuple[TangentVector, ...]:
        p = self.canonical(p)
        edge, g = p.edge, self.genus
        if not edge.is_bridge or 0 < p.offset < self.length(edge):
            return (TangentVector(p, edge, 1), TangentVector(p, edge, -1))
        k = edge.k
        if p.offset == 0:
            if k == 1:
                return (TangentVector(p, edge, 1),)
            return (TangentVector(p, edge, 1),
                    TangentVector(p, Edge.top(k - 1), -1),
                    TangentVector(p, Edge.bottom(k - 1), -1))
        if k == g + 1:
            return (TangentVector(p, edge, -1),)
        return (TangentVector(p, edge, -1),
                TangentVector(p, Edge.top(k), 1),
                TangentVector(p, Edge.bottom(k), 1))

    def tangent(self, p: GraphPoint, edge: Edge, direction: int) -> TangentVector:
        germ = TangentVector(self.canonical(p), edge, direction)
        if germ not in self.germs(p):
            raise StructureError(f"No germ along {edge} in direction {direction} at {p}")
        return germ

    def to_dict(self) -> dict[str, ty.Any]:
        return {
            "genus": self.genus,
            "F": format_rational(self.separation),
            "lengths": {
                "l": [format_rational(x) for x in self.top],
                "m": [format_rational(x) for x in self.bottom],
                "n": [format_rational(x) for x in self.bridges],
            }
        }

    @staticmethod
    def from_dict(data: dict[str, ty.Any]) -> "ChainOfLoops":
        try:
            lengths = data["lengths"]
            return ChainOfLoops(
                genus=int(data["genus"]),
                top=tuple(parse_rational(x) for x in lengths["l"]),
                bottom=tuple(parse_rational(x) for x in lengths["m"]),
                bridges=tuple(parse_rational(x) for x in lengths["n"]),
                separation=parse_rational(data["F"]),
            )
        except (KeyError, TypeError) as e:
            raise StructureError(f"Malformed chain: {e}") from e

    def _check_edge(self, edge: Edge):
        limit = self.genus + 1 if edge.is_bridge else self.genus
        if not 1 <= edge.k <= limit:
            raise StructureError(f"No edge {edge} on a chain of genus {self.genus}")

def make_chain(g: int, F: RationalLike = DEFAULT_SEPARATION,
               base: RationalLike = 1) -> ChainOfLoops:
    """The canonical admissible chain: n_{g+1} = base and every step of
    n_1 > … > n_{g+1} > ℓ_1 > m_1 > ℓ_2 > … > m_g is a factor of F."""
    F, base = Fraction(F), Fraction(base)
    if g < 1:
        raise ParameterError(f"Genus must be positive, got {g}")
    if F <= 1:
        raise ParameterError(f"Separation factor must exceed 1, got {F}")
    if base <= 0:
        raise ParameterError(f"Base length must be positive, got {base}")
    return ChainOfLoops(
        genus=g,
        top=tuple(base / F**(2*k - 1) for k in range(1, g + 1)),
        bottom=tuple(base / F**(2*k) for k in range(1, g + 1)),
        bridges=tuple(base * F**(g + 1 - k) for k in range(1, g + 2)),
        separation=F,
    )

def is_admissible(chain: ChainOfLoops) -> bool:
    F, g = chain.separation, chain.genus
    if F <= 1:
        return False
    for k in range(1, g + 1):
        l, m = chain.top[k - 1], chain.bottom[k - 1]
        if m * F > l or l * F > chain.bridges[k]:
            return False
        if k < g and chain.top[k] * F > m:
            return False
    return all(chain.bridges[k] * F <= chain.bridges[k - 1] for k in range(1, g + 1))

@config
class ChainConfig:
    genus: int = 22
    separation: Fraction = DEFAULT_SEPARATION
    base: Fraction = Fraction(1)

    def make(self) -> ChainOfLoops:
        return make_chain(self.genus, self.separation, self.base)
