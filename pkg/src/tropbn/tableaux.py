"""Rectangular standard Young tableaux with entries from {1..g} and the
vertex-avoiding divisors and distinguished functions they index."""
import bisect
import collections
import functools
import itertools
import math
import random
import typing as ty
import logging

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConstructionError, ParameterError, StructureError
from .graph import ChainOfLoops, Edge, is_admissible
from .plfunc import (
    Divisor, PLFunction, SlopeVectorPair,
    principal_divisor,
)

logger = logging.getLogger(__name__)

# Row index for each number 1..n, or SKIP if the number is not an entry
Word = tuple[int, ...]
SKIP = -1

@dataclass(frozen=True)
class Tableau:
    g: int
    r: int
    d: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n_rows = self.g - self.d + self.r
        if n_rows < 1 or self.r < 0:
            raise ParameterError(f"Invalid parameters g={self.g}, r={self.r}, d={self.d}")
        if len(self.rows) != n_rows or any(len(row) != self.r + 1 for row in self.rows):
            raise StructureError(
                f"Expected a {n_rows}×{self.r + 1} tableau, got shape "
                f"{[len(row) for row in self.rows]}"
            )
        entries = [x for row in self.rows for x in row]
        if len(set(entries)) != len(entries):
            raise StructureError("Tableau entries must be distinct")
        if any(not 1 <= x <= self.g for x in entries):
            raise StructureError(f"Tableau entries must lie in 1..{self.g}")
        for row in self.rows:
            if any(a >= b for a, b in itertools.pairwise(row)):
                raise StructureError(f"Row {row} is not increasing")
        for upper, lower in itertools.pairwise(self.rows):
            if any(a >= b for a, b in zip(upper, lower)):
                raise StructureError("Columns are not increasing")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.r + 1

    @functools.cached_property
    def entries(self) -> frozenset[int]:
        return frozenset(x for row in self.rows for x in row)

    def column(self, b: int) -> tuple[int, ...]:
        return tuple(row[b] for row in self.rows)

    @functools.cached_property
    def column_of(self) -> dict[int, int]:
        return {x: b for row in self.rows for b, x in enumerate(row)}

    def word(self) -> Word:
        row_of = {x: a for a, row in enumerate(self.rows) for x in row}
        return tuple(row_of.get(t, SKIP) for t in range(1, self.g + 1))

    def key(self) -> str:
        return "/".join(",".join(map(str, row)) for row in self.rows)

    def to_dict(self) -> dict[str, ty.Any]:
        return {"g": self.g, "r": self.r, "d": self.d,
                "rows": [list(row) for row in self.rows]}

    @staticmethod
    def from_dict(data: dict[str, ty.Any]) -> "Tableau":
        try:
            return Tableau(int(data["g"]), int(data["r"]), int(data["d"]),
                           tuple(tuple(int(x) for x in row) for row in data["rows"]))
        except (KeyError, TypeError) as e:
            raise StructureError(f"Malformed tableau: {e}") from e

def _check_shape(rows: int, cols: int, n: int):
    if rows < 1 or cols < 1:
        raise ParameterError(f"Invalid rectangle {rows}×{cols}")
    if rows * cols > n:
        raise ParameterError(f"A {rows}×{cols} rectangle does not fit {n} entries")

def _hook_count(rows: int, cols: int) -> int:
    hooks = math.prod((rows - a) + (cols - b) - 1
                      for a in range(rows) for b in range(cols))
    return math.factorial(rows * cols) // hooks

def count_tableaux(rows: int, cols: int, n: int) -> int:
    """Standard fillings of a rows×cols rectangle by distinct entries of {1..n}."""
    _check_shape(rows, cols, n)
    return math.comb(n, rows * cols) * _hook_count(rows, cols)

@functools.cache
def _count_shape(shape: tuple[int, ...]) -> int:
    shape = tuple(x for x in shape if x)
    if not shape:
        return 1
    total = 0
    for a, length in enumerate(shape):
        # Remove a corner cell
        if a + 1 == len(shape) or shape[a + 1] < length:
            total += _count_shape(shape[:a] + (length - 1,) + shape[a + 1:])
    return total

def count_rectangle_dp(rows: int, cols: int) -> int:
    """Standard Young tableaux of rectangular shape, by corner removal."""
    if rows < 1 or cols < 1:
        raise ParameterError(f"Invalid rectangle {rows}×{cols}")
    return _count_shape((cols,) * rows)

def _words(rows: int, cols: int, n: int, prefix: Word = (),
           depth: int | None = None) -> ty.Iterator[Word]:
    """Placement words in lexicographic order: for each number, rows top to
    bottom where addable, then skip."""
    depth = n if depth is None else depth
    lengths = [0] * rows
    word: list[int] = []

    def choices(t: int) -> list[int]:
        remaining = rows * cols - sum(lengths)
        result = [a for a in range(rows)
                  if lengths[a] < cols and (a == 0 or lengths[a] < lengths[a - 1])]
        if n - t >= remaining:
            result.append(SKIP)
        return result

    def walk(t: int) -> ty.Iterator[Word]:
        if t > depth:
            yield tuple(word)
            return
        options = choices(t)
        if t <= len(prefix):
            if prefix[t - 1] not in options:
                return
            options = [prefix[t - 1]]
        for a in options:
            if a != SKIP:
                lengths[a] += 1
            word.append(a)
            yield from walk(t + 1)
            word.pop()
            if a != SKIP:
                lengths[a] -= 1
    yield from walk(1)

def _from_word(word: Word, rows: int, g: int, r: int, d: int) -> Tableau:
    filled: list[list[int]] = [[] for _ in range(rows)]
    for t, a in enumerate(word, start=1):
        if a != SKIP:
            filled[a].append(t)
    return Tableau(g, r, d, tuple(tuple(row) for row in filled))

def _resolve_params(rows: int, cols: int, n: int,
                    g: int | None, r: int | None, d: int | None) -> tuple[int, int, int]:
    g = n if g is None else g
    r = cols - 1 if r is None else r
    d = g - rows + r if d is None else d
    if g - d + r != rows or r + 1 != cols:
        raise ParameterError(f"(g, r, d) = ({g}, {r}, {d}) does not match a {rows}×{cols} rectangle")
    return g, r, d

def enumerate_tableaux(rows: int, cols: int, n: int,
                       g: int | None = None, r: int | None = None, d: int | None = None,
                       prefix: Word = ()) -> ty.Iterator[Tableau]:
    """All tableaux in lexicographic placement order, optionally restricted
    to those whose placement word starts with ``prefix``."""
    _check_shape(rows, cols, n)
    g, r, d = _resolve_params(rows, cols, n, g, r, d)
    for word in _words(rows, cols, n, tuple(prefix)):
        yield _from_word(word, rows, g, r, d)

def partition_prefixes(rows: int, cols: int, n: int, depth: int) -> list[Word]:
    """Disjoint placement prefixes of length ``depth`` covering all tableaux."""
    _check_shape(rows, cols, n)
    return list(_words(rows, cols, n, depth=min(depth, n)))

def random_tableau(rows: int, cols: int, n: int, rng: random.Random,
                   g: int | None = None, r: int | None = None, d: int | None = None) -> Tableau:
    """A uniformly random tableau: a uniform entry set and a uniform standard
    filling drawn with the hook walk."""
    _check_shape(rows, cols, n)
    g, r, d = _resolve_params(rows, cols, n, g, r, d)
    size = rows * cols
    entries = sorted(rng.sample(range(1, n + 1), size))
    lengths = [cols] * rows
    grid = [[0] * cols for _ in range(rows)]
    for label in range(size, 0, -1):
        cells = [(a, b) for a in range(rows) for b in range(lengths[a])]
        a, b = rng.choice(cells)
        while True:
            arm = lengths[a] - b - 1
            leg = sum(1 for a2 in range(a + 1, rows) if lengths[a2] > b)
            if arm + leg == 0:
                break
            step = rng.randrange(arm + leg)
            if step < arm:
                b += step + 1
            else:
                a += step - arm + 1
        grid[a][b] = entries[label - 1]
        lengths[a] -= 1
    return Tableau(g, r, d, tuple(tuple(row) for row in grid))

def slope_table(t: Tableau) -> SlopeVectorPair:
    """s_k[i] = i − (g−d+r) + #{entries < k in column r−i} (0-based columns)."""
    rows = len(t.rows)
    columns = [sorted(t.column(b)) for b in range(t.r + 1)]
    s = tuple(
        tuple(i - rows + bisect.bisect_left(columns[t.r - i], k) for i in range(t.r + 1))
        for k in range(1, t.g + 2)
    )
    return SlopeVectorPair(s=s, s_prime=(s[0],) + s[1:])

class BlockBoundaries(ty.NamedTuple):
    z: int
    zp: int
    b: int
    bp: int

def block_boundaries(t: Tableau) -> BlockBoundaries:
    if t.r != 6 or len(t.rows) != 3:
        raise ParameterError(
            f"Block boundaries are defined for 3×7 tableaux, got {len(t.rows)}×{t.r + 1}"
        )
    top = sorted(t.rows[0] + t.rows[1])
    bottom = sorted(t.rows[1] + t.rows[2])
    outer = sorted(t.rows[0] + t.rows[2])
    return BlockBoundaries(z=top[5], zp=bottom[9] - 2, b=top[6], bp=outer[7])

def lingering_loops(t: Tableau) -> frozenset[int]:
    return frozenset(range(1, t.g + 1)) - t.entries

def brill_noether_number(g: int, r: int, d: int) -> int:
    return g - (r + 1) * (g - d + r)

@dataclass(frozen=True)
class Multiplicities:
    loops: tuple[int, ...]
    bridges: tuple[int, ...]
    w0: int
    v_end: int

    @property
    def total(self) -> int:
        return sum(self.loops) + sum(self.bridges) + self.w0 + self.v_end

    def to_dict(self) -> dict[str, ty.Any]:
        return {"loops": list(self.loops), "bridges": list(self.bridges),
                "w0": self.w0, "v_end": self.v_end, "total": self.total}

def multiplicities_and_weights(sv: SlopeVectorPair, g: int, r: int, d: int) -> Multiplicities:
    loops = tuple(
        1 - sum(a - b for a, b in zip(sv.outgoing(k), sv.at(k)))
        for k in range(1, g + 1)
    )
    bridges = tuple(
        -sum(a - b for a, b in zip(sv.at(k), sv.outgoing(k - 1)))
        for k in range(1, g + 2)
    )
    w0 = sum(d - g - r + i - s for i, s in enumerate(sv.outgoing(0)))
    v_end = sum(s - i for i, s in enumerate(sv.at(g + 1)))
    return Multiplicities(loops, bridges, w0, v_end)

def is_lattice_path_valid(sv: SlopeVectorPair) -> bool:
    """Across each loop every slope grows by 0 or 1, and at most one grows."""
    for k in range(1, sv.genus + 1):
        steps = [b - a for a, b in zip(sv.at(k), sv.at(k + 1))]
        if any(x not in (0, 1) for x in steps) or sum(steps) > 1:
            return False
    return True

@dataclass(frozen=True)
class VertexAvoidingData:
    tableau: Tableau
    chain: ChainOfLoops
    divisor: Divisor
    distinguished: tuple[PLFunction, ...]
    slope_table: SlopeVectorPair
    coordinates: tuple[Fraction, ...]
    seed: int = 0

    @functools.cached_property
    def pair_functions(self) -> dict[tuple[int, int], PLFunction]:
        """φ_ij = φ_i + φ_j for i ≤ j."""
        phis = self.distinguished
        return {(i, j): phis[i] + phis[j]
                for i in range(len(phis)) for j in range(i, len(phis))}

    def pair_function(self, i: int, j: int) -> PLFunction:
        return self.pair_functions[min(i, j), max(i, j)]

def _lingering_coordinate(k: int, L: Fraction, m: Fraction, d: int, seed: int) -> Fraction:
    forbidden = {(j * m) % L for j in range(d + 1)}
    grid = [L * t / (2 * d + 3) for t in range(1, 2 * d + 3)]
    random.Random(f"{seed}:{k}").shuffle(grid)
    for x in grid:
        if x not in forbidden:
            return x
    raise ConstructionError("no generic coordinate available", k)

def _distinguished(chain: ChainOfLoops, sv: SlopeVectorPair,
                   coords: ty.Sequence[Fraction], i: int) -> PLFunction:
    g = chain.genus
    segments: dict[Edge, list[tuple[Fraction, int]]] = {
        Edge.bridge(k): [(Fraction(0), sv.at(k)[i])] for k in range(1, g + 2)
    }
    for k in range(1, g + 1):
        s, s_next = sv.at(k)[i], sv.at(k + 1)[i]
        L, m, x = chain.loop_length(k), chain.bottom[k - 1], coords[k - 1]
        # Jump of the counterclockwise slope across each special point
        jumps: dict[Fraction, int] = collections.defaultdict(int)
        jumps[Fraction(0)] -= s
        jumps[m] += s_next
        jumps[x] -= 1
        if s_next == s:
            jumps[(x - s * m) % L] += 1
        elif s_next != s + 1:
            raise ConstructionError(f"slope of φ_{i} jumps from {s} to {s_next}", k)
        cuts = sorted({Fraction(0), m, L} | {p for p, e in jumps.items() if e and 0 < p < L})
        arcs = []
        drop = 0
        for a, b in itertools.pairwise(cuts):
            if a != 0:
                drop += jumps.get(a, 0)
            arcs.append((a, b, drop))
        start = sum(c * (b - a) for a, b, c in arcs) / L
        if start.denominator != 1:
            raise ConstructionError(f"φ_{i} has no integral slope on the loop", k)
        segments[Edge.bottom(k)] = [(a, int(start - c)) for a, b, c in arcs if b <= m]
        segments[Edge.top(k)] = sorted((L - b, -int(start - c)) for a, b, c in arcs if a >= m)
    return PLFunction.from_slopes(chain, 0, segments)

def vertex_avoiding_divisor(t: Tableau, chain: ChainOfLoops, seed: int = 0) -> VertexAvoidingData:
    """The break divisor of the vertex-avoiding class indexed by ``t`` and its
    distinguished functions φ_0..φ_r, each normalized to 0 at w_0."""
    g, r, d = t.g, t.r, t.d
    if chain.genus != g:
        raise ParameterError(f"Chain has genus {chain.genus}, tableau has genus {g}")
    if not is_admissible(chain):
        raise ParameterError("Chain edge lengths are not admissible")
    sv = slope_table(t)
    coords = []
    for k in range(1, g + 1):
        L, m = chain.loop_length(k), chain.bottom[k - 1]
        if k in t.column_of:
            i = r - t.column_of[k]
            coords.append(((sv.at(k)[i] + 1) * m) % L)
        else:
            coords.append(_lingering_coordinate(k, L, m, d, seed))
    support = {chain.loop_point(k, x): 1 for k, x in enumerate(coords, start=1)}
    if d - g:
        support[chain.w(0)] = d - g
    divisor = Divisor(chain, support)
    phis = tuple(_distinguished(chain, sv, coords, i) for i in range(r + 1))
    for i, phi in enumerate(phis):
        effective = divisor + principal_divisor(phi)
        if not effective.is_effective():
            raise ConstructionError(f"D + div φ_{i} is not effective")
        if effective.at(chain.w(0)) < r - i or effective.at(chain.v(g + 1)) < i:
            raise ConstructionError(f"D + div φ_{i} misses its endpoint multiplicities")
    logger.debug(f"Vertex-avoiding divisor for {t.key()}: lingering loops {sorted(lingering_loops(t))}")
    return VertexAvoidingData(
        tableau=t, chain=chain, divisor=divisor, distinguished=phis,
        slope_table=sv, coordinates=tuple(coords), seed=seed,
    )
