"""Tropical independence: the verifier, permissibility classification and
the left-to-right construction for vertex-avoiding data."""
import enum
import functools
import typing as ty
import logging

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConstructionError, ParameterError, StructureError, VerificationError
from .graph import ChainOfLoops, Edge, GraphPoint
from .plfunc import (
    Divisor, EnvelopePiece, PLFunction,
    envelope_function, lower_envelope, principal_divisor,
)
from .tableaux import (
    BlockBoundaries, Tableau, VertexAvoidingData,
    block_boundaries, lingering_loops, slope_table, vertex_avoiding_divisor,
)
from .utils import format_rational, parse_rational, RationalLike

logger = logging.getLogger(__name__)

Pair = tuple[int, int]

def pair_label(pair: Pair) -> str:
    return f"{pair[0]}{pair[1]}"

def parse_pair_label(label: str) -> Pair:
    if len(label) != 2 or not label.isdigit() or label[0] > label[1]:
        raise StructureError(f"Invalid function label {label!r}")
    return int(label[0]), int(label[1])

def pairs(r: int) -> tuple[Pair, ...]:
    """Index pairs i ≤ j in lexicographic order."""
    return tuple((i, j) for i in range(r + 1) for j in range(i, r + 1))

@dataclass(frozen=True)
class TropicalCombination:
    functions: tuple[PLFunction, ...]
    coefficients: tuple[Fraction, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.functions:
            raise ParameterError("A tropical combination needs at least one function")
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(self.functions))))
        if not len(self.functions) == len(self.coefficients) == len(self.labels):
            raise ParameterError("Functions, coefficients and labels must have equal lengths")
        chain = self.chain
        if any(f.chain is not chain and f.chain != chain for f in self.functions):
            raise StructureError("Functions live on different chains")

    @property
    def chain(self) -> ChainOfLoops:
        return self.functions[0].chain

    def __len__(self) -> int:
        return len(self.functions)

    @functools.cached_property
    def pieces(self) -> list[EnvelopePiece]:
        return lower_envelope(self.functions, self.coefficients)

    @functools.cached_property
    def value(self) -> PLFunction:
        return envelope_function(self.chain, self.pieces)

    def with_coefficient(self, index: int, c: RationalLike) -> "TropicalCombination":
        coefficients = list(self.coefficients)
        coefficients[index] = Fraction(c)
        return TropicalCombination(self.functions, tuple(coefficients), self.labels)

@dataclass(frozen=True)
class Region:
    """A maximal stretch of an edge on which the same functions attain the minimum."""
    edge: Edge
    start: Fraction
    end: Fraction
    indices: tuple[int, ...]

    def to_dict(self, labels: ty.Sequence[str]) -> dict[str, ty.Any]:
        return {"edge": self.edge.id, "start": format_rational(self.start),
                "end": format_rational(self.end), "minimizers": [labels[i] for i in self.indices]}

def regions(tc: TropicalCombination) -> list[Region]:
    result: list[Region] = []
    for piece in tc.pieces:
        last = result[-1] if result else None
        if last and last.edge == piece.edge and last.indices == piece.indices \
                and last.end == piece.start:
            result[-1] = Region(last.edge, last.start, piece.end, last.indices)
        else:
            result.append(Region(piece.edge, piece.start, piece.end, piece.indices))
    return result

@dataclass(frozen=True)
class Assignment:
    kind: ty.Literal["bridge", "loop"]
    k: int

    @staticmethod
    def bridge(k: int) -> "Assignment":
        return Assignment("bridge", k)

    @staticmethod
    def loop(k: int) -> "Assignment":
        return Assignment("loop", k)

    def __str__(self) -> str:
        return f"{'β' if self.kind == 'bridge' else 'γ'}_{self.k}"

    def to_dict(self) -> dict[str, ty.Any]:
        return {"kind": self.kind, "k": self.k}

    @staticmethod
    def from_dict(data: dict[str, ty.Any]) -> "Assignment":
        if data.get("kind") not in ("bridge", "loop"):
            raise StructureError(f"Invalid assignment kind {data.get('kind')!r}")
        return Assignment(data["kind"], int(data["k"]))

@dataclass(frozen=True)
class IndependenceCertificate:
    combination: TropicalCombination
    # One point per function at which it is the unique minimizer
    witnesses: tuple[GraphPoint, ...]
    assignment: dict[str, Assignment] | None = None

@dataclass(frozen=True)
class Failure:
    """Indices of functions that are nowhere the unique minimizer."""
    indices: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return False

def minimizing_indices(tc: TropicalCombination, p: GraphPoint) -> tuple[int, ...]:
    values = [f.value(p) + c for f, c in zip(tc.functions, tc.coefficients)]
    low = min(values)
    return tuple(i for i, v in enumerate(values) if v == low)

def verify_independence(tc: TropicalCombination) -> IndependenceCertificate | Failure:
    # Strict minimality is an open condition, so every function that is
    # somewhere the unique minimizer is so on the interior of a piece.
    witnesses: dict[int, GraphPoint] = {}
    for piece in tc.pieces:
        if len(piece.indices) == 1 and piece.indices[0] not in witnesses:
            witnesses[piece.indices[0]] = tc.chain.point(piece.edge, piece.midpoint)
    missing = tuple(i for i in range(len(tc)) if i not in witnesses)
    if missing:
        return Failure(missing, tuple(tc.labels[i] for i in missing))
    return IndependenceCertificate(tc, tuple(witnesses[i] for i in range(len(tc))))

def verify_dependence(tc: TropicalCombination) -> bool:
    return all(len(piece.indices) >= 2 for piece in tc.pieces)

def best_approximation(theta: PLFunction, functions: ty.Sequence[PLFunction],
                       labels: ty.Sequence[str] = ()) -> TropicalCombination:
    """Shifts each function so that it lies above θ and touches it."""
    coefficients = tuple(-(f - theta).min_value() for f in functions)
    return TropicalCombination(tuple(functions), coefficients, tuple(labels))

class Permissibility(enum.Flag):
    NOT_PERMISSIBLE = 0
    PERMISSIBLE = enum.auto()
    NEW = enum.auto()
    DEPARTING = enum.auto()

@dataclass(frozen=True)
class ThetaSlopeProfile:
    """Bridge slopes s_1(θ)..s_g(θ) of the template."""
    values: tuple[int, ...]

    def __post_init__(self):
        if any(a < b for a, b in zip(self.values, self.values[1:])):
            raise ParameterError(f"Template slopes must not increase: {self.values}")

    @staticmethod
    def from_blocks(z: int, zp: int, g: int) -> "ThetaSlopeProfile":
        if not 1 <= z < zp < g:
            raise ParameterError(f"Invalid block boundaries z={z}, z'={zp} for genus {g}")
        return ThetaSlopeProfile(tuple(
            4 if k <= z else 3 if k <= zp else 2 for k in range(1, g + 1)
        ))

    @property
    def genus(self) -> int:
        return len(self.values)

    def at(self, k: int) -> int:
        return self.values[k - 1]

def _is_permissible(slopes: ty.Sequence[int], profile: ThetaSlopeProfile, k: int) -> bool:
    # slopes[j - 1] is s_j(ψ), for j = 1..g+1
    if any(slopes[j - 1] > profile.at(j) for j in range(1, k + 1)):
        return False
    if slopes[k] < profile.at(k):
        return False
    for l in range(k + 1, profile.genus + 1):
        if slopes[l - 1] < profile.at(l) and not any(
                slopes[j - 1] > profile.at(j) for j in range(k + 1, l)):
            return False
    return True

def _classify(slopes: ty.Sequence[int], profile: ThetaSlopeProfile, k: int) -> Permissibility:
    if not _is_permissible(slopes, profile, k):
        return Permissibility.NOT_PERMISSIBLE
    flags = Permissibility.PERMISSIBLE
    if k == 1 or not _is_permissible(slopes, profile, k - 1):
        flags |= Permissibility.NEW
    if slopes[k] > profile.at(k):
        flags |= Permissibility.DEPARTING
    return flags

def classify_permissible(psi: PLFunction, profile: ThetaSlopeProfile, k: int) -> Permissibility:
    if psi.chain.genus != profile.genus:
        raise ParameterError("Profile and function have different genus")
    if not 1 <= k <= profile.genus:
        raise ParameterError(f"No loop {k} in genus {profile.genus}")
    slopes = []
    for j in range(1, psi.chain.genus + 2):
        s = psi.bridge_slope(j)
        if s is None:
            raise StructureError(f"Slope of the function is not constant on bridge {j}")
        slopes.append(s)
    return _classify(slopes, profile, k)

def _pair_slopes(t: Tableau) -> dict[Pair, tuple[int, ...]]:
    sv = slope_table(t)
    return {
        p: tuple(sv.at(k)[p[0]] + sv.at(k)[p[1]] for k in range(1, t.g + 2))
        for p in pairs(t.r)
    }

def block_surplus(slopes: ty.Mapping[Pair, ty.Sequence[int]], lingering: ty.Container[int],
                  start: int, end: int, level: int) -> int:
    """Functions permissible somewhere on loops start..end at template slope
    ``level``, less the non-lingering loops there."""
    permissible = sum(1 for s in slopes.values() if s[start - 1] <= level <= s[end])
    return permissible - sum(1 for k in range(start, end + 1) if k not in lingering)

def _nearest_end(candidates: ty.Iterable[int], target: int,
                 preferred: ty.Callable[[int], bool]) -> int | None:
    return min(candidates, default=None,
               key=lambda e: (not preferred(e), abs(e - target), e))

def balanced_blocks(t: Tableau) -> BlockBoundaries:
    """Block ends that leave exactly one function for each block's outgoing bridge.

    z and z′ are moved from the values of ``block_boundaries`` to the nearest
    loops where the first two blocks carry one more permissible function than
    they have non-lingering loops. Ends that keep the middle function φ_3
    away from the template slope are preferred.
    """
    blocks = block_boundaries(t)
    g, lingering = t.g, lingering_loops(t)
    slopes = _pair_slopes(t)
    middle = tuple(s // 2 for s in slopes[(3, 3)])
    z = _nearest_end(
        (e for e in range(1, g - 1) if block_surplus(slopes, lingering, 1, e, 4) == 1),
        blocks.z, lambda e: middle[e] <= 1)
    if z is None:
        raise ConstructionError("no end for the first block leaves one function over")
    zp = _nearest_end(
        (e for e in range(z + 1, g) if block_surplus(slopes, lingering, z + 1, e, 3) == 1),
        blocks.zp, lambda e: middle[e + 1] >= 2)
    if zp is None:
        raise ConstructionError("no end for the second block leaves one function over")
    if (z, zp) != (blocks.z, blocks.zp):
        logger.debug(f"Block ends moved from ({blocks.z}, {blocks.zp}) to ({z}, {zp})")
    return blocks._replace(z=z, zp=zp)

class _IndependenceBuilder:
    """Coefficients c_ij for the functions φ_i + φ_j, chosen left to right so
    that each function is the unique minimizer on the loop or bridge it is
    assigned to."""

    def __init__(self, data: VertexAvoidingData):
        t = data.tableau
        if t.r != 6 or len(t.rows) != 3:
            raise ParameterError(f"Construction needs a 3×7 tableau, got {len(t.rows)}×{t.r + 1}")
        self.data = data
        self.chain = data.chain
        self.g = t.g
        self.blocks = balanced_blocks(t)
        self.profile = ThetaSlopeProfile.from_blocks(self.blocks.z, self.blocks.zp, self.g)
        self.lingering = lingering_loops(t)
        self.pairs = pairs(t.r)
        self.functions = data.pair_functions
        self.slopes = _pair_slopes(t)
        self.coefficients: dict[Pair, Fraction | None] = {p: None for p in self.pairs}
        self.assignment: dict[Pair, Assignment] = {}

    def value(self, p: Pair, point: GraphPoint) -> Fraction:
        c = self.coefficients[p]
        assert c is not None
        return self.functions[p].value(point) + c

    def theta_at(self, point: GraphPoint) -> Fraction:
        return min(self.value(p, point) for p in self.pairs
                   if self.coefficients[p] is not None)

    def flags(self, p: Pair, k: int) -> Permissibility:
        return _classify(self.slopes[p], self.profile, k)

    def unassigned(self) -> list[Pair]:
        return [p for p in self.pairs if p not in self.assignment]

    def raise_to(self, p: Pair, c: Fraction, k: int | None = None):
        old = self.coefficients[p]
        if old is not None and c < old:
            raise ConstructionError(f"coefficient of φ_{pair_label(p)} would decrease", k)
        self.coefficients[p] = c

    def match_at(self, p: Pair, point: GraphPoint, level: Fraction, k: int | None = None):
        self.raise_to(p, level - self.functions[p].value(point), k)

    def assign(self, p: Pair, where: Assignment):
        logger.debug(f"φ_{pair_label(p)} → {where}")
        self.assignment[p] = where

    def run(self) -> TropicalCombination:
        self.first_bridge()
        ends = {self.blocks.z, self.blocks.zp, self.g}
        for k in range(1, self.g + 1):
            if k in self.lingering:
                logger.debug(f"γ_{k} is lingering")
            else:
                self.loop(k)
            if k in ends:
                self.close_block(k)
                if k < self.g:
                    self.open_block(k + 1)
        self.last_bridge()
        missing = [pair_label(p) for p in self.pairs if p not in self.assignment]
        if missing:
            raise ConstructionError(f"functions left unassigned: {', '.join(missing)}")
        return TropicalCombination(
            tuple(self.functions[p] for p in self.pairs),
            tuple(self.coefficients[p] for p in self.pairs), # type: ignore
            tuple(pair_label(p) for p in self.pairs),
        )

    def first_bridge(self):
        n1 = self.chain.bridges[0]
        third = self.chain.point(Edge.bridge(1), n1 / 3)
        two_thirds = self.chain.point(Edge.bridge(1), 2 * n1 / 3)
        self.coefficients[(6, 6)] = Fraction(0)
        self.match_at((5, 6), third, self.value((6, 6), third))
        for p in ((5, 5), (4, 6)):
            self.match_at(p, two_thirds, self.value((5, 6), two_thirds))
        self.assign((6, 6), Assignment.bridge(1))
        self.assign((5, 6), Assignment.bridge(1))

    def loop(self, k: int):
        candidates = [p for p in self.unassigned() if self.flags(p, k)]
        initialized = [p for p in candidates if self.coefficients[p] is not None]
        if not initialized:
            raise ConstructionError("no initialized permissible function", k)
        wk = self.chain.w(k)
        # Unassigned permissible functions agree at w_k, no lower than any other
        level = max(self.value(p, wk) for p in initialized)
        for p in candidates:
            self.match_at(p, wk, level, k)
        for p in self.pairs:
            if p not in candidates and self.coefficients[p] is not None:
                v = self.value(p, wk)
                if v < level:
                    raise ConstructionError(
                        f"φ_{pair_label(p)} lies strictly below the permissible functions at w_{k}", k)
                if v == level:
                    logger.debug(f"φ_{pair_label(p)} ties the permissible functions at w_{k}")

        departing = [p for p in candidates if self.flags(p, k) & Permissibility.DEPARTING]
        if len(departing) > 1:
            raise ConstructionError(
                f"{len(departing)} departing functions: {', '.join(map(pair_label, departing))}", k)
        if len(candidates) - len(departing) > 3:
            raise ConstructionError(
                f"{len(candidates) - len(departing)} non-departing permissible functions", k)
        if departing:
            (chosen,) = departing
            point = self.chain.point(Edge.bridge(k + 1), self.chain.bottom[k - 1] / 2)
            level = self.value(chosen, point)
            for p in candidates:
                if p != chosen:
                    self.match_at(p, point, level, k)
            self.assign(chosen, Assignment.loop(k))
            return

        bump = self.chain.bottom[k - 1] / 3
        for chosen in self.strictly_lowest(k, candidates):
            if self.alone_after_bump(k, candidates, chosen, bump):
                self.raise_to(chosen, self.coefficients[chosen] + bump, k) # type: ignore
                self.assign(chosen, Assignment.loop(k))
                return
            logger.debug(f"φ_{pair_label(chosen)} loses its unique minimum on γ_{k} after the bump")
        raise ConstructionError("no permissible function stays uniquely minimal", k)

    def _loop_pieces(self, k: int, candidates: ty.Sequence[Pair],
                     coefficients: ty.Sequence[Fraction]) -> list[EnvelopePiece]:
        """Envelope of the candidates on γ_k, top edge first, each edge read from w_k."""
        functions = [self.functions[p] for p in candidates]
        pieces = []
        for edge in (Edge.top(k), Edge.bottom(k)):
            pieces.extend(reversed(lower_envelope(functions, coefficients, (edge,))))
        return pieces

    def strictly_lowest(self, k: int, candidates: ty.Sequence[Pair]) -> list[Pair]:
        """Candidates that are alone at the minimum somewhere on γ_k, nearest
        to w_k first, searching the top edge before the bottom edge."""
        coefficients = [self.coefficients[p] for p in candidates]
        found: list[Pair] = []
        for piece in self._loop_pieces(k, candidates, coefficients): # type: ignore
            if len(piece.indices) == 1 and candidates[piece.indices[0]] not in found:
                found.append(candidates[piece.indices[0]])
        if not found:
            raise ConstructionError("no permissible function is uniquely minimal", k)
        return found

    def alone_after_bump(self, k: int, candidates: ty.Sequence[Pair], p: Pair,
                         bump: Fraction) -> bool:
        index = candidates.index(p)
        trial = [self.coefficients[q] + (bump if q == p else 0) for q in candidates] # type: ignore
        return any(piece.indices == (index,) for piece in self._loop_pieces(k, candidates, trial))

    def close_block(self, k: int):
        leftover = [p for p in self.unassigned() if self.coefficients[p] is not None]
        if len(leftover) != 1:
            raise ConstructionError(
                f"block ends with {len(leftover)} unassigned functions "
                f"({', '.join(map(pair_label, leftover))})", k)
        self.assign(leftover[0], Assignment.bridge(k + 1))

    def open_block(self, k: int):
        mid = self.chain.point(Edge.bridge(k), self.chain.bridges[k - 1] / 2)
        level = self.theta_at(mid)
        for p in self.unassigned():
            if self.coefficients[p] is None and self.flags(p, k):
                self.match_at(p, mid, level, k)

    def last_bridge(self):
        g = self.g
        n = self.chain.bridges[g]
        mid = self.chain.point(Edge.bridge(g + 1), n / 2)
        self.match_at((0, 1), mid, self.theta_at(mid))
        three_quarters = self.chain.point(Edge.bridge(g + 1), 3 * n / 4)
        self.match_at((0, 0), three_quarters, self.theta_at(three_quarters))
        self.assign((0, 1), Assignment.bridge(g + 1))
        self.assign((0, 0), Assignment.bridge(g + 1))

def build_independence(data: VertexAvoidingData,
                       expected: ty.Mapping[str, Assignment] | None = None) -> IndependenceCertificate:
    """Builds and verifies an independence among the 28 functions φ_i + φ_j."""
    builder = _IndependenceBuilder(data)
    tc = builder.run()
    assignment = {pair_label(p): a for p, a in builder.assignment.items()}
    for label, where in (expected or {}).items():
        if assignment.get(label) != where:
            logger.warning(f"φ_{label} assigned to {assignment.get(label)}, expected {where}")
    result = verify_independence(tc)
    if isinstance(result, Failure):
        raise VerificationError(
            f"Functions {', '.join(result.labels)} are nowhere the unique minimum; "
            f"try a separation factor larger than {format_rational(data.chain.separation)}",
            result.labels,
        )
    logger.debug(f"Verified independence for {data.tableau.key()}")
    return IndependenceCertificate(tc, result.witnesses, assignment)

def theta_divisor(cert: IndependenceCertificate, data: VertexAvoidingData) -> Divisor:
    """2D + div θ for the template θ of a built certificate."""
    return 2 * data.divisor + principal_divisor(cert.combination.value)

def theta_divisor_degree(cert: IndependenceCertificate, data: VertexAvoidingData) -> int:
    return theta_divisor(cert, data).degree

def check_certificate(cert: IndependenceCertificate) -> Failure | None:
    """Re-verifies a certificate, including its stored witnesses."""
    tc = cert.combination
    result = verify_independence(tc)
    if isinstance(result, Failure):
        return result
    if len(cert.witnesses) != len(tc):
        raise StructureError(f"Expected {len(tc)} witnesses, got {len(cert.witnesses)}")
    stale = tuple(i for i, p in enumerate(cert.witnesses)
                  if minimizing_indices(tc, p) != (i,))
    if stale:
        return Failure(stale, tuple(tc.labels[i] for i in stale))
    return None

def certificate_to_dict(cert: IndependenceCertificate, data: VertexAvoidingData) -> dict[str, ty.Any]:
    tc = cert.combination
    payload: dict[str, ty.Any] = {
        "coefficients": {l: format_rational(c) for l, c in zip(tc.labels, tc.coefficients)},
        "witnesses": {l: p.to_dict() for l, p in zip(tc.labels, cert.witnesses)},
    }
    if cert.assignment is not None:
        payload["assignment"] = {l: a.to_dict() for l, a in cert.assignment.items()}
    payload["tableau"] = data.tableau.to_dict()
    payload["chain"] = data.chain.to_dict()
    payload["seed"] = data.seed
    return payload

def certificate_from_dict(payload: dict[str, ty.Any]) -> tuple[IndependenceCertificate, VertexAvoidingData]:
    try:
        tableau = Tableau.from_dict(payload["tableau"])
        chain = ChainOfLoops.from_dict(payload["chain"])
        data = vertex_avoiding_divisor(tableau, chain, int(payload.get("seed", 0)))
        labels = tuple(payload["coefficients"])
        functions = tuple(data.pair_function(*parse_pair_label(l)) for l in labels)
        coefficients = tuple(parse_rational(payload["coefficients"][l]) for l in labels)
        witnesses = tuple(
            chain.point(Edge.parse(payload["witnesses"][l]["edge"]),
                        parse_rational(payload["witnesses"][l]["offset"]))
            for l in labels
        )
        assignment = None
        if "assignment" in payload:
            assignment = {l: Assignment.from_dict(a) for l, a in payload["assignment"].items()}
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, (StructureError, ParameterError)):
            raise
        raise StructureError(f"Malformed certificate: {e}") from e
    tc = TropicalCombination(functions, coefficients, labels)
    return IndependenceCertificate(tc, witnesses, assignment), data
