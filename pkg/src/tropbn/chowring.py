"""A graded ring in η, γ, ϑ and Chern symbols c_i, with Harris–Tu evaluation.

Monomials η^a γ^b ϑ^c ∏ c_i^{e_i} are keyed by the tuple
(a, b, c, e_1, ..., e_N) with trailing zero exponents stripped. The relations
η² = 0, γη = 0 and γ² = −2ηϑ are applied on construction, so every
``ChowExpr`` is in normal form (a, b ∈ {0, 1}, never both 1).

ϑ is the theta divisor class. It is serialized as ``"theta"``.
"""
import functools
import itertools
import math
import re
import typing as ty
import logging

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError, StructureError
from .tableaux import brill_noether_number
from .utils import format_rational, parse_rational, RationalLike

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]

_ONE: Monomial = (0, 0, 0)

def _strip(key: ty.Sequence[int]) -> Monomial:
    n = len(key)
    while n > 3 and key[n - 1] == 0:
        n -= 1
    key = tuple(key[:n])
    return key + (0,) * (3 - len(key))

def _reduce(key: Monomial, coeff: Fraction) -> tuple[Monomial, Fraction] | None:
    a, b, c = key[0], key[1], key[2]
    if b >= 3:
        return None
    if b == 2:
        a, b, c, coeff = a + 1, 0, c + 1, -2 * coeff
    if a >= 2 or (a >= 1 and b >= 1):
        return None
    return (a, b, c) + key[3:], coeff

def _key_degree(key: Monomial) -> int:
    return key[0] + key[1] + key[2] + sum(i * e for i, e in enumerate(key[3:], start=1))

def _key_mul(x: Monomial, y: Monomial) -> Monomial:
    if len(x) < len(y):
        x, y = y, x
    return _strip(tuple(a + b for a, b in itertools.zip_longest(x, y, fillvalue=0)))

def _order(key: Monomial) -> tuple[int, Monomial]:
    return (-_key_degree(key), tuple(-e for e in key))

class ChowExpr:
    """An immutable sparse polynomial in normal form."""
    __slots__ = ("_terms",)

    def __init__(self, terms: ty.Mapping[Monomial, RationalLike] | None = None):
        data: dict[Monomial, Fraction] = {}
        for key, coeff in (terms or {}).items():
            if any(e < 0 for e in key) or len(key) < 3:
                raise StructureError(f"Invalid monomial key {key}")
            reduced = _reduce(_strip(key), Fraction(coeff))
            if reduced is None:
                continue
            key, coeff = reduced
            data[key] = data.get(key, Fraction(0)) + coeff
        self._terms = {k: v for k, v in data.items() if v}

    @staticmethod
    def const(value: RationalLike) -> "ChowExpr":
        return ChowExpr({_ONE: Fraction(value)})

    @staticmethod
    def eta() -> "ChowExpr":
        return ChowExpr({(1, 0, 0): 1})

    @staticmethod
    def gamma() -> "ChowExpr":
        return ChowExpr({(0, 1, 0): 1})

    @staticmethod
    def theta() -> "ChowExpr":
        return ChowExpr({(0, 0, 1): 1})

    @staticmethod
    def chern(i: int) -> "ChowExpr":
        """The symbol c_i. c_0 is 1 and c_i for negative i vanishes."""
        if i < 0:
            return ChowExpr()
        if i == 0:
            return ChowExpr.const(1)
        return ChowExpr({(0, 0, 0) + (0,) * (i - 1) + (1,): 1})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: _order(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> set[int]:
        return {_key_degree(k) for k in self._terms}

    @property
    def degree(self) -> int:
        """The largest degree of a monomial; 0 for the zero expression."""
        return max(self.degrees(), default=0)

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def constant_term(self) -> Fraction:
        return self._terms.get(_ONE, Fraction(0))

    def max_chern_index(self) -> int:
        return max((len(k) - 3 for k in self._terms), default=0)

    def homogeneous_part(self, n: int) -> "ChowExpr":
        return ChowExpr({k: v for k, v in self._terms.items() if _key_degree(k) == n})

    def truncate(self, n: int) -> "ChowExpr":
        return ChowExpr({k: v for k, v in self._terms.items() if _key_degree(k) <= n})

    def coefficient_of_eta(self) -> "ChowExpr":
        """The cofactor of η: terms with a = 1, with η removed."""
        return ChowExpr({(0,) + k[1:]: v for k, v in self._terms.items() if k[0] == 1})

    def without_eta_gamma(self) -> bool:
        return all(k[0] == 0 and k[1] == 0 for k in self._terms)

    def __add__(self, other: "ChowExpr | RationalLike") -> "ChowExpr":
        other = _coerce(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + v
        return ChowExpr(terms)

    __radd__ = __add__

    def __neg__(self) -> "ChowExpr":
        return ChowExpr({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "ChowExpr | RationalLike") -> "ChowExpr":
        return self + (-_coerce(other))

    def __rsub__(self, other: "ChowExpr | RationalLike") -> "ChowExpr":
        return _coerce(other) + (-self)

    def __mul__(self, other: "ChowExpr | RationalLike") -> "ChowExpr":
        if not isinstance(other, ChowExpr):
            scale = Fraction(other)
            return ChowExpr({k: scale * v for k, v in self._terms.items()})
        terms: dict[Monomial, Fraction] = {}
        for (k1, v1), (k2, v2) in itertools.product(self._terms.items(), other._terms.items()):
            reduced = _reduce(_key_mul(k1, k2), v1 * v2)
            if reduced is None:
                continue
            key, coeff = reduced
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return ChowExpr(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ChowExpr":
        if n < 0:
            raise ParameterError(f"Negative power {n}")
        result = ChowExpr.const(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ChowExpr.const(other)
        if not isinstance(other, ChowExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"ChowExpr({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for key, coeff in self.items():
            factors = _key_factors(key)
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            if not factors:
                body = format_rational(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([format_rational(mag), *factors])
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        return text + "".join(f" {s} {b}" for s, b in out[1:])

    def to_dict(self) -> dict[str, ty.Any]:
        return {"terms": [
            {
                "eta": key[0], "gamma": key[1], "theta": key[2],
                "c": {str(i): e for i, e in enumerate(key[3:], start=1) if e},
                "coeff": format_rational(coeff),
            } for key, coeff in self.items()
        ]}

    @staticmethod
    def from_dict(data: dict[str, ty.Any]) -> "ChowExpr":
        terms: dict[Monomial, Fraction] = {}
        try:
            for item in data["terms"]:
                chern = {int(i): int(e) for i, e in item.get("c", {}).items()}
                width = max(chern, default=0)
                key = (int(item.get("eta", 0)), int(item.get("gamma", 0)),
                       int(item.get("theta", 0))) + tuple(chern.get(i, 0) for i in range(1, width + 1))
                key = _strip(key)
                terms[key] = terms.get(key, Fraction(0)) + parse_rational(item["coeff"])
        except (KeyError, TypeError, ValueError) as e:
            raise StructureError(f"Malformed expression: {e}") from e
        return ChowExpr(terms)

def _key_factors(key: Monomial) -> list[str]:
    factors = []
    for name, e in (("eta", key[0]), ("gamma", key[1]), ("theta", key[2])):
        if e:
            factors.append(name if e == 1 else f"{name}^{e}")
    for i, e in enumerate(key[3:], start=1):
        if e:
            factors.append(f"c{i}" if e == 1 else f"c{i}^{e}")
    return factors

def _coerce(value: "ChowExpr | RationalLike") -> ChowExpr:
    if isinstance(value, ChowExpr):
        return value
    return ChowExpr.const(Fraction(value))

def normalize(e: ChowExpr | ty.Mapping[Monomial, RationalLike]) -> ChowExpr:
    """Rewrite to normal form. Expressions are already normal, so this is
    the identity on ``ChowExpr`` and a constructor for raw term maps."""
    if isinstance(e, ChowExpr):
        return ChowExpr(e.terms)
    return ChowExpr(e)

# Total Chern classes

def total_chern_inverse(c: ChowExpr, top_degree: int) -> ChowExpr:
    """The inverse of a total Chern class as a series truncated at ``top_degree``."""
    if c.constant_term() != 1:
        raise ParameterError(
            f"Total Chern class must have constant term 1, got {format_rational(c.constant_term())}"
        )
    y = (1 - c).truncate(top_degree)
    result, power = ChowExpr.const(1), ChowExpr.const(1)
    for _ in range(top_degree):
        power = (power * y).truncate(top_degree)
        if power.is_zero():
            break
        result = result + power
    return result

def sym2_chern(c1: ChowExpr, c2: ChowExpr, c3: ChowExpr,
               r: int) -> tuple[ChowExpr, ChowExpr, ChowExpr]:
    """The first three Chern classes of Sym² of a rank r+1 bundle."""
    if r < 0:
        raise ParameterError(f"Rank parameter must be nonnegative, got {r}")
    s1 = (r + 2) * c1
    s2 = Fraction(r * (r + 3), 2) * c1**2 + (r + 3) * c2
    s3 = (Fraction(r * (r + 4) * (r - 1), 6) * c1**3 + (r + 5) * c3
          + (r * r + 4 * r - 1) * c1 * c2)
    return s1, s2, s3

def total_class(*parts: ChowExpr) -> ChowExpr:
    """1 + parts[0] + parts[1] + ..., the total class from c_1, c_2, ..."""
    return sum(parts, ChowExpr.const(1))

def virtual_chern(c_num: ChowExpr, c_den_inverse: ChowExpr, n: int) -> ChowExpr:
    """c_n of a virtual difference A − B, from c(A) and c(B)⁻¹."""
    return (c_num.truncate(n) * c_den_inverse.truncate(n)).homogeneous_part(n)

# Harris–Tu evaluation

@dataclass(frozen=True)
class ChernRootMonomial:
    """x_1^{i_1} ⋯ x_{r+1}^{i_{r+1}} · ϑ^{ρ − Σ i_k} on W^r_d of a general
    curve of genus g."""
    g: int
    r: int
    d: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != self.r + 1:
            raise ParameterError(
                f"Expected {self.r + 1} exponents, got {len(self.exponents)}"
            )
        if any(i < 0 for i in self.exponents):
            raise ParameterError(f"Exponents must be nonnegative, got {self.exponents}")
        if sum(self.exponents) > self.rho:
            raise ParameterError(
                f"Exponent sum {sum(self.exponents)} exceeds ρ = {self.rho}"
            )

    @property
    def rho(self) -> int:
        return brill_noether_number(self.g, self.r, self.d)

    @property
    def theta_power(self) -> int:
        return self.rho - sum(self.exponents)

@functools.cache
def _harris_tu(g: int, r: int, d: int, exponents: tuple[int, ...], printed: bool) -> Fraction:
    numerator = 1
    for k, j in itertools.combinations(range(len(exponents)), 2):
        numerator *= exponents[k] - exponents[j] + j - k
    if numerator == 0:
        return Fraction(0)
    shift = g - d + 2 * r + (0 if printed else 1)
    denominator = 1
    for k, i in enumerate(exponents, start=1):
        arg = shift + i - k
        if arg < 0:
            logger.debug(f"Harris–Tu factorial of {arg} for {exponents} on ({g},{r},{d}); value 0")
            return Fraction(0)
        denominator *= math.factorial(arg)
    return Fraction(math.factorial(g) * numerator, denominator)

def harris_tu_monomial(m: ChernRootMonomial, printed: bool = False) -> Fraction:
    """g! ∏_{k<j}(i_k − i_j + j − k) / ∏_k (g − d + 2r + i_k − k + 1)!.

    ``printed`` drops the +1 in the factorial arguments. That variant
    does not reproduce the tabulated genus 22 values and is kept for
    diagnostics only.
    """
    return _harris_tu(m.g, m.r, m.d, tuple(m.exponents), printed)

def castelnuovo_number(s: int) -> int:
    """The number of g^{2s}_{2s²+2s} on a general curve of genus 2s²+s."""
    if s < 1:
        raise ParameterError(f"s must be positive, got {s}")
    num = math.factorial(2 * s * s + s) * math.prod(math.factorial(i) for i in range(1, 2 * s + 1))
    den = math.prod(math.factorial(i) for i in range(s, 3 * s + 1))
    return num // den

# Root polynomials: exponent tuple over the roots -> coefficient.
# The ϑ power is implicit, fixed by the total degree.
RootPoly = dict[tuple[int, ...], Fraction]

def _poly_mul(x: RootPoly, y: RootPoly) -> RootPoly:
    out: RootPoly = {}
    for (k1, v1), (k2, v2) in itertools.product(x.items(), y.items()):
        key = tuple(a + b for a, b in zip(k1, k2))
        out[key] = out.get(key, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v}

def _pure_monomials(expr: ChowExpr, dimension: int,
                    max_index: int) -> ty.Iterator[tuple[Monomial, Fraction]]:
    if not expr.without_eta_gamma():
        raise ParameterError(f"Chern numbers take expressions free of eta and gamma, got {expr}")
    for key, coeff in expr.items():
        if _key_degree(key) != dimension:
            raise ParameterError(
                f"Chern numbers need degree {dimension}, got {_key_degree(key)} in {expr}"
            )
        if len(key) - 3 > max_index:
            raise ParameterError(f"c_{len(key) - 3} vanishes above rank {max_index}")
        yield key, coeff

def _expand(key: Monomial, factor: ty.Callable[[int], RootPoly], unit: tuple[int, ...]) -> RootPoly:
    poly: RootPoly = {unit: Fraction(1)}
    for i, e in enumerate(key[3:], start=1):
        for _ in range(e):
            poly = _poly_mul(poly, factor(i))
    return poly

# Genus 22, W^6_26 ≅ W^1_16. Variables (u_1, u_2, ϑ).

@functools.cache
def _g22_chern(i: int) -> RootPoly:
    if i == 1:
        return {(0, 0, 1): Fraction(1), (1, 0, 0): Fraction(-1), (0, 1, 0): Fraction(-1)}
    # c_{j+2} = y_2 ϑ^j/j! − y_1 ϑ^{j+1}/(j+1)! + ϑ^{j+2}/(j+2)!
    j = i - 2
    return {
        (1, 1, j): Fraction(1, math.factorial(j)),
        (1, 0, j + 1): Fraction(-1, math.factorial(j + 1)),
        (0, 1, j + 1): Fraction(-1, math.factorial(j + 1)),
        (0, 0, j + 2): Fraction(1, math.factorial(j + 2)),
    }

@functools.cache
def _g22_expand(chern: Monomial) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    return tuple(_expand(chern, _g22_chern, (0, 0, 0)).items())

def chern_number_g22(expr: ChowExpr) -> Fraction:
    """The degree of a top class on W^6_26 of a general genus 22 curve."""
    total = Fraction(0)
    for key, coeff in _pure_monomials(expr, 8, 7):
        for (p, q, _), v in _g22_expand((0, 0, 0) + key[3:]):
            total += coeff * v * _harris_tu(22, 1, 16, (p, q), False)
    return total

# Genus 2s²+s, W^{2s}_{2s²+2s+1}. Variables x_1, ..., x_{2s+1}.

@functools.cache
def _elementary(n: int, i: int) -> RootPoly:
    poly: RootPoly = {}
    for combo in itertools.combinations(range(n), i):
        poly[tuple(1 if j in combo else 0 for j in range(n))] = Fraction(1)
    return poly

@functools.cache
def _general_expand(n: int, chern: Monomial) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    return tuple(_expand(chern, functools.partial(_elementary, n), (0,) * n).items())

def general_parameters(s: int) -> tuple[int, int, int]:
    """(g, r, d) = (2s²+s, 2s, 2s²+2s+1)."""
    if s < 1:
        raise ParameterError(f"s must be positive, got {s}")
    return 2 * s * s + s, 2 * s, 2 * s * s + 2 * s + 1

def chern_number_general(s: int, expr: ChowExpr) -> Fraction:
    """The degree of a top class on W^{2s}_{2s²+2s+1} of a general curve of
    genus 2s²+s, with c_i the elementary symmetric functions of the roots."""
    g, r, d = general_parameters(s)
    n = r + 1
    total = Fraction(0)
    for key, coeff in _pure_monomials(expr, 2 * s + 1, n):
        for exps, v in _general_expand(n, (0, 0, 0) + key[3:]):
            total += coeff * v * _harris_tu(g, r, d, exps, False)
    return total

# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<sym>eta|gamma|theta|c\d+)"
                    r"(?:\^(?P<exp>\d+))?|(?P<op>[+\-*]))")

def parse_expr(text: str) -> ChowExpr:
    """Parse sums of products such as ``"36*c2*theta - 32/3*theta^3 + eta*c1^2"``."""
    pos, tokens = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise StructureError(f"Cannot parse expression at {text[pos:]!r}")
        tokens.append(m)
        pos = m.end()
    result, term = ChowExpr(), None
    sign, expect_factor = 1, True
    for m in tokens:
        if m["op"] in ("+", "-"):
            if term is not None:
                if expect_factor:
                    raise StructureError(f"Dangling operator in {text!r}")
                result = result + sign * term
                term, sign = None, 1
            if m["op"] == "-":
                sign = -sign
            expect_factor = True
            continue
        if m["op"] == "*":
            if expect_factor:
                raise StructureError(f"Dangling '*' in {text!r}")
            expect_factor = True
            continue
        if not expect_factor:
            raise StructureError(f"Missing operator in {text!r}")
        if m["num"] is not None:
            factor = ChowExpr.const(parse_rational(m["num"]))
        else:
            factor = _symbol(m["sym"])**int(m["exp"] or 1)
        term = factor if term is None else term * factor
        expect_factor = False
    if term is None or expect_factor:
        raise StructureError(f"Incomplete expression {text!r}")
    return result + sign * term

def _symbol(name: str) -> ChowExpr:
    if name == "eta":
        return ChowExpr.eta()
    if name == "gamma":
        return ChowExpr.gamma()
    if name == "theta":
        return ChowExpr.theta()
    return ChowExpr.chern(int(name[1:]))
