"""Virtual divisor classes aλ − b₀δ₀ − b₁δ₁ from test-curve degeneracy loci.

For a test curve F over X × W^r_d(X), the number F · c_n(F − Sym²E) splits
into a part built from known classes and a part carrying c₁ of a kernel line
bundle, which the Harris–Tu formula trades for a degree r+1 class:

    c_n = X_n + 2c₁(U)·X_{n−1},    X = c(Q)·c(Sym²M)⁻¹,
    c₁(U) = u₀ + c₁(Ker),          c₁(Ker)·ξ = −c_{r+1}(M^∨ − V^∨)·ξ,

with Q = A₂, V = J₁(P) over Z (curve F₁) and Q = B₂, V = B over Y (curve F₀).
Every stage is compared against recorded polynomials.
"""
import typing as ty
import logging

from dataclasses import dataclass, field
from fractions import Fraction

from .chowring import (
    ChowExpr, chern_number_g22, chern_number_general, castelnuovo_number,
    general_parameters, parse_expr, sym2_chern, total_chern_inverse,
    total_class, virtual_chern,
)
from .errors import ParameterError, PipelineError
from .utils import format_rational

logger = logging.getLogger(__name__)

eta, gamma, theta = ChowExpr.eta(), ChowExpr.gamma(), ChowExpr.theta()
c = ChowExpr.chern

GENERAL_TYPE_SLOPE = Fraction(13, 2)

@dataclass(frozen=True)
class DivisorClass:
    a: Fraction
    b0: Fraction
    b1: Fraction

    def scaled(self, factor: Fraction | int) -> "DivisorClass":
        return DivisorClass(self.a * factor, self.b0 * factor, self.b1 * factor)

    def elliptic_tail_defect(self) -> Fraction:
        return self.a - 12 * self.b0 + self.b1

    def to_dict(self) -> dict[str, str]:
        return {"a": format_rational(self.a), "b0": format_rational(self.b0),
                "b1": format_rational(self.b1)}

@dataclass(frozen=True)
class TestCurveNumbers:
    """Intersections of the test curves F₀, F_ell, F₁ with λ, δ₀, δ₁ on M̄_g."""
    __test__ = False
    g: int

    @property
    def table(self) -> dict[str, tuple[int, int, int]]:
        g = self.g
        return {
            "F0": (0, 2 - 2 * g, 1),
            "F_ell": (1, 12, -1),
            "F1": (0, 0, 4 - 2 * g),
        }

    def intersect(self, curve: str, dc: DivisorClass) -> Fraction:
        lam, d0, d1 = self.table[curve]
        return lam * dc.a - d0 * dc.b0 - d1 * dc.b1

def solve_from_test_curves(f1_number: Fraction, f0_number: Fraction, g: int) -> DivisorClass:
    """Recover (a, b₀, b₁) from F₁·D, F₀·D and F_ell·D = 0."""
    table = TestCurveNumbers(g).table
    _, _, f1_d1 = table["F1"]
    _, f0_d0, f0_d1 = table["F0"]
    ell_lam, ell_d0, ell_d1 = table["F_ell"]
    b1 = Fraction(-f1_number, f1_d1)
    b0 = -(Fraction(f0_number) + f0_d1 * b1) / f0_d0
    a = (ell_d0 * b0 + ell_d1 * b1) / ell_lam
    return DivisorClass(a, b0, b1)

# Geometric inputs

def poincare_class(d: int) -> ChowExpr:
    return d * eta + gamma

def jet_inverse(genus: int, d: int) -> ChowExpr:
    """c(J₁(P)^∨)⁻¹, from 0 → ω ⊗ P → J₁(P) → P → 0."""
    p = poincare_class(d)
    q = (2 * genus - 2 + d) * eta + gamma
    return total_chern_inverse((1 - p) * (1 - q), 2)

def b_inverse(d: int) -> ChowExpr:
    """c(B^∨)⁻¹ for B = μ_*(ν^*P ⊗ O_{Δ + Γ_q})."""
    return total_chern_inverse((1 - poincare_class(d)) * (1 + eta), 2)

def chern_from_character(c1: ChowExpr, ch2: ChowExpr) -> tuple[ChowExpr, ChowExpr, ChowExpr]:
    """c₁, c₂, c₃ of a bundle with given c₁ and ch₂ and vanishing ch₃."""
    c2 = (c1**2 - 2 * ch2) * Fraction(1, 2)
    c3 = c1 * c2 - c1**3 * Fraction(1, 3)
    return c1, c2, c3

def a2_classes(genus: int, d: int) -> tuple[ChowExpr, ChowExpr, ChowExpr]:
    """Chern classes of A₂ with fibers H⁰(L²(−2y))."""
    c1 = -4 * theta - 4 * gamma - (4 * d + 2 * genus - 2) * eta
    return chern_from_character(c1, 8 * eta * theta)

def b2_classes(genus: int, d: int) -> tuple[ChowExpr, ChowExpr, ChowExpr]:
    """Chern classes of B₂ with fibers H⁰(L²(−y−q))."""
    c1 = -4 * theta - 2 * gamma - (2 * d - 1) * eta
    return chern_from_character(c1, 4 * eta * theta)

@dataclass(frozen=True)
class GeometricInputs:
    curve: str
    genus: int
    r: int
    d: int
    n: int
    quotient: tuple[ChowExpr, ChowExpr, ChowExpr]
    inverse: ChowExpr
    evaluate: ty.Callable[[ChowExpr], Fraction] = field(compare=False)

    @staticmethod
    def make(curve: str, genus: int, r: int, d: int, n: int,
             evaluate: ty.Callable[[ChowExpr], Fraction]) -> "GeometricInputs":
        if curve == "F1":
            return GeometricInputs(curve, genus, r, d, n, a2_classes(genus, d),
                                   jet_inverse(genus, d), evaluate)
        elif curve == "F0":
            return GeometricInputs(curve, genus, r, d, n, b2_classes(genus, d),
                                   b_inverse(d), evaluate)
        raise ParameterError(f"Unknown test curve {curve!r}")

@dataclass(frozen=True)
class DegeneracyStages:
    p0: ChowExpr           # c_n without the kernel class
    p1: ChowExpr           # cofactor of c₁(Ker)
    locus: ChowExpr        # [Z] or [Y]
    ker_class: ChowExpr    # c_{r+1}(M^∨ − V^∨)
    without_ker: ChowExpr  # η-cofactor of p0·locus
    ker: ChowExpr          # η-cofactor of −p1·ker_class
    total: ChowExpr
    number: Fraction

def test_curve_degeneracy(inputs: GeometricInputs,
                          golden: ty.Mapping[str, ChowExpr] | None = None) -> DegeneracyStages:
    r, n = inputs.r, inputs.n
    chern = [c(i) for i in range(1, r + 2)]
    m_total = total_class(*chern)
    # c_i(M) = (−1)^i c_i(M^∨)
    s1, s2, s3 = sym2_chern(-chern[0], chern[1], -chern[2], r)
    x = (total_class(*inputs.quotient) * total_chern_inverse(total_class(s1, s2, s3), n)).truncate(n)
    u0 = inputs.inverse.homogeneous_part(1)
    p0 = x.homogeneous_part(n) + 2 * u0 * x.homogeneous_part(n - 1)
    p1 = 2 * x.homogeneous_part(n - 1)
    locus = virtual_chern(m_total, inputs.inverse, r)
    ker_class = virtual_chern(m_total, inputs.inverse, r + 1)
    without_ker = (p0 * locus).coefficient_of_eta()
    ker = (-p1 * ker_class).coefficient_of_eta()
    total = without_ker + ker
    if golden:
        computed = {
            "quotient_c1": inputs.quotient[0], "quotient_c2": inputs.quotient[1],
            "quotient_c3": inputs.quotient[2], "inverse": inputs.inverse,
            "p0": p0, "locus": locus, "ker_class": ker_class,
            "without_ker": without_ker, "ker": ker, "total": total,
        }
        for stage, expected in golden.items():
            compare_stage(f"{inputs.curve}/{stage}", computed[stage], expected)
    number = inputs.evaluate(total)
    logger.info(f"{inputs.curve} · c_{n}(F − Sym²E) = {format_rational(number)}")
    return DegeneracyStages(p0, p1, locus, ker_class, without_ker, ker, total, number)

test_curve_degeneracy.__test__ = False  # type: ignore

def compare_stage(stage: str, computed: ChowExpr, expected: ChowExpr):
    diff = computed - expected
    if diff.is_zero():
        logger.debug(f"{stage} matches the recorded polynomial")
        return
    got, want = computed.terms, expected.terms
    terms = []
    for key, _ in diff.items():
        monomial = str(ChowExpr({key: 1}))
        terms.append(f"{monomial} computed {format_rational(got.get(key, 0))}"
                     f" recorded {format_rational(want.get(key, 0))}")
    raise PipelineError(f"Stage {stage} disagrees with the recorded polynomial", terms)

# Recorded polynomials, genus 23 (X of genus 22, W^6_26)

GOLDEN_G23: dict[str, dict[str, ChowExpr]] = {
    "F1": {
        "quotient_c1": parse_expr("-4*theta - 4*gamma - 146*eta"),
        "quotient_c2": parse_expr("8*theta^2 + 560*eta*theta + 16*gamma*theta"),
        "quotient_c3": parse_expr("-32/3*theta^3 - 1072*eta*theta^2 - 32*theta^2*gamma"),
        "inverse": parse_expr("1 + 94*eta + 2*gamma - 6*eta*theta"),
        "locus": parse_expr("c6 - 6*eta*theta*c4 + 94*eta*c5 + 2*gamma*c5"),
        "ker_class": parse_expr("c7 - 6*eta*theta*c5 + 94*eta*c6 + 2*gamma*c6"),
        "p0": parse_expr(
            "36*c2*theta - 148*c1^2*theta + 1554*eta*c1^2 - 85*c1*c2 - 32/3*theta^3"
            " + 304*eta*theta^2 - 1280*eta*theta*c1 + 130*c1^3 - 378*eta*c2"
            " + 64*theta^2*c1 + 11*c3"),
        "total": parse_expr(
            "-780*c1^3*c4*theta + 12220*c1^3*c5 + 888*c1^2*c4*theta^2"
            " - 13468*c1^2*c5*theta - 5402*c1^2*c6 - 384*theta^3*c1*c4"
            " + 5632*theta^2*c1*c5 + 510*theta*c1*c2*c4 + 4480*c1*c6*theta"
            " - 7990*c1*c2*c5 + 2336*c1*c7 - 216*c2*c4*theta^2 + 3276*c2*c5*theta"
            " - 66*c3*c4*theta + 1034*c3*c5 + 1314*c2*c6 + 64*c4*theta^4"
            " - 2720/3*c5*theta^3 - 1072*c6*theta^2 - 1120*c7*theta"),
    },
    "F0": {
        "quotient_c1": parse_expr("-4*theta - 2*gamma - 51*eta"),
        "quotient_c2": parse_expr("8*theta^2 + 196*eta*theta + 8*theta*gamma"),
        "quotient_c3": parse_expr("-32/3*theta^3 - 376*eta*theta^2 - 16*theta^2*gamma"),
        "inverse": parse_expr("1 + 25*eta + gamma - 2*eta*theta"),
        "locus": parse_expr("c6 - 2*eta*theta*c4 + 25*eta*c5 + gamma*c5"),
        "ker_class": parse_expr("c7 - 2*eta*theta*c5 + 25*eta*c6 + gamma*c6"),
        "p0": parse_expr(
            "36*c2*theta - 148*c1^2*theta - 37*eta*c1^2 - 85*c1*c2 - 32/3*theta^3"
            " - 8*eta*theta^2 + 32*eta*theta*c1 + 130*c1^3 + 9*eta*c2"
            " + 64*theta^2*c1 + 11*c3"),
        "total": parse_expr(
            "-260*c1^3*c4*theta + 3250*c1^3*c5 + 296*c1^2*c4*theta^2"
            " - 3552*c1^2*c5*theta - 1887*c1^2*c6 - 128*theta^3*c1*c4"
            " + 1472*theta^2*c1*c5 + 170*theta*c1*c2*c4 + 1568*c1*c6*theta"
            " - 2125*c1*c2*c5 + 816*c1*c7 - 72*c2*c4*theta^2 + 864*c2*c5*theta"
            " - 22*c3*c4*theta + 275*c3*c5 + 459*c2*c6 + 64/3*c4*theta^4"
            " - 704/3*c5*theta^3 - 376*c6*theta^2 - 392*c7*theta"),
    },
}

def golden_rho1(s: int) -> dict[str, dict[str, ChowExpr]]:
    """Recorded polynomials for X of genus 2s²+s and W^{2s}_{2s²+2s+1}."""
    J = s * (4 * s + 3)
    return {
        "F1": {
            "quotient_c1": -4 * theta - 4 * gamma - 2 * (3 * s + 1) * (2 * s + 1) * eta,
            "quotient_c2": 8 * theta**2 + 8 * (6 * s * s + 5 * s - 2) * eta * theta + 16 * gamma * theta,
            "locus": c(2 * s) - 6 * c(2 * s - 2) * eta * theta + 2 * (J * eta + gamma) * c(2 * s - 1),
            "ker_class": c(2 * s + 1) - 6 * c(2 * s - 1) * eta * theta + 2 * (J * eta + gamma) * c(2 * s),
            "without_ker": 2 * (
                -24 * c(2 * s - 2) * theta**3
                - 8 * s * (s + 1) * (4 * s + 3) * c(2 * s - 1) * c(1) * theta
                - (6 * s * s + 15 * s + 12) * c(2 * s - 2) * c(1)**2 * theta
                + 8 * s * (4 * s + 3) * c(2 * s - 1) * theta**2
                + 3 * (2 * s + 3) * c(2 * s - 2) * c(2) * theta
                + s * (4 * s + 3) * (2 * s * s + 5 * s + 4) * c(2 * s - 1) * c(1)**2
                - s * (2 * s + 3) * (4 * s + 3) * c(2 * s - 1) * c(2)
                + 24 * (s + 1) * c(2 * s - 2) * c(1) * theta**2
                + 2 * (2 * s - 1) * (s + 1)**2 * c(2 * s) * c(1)
                - (8 * s * s + 4 * s - 8) * c(2 * s) * theta),
            "ker": 4 * (
                (3 * s + 1) * (2 * s + 1) * c(2 * s + 1)
                - 12 * c(2 * s - 1) * theta**2
                + 6 * (s + 1) * c(2 * s - 1) * c(1) * theta
                + (16 * s * s + 12 * s - 8) * c(2 * s) * theta
                - 2 * s * (s + 1) * (4 * s + 3) * c(2 * s) * c(1)),
        },
        "F0": {
            "quotient_c1": -4 * theta - 2 * gamma - (2 * s + 1)**2 * eta,
            "quotient_c2": 8 * theta**2 + 4 * (4 * s * s + 4 * s - 1) * eta * theta + 8 * theta * gamma,
            "locus": c(2 * s) - 2 * c(2 * s - 2) * eta * theta + (2 * s * (s + 1) * eta + gamma) * c(2 * s - 1),
            "ker_class": c(2 * s + 1) - 2 * c(2 * s - 1) * eta * theta + (2 * s * (s + 1) * eta + gamma) * c(2 * s),
            "without_ker": (
                -16 * c(2 * s - 2) * theta**3
                - 16 * s * (s + 1)**2 * c(2 * s - 1) * c(1) * theta
                - (4 * s * s + 10 * s + 8) * c(2 * s - 2) * c(1)**2 * theta
                + 16 * s * (s + 1) * c(2 * s - 1) * theta**2
                + (4 * s + 6) * c(2 * s - 2) * c(2) * theta
                + 2 * s * (s + 1) * (2 * s * s + 5 * s + 4) * c(2 * s - 1) * c(1)**2
                - 2 * s * (s + 1) * (2 * s + 3) * c(2 * s - 1) * c(2)
                + 16 * (s + 1) * c(2 * s - 2) * c(1) * theta**2
                - 2 * (s + 1) * c(2 * s) * c(1)
                + 4 * c(2 * s) * theta),
            "ker": (
                -16 * c(2 * s - 1) * theta**2
                + 8 * (s + 1) * c(2 * s - 1) * c(1) * theta
                + 2 * (2 * s + 1)**2 * c(2 * s + 1)
                + (16 * s * s + 16 * s - 8) * c(2 * s) * theta
                - 8 * s * (s + 1)**2 * c(2 * s) * c(1)),
        },
    }

# Pipelines

def _run(genus: int, r: int, d: int, n: int,
         evaluate: ty.Callable[[ChowExpr], Fraction],
         golden: dict[str, dict[str, ChowExpr]] | None) -> DivisorClass:
    numbers = {}
    for curve in ("F1", "F0"):
        inputs = GeometricInputs.make(curve, genus, r, d, n, evaluate)
        stages = test_curve_degeneracy(inputs, golden[curve] if golden else None)
        numbers[curve] = stages.number
    dc = solve_from_test_curves(numbers["F1"], numbers["F0"], genus + 1)
    logger.info(f"g = {genus + 1}: a = {format_rational(dc.a)}, "
                f"b0 = {format_rational(dc.b0)}, b1 = {format_rational(dc.b1)}")
    return dc

def virtual_class_g23(check: bool = True) -> DivisorClass:
    """The class of the virtual divisor on M̄_23 from c₃(F − Sym²E)."""
    return _run(22, 6, 26, 3, chern_number_g22, GOLDEN_G23 if check else None)

def virtual_class_rho1(s: int, check: bool = True) -> DivisorClass:
    """The class of the virtual divisor on M̄_{2s²+s+1} from c₂(F − Sym²E)."""
    if s < 2:
        raise ParameterError(f"s must be at least 2, got {s}")
    genus, r, d = general_parameters(s)
    evaluate = lambda expr: chern_number_general(s, expr)
    return _run(genus, r, d, 2, evaluate, golden_rho1(s) if check else None)

def closed_form_rho1(s: int) -> DivisorClass:
    if s < 2:
        raise ParameterError(f"s must be at least 2, got {s}")
    C = castelnuovo_number(s)
    den = (2 * s - 1) * (3 * s + 1) * (3 * s + 2)
    b0 = Fraction(C * 2 * (s - 1) * (24 * s**8 - 28 * s**7 + 22 * s**6 - 5 * s**5 + 43 * s**4
                                     + 112 * s**3 + 100 * s**2 + 50 * s + 12), 9 * den)
    a = Fraction(C * 2 * (s - 1) * (48 * s**8 - 56 * s**7 + 92 * s**6 - 90 * s**5 + 86 * s**4
                                    + 324 * s**3 + 317 * s**2 + 182 * s + 48), 3 * den)
    b1 = Fraction(C * 2 * s * (s - 1) * (2 * s + 1) * (24 * s**6 - 40 * s**5 + 18 * s**4
                                                      + 26 * s**3 + 30 * s**2 + 47 * s + 18), 3 * den)
    return DivisorClass(a, b0, b1)

def slope_conjecture_bound(g: int) -> Fraction:
    return 6 + Fraction(12, g + 1)

@dataclass(frozen=True)
class SlopeReport:
    g: int
    divisor: DivisorClass
    slope: Fraction

    @property
    def general_type(self) -> bool:
        return self.slope < GENERAL_TYPE_SLOPE

    @property
    def bound(self) -> Fraction:
        return slope_conjecture_bound(self.g)

    @property
    def below_bound(self) -> bool:
        return self.slope < self.bound

    @property
    def on_bound(self) -> bool:
        return self.slope == self.bound

    @property
    def approx(self) -> str:
        return f"{float(self.slope):.6f}"

    def to_dict(self) -> dict[str, ty.Any]:
        return {
            "g": self.g, **self.divisor.to_dict(),
            "slope": format_rational(self.slope),
            "general_type": self.general_type,
            "approx": self.approx,
            "bound": format_rational(self.bound),
            "below_bound": self.below_bound,
        }

def slope_report(dc: DivisorClass, g: int) -> SlopeReport:
    if dc.b0 == 0:
        raise ParameterError("Slope is undefined for b0 = 0")
    return SlopeReport(g, dc, dc.a / dc.b0)

def canonical_class_coefficients(g: int) -> tuple[int, ...]:
    """K = 13λ − 2δ₀ − 3δ₁ − 2δ₂ − ⋯ − 2δ_{⌊g/2⌋}."""
    if g < 3:
        raise ParameterError(f"Genus must be at least 3, got {g}")
    return (13, -2, -3) + (-2,) * (g // 2 - 1)

