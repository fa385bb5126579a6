from tropbn.chowring import (
    ChernRootMonomial, ChowExpr,
    castelnuovo_number, chern_number_g22, chern_number_general, general_parameters,
    harris_tu_monomial, normalize, parse_expr, sym2_chern, total_chern_inverse,
    total_class, virtual_chern,
)
from tropbn.errors import ParameterError, StructureError

from fractions import Fraction
from math import factorial
import itertools
import math
import pytest
import sympy

eta, gamma, theta = ChowExpr.eta(), ChowExpr.gamma(), ChowExpr.theta()
c = ChowExpr.chern

def evaluate_chern(expr: ChowExpr, values: dict[int, int]) -> Fraction:
    """Substitutes numbers for the Chern symbols of an η, γ, ϑ-free expression."""
    total = Fraction(0)
    for key, coeff in expr.terms.items():
        assert key[:3] == (0, 0, 0)
        total += coeff * math.prod(values[i] ** e for i, e in enumerate(key[3:], start=1))
    return total

def elementary(roots, i):
    return sum(math.prod(combo) for combo in itertools.combinations(roots, i))

def test_relations():
    assert eta * eta == 0
    assert gamma * eta == 0
    assert gamma * gamma == -2 * eta * theta
    assert gamma ** 3 == 0
    assert normalize({(0, 2, 0): 1}) == -2 * eta * theta
    assert normalize({(2, 0, 0): 5, (1, 1, 3): 1}) == 0
    assert normalize(gamma + 1) == gamma + 1
    with pytest.raises(StructureError):
        ChowExpr({(0, -1, 0): 1})

def test_expr_basics():
    e = 3 * c(2) * theta - Fraction(1, 2) * theta ** 2 + eta
    assert e.degrees() == {1, 2, 3}
    assert e.degree == 3
    assert not e.is_homogeneous()
    assert e.homogeneous_part(3) == 3 * c(2) * theta
    assert e.truncate(2) == eta - Fraction(1, 2) * theta ** 2
    assert e.coefficient_of_eta() == 1
    assert e.max_chern_index() == 2
    assert c(0) == 1
    assert c(-1).is_zero()
    assert (e - e).is_zero()
    assert (2 - e) + e == 2
    assert str(e) == "3*theta*c2 - 1/2*theta^2 + eta"
    assert str(ChowExpr()) == "0"
    assert ChowExpr.from_dict(e.to_dict()) == e
    assert hash(e) == hash(normalize(e))

def test_from_dict_rejects():
    with pytest.raises(StructureError):
        ChowExpr.from_dict({"terms": [{"eta": 1}]})
    with pytest.raises(StructureError):
        ChowExpr.from_dict({})

def test_total_chern_inverse():
    inv = total_chern_inverse(1 + gamma, 3)
    assert inv == 1 - gamma - 2 * eta * theta
    assert ((1 + gamma) * inv).truncate(3) == 1
    poly = total_class(c(1), c(2), c(3))
    inv = total_chern_inverse(poly, 3)
    assert inv.homogeneous_part(1) == -c(1)
    assert inv.homogeneous_part(2) == c(1) ** 2 - c(2)
    assert inv.homogeneous_part(3) == -c(1) ** 3 + 2 * c(1) * c(2) - c(3)
    with pytest.raises(ParameterError):
        total_chern_inverse(2 + gamma, 3)

def test_virtual_chern():
    # c(A − B) for c(A) = 1 + c1, c(B) = 1 + theta
    num = total_class(c(1))
    inv = total_chern_inverse(1 + theta, 4)
    assert virtual_chern(num, inv, 1) == c(1) - theta
    assert virtual_chern(num, inv, 3) == c(1) * theta ** 2 - theta ** 3

@pytest.mark.parametrize("r,roots", [(1, (3, 7)), (2, (1, 2, 5)), (6, (1, -2, 3, 4, -5, 6, 2))])
def test_sym2_chern_on_roots(r, roots):
    values = {i: elementary(roots, i) for i in range(1, 4)}
    sym_roots = [a + b for a, b in itertools.combinations_with_replacement(roots, 2)]
    s = sym2_chern(c(1), c(2), c(3), r)
    for i, si in enumerate(s, start=1):
        assert evaluate_chern(si, values) == elementary(sym_roots, i)

def test_sym2_chern_rank_seven():
    s1, s2, s3 = sym2_chern(c(1), c(2), c(3), 6)
    assert s1 == 8 * c(1)
    assert s2 == 27 * c(1) ** 2 + 9 * c(2)
    assert s3 == 50 * c(1) ** 3 + 59 * c(1) * c(2) + 11 * c(3)

def test_normal_form_matches_sympy():
    e, g, t, x1, x2 = sympy.symbols("eta gamma theta c1 c2")
    basis = sympy.groebner([e**2, g*e, g**2 + 2*e*t], g, e, t, x1, x2, order="lex", domain="QQ")
    ours = (2 * eta + gamma - theta + c(1)) ** 3 * (1 + gamma + c(2)) - Fraction(3, 4) * gamma * c(1) ** 2
    theirs = (2*e + g - t + x1)**3 * (1 + g + x2) - sympy.Rational(3, 4) * g * x1**2
    _, remainder = basis.reduce(sympy.expand(theirs))
    converted = sympy.sympify(str(ours).replace("^", "**"),
                              locals={"eta": e, "gamma": g, "theta": t, "c1": x1, "c2": x2})
    assert sympy.expand(remainder - converted) == 0

# (u_1 power, u_2 power) -> (numerator, a, b) for numerator·22!/(a!·b!), g=22, r=1, d=16
HARRIS_TU_G22 = {
    (3, 0): (4, 11, 7), (0, 3): (-2, 8, 10), (2, 0): (3, 10, 7),
    (0, 2): (-1, 8, 9), (1, 0): (2, 7, 9), (0, 1): (0, 1, 1),
    (1, 4): (-2, 9, 11), (4, 1): (4, 8, 12), (2, 1): (2, 8, 10),
    (1, 2): (0, 1, 1), (2, 3): (0, 1, 1), (3, 2): (2, 9, 11),
    (2, 2): (1, 9, 10), (4, 0): (5, 7, 12), (0, 4): (-3, 8, 11),
    (3, 1): (3, 8, 11), (1, 3): (-1, 9, 10), (1, 1): (1, 8, 9),
    (0, 0): (1, 7, 8),
}

@pytest.mark.parametrize("exps", sorted(HARRIS_TU_G22))
def test_harris_tu_table(exps):
    numerator, a, b = HARRIS_TU_G22[exps]
    expected = Fraction(numerator * factorial(22), factorial(a) * factorial(b))
    assert harris_tu_monomial(ChernRootMonomial(22, 1, 16, exps)) == expected

def test_harris_tu_table_shape():
    assert len(HARRIS_TU_G22) == 19
    assert sum(1 for n, _, _ in HARRIS_TU_G22.values() if n < 0) == 5
    assert sum(1 for n, _, _ in HARRIS_TU_G22.values() if n == 0) == 3

def test_harris_tu_printed_variant():
    f = factorial
    def ht(*exps, printed=False):
        return harris_tu_monomial(ChernRootMonomial(22, 1, 16, exps), printed=printed)
    assert ht(3, 0, printed=True) == Fraction(4 * f(22), f(10) * f(6))
    assert ht(3, 0, printed=True) != ht(3, 0)
    assert ChernRootMonomial(22, 1, 16, (3, 0)).theta_power == 5

def test_harris_tu_rejects():
    with pytest.raises(ParameterError):
        ChernRootMonomial(22, 1, 16, (1, 1, 1))
    with pytest.raises(ParameterError):
        ChernRootMonomial(22, 1, 16, (5, 4))
    with pytest.raises(ParameterError):
        ChernRootMonomial(22, 1, 16, (-1, 0))

def test_castelnuovo():
    assert castelnuovo_number(1) == 1
    assert castelnuovo_number(2) == 42
    # θ^ρ with ρ = 0 counts the points of W^r_d
    assert harris_tu_monomial(ChernRootMonomial(10, 4, 12, (0,) * 5)) == 42
    with pytest.raises(ParameterError):
        castelnuovo_number(0)

def test_chern_number_general():
    assert general_parameters(2) == (10, 4, 13)
    assert chern_number_general(2, c(4) * theta) == 420
    assert chern_number_general(2, c(5)) == harris_tu_monomial(
        ChernRootMonomial(10, 4, 13, (1,) * 5))
    # x_1² x_2 x_3 x_4 = 4s²(s+1)/(3s+1) · C_s
    assert harris_tu_monomial(ChernRootMonomial(10, 4, 13, (2, 1, 1, 1, 0))) == 288
    assert chern_number_general(2, theta ** 5) == harris_tu_monomial(
        ChernRootMonomial(10, 4, 13, (0,) * 5))

def test_chern_number_g22():
    f = factorial
    assert chern_number_g22(theta ** 8) == Fraction(f(22), f(8) * f(7))
    # c_1 = ϑ − u_1 − u_2
    assert chern_number_g22(c(1) * theta ** 7) == Fraction(f(22), f(8) * f(7)) * Fraction(7, 9)
    with pytest.raises(ParameterError):
        chern_number_g22(eta * theta ** 7)
    with pytest.raises(ParameterError):
        chern_number_g22(theta ** 7)
    with pytest.raises(ParameterError):
        chern_number_g22(c(8))

def test_parse_expr():
    e = parse_expr("36*c2*theta - 32/3*theta^3 + eta*c1^2")
    assert e == 36 * c(2) * theta - Fraction(32, 3) * theta ** 3 + eta * c(1) ** 2
    assert parse_expr("gamma^2") == -2 * eta * theta
    assert parse_expr("-c1 - -2") == 2 - c(1)
    assert parse_expr(str(e)) == e
    assert parse_expr("c12") == c(12)

@pytest.mark.parametrize("text", ["2 +", "* c1", "c1 c2", "foo", "", "c1 *"])
def test_parse_expr_rejects(text):
    with pytest.raises(StructureError):
        parse_expr(text)
