from tropbn.graph import ChainOfLoops, Edge, GraphPoint, make_chain
from tropbn.plfunc import (
    Divisor, PLFunction, SlopeVectorPair,
    break_divisor_coordinates, is_section, lower_envelope, ord_at,
    principal_divisor, tropical_combination,
)
from tropbn.errors import ParameterError, StructureError

from fractions import Fraction
import pytest
import random

def chain():
    return make_chain(1, 4)

def ramp():
    # Slope 1 along the first bridge, constant afterwards
    return PLFunction.from_slopes(chain(), 0, {Edge.bridge(1): ((0, 1),)})

def test_from_slopes_values():
    phi = ramp()
    c = phi.chain
    assert phi.value(c.w(0)) == 0
    assert phi.value(c.v(1)) == 4
    assert phi.value(GraphPoint(Edge.bridge(1), Fraction(3, 2))) == Fraction(3, 2)
    assert phi.value(c.v(2)) == 4
    assert phi.bridge_slope(1) == 1
    assert phi.bridge_slope(2) == 0
    assert phi.min_value() == 0

def test_collinear_breakpoints_merge():
    c = chain()
    edges = {e: ((0, 0), (c.length(e), 0)) for e in c.edges()}
    edges[Edge.bridge(1)] = ((0, 0), (1, 0), (2, 0), (4, 0))
    phi = PLFunction(c, edges)
    assert len(phi.breakpoints(Edge.bridge(1))) == 2
    assert phi == PLFunction.constant(c)

def test_rejects_malformed():
    c = chain()
    edges = {e: ((0, 0), (c.length(e), 0)) for e in c.edges()}
    bad = dict(edges)
    bad[Edge.top(1)] = ((0, 0), (Fraction(1, 4), 1))
    with pytest.raises(StructureError):
        PLFunction(c, bad)
    bad = dict(edges)
    bad[Edge.bridge(1)] = ((0, 0), (4, 2))
    with pytest.raises(StructureError):
        PLFunction(c, bad)
    bad = dict(edges)
    del bad[Edge.bottom(1)]
    with pytest.raises(StructureError):
        PLFunction(c, bad)

def test_principal_divisor_of_ramp():
    phi = ramp()
    c = phi.chain
    assert ord_at(phi, c.w(0)) == -1
    assert ord_at(phi, c.v(1)) == 1
    div = principal_divisor(phi)
    assert div == Divisor(c, {c.w(0): -1, c.v(1): 1})
    assert div.degree == 0
    assert is_section(phi, Divisor(c, {c.w(0): 1}))
    assert not is_section(phi, Divisor(c))

def test_principal_divisor_on_loop():
    c = chain()
    phi = PLFunction.from_slopes(c, 0, {Edge.top(1): ((0, 1),), Edge.bottom(1): ((0, 4),)})
    assert phi.value(c.w(1)) == Fraction(1, 4)
    assert principal_divisor(phi) == Divisor(c, {c.v(1): -5, c.w(1): 5})

def test_arithmetic():
    phi = ramp()
    c = phi.chain
    assert (phi - phi) == PLFunction.constant(c)
    assert (phi + 3).value(c.w(0)) == 3
    assert (-phi).value(c.v(1)) == -4
    with pytest.raises(StructureError):
        phi + PLFunction.constant(make_chain(1, 8))

def test_tropical_combination():
    c = chain()
    phi, const = ramp(), PLFunction.constant(c, 2)
    pieces = lower_envelope([phi, const], [0, 0], edges=[Edge.bridge(1)])
    assert [(p.start, p.end, p.indices) for p in pieces] == [(0, 2, (0,)), (2, 4, (1,))]
    theta = tropical_combination([phi, const], [0, 0])
    assert theta.value(GraphPoint(Edge.bridge(1), Fraction(1))) == 1
    assert theta.value(GraphPoint(Edge.bridge(1), Fraction(3))) == 2
    assert theta.value(c.v(2)) == 2
    with pytest.raises(ParameterError):
        lower_envelope([phi], [0, 1])

def test_divisor_ops():
    c = chain()
    p = c.loop_point(1, Fraction(1, 32))
    d = Divisor(c, {c.w(0): 1, p: 1})
    assert d.degree == 2
    assert d.is_effective()
    assert (d - d).degree == 0
    assert (2 * d).at(p) == 2
    assert not (-d).is_effective()
    assert Divisor.from_dict(c, d.to_dict()) == d
    with pytest.raises(StructureError):
        Divisor(c, {GraphPoint(Edge.top(1), Fraction(0)): 1})

def test_break_divisor_coordinates():
    c = chain()
    p = c.loop_point(1, Fraction(1, 32))
    assert break_divisor_coordinates(Divisor(c, {c.w(0): 1, p: 1}), 2) == (Fraction(1, 32),)
    with pytest.raises(StructureError):
        break_divisor_coordinates(Divisor(c, {p: 2}), 2)
    with pytest.raises(StructureError):
        break_divisor_coordinates(Divisor(c, {c.w(0): 1, p: 1}), 3)

def test_slope_vectors_increase():
    sv = SlopeVectorPair(s=((0, 1), (0, 2)), s_prime=((0, 1),))
    assert sv.genus == 1
    assert sv.rank == 1
    assert sv.at(2) == (0, 2)
    with pytest.raises(StructureError):
        SlopeVectorPair(s=((1, 1),), s_prime=((0, 1),))

def test_function_dict():
    phi = ramp()
    assert PLFunction.from_dict(phi.chain, phi.to_dict()) == phi
    with pytest.raises(StructureError):
        PLFunction.from_dict(phi.chain, {"edges": {"bridge-1": [{"o": "0"}]}})

def integer_chain(g: int) -> ChainOfLoops:
    return ChainOfLoops(g, top=(Fraction(5),) * g, bottom=(Fraction(3),) * g,
                        bridges=(Fraction(4),) * (g + 1), separation=Fraction(2))

def random_loop_function(c: ChainOfLoops, rng: random.Random) -> PLFunction:
    segments = {}
    for k in range(1, c.genus + 2):
        segments[Edge.bridge(k)] = tuple((o, rng.randint(-3, 3)) for o in range(4))
    for k in range(1, c.genus + 1):
        rise = rng.randint(-4, 4)
        for edge in (Edge.top(k), Edge.bottom(k)):
            length = int(c.length(edge))
            slopes = [rng.randint(-2, 2) for _ in range(length)]
            while sum(slopes) != rise:
                slopes[rng.randrange(length)] += 1 if sum(slopes) < rise else -1
            segments[edge] = tuple(enumerate(slopes))
    return PLFunction.from_slopes(c, rng.randint(-5, 5), segments)

def test_principal_divisors_have_degree_zero():
    rng = random.Random(3)
    for _ in range(100):
        phi = random_loop_function(integer_chain(rng.randint(1, 4)), rng)
        assert principal_divisor(phi).degree == 0

def test_principal_divisor_ignores_constants():
    rng = random.Random(5)
    for _ in range(100):
        phi = random_loop_function(integer_chain(rng.randint(1, 4)), rng)
        c = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
        assert principal_divisor(phi + c) == principal_divisor(phi)
        assert principal_divisor(phi.shift(c)) == principal_divisor(phi)

def test_principal_divisor_is_additive():
    rng = random.Random(8)
    c = integer_chain(2)
    for _ in range(50):
        phi, psi = random_loop_function(c, rng), random_loop_function(c, rng)
        assert principal_divisor(phi + psi) == principal_divisor(phi) + principal_divisor(psi)
