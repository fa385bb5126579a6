from tropbn.graph import make_chain
from tropbn.plfunc import is_section
from tropbn.tableaux import (
    SKIP, Tableau,
    block_boundaries, brill_noether_number, count_rectangle_dp, count_tableaux,
    enumerate_tableaux, is_lattice_path_valid, lingering_loops,
    multiplicities_and_weights, partition_prefixes, random_tableau, slope_table,
    vertex_avoiding_divisor, _lingering_coordinate,
)
from tropbn.errors import ParameterError, StructureError

from fractions import Fraction
import random
import pytest

def example_tableau() -> Tableau:
    return Tableau(22, 6, 25, (
        (1, 3, 6, 9, 10, 13, 15),
        (2, 5, 7, 12, 16, 19, 20),
        (4, 8, 11, 14, 17, 21, 22),
    ))

def test_counts():
    assert count_tableaux(3, 7, 21) == 1385670
    assert count_tableaux(3, 7, 23) == 350574510
    assert count_tableaux(3, 7, 22) == 22 * 1385670
    assert count_tableaux(1, 1, 3) == 3
    assert count_rectangle_dp(3, 3) == 42
    assert count_rectangle_dp(3, 7) == 1385670
    with pytest.raises(ParameterError):
        count_tableaux(3, 7, 20)
    with pytest.raises(ParameterError):
        count_tableaux(0, 7, 20)

def test_enumerate_order():
    tableaux = list(enumerate_tableaux(2, 2, 4))
    assert [t.rows for t in tableaux] == [((1, 2), (3, 4)), ((1, 3), (2, 4))]
    # Defaults: g = n, r = cols - 1, d = g - rows + r
    assert (tableaux[0].g, tableaux[0].r, tableaux[0].d) == (4, 1, 3)

@pytest.mark.parametrize("rows,cols,n", [(2, 2, 5), (2, 3, 7), (3, 2, 7), (1, 3, 5)])
def test_enumerate_matches_count(rows, cols, n):
    keys = [t.key() for t in enumerate_tableaux(rows, cols, n)]
    assert len(keys) == len(set(keys)) == count_tableaux(rows, cols, n)

def test_partition_prefixes_cover():
    total = list(enumerate_tableaux(2, 3, 7))
    prefixes = partition_prefixes(2, 3, 7, 3)
    assert all(len(p) == 3 for p in prefixes)
    parts = [t.key() for p in prefixes for t in enumerate_tableaux(2, 3, 7, prefix=p)]
    assert parts == [t.key() for t in total]

def test_word():
    t = Tableau(5, 1, 4, ((1, 3), (2, 5)))
    assert t.word() == (0, 1, 0, SKIP, 1)
    assert t.key() == "1,3/2,5"
    assert Tableau.from_dict(t.to_dict()) == t

def test_random_tableau_is_seeded():
    a = random_tableau(3, 7, 23, random.Random("7:0"))
    b = random_tableau(3, 7, 23, random.Random("7:0"))
    assert a == b
    assert (a.g, a.r, a.d) == (23, 6, 26)
    assert len(a.entries) == 21

def test_invalid_tableaux():
    with pytest.raises(StructureError):
        Tableau(5, 1, 4, ((1, 3), (2, 2)))
    with pytest.raises(StructureError):
        Tableau(5, 1, 4, ((1, 3), (4, 2)))
    with pytest.raises(StructureError):
        Tableau(5, 1, 4, ((2, 3), (1, 5)))
    with pytest.raises(StructureError):
        Tableau(5, 1, 4, ((1, 3), (2, 6)))
    with pytest.raises(StructureError):
        Tableau(5, 1, 4, ((1, 3, 4), (2, 5)))
    with pytest.raises(ParameterError):
        Tableau(5, 1, 7, ((1, 3), (2, 5)))
    with pytest.raises(StructureError):
        Tableau.from_dict({"g": 5, "r": 1})

def test_block_boundaries():
    t = example_tableau()
    assert tuple(block_boundaries(t)) == (7, 15, 9, 11)
    assert lingering_loops(t) == {18}
    with pytest.raises(ParameterError):
        block_boundaries(Tableau(5, 1, 4, ((1, 3), (2, 5))))

def test_slope_table():
    t = example_tableau()
    sv = slope_table(t)
    assert sv.at(1) == (-3, -2, -1, 0, 1, 2, 3)
    # Entry 1 sits in the first column, so φ_6 gains slope on loop 1
    assert sv.at(2) == (-3, -2, -1, 0, 1, 2, 4)
    assert sv.at(23) == (0, 1, 2, 3, 4, 5, 6)
    assert sv.at(18) == sv.at(19)
    assert is_lattice_path_valid(sv)

def test_multiplicities():
    t = example_tableau()
    m = multiplicities_and_weights(slope_table(t), t.g, t.r, t.d)
    assert m.loops[17] == 1
    assert sum(m.loops) == 1
    assert sum(m.bridges) == 0
    assert (m.w0, m.v_end) == (0, 0)
    assert m.total == brill_noether_number(22, 6, 25) == 1
    assert brill_noether_number(21, 6, 24) == 0
    assert brill_noether_number(23, 6, 26) == 2

def test_vertex_avoiding_divisor():
    t = example_tableau()
    chain = make_chain(22)
    data = vertex_avoiding_divisor(t, chain, seed=7)
    assert data.divisor.degree == 25
    assert data.divisor.at(chain.w(0)) == 3
    assert len(data.distinguished) == 7
    for i, phi in enumerate(data.distinguished):
        assert phi.value(chain.w(0)) == 0
        assert is_section(phi, data.divisor)
        # Bridge slopes follow the slope table
        assert phi.bridge_slope(1) == data.slope_table.at(1)[i]
        assert phi.bridge_slope(23) == data.slope_table.at(23)[i]
    # Non-lingering loop k with entry in column r - i sits at (s_k[i] + 1)·m_k
    i = 6 - t.column_of[1]
    assert data.coordinates[0] == (data.slope_table.at(1)[i] + 1) * chain.bottom[0] % chain.loop_length(1)
    again = vertex_avoiding_divisor(t, chain, seed=7)
    assert again.coordinates == data.coordinates
    assert again.distinguished == data.distinguished

def test_lingering_coordinate_is_generic():
    t = example_tableau()
    chain = make_chain(22)
    data = vertex_avoiding_divisor(t, chain, seed=3)
    L, m = chain.loop_length(18), chain.bottom[17]
    x = data.coordinates[17]
    assert 0 < x < L
    assert all(x != (j * m) % L for j in range(26))

def test_lingering_coordinate_avoids_only_forward_multiples():
    # L = 7m and 2d + 3 = 7, so the grid is m, 2m, ..., 6m
    L, m, d = Fraction(7), Fraction(1), 2
    seen = {_lingering_coordinate(1, L, m, d, seed) for seed in range(60)}
    assert seen <= {3, 4, 5, 6}
    # 5m and 6m are −2m and −m modulo L, which stay available
    assert seen & {5, 6}

def test_pair_functions_are_cached():
    data = vertex_avoiding_divisor(example_tableau(), make_chain(22), seed=7)
    assert len(data.pair_functions) == 28
    assert data.pair_function(5, 2) is data.pair_function(2, 5)
    assert data.pair_function(2, 5) == data.distinguished[2] + data.distinguished[5]
    assert data.pair_functions is data.pair_functions

def test_vertex_avoiding_rejects():
    t = example_tableau()
    with pytest.raises(ParameterError):
        vertex_avoiding_divisor(t, make_chain(21))
