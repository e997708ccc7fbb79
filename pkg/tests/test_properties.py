"""Property-based checks on random small inputs."""
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from eternal_pursuit.bounds import ell, maxseq, maxseq_oracle, tree_bound, validate_decomposition, radius_level
from eternal_pursuit.engine import c_t, cop_number, eternal_cop_number, eternal_decision
from eternal_pursuit.graph import (
    build_graph,
    cartesian_product,
    generate,
    is_connected_subset,
    parse_edge_list,
    path_graph,
    radius_of,
    strong_product,
    subgrid_retraction,
    tree_from_parents,
    verify_retraction,
)

from oracles import path_formula

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def connected_graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    # a random spanning tree plus random extra edges
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=n)) if pairs else []
    return build_graph(n, edges | set(extra))


@st.composite
def trees(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    parents = [-1] + [draw(st.integers(0, v - 1)) for v in range(1, n)]
    return tree_from_parents(parents)


@given(connected_graphs(4), connected_graphs(3))
@settings(max_examples=60, deadline=None)
def test_product_distance_laws(g, h):
    strong, cart = strong_product(g, h), cartesian_product(g, h)
    for a in range(strong.n):
        for b in range(strong.n):
            (u, x), (v, y) = divmod(a, h.n), divmod(b, h.n)
            assert strong.dist[a, b] == max(g.dist[u, v], h.dist[x, y])
            assert cart.dist[a, b] == g.dist[u, v] + h.dist[x, y]


@given(st.integers(3, 6), st.integers(3, 6), st.data())
@settings(max_examples=40, deadline=None)
def test_subgrid_retractions(m, n, data):
    a = data.draw(st.integers(3, m))
    b = data.draw(st.integers(3, n))
    f = subgrid_retraction(m, n, a, b)
    assert verify_retraction(f)
    assert f.source == generate(f"grid:{m}x{n}")


@given(connected_graphs())
@settings(max_examples=30, deadline=None)
def test_edge_list_round_trip(g):
    again = parse_edge_list(g.to_edge_list())
    assert again == g and again.digest() == g.digest()


@given(connected_graphs(5), st.integers(1, 3))
@SLOW
def test_monotone_in_t(g, t):
    assert eternal_cop_number(g, t + 1).value <= eternal_cop_number(g, t).value


@given(connected_graphs(5), st.integers(1, 3))
@SLOW
def test_monotone_in_k(g, t):
    k = eternal_cop_number(g, t).value
    if k > 1:
        assert not eternal_decision(g, k - 1, t)
    assert all(eternal_decision(g, j, t) for j in range(k, min(k + 2, g.n) + 1))


@given(connected_graphs(5), st.integers(1, 3))
@SLOW
def test_sandwich(g, t):
    assert cop_number(g) <= c_t(g, t) <= eternal_cop_number(g, t).value <= g.n


@given(st.integers(1, 9), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_path_formula(n, t):
    assert eternal_cop_number(path_graph(n), t).value == path_formula(n, t)


@given(st.integers(1, 64))
def test_maxseq_closed_form(t):
    assert maxseq(t) == maxseq_oracle(t)


@given(st.integers(1, 200), st.integers(1, 8))
def test_ell_monotone_and_bounded(t, i):
    assert 0 <= ell(i, t) <= ell(i + 1, t) <= t
    assert ell(i, t + 1) >= ell(i, t)


@given(trees())
@settings(max_examples=60, deadline=None)
def test_tree_bound_partition_is_valid(tree):
    for t in (1, 2, 3, 5):
        decomp, rep = tree_bound(tree, t)
        assert not validate_decomposition(tree, decomp, t, check_levels=False)
        for part in decomp.parts:
            assert is_connected_subset(tree, part.vertices)
            assert part.i == radius_level(radius_of(tree, part.vertices), t)
        assert rep.value == sum(p.i for p in decomp.parts)


@given(trees(8), st.integers(1, 3))
@SLOW
def test_tree_bound_is_sound(tree, t):
    assert eternal_cop_number(tree, t).value <= tree_bound(tree, t)[1].value

