from fractions import Fraction
from itertools import combinations

import pytest
from conftest import grid_pts
from hypothesis import given, strategies as st
from oracles import Oracle, max_disjoint
from strategies import space_and_points, space_and_subset, spaces

from medianspace import (
    EmptyIntersection, NotDisjoint, PrecondViolated, Relation, boundary, branched_at,
    classify_pair, convex_hull, depth, enumerate_walls, extract_disjoint_family, facing_triple,
    halfspace_of, is_convex, rank, strongly_separated, subspace, wall_interval,
)
from medianspace import fixtures as F
from medianspace.halfspaces import (
    COMPLEMENT_FIRST, halfspaces, rank_of, relation_of_masks, separating,
)


def sides(S):
    return {h.members for h in halfspaces(S)}


# -- walls ---------------------------------------------------------------------------


def test_hypercube_walls():
    Q = F.hypercube(3)
    assert len(enumerate_walls(Q)) == 3
    assert len(halfspaces(Q)) == 6
    assert sides(Q) == Oracle.of(Q).bipartitions()


def test_path_has_one_wall_per_edge():
    assert len(enumerate_walls(F.path(4))) == 3


def test_star_leaves_are_halfspaces():
    S = F.star(3)
    assert len(enumerate_walls(S)) == 3
    assert {frozenset({f"v{i}"}) for i in (1, 2, 3)} <= sides(S)
    assert sides(S) == Oracle.of(S).bipartitions()


def test_walls_match_bipartition_oracle(small_spaces):
    for S in small_spaces.values():
        assert sides(S) == Oracle.of(S).bipartitions(), S.name


def test_wall_weights_are_edge_weights():
    S = F.weighted_star(5)
    assert sorted(w.weight for w in enumerate_walls(S)) == sorted(Fraction(1, i) for i in range(1, 6))


def test_walls_ordered_and_oriented():
    for S in (F.grid(3), F.substar(), F.hypercube(3)):
        walls = enumerate_walls(S)
        keys = []
        for w in walls:
            lowest = min(min(e) for e in w.edges)
            assert w.side_of(lowest) == 0
            keys.append(lowest)
        assert keys == sorted(keys)


# -- classification ----------------------------------------------------------------


def test_coordinate_halfspaces_transverse():
    Q = F.hypercube(3)
    h1 = halfspace_of(Q, {p for p in Q.points if p[0] == "1"})
    h2 = halfspace_of(Q, {p for p in Q.points if p[1] == "1"})
    assert classify_pair(h1, h2) is Relation.TRANSVERSE


def test_path_end_singletons_disjoint():
    P = F.path(4)
    assert classify_pair(halfspace_of(P, {"v1"}), halfspace_of(P, {"v4"})) is Relation.DISJOINT


def test_path_prefixes_nested():
    P = F.path(4)
    rel = classify_pair(halfspace_of(P, {"v1"}), halfspace_of(P, {"v1", "v2"}))
    assert rel is Relation.SUBSET and rel.nested


def test_covering_pair():
    P = F.path(3)
    assert classify_pair(halfspace_of(P, {"v1", "v2"}), halfspace_of(P, {"v2", "v3"})) is Relation.COVERING


@given(spaces(), st.data())
def test_complementing_first_follows_table(S, data):
    H = halfspaces(S)
    h1, h2 = data.draw(st.sampled_from(H)), data.draw(st.sampled_from(H))
    assert classify_pair(h1.complement(), h2) is COMPLEMENT_FIRST[classify_pair(h1, h2)]


@given(spaces(), st.data())
def test_classification_symmetric(S, data):
    H = halfspaces(S)
    h1, h2 = data.draw(st.sampled_from(H)), data.draw(st.sampled_from(H))
    flip = {Relation.SUBSET: Relation.SUPERSET, Relation.SUPERSET: Relation.SUBSET}
    r = classify_pair(h1, h2)
    assert classify_pair(h2, h1) is flip.get(r, r)


# -- rank ------------------------------------------------------------------------------


def test_hypercube_rank():
    assert Oracle.of(F.hypercube(3)).rank() == 3
    assert rank(F.hypercube(3)) == 3


@pytest.mark.parametrize("spec", ["path:5", "star:3", "substar", "weighted_star:5"])
def test_trees_have_rank_one(spec):
    assert rank(F.parse_fixture(spec)) == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_grid_rank_two(k):
    if k <= 2:
        assert Oracle.of(F.grid(k)).rank() == 2
    assert rank(F.grid(k)) == 2


def test_rank_matches_oracle(small_spaces):
    for S in small_spaces.values():
        assert rank(S) == Oracle.of(S).rank(), S.name


# -- wall intervals, depth, boundary ----------------------------------------------


def test_hypercube_wall_interval():
    Q = F.hypercube(3)
    ws = wall_interval(Q, {"000"}, {"110"})
    assert ws.measure == 2
    split = {w.index for w in enumerate_walls(Q)
             if w.separates(Q.mask({"000"}), Q.mask({"110"}))}
    assert set(ws.walls) == split == {1, 2}


@given(space_and_subset())
def test_wall_interval_of_set_with_itself_is_empty(case):
    S, A = case
    ws = wall_interval(S, A, A)
    assert ws.walls == () and ws.measure == 0


def test_substar_branch_wall_interval():
    S = F.substar()
    ws = wall_interval(S, {"i1", "t1"}, {"i2", "t2"})
    inner = {w.index for w in enumerate_walls(S)
             if {S.points[i] for e in w.edges for i in e} in ({"c", "i1"}, {"c", "i2"})}
    assert set(ws.walls) == inner and ws.measure == 2


@given(space_and_points(2))
def test_metric_equals_wall_measure(case):
    S, (x, y) = case
    assert wall_interval(S, {x}, {y}).measure == S.d(x, y)


@given(space_and_points(2))
def test_separating_halfspaces(case):
    S, (a, b) = case
    H = separating(S, a, b)
    assert all(b in h and a not in h for h in H)
    assert sum(enumerate_walls(S)[h.wall].weight for h in H) == S.d(a, b)


def test_weighted_leaf_depth():
    S = F.weighted_star(5)
    assert depth(S, halfspace_of(S, {"v3"})) == Fraction(1, 3)


def test_grid_halfspace_depth():
    G = F.grid(4)
    h = halfspace_of(G, grid_pts(range(1, 5), range(5)))
    assert depth(G, h) == 4


def test_depth_across_single_edge():
    S = F.weighted_star(4)
    for i in range(1, 5):
        assert depth(S, halfspace_of(S, {f"v{i}"}), {f"v{i}", "c"}) == Fraction(1, i)


def test_depth_of_missed_set():
    P = F.path(4)
    with pytest.raises(EmptyIntersection):
        depth(P, halfspace_of(P, {"v4"}), {"v1"})


def test_grid_boundary_row():
    G = F.grid(2)
    assert boundary(G, halfspace_of(G, grid_pts(range(3), (1, 2)))) == grid_pts(range(3), (1,))


def test_hypercube_boundary_is_facet():
    Q = F.hypercube(3)
    facet = {p for p in Q.points if p[0] == "1"}
    assert boundary(Q, halfspace_of(Q, facet)) == facet


def test_path_boundary():
    P = F.path(4)
    assert boundary(P, halfspace_of(P, {"v3", "v4"})) == {"v3"}


# -- branching, facing triples, strong separation -------------------------------------


def test_grid_center_branching():
    assert len(branched_at(F.grid(2), "1,1")) == 8


def test_path_end_branching():
    H = branched_at(F.path(4), "v1")
    assert {h.members for h in H} == {frozenset({"v1"}), frozenset({"v2", "v3", "v4"})}


def test_star_center_branching():
    assert len(branched_at(F.star(3), "c")) == 6


def test_star_facing_triple():
    S = F.star(3)
    t = facing_triple(branched_at(S, "c"), strong=True)
    assert {h.members for h in t.halfspaces} == {frozenset({f"v{i}"}) for i in (1, 2, 3)}
    assert t.gate == "c"
    assert t.verify(S)


def _brute_triple(H):
    return any(not (a.mask & b.mask) and not (a.mask & c.mask) and not (b.mask & c.mask)
               for a, b, c in combinations(H, 3))


def test_grid_has_no_facing_triple():
    G = F.grid(4)
    assert not _brute_triple(halfspaces(G))
    assert facing_triple(halfspaces(G)) is None


@pytest.mark.parametrize("x", ["000", "011", "111"])
def test_hypercube_vertices_have_no_facing_triple(x):
    Q = F.hypercube(3)
    assert facing_triple(branched_at(Q, x)) is None


@given(spaces(), st.data())
def test_facing_triple_agrees_with_brute_force(S, data):
    x = data.draw(st.sampled_from(S.points))
    H = branched_at(S, x)
    assert (facing_triple(H) is not None) == _brute_triple(H)


def test_substar_branches_strongly_separated():
    assert strongly_separated(F.substar(), {"i1", "t1"}, {"i2", "t2"})


def test_grid_columns_not_strongly_separated():
    G = F.grid(4)
    assert not strongly_separated(G, grid_pts((0,), range(5)), grid_pts((4,), range(5)))


@given(space_and_points(2))
def test_distinct_singletons_strongly_separated(case):
    S, (a, b) = case
    if a != b:
        assert strongly_separated(S, {a}, {b})


def test_strong_separation_needs_disjoint_sets():
    with pytest.raises(NotDisjoint):
        strongly_separated(F.path(3), {"v1", "v2"}, {"v2", "v3"})


# -- disjoint families -----------------------------------------------------------------


def test_star_leaf_family():
    S = F.star(3)
    leaves = [halfspace_of(S, {f"v{i}"}) for i in (1, 2, 3)]
    assert len(extract_disjoint_family(leaves)) == 3


def test_square_family():
    Q = F.hypercube(2)
    H = halfspaces(Q)
    assert max_disjoint([h.members for h in H]) == 2
    fam = extract_disjoint_family(H)
    assert len(fam) == 2 and not fam[0].mask & fam[1].mask


def test_single_family():
    h = halfspaces(F.path(3))[0]
    assert extract_disjoint_family([h]) == [h]


def test_nested_family_rejected():
    P = F.path(4)
    with pytest.raises(PrecondViolated):
        extract_disjoint_family([halfspace_of(P, {"v1"}), halfspace_of(P, {"v1", "v2"})])


# -- structural properties ---------------------------------------------------------


def _disjoint_convex_pairs(S, limit=30):
    oracle = Oracle.of(S)
    convex = [A for A in oracle.convex_sets() if A]
    out = []
    for A, B in combinations(convex, 2):
        if not A & B:
            out.append((A, B))
    return out[:: max(1, len(out) // limit)]


@pytest.mark.parametrize("spec", ["hypercube:3", "grid:2", "star:3", "substar", "star:2*path:3"])
def test_disjoint_convex_sets_are_separated(spec):
    S = F.parse_fixture(spec)
    walls = enumerate_walls(S)
    for A, B in _disjoint_convex_pairs(S):
        assert any(w.separates(S.mask(A), S.mask(B)) for w in walls)


@given(space_and_subset(min_size=1, max_size=3))
def test_halfspaces_of_convex_subspace_are_traces(case):
    S, pts = case
    C = convex_hull(S, pts).members
    sub = subspace(S, C)
    traces = {h.members & C for h in halfspaces(S)} - {frozenset(), frozenset(C)}
    assert {h.members for h in halfspaces(sub)} == traces


@given(spaces(), st.data())
def test_transversality_lifts_from_boundary(S, data):
    h = data.draw(st.sampled_from(halfspaces(S)))
    bmask = S.mask(boundary(S, h))
    assert rank_of(S, boundary(S, h)) < rank(S) or rank(S) == 0
    for w in enumerate_walls(S):
        if w.index != h.wall and w.splits(bmask):
            assert relation_of_masks(h.mask, w.sides[0], S.full) is Relation.TRANSVERSE


@given(spaces())
def test_halfspaces_convex_with_convex_complement(S):
    for h in halfspaces(S):
        assert h.mask and h.mask != S.full
        assert is_convex(S, h.members) and is_convex(S, h.complement().members)
