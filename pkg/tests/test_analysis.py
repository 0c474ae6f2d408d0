from fractions import Fraction

import pytest
from conftest import grid_pts
from hypothesis import given, strategies as st
from oracles import Oracle, grid_halfspaces, profile_value
from strategies import spaces

from medianspace import (
    BadParams, PrecondViolated, TooLargeForBruteForce, Verdict, automorphism_group,
    branch_approx_check, compactness_profile, cover_bound_check, halfspace_of,
    interval_cover_check, rigidity_detect, stabilizer_orbit, stabilizer_wall_check,
)
from medianspace import fixtures as F
from medianspace.analysis import max_disjoint_family, orbit_report
from medianspace.halfspaces import Relation, halfspaces, relation_of_masks

EPS = [Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2)]


def star_halfspaces(S):
    leaves = [frozenset({p}) for p in S.points if p != "c"]
    return leaves + [frozenset(S.points) - h for h in leaves]


# -- compactness profile -------------------------------------------------------------


def test_grid_profile_matches_oracle():
    G = F.grid(4)
    oracle = Oracle.of(G)
    expected = [profile_value(oracle, grid_halfspaces(4), G.points, e) for e in EPS]
    assert expected == [2, 2, 2, 1]
    prof = compactness_profile(G, G.points, EPS)
    assert [prof.N(e) for e in EPS] == expected
    assert prof.monotone


def test_weighted_star_profile():
    S = F.weighted_star(20)
    assert profile_value(Oracle.of(S), star_halfspaces(S), S.points, Fraction(1, 10)) == 9
    assert compactness_profile(S, S.points, [Fraction(1, 10)]).N(Fraction(1, 10)) == 9


def test_single_point_profile_is_zero():
    P = F.path(1)
    assert compactness_profile(P, P.points, [Fraction(1, 10)]).N(Fraction(1, 10)) == 0


@pytest.mark.parametrize("K,expected", [(5, 5), (10, 9), (20, 9), (40, 9)])
def test_star_truncations_at_fixed_scale(K, expected):
    S = F.weighted_star(K)
    assert compactness_profile(S, S.points, [Fraction(1, 10)]).N(Fraction(1, 10)) == expected


@pytest.mark.parametrize("K", [5, 10, 20, 40])
def test_star_profile_grows_as_scale_shrinks(K):
    S = F.weighted_star(K)
    eps = Fraction(1, K + 1)
    assert compactness_profile(S, S.points, [eps]).N(eps) == K


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_grid_profiles_stay_bounded(k):
    G = F.grid(k)
    prof = compactness_profile(G, G.points, EPS)
    assert max(n for _, n in prof.entries) <= 2


@given(st.sampled_from(["path:4", "star:3", "substar", "hypercube:3", "grid:2", "weighted_star:5",
                        "star:2*path:3"]),
       st.sampled_from(EPS + [Fraction(0)]))
def test_profile_matches_oracle_on_small_spaces(spec, eps):
    S = F.parse_fixture(spec)
    oracle = Oracle.of(S)
    assert compactness_profile(S, S.points, [eps]).N(eps) == \
        profile_value(oracle, oracle.bipartitions(), S.points, eps)


@given(spaces())
def test_profile_monotone(S):
    assert compactness_profile(S, S.points, EPS).monotone


def test_max_disjoint_family_shrinks_to_minimal():
    P = F.path(4)
    fam = max_disjoint_family(halfspaces(P))
    assert len(fam) == 2
    assert {h.members for h in fam} == {frozenset({"v1"}), frozenset({"v4"})}


# -- interval covers -------------------------------------------------------------------


def test_path_cover():
    P = F.path(4)
    assert interval_cover_check(P, P.points, "v1", 0) == (1, ["v4"])


def test_star_cover():
    S = F.star(3)
    k, ends = interval_cover_check(S, S.points, "c", 0)
    assert k == 3 and set(ends) == {"v1", "v2", "v3"}


def test_grid_cover():
    G = F.grid(2)
    assert interval_cover_check(G, G.points, "0,0", 0) == (1, ["2,2"])


def test_cover_needs_base_in_set():
    with pytest.raises(BadParams):
        interval_cover_check(F.path(4), {"v2", "v3"}, "v1", 0)


@given(spaces(), st.data(), st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1)]))
def test_cover_is_a_cover(S, data, eps):
    x0 = data.draw(st.sampled_from(S.points))
    oracle = Oracle.of(S)
    k, ends = interval_cover_check(S, S.points, x0, eps)
    covered = set().union(*(oracle.interval(x0, e) for e in ends))
    assert all(oracle.dist_to_set(x, covered) <= eps for x in S.points)
    assert cover_bound_check(S, S.points, x0, eps).ok


# -- branch approximation ---------------------------------------------------------------


def test_path_prefix_is_its_own_hull():
    P = F.path(8)
    rep = branch_approx_check(P, halfspace_of(P, {f"v{i}" for i in range(5, 9)}), 1)
    assert rep.ok and rep.checks[0].numbers["hausdorff"] == 0


def test_grid_half_plane():
    G = F.grid(4)
    rep = branch_approx_check(G, halfspace_of(G, grid_pts(range(2, 5), range(5))), 2)
    numbers = rep.checks[0].numbers
    assert rep.ok and numbers["hausdorff"] < numbers["bound"]


@pytest.mark.parametrize("leaf", ["v1", "v2", "v3"])
def test_star_leaf_branch(leaf):
    S = F.weighted_star(3)
    rep = branch_approx_check(S, halfspace_of(S, {leaf}), Fraction(1, 3))
    assert rep.ok and rep.checks[0].numbers["hausdorff"] == 0


def test_branching_halfspace_rejected():
    S = F.substar(3, 4)
    h = next(h for h in halfspaces(S) if "c" in h and "i1_1" not in h)
    with pytest.raises(PrecondViolated):
        branch_approx_check(S, h, 1)


# -- rigidity --------------------------------------------------------------------------


def test_grid_center_is_grid_like():
    G = F.grid(2)
    v = rigidity_detect(G, "1,1")
    assert v.verdict is Verdict.GRID_LIKE
    assert set(v.lines) == {frozenset(grid_pts((1,), range(3))), frozenset(grid_pts(range(3), (1,)))}
    assert v.verify(G)


def test_star_times_path_branches():
    S = F.parse_fixture("star:3*path:3")
    v = rigidity_detect(S, "c|v2")
    assert v.verdict is Verdict.BRANCHING
    legs = {frozenset(f"v{i}|v{j}" for j in (1, 2, 3)) for i in (1, 2, 3)}
    assert {h.members for h in v.triple.halfspaces} == legs
    assert v.verify(S)


@pytest.mark.parametrize("x0", ["000", "101", "111"])
def test_hypercube_is_grid_like(x0):
    Q = F.hypercube(3)
    v = rigidity_detect(Q, x0)
    assert v.verdict is Verdict.GRID_LIKE
    assert len(v.lines) == 3 and all(len(line) == 2 for line in v.lines)
    assert v.verify(Q)


@given(spaces(), st.data())
def test_verdicts_reverify(S, data):
    x0 = data.draw(st.sampled_from(S.points))
    assert rigidity_detect(S, x0).verify(S)


# -- automorphisms -----------------------------------------------------------------


def test_hypercube_group():
    Q = F.hypercube(3)
    oracle = Oracle.of(Q)
    auts = oracle.automorphisms()
    G = automorphism_group(Q)
    assert G.order == len(auts) == 48
    assert G.stabilizer("000").order == 6
    orbit = stabilizer_orbit(Q, G, "000", "011")
    assert orbit == {g["011"] for g in auts if g["000"] == "000"} == {"011", "101", "110"}


def test_path_group():
    assert automorphism_group(F.path(4)).order == 2


def test_star_stabilizer_permutes_leaves():
    S = F.star(3)
    G = automorphism_group(S)
    assert G.stabilizer("c").order == 6
    assert stabilizer_orbit(S, G, "c", "v1") == {"v1", "v2", "v3"}


def test_group_closed_under_composition_and_inverse():
    G = automorphism_group(F.grid(2))
    elems = set(G.elements)
    for g in G.elements:
        inv = tuple(sorted(range(len(g)), key=g.__getitem__))
        assert inv in elems
        for h in G.elements[:4]:
            assert tuple(g[h[i]] for i in range(len(g))) in elems


def test_generated_group_matches_brute_force():
    Q = F.hypercube(3)
    swap = {p: p[1] + p[0] + p[2] for p in Q.points}
    cycle = {p: p[2] + p[0] + p[1] for p in Q.points}
    flip = {p: str(1 - int(p[0])) + p[1:] for p in Q.points}
    gens = [tuple(g[p] for p in Q.points) for g in (swap, cycle, flip)]
    assert automorphism_group(Q, generators=gens).order == 48


def test_large_space_needs_generators():
    with pytest.raises(TooLargeForBruteForce):
        automorphism_group(F.grid(4))


def _as_perm(S, mapping):
    return tuple(S.index[mapping[p]] for p in S.points)


def test_coordinate_cycle_moves_halfspace_transversally():
    Q = F.hypercube(3)
    G = automorphism_group(Q)
    cycle = _as_perm(Q, {p: p[2] + p[0] + p[1] for p in Q.points})
    h = halfspace_of(Q, {p for p in Q.points if p[0] == "1"})
    image = G.act(cycle, h.mask)
    assert Q.labels(image) == {p for p in Q.points if p[1] == "1"}
    assert relation_of_masks(h.mask, image, Q.full) is Relation.TRANSVERSE


def test_leaf_swap_moves_halfspace_disjointly():
    S = F.star(3)
    G = automorphism_group(S)
    swap = _as_perm(S, {"c": "c", "v1": "v2", "v2": "v1", "v3": "v3"})
    h = halfspace_of(S, {"v1"})
    assert relation_of_masks(h.mask, G.act(swap, h.mask), S.full) is Relation.DISJOINT


def test_identity_fixes_every_halfspace():
    S = F.substar()
    G = automorphism_group(S)
    ident = tuple(range(S.n))
    assert all(G.act(ident, h.mask) == h.mask for h in halfspaces(S))


@pytest.mark.parametrize("spec", ["hypercube:3", "star:3", "grid:2", "path:4", "substar",
                                  "weighted_star:5", "cycle:4"])
def test_stabilizers_never_nest(spec):
    S = F.parse_fixture(spec)
    G = automorphism_group(S)
    for x0 in S.points:
        assert stabilizer_wall_check(S, G, x0).ok
        assert orbit_report(S, G, x0).ok
