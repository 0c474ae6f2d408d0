"""The acceptance suite: one check per criterion, runnable from the CLI or pytest."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import analysis, duality, fixtures, halfspaces as hs, structure
from .errors import NonMedian
from .report import Check, Report, check
from .space import MedianSpace, ensure_valid, validate_space


@dataclass
class VerifyConfig:
    seed: int = 0
    random_spaces: int = 200
    random_dim: tuple[int, int] = (3, 6)
    contravariance_pairs: int = 20
    refine: int = 3  # eps-grids of [0,1]^2 at 2, 4, ..., 2**refine
    hull_eps: tuple = (Fraction(1), Fraction(1, 2), Fraction(1, 4))
    hull_radii: tuple = (Fraction(1, 2), Fraction(1))
    grid_sizes: tuple[int, ...] = (4, 8, 16)
    star_sizes: tuple[int, ...] = (100, 150)
    profile_eps: tuple = (Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(2))
    deep_spacings: tuple = (Fraction(1), Fraction(1, 2), Fraction(1, 4))
    deep_sample: int = 8  # pairs checked at the finest spacing
    embed_per_fixture: int = 12
    mis_families: int = 50
    mis_max: int = 20
    time_limits: dict = field(default_factory=lambda: {1: 30.0, 2: 60.0, 9: 120.0})

    @property
    def refinements(self) -> list[int]:
        return [2**k for k in range(1, self.refine + 1)]


def random_spaces(cfg: VerifyConfig) -> list[MedianSpace]:
    lo, hi = cfg.random_dim
    out = []
    for k in range(cfg.random_spaces):
        rng = np.random.default_rng([cfg.seed, k])
        dim = int(rng.integers(lo, hi + 1))
        out.append(fixtures.random_median_graph(rng, dim=dim))
    return out


def _timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


# -- 1 -------------------------------------------------------------------------------


def criterion_median_validity(cfg: VerifyConfig) -> Check:
    def run():
        failed = []
        spaces = list(fixtures.corpus().items()) + [(S.name, S) for S in random_spaces(cfg)]
        for name, S in spaces:
            try:
                validate_space(S)
            except NonMedian as exc:
                failed.append((name, exc.witness))
        rejected = {}
        for S in (fixtures.cycle(5), fixtures.k4_minus_edge()):
            try:
                validate_space(S)
                rejected[S.name] = None
            except NonMedian as exc:
                rejected[S.name] = exc.witness
        return failed, rejected, len(spaces)

    (failed, rejected, count), secs = _timed(run)
    ok = not failed and all(w is not None for w in rejected.values()) and secs < cfg.time_limits[1]
    return check("1 median validity", "|[a,b] ∩ [b,c] ∩ [a,c]| = 1", ok,
                 witness={"failed": failed, "rejections": rejected, "seconds": round(secs, 2)},
                 spaces=count, rejections=rejected, time_limit=cfg.time_limits[1])


# -- 2 -------------------------------------------------------------------------------


def criterion_duality(cfg: VerifyConfig) -> Check:
    def run():
        bad = []
        spaces = list(fixtures.corpus().items()) + [(S.name, S) for S in random_spaces(cfg)]
        for name, S in spaces:
            rep = duality.roundtrip_check(S)
            if not rep.ok:
                bad.append((name, [c.name for c in rep.failures()]))
        return bad, len(spaces)

    (bad, count), secs = _timed(run)
    ok = not bad and secs < cfg.time_limits[2]
    return check("2 duality roundtrip", duality.ANCHOR_DUALITY, ok,
                 witness={"failed": bad, "seconds": round(secs, 2)},
                 spaces=count, time_limit=cfg.time_limits[2])


# -- 3 -------------------------------------------------------------------------------


def criterion_contravariance(cfg: VerifyConfig) -> Check:
    bad = []
    small = ["path:2", "path:3", "path:4", "star:3", "hypercube:2", "substar", "weighted_star:3"]
    for k in range(cfg.contravariance_pairs):
        rng = np.random.default_rng([cfg.seed, 1000 + k])
        pick = []
        for _ in range(2):
            if rng.random() < 0.5:
                pick.append(fixtures.parse_fixture(small[int(rng.integers(len(small)))]))
            else:
                pick.append(fixtures.random_median_graph(rng, dim=int(rng.integers(2, 5)), seeds=3))
        rep = duality.contravariance_check(duality.pocset_of(pick[0]), duality.pocset_of(pick[1]))
        if not rep.ok:
            bad.append((pick[0].name, pick[1].name))
    return check("3 contravariance", duality.ANCHOR_PRODUCT, not bad, witness=bad,
                 pairs=cfg.contravariance_pairs)


# -- 4 -------------------------------------------------------------------------------


def criterion_metric_measure(cfg: VerifyConfig) -> Check:
    bad, pairs = [], 0
    for name, S in fixtures.corpus().items():
        walls = hs.enumerate_walls(S)
        for i in range(S.n):
            for j in range(i, S.n):
                pairs += 1
                mu = sum((w.weight for w in walls if w.side_of(i) != w.side_of(j)), Fraction(0))
                if mu != S.dist(i, j):
                    bad.append((name, S.points[i], S.points[j]))
    return check("4 metric-measure", "μ(W(x,y)) = d(x,y)", not bad, witness=bad[:5], pairs=pairs)


# -- 5 -------------------------------------------------------------------------------


def criterion_hull_bound(cfg: VerifyConfig) -> Check:
    bad, cases = [], 0

    def run(S, C, r, label):
        nonlocal cases
        cases += 1
        rep = structure.hull_neighborhood_check(S, C, r)
        if not rep.ok:
            bad.append((label, rep.checks[0].numbers))
        return rep

    for name, S in fixtures.corpus().items():
        for r in (Fraction(0), S.max_edge_weight, 2 * S.max_edge_weight):
            for p in S.points[:: max(1, S.n // 6)]:
                run(S, [p], r, f"{name} {p} r={r}")
    for eps in cfg.hull_eps:
        B = fixtures.eps_ball(2, 2, eps)
        origin = ",".join(["0"] * 2)
        for r in cfg.hull_radii:
            run(B, [origin], r, f"{B.name} r={r}")
    G = fixtures.grid(4)
    tight = run(G, ["2,2"], 2, "GRID(4) tightness").checks[0].numbers
    ok = not bad and tight["tight"] and tight["max_distance"] == 4
    return check("5 hull bound", structure.A_HULL, ok, witness=bad[:5], cases=cases,
                 tightness=tight)


# -- 6 -------------------------------------------------------------------------------


def convex_candidates(S: MedianSpace, rng) -> list[int]:
    cands = {1 << i for i in range(S.n)}
    cands |= {h.mask for h in hs.halfspaces(S)}
    pairs = list(combinations(range(S.n), 2))
    rng.shuffle(pairs)
    for i, j in pairs[: 4 * S.n]:
        cands.add(S.interval_mask(i, j))
    return sorted(cands)


def strongly_separated_pairs(S: MedianSpace, limit: int, rng) -> list[tuple[int, int]]:
    walls = hs.enumerate_walls(S)
    cands = convex_candidates(S, rng)
    split = {m: {w.index for w in walls if w.splits(m)} for m in cands}
    found = []
    order = list(combinations(range(len(cands)), 2))
    rng.shuffle(order)
    for a, b in order:
        m1, m2 = cands[a], cands[b]
        if m1 & m2 or split[m1] & split[m2]:
            continue
        found.append((m1, m2))
        if len(found) >= limit:
            break
    return found


def criterion_embedding(cfg: VerifyConfig) -> Check:
    bad, total, by_fixture = [], 0, {}
    for name, S in fixtures.corpus().items():
        rng = np.random.default_rng([cfg.seed, 6])
        pairs = strongly_separated_pairs(S, cfg.embed_per_fixture, rng)
        by_fixture[name] = len(pairs)
        for m1, m2 in pairs:
            total += 1
            if not structure.embed_check(S, m1, m2).ok:
                bad.append((name, sorted(S.labels(m1)), sorted(S.labels(m2))))
                continue
            hull, _ = S.hull_mask(m1 | m2)
            pts = [S.points[i] for i in S.indices(hull)]
            picks = [(pts[0], pts[-1])] + [
                (pts[int(rng.integers(len(pts)))], pts[int(rng.integers(len(pts)))]) for _ in range(3)
            ]
            for x, y in picks:
                if not structure.wall_decomposition_check(S, m1, m2, x, y).ok:
                    bad.append((name, "decomposition", x, y))
    needed = ("substar", "star:3*path:3", "substar*path:2")
    ok = not bad and total >= 50 and all(by_fixture.get(k, 0) > 0 for k in needed)
    return check("6 strongly separated embedding", structure.A_EMBED, ok, witness=bad[:5], pairs=total,
                 per_fixture=by_fixture)


# -- 7 -------------------------------------------------------------------------------


def criterion_profile(cfg: VerifyConfig) -> tuple[Check, list[Check]]:
    eps10, eps100 = Fraction(1, 10), Fraction(1, 100)
    parts = []
    grid_values = {}
    monotone = True
    for k in cfg.grid_sizes:
        G = fixtures.grid(k)
        prof = analysis.compactness_profile(G, G.points, cfg.profile_eps)
        grid_values[k] = prof.N(eps10)
        monotone &= prof.monotone
    parts.append(check("7a GRID(k) N(1/10) = 4", analysis.A_PROFILE,
                       all(v == 4 for v in grid_values.values()), witness=grid_values,
                       values=grid_values))
    star_values = {}
    for K in cfg.star_sizes:
        W = fixtures.weighted_star(K)
        prof = analysis.compactness_profile(W, W.points, cfg.profile_eps)
        star_values[K] = (prof.N(eps10), prof.N(eps100))
        monotone &= prof.monotone
    parts.append(check("7b weighted star N(1/10) = 9, N(1/100) = 99", analysis.A_PROFILE,
                       all(v == (9, 99) for v in star_values.values()), witness=star_values,
                       values=star_values))
    for spec in fixtures.CORPUS:
        S = fixtures.parse_fixture(spec)
        monotone &= analysis.compactness_profile(S, S.points, cfg.profile_eps).monotone
    parts.append(check("7c profiles monotone in eps", analysis.A_PROFILE, monotone))
    ok = all(c.passed for c in parts)
    return check("7 compactness dichotomy", analysis.A_PROFILE, ok,
                 witness=[c.name for c in parts if not c.passed], grid=grid_values,
                 star=star_values), parts


# -- 8 -------------------------------------------------------------------------------


def criterion_deep_family(cfg: VerifyConfig) -> Check:
    bad, done = [], {}
    eps = Fraction(1)
    for k, spacing in enumerate(cfg.deep_spacings):
        B = fixtures.eps_ball(2, 4, spacing)
        far = [(i, j) for i in range(B.n) for j in range(i + 1, B.n) if B.dist(i, j) == 8]
        if k == len(cfg.deep_spacings) - 1 and len(far) > cfg.deep_sample:
            rng = np.random.default_rng([cfg.seed, 8])
            far = [far[t] for t in sorted(rng.choice(len(far), cfg.deep_sample, replace=False))]
        done[str(spacing)] = len(far)
        for i, j in far:
            a, b = B.points[i], B.points[j]
            try:
                fam = structure.deep_transverse_family(B, a, b, eps, delta=spacing)
            except Exception as exc:  # reported as a falsification candidate
                bad.append((B.name, a, b, type(exc).__name__))
                continue
            if not structure.verify_deep_family(B, a, b, fam).ok:
                bad.append((B.name, a, b, "certificate"))
    return check("8 deep transverse families", "d(a, ∩h_i) ≥ d(a,b) - 3·eps - δ", not bad,
                 witness=bad[:5], pairs=done)


# -- 9 -------------------------------------------------------------------------------


def rigidity_cases(cfg: VerifyConfig):
    grid_like = [
        (fixtures.hypercube(3), "000"),
        (fixtures.hypercube(4), "0000"),
        (fixtures.grid(2), "1,1"),
        (fixtures.grid(4), "2,2"),
    ] + [(fixtures.eps_grid(L), "1/2,1/2") for L in cfg.refinements]
    branching = [
        (fixtures.star(3), "c"),
        (fixtures.parse_fixture("star:3*path:3"), "c|v2"),
        (fixtures.weighted_star(20), "c"),
    ]
    return grid_like, branching


def criterion_rigidity(cfg: VerifyConfig) -> Check:
    def run():
        bad, seen = [], {}
        grid_like, branching = rigidity_cases(cfg)
        for expected, cases in ((analysis.Verdict.GRID_LIKE, grid_like),
                                (analysis.Verdict.BRANCHING, branching)):
            for S, x0 in cases:
                v = analysis.rigidity_detect(S, x0)
                seen[S.name] = v.verdict.value
                witnessed = v.triple is not None if expected is analysis.Verdict.BRANCHING else True
                if v.verdict is not expected or not witnessed or not v.verify(S):
                    bad.append((S.name, v.verdict.value, list(v.defects)))
        return bad, seen

    (bad, seen), secs = _timed(run)
    ok = not bad and secs < cfg.time_limits[9]
    return check("9 rigidity detector", analysis.A_RIGID, ok, verdicts=seen,
                 witness={"failed": bad, "seconds": round(secs, 2)}, time_limit=cfg.time_limits[9])


# -- 10 ------------------------------------------------------------------------------


def brute_force_max_disjoint(masks: list[int]) -> int:
    """Largest pairwise-disjoint subfamily, by a table over all 2^k subfamilies."""
    k = len(masks)
    conflict = np.zeros(k, dtype=np.int64)
    for i, j in combinations(range(k), 2):
        if masks[i] & masks[j]:
            conflict[i] |= 1 << j
            conflict[j] |= 1 << i
    ok = np.zeros(1 << k, dtype=bool)
    ok[0] = True
    for b in range(k):
        lo = np.arange(1 << b, dtype=np.int64)
        ok[(1 << b) : (1 << (b + 1))] = ok[: 1 << b] & ((lo & conflict[b]) == 0)
    sizes = np.bitwise_count(np.flatnonzero(ok))
    return int(sizes.max())


def random_family(S: MedianSpace, size: int, rng) -> list:
    """Halfspaces of S, pairwise disjoint or transverse, drawn at random."""
    pool = hs.halfspaces(S)
    order = rng.permutation(len(pool))
    fam = []
    for t in order:
        h = pool[int(t)]
        rels = [hs.classify_pair(h, g) for g in fam]
        if all(r in (hs.Relation.DISJOINT, hs.Relation.COMPLEMENTARY, hs.Relation.TRANSVERSE) for r in rels):
            fam.append(h)
        if len(fam) == size:
            break
    return fam


def criterion_stabilizers(cfg: VerifyConfig) -> Check:
    bad = []
    for spec in ("hypercube:3", "star:3", "grid:2"):
        S = fixtures.parse_fixture(spec)
        G = analysis.automorphism_group(S)
        for x0 in S.points:
            if not analysis.stabilizer_wall_check(S, G, x0).ok:
                bad.append((spec, x0))
            for x in S.points:
                analysis.stabilizer_orbit(S, G, x0, x)
    Q = fixtures.hypercube(3)
    orbit = analysis.stabilizer_orbit(Q, analysis.automorphism_group(Q), "000", "011")
    if orbit != {"011", "101", "110"}:
        bad.append(("orbit", sorted(orbit)))
    pool = ["weighted_star:20", "star:3*path:3", "substar*path:2", "grid:4", "hypercube:4",
            "path:3*path:3*path:2"]
    sizes = []
    for k in range(cfg.mis_families):
        rng = np.random.default_rng([cfg.seed, 10, k])
        S = fixtures.parse_fixture(pool[k % len(pool)])
        fam = random_family(S, int(rng.integers(1, cfg.mis_max + 1)), rng)
        got = hs.extract_disjoint_family(fam)
        want = brute_force_max_disjoint([h.mask for h in fam])
        sizes.append(len(fam))
        disjoint = all(not (a.mask & b.mask) for a, b in combinations(got, 2))
        if len(got) != want or not disjoint:
            bad.append(("family", k, len(got), want))
    return check("10 stabilizers, orbits, disjoint families", analysis.A_STAB, not bad,
                 witness=bad[:5], orbit=sorted(orbit), families=len(sizes),
                 largest_family=max(sizes))


CRITERIA = {
    1: criterion_median_validity,
    2: criterion_duality,
    3: criterion_contravariance,
    4: criterion_metric_measure,
    5: criterion_hull_bound,
    6: criterion_embedding,
    7: lambda cfg: criterion_profile(cfg)[0],
    8: criterion_deep_family,
    9: criterion_rigidity,
    10: criterion_stabilizers,
}


def verify_all(cfg: VerifyConfig | None = None, only=None) -> Report:
    cfg = cfg or VerifyConfig()
    rep = Report("verify-all")
    for k, fn in CRITERIA.items():
        if only is None or k in only:
            rep.add(fn(cfg))
    return rep
