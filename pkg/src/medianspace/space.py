"""Finite median spaces: metric, intervals, medians, convexity and gates.

Point subsets are handled internally as Python int bitmasks (bit ``i`` is
``points[i]``); the public functions take and return point labels.
Distances are exact: every distance is stored as an integer multiple of
``1/scale`` where ``scale`` is the common denominator of the edge weights.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import BadParams, Disconnected, NonMedian, NonPositiveWeight
from .rational import common_denominator

_FLOAT_EXACT = 2**53


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


class MedianSpace:
    """A finite point set with an exact metric, in graph or table form.

    Graph form: a connected graph with positive rational edge weights and its
    shortest-path metric.  Table form: an explicit ternary median map; its
    metric counts separating walls (the covering graph with unit weights).
    """

    def __init__(self, points, edges, *, table=None, name=""):
        points = tuple(str(p) for p in points)
        if not points:
            raise BadParams("a median space needs at least one point")
        if len(set(points)) != len(points):
            raise BadParams("duplicate point ids")
        self.points = points
        self.index = {p: i for i, p in enumerate(points)}
        self.n = len(points)
        self.name = name
        self.form = "graph" if table is None else "table"
        self._table = table
        self._cache = {}

        norm = {}
        for u, v, w in edges:
            try:
                i, j = self.index[str(u)], self.index[str(v)]
            except KeyError as exc:
                raise BadParams(f"edge endpoint {exc.args[0]!r} is not a point") from None
            if i == j:
                raise BadParams(f"self-loop at {points[i]!r}")
            w = Fraction(w)
            if w <= 0:
                raise NonPositiveWeight(f"edge {points[i]}-{points[j]} has weight {w}")
            key = (min(i, j), max(i, j))
            if key in norm and norm[key] != w:
                raise BadParams(f"parallel edges {points[i]}-{points[j]} with different weights")
            norm[key] = w
        self.edges = tuple((i, j, w) for (i, j), w in sorted(norm.items()))
        self.scale = common_denominator(w for _, _, w in self.edges)
        self._dist = self._all_pairs()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_graph(cls, points, edges, name=""):
        return cls(points, edges, name=name)

    @classmethod
    def from_table(cls, points, rows, name=""):
        """Build from median rows ``(a, b, c, m)``; rows are symmetrised."""
        points = tuple(str(p) for p in points)
        index = {p: i for i, p in enumerate(points)}
        n = len(points)
        table = np.full((n, n, n), -1, dtype=np.int32)
        for row in rows:
            try:
                a, b, c, m = (index[str(x)] for x in row)
            except KeyError as exc:
                raise BadParams(f"median row mentions unknown point {exc.args[0]!r}") from None
            for x, y, z in ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
                if table[x, y, z] not in (-1, m):
                    raise NonMedian(
                        "median table is not symmetric",
                        witness=(points[a], points[b], points[c]),
                        axiom="symmetry",
                    )
                table[x, y, z] = m
        missing = np.argwhere(table < 0)
        if missing.size:
            a, b, c = (points[int(t)] for t in missing[0])
            raise NonMedian("median table is not total", witness=(a, b, c), axiom="totality")
        ar = np.arange(n)
        bad = np.argwhere(table[ar, ar, :] != ar[:, None])
        if bad.size:
            a, b = (points[int(t)] for t in bad[0])
            raise NonMedian("m(x,x,y) != x", witness=(a, a, b), axiom="majority")
        edges = []
        for a in range(n):
            for b in range(a + 1, n):
                if np.count_nonzero(table[a, b] == ar) == 2:
                    edges.append((points[a], points[b], 1))
        return cls(points, edges, table=table, name=name)

    def _all_pairs(self):
        n = self.n
        wts = [(i, j, int(w * self.scale)) for i, j, w in self.edges]
        total = sum(w for _, _, w in wts)
        if total < _FLOAT_EXACT:
            rows = [i for i, _, _ in wts] + [j for _, j, _ in wts]
            cols = [j for _, j, _ in wts] + [i for i, _, _ in wts]
            vals = [float(w) for *_, w in wts] * 2
            graph = csr_matrix((vals, (rows, cols)), shape=(n, n))
            dist = shortest_path(graph, method="D", directed=False)
            if np.isinf(dist).any():
                raise Disconnected(f"{self.name or 'space'} is not connected")
            return np.rint(dist).astype(np.int64)
        adj = [[] for _ in range(n)]
        for i, j, w in wts:
            adj[i].append((j, w))
            adj[j].append((i, w))
        dtype = np.int64 if total < 2**60 else object
        out = np.zeros((n, n), dtype=dtype)
        for s in range(n):
            dist = {s: 0}
            heap = [(0, s)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                for v, w in adj[u]:
                    nd = d + w
                    if nd < dist.get(v, nd + 1):
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v))
            if len(dist) != n:
                raise Disconnected(f"{self.name or 'space'} is not connected")
            for v, d in dist.items():
                out[s, v] = d
        return out

    # -- point sets --------------------------------------------------------

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def nbytes(self) -> int:
        # whole 64-bit words, so interval rows can be viewed as uint64
        return (self.n + 63) // 64 * 8

    def mask(self, A) -> int:
        """Bitmask of a point label, an iterable of labels, or anything with ``.mask``."""
        if isinstance(A, int) and not isinstance(A, bool):
            return A
        if hasattr(A, "mask"):
            return A.mask
        if isinstance(A, str):
            return 1 << self.index[A]
        out = 0
        for p in A:
            out |= 1 << self.index[p]
        return out

    def labels(self, mask: int) -> frozenset:
        return frozenset(self.points[i] for i in iter_bits(mask))

    def indices(self, mask: int) -> np.ndarray:
        return np.flatnonzero(self.to_bool(mask))

    def to_bool(self, mask: int) -> np.ndarray:
        raw = np.frombuffer(mask.to_bytes(self.nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n].astype(bool)

    def from_bool(self, arr) -> int:
        return int.from_bytes(np.packbits(np.asarray(arr, bool), bitorder="little").tobytes(), "little")

    def from_indices(self, idx) -> int:
        out = 0
        for i in idx:
            out |= 1 << int(i)
        return out

    # -- metric ------------------------------------------------------------

    def d(self, a, b) -> Fraction:
        return Fraction(int(self._dist[self.index[a], self.index[b]]), self.scale)

    def dist(self, i: int, j: int) -> Fraction:
        return Fraction(int(self._dist[i, j]), self.scale)

    def scaled(self, q) -> int:
        """``q`` in units of ``1/scale``; raises when not representable."""
        q = Fraction(q) * self.scale
        if q.denominator != 1:
            raise ValueError(f"{q / self.scale} is not a multiple of 1/{self.scale}")
        return q.numerator

    def unscaled(self, v) -> Fraction:
        return Fraction(int(v), self.scale)

    @cached_property
    def max_edge_weight(self) -> Fraction:
        return max((w for *_, w in self.edges), default=Fraction(0))

    def dist_to_set(self, mask: int) -> np.ndarray:
        """Scaled distance from every point to the point set ``mask``."""
        if not mask:
            raise BadParams("distance to the empty set")
        return self._dist[:, self.indices(mask)].min(axis=1)

    def gate_array(self, cmask: int) -> np.ndarray:
        """Nearest point of the convex set ``cmask`` for every point."""
        idx = self.indices(cmask)
        if idx.size == 0:
            raise BadParams("projection onto the empty set")
        sub = self._dist[:, idx]
        if sub.dtype == object:
            arg = np.array([min(range(len(idx)), key=row.__getitem__) for row in sub])
        else:
            arg = sub.argmin(axis=1)
        return idx[arg]

    # -- intervals and medians ---------------------------------------------

    def _intervals(self) -> np.ndarray:
        """Packed table: bit x of ``T[a, b]`` set iff x lies in [a, b]."""
        T = self._cache.get("intervals")
        if T is None:
            n, D = self.n, self._dist
            T = np.zeros((n, n, self.nbytes), dtype=np.uint8)
            for a in range(n):
                B = np.asarray((D[a][None, :] + D) == D[a][:, None], dtype=bool)
                T[a, :, : (n + 7) // 8] = np.packbits(B, axis=1, bitorder="little")
            self._cache["intervals"] = T
        return T

    def interval_mask(self, i: int, j: int) -> int:
        return int.from_bytes(self._intervals()[i, j].tobytes(), "little")

    def median_index(self, i: int, j: int, k: int) -> int:
        if self._table is not None:
            return int(self._table[i, j, k])
        T = self._intervals()
        X = T[i, j] & T[j, k] & T[i, k]
        m = int.from_bytes(X.tobytes(), "little")
        if m == 0 or m & (m - 1):
            raise NonMedian(
                "triple has no unique median",
                witness=(self.points[i], self.points[j], self.points[k]),
            )
        return m.bit_length() - 1

    def median_array(self, i: int, j: int) -> np.ndarray:
        """``m(i, j, y)`` for every point y, i.e. the gate onto [i, j]."""
        if self._table is not None:
            return np.asarray(self._table[i, j], dtype=np.int64)
        T = self._intervals()
        X = T[i, j][None, :] & T[i] & T[j]
        bits = np.unpackbits(X, axis=1, bitorder="little")[:, : self.n]
        return bits.argmax(axis=1)

    def join_mask(self, amask: int, bmask: int) -> int:
        ia, ib = self.indices(amask), self.indices(bmask)
        if ia.size == 0 or ib.size == 0:
            raise BadParams("join of an empty set")
        T = self._intervals()
        acc = np.zeros(self.nbytes, dtype=np.uint8)
        step = max(1, 2_000_000 // max(1, ib.size * self.nbytes))
        for s in range(0, ia.size, step):
            block = T[np.ix_(ia[s : s + step], ib)]
            acc |= np.bitwise_or.reduce(block.reshape(-1, self.nbytes), axis=0)
        return int.from_bytes(acc.tobytes(), "little")

    def hull_mask(self, mask: int) -> tuple[int, int]:
        """Iterate the join to its fixpoint; returns (hull, iterations that grew it)."""
        if not mask:
            raise BadParams("convex hull of the empty set")
        steps = 0
        while True:
            nxt = self.join_mask(mask, mask)
            if nxt == mask:
                return mask, steps
            mask = nxt
            steps += 1

    def is_convex_mask(self, mask: int) -> bool:
        return bool(mask) and self.join_mask(mask, mask) == mask

    # -- misc ----------------------------------------------------------------

    def neighbors(self, i: int):
        return [(j, w) for j, w in self._adjacency[i]]

    @cached_property
    def _adjacency(self):
        adj = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        return adj

    def to_dict(self) -> dict:
        """Canonical plain-data form (see :mod:`medianspace.fileio`)."""
        from .rational import format_rational

        out = {"version": 1, "kind": self.form, "points": list(self.points)}
        if self.form == "graph":
            out["edges"] = [
                {"u": self.points[i], "v": self.points[j], "weight": format_rational(w)}
                for i, j, w in self.edges
            ]
        else:
            rows = []
            n = self.n
            for a in range(n):
                for b in range(a, n):
                    for c in range(b, n):
                        rows.append([self.points[a], self.points[b], self.points[c],
                                     self.points[int(self._table[a, b, c])]])
            out["medians"] = rows
        return out

    def __eq__(self, other):
        if not isinstance(other, MedianSpace):
            return NotImplemented
        if self.points != other.points or self.edges != other.edges or self.form != other.form:
            return False
        if self.form == "table":
            return bool(np.array_equal(self._table, other._table))
        return True

    def __hash__(self):
        return hash((self.points, self.edges))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<MedianSpace{label}: {self.n} points, {len(self.edges)} edges, {self.form}>"

    def convex(self, A) -> "ConvexSet":
        mask = self.mask(A)
        if not self.is_convex_mask(mask):
            raise BadParams("point set is not convex")
        return ConvexSet(self, mask)


@dataclass(frozen=True)
class ConvexSet:
    space: MedianSpace = field(repr=False, compare=False)
    mask: int

    @property
    def members(self) -> frozenset:
        return self.space.labels(self.mask)

    def __iter__(self):
        return iter(sorted(self.members, key=self.space.index.__getitem__))

    def __len__(self):
        return popcount(self.mask)

    def __contains__(self, p):
        return bool(self.mask >> self.space.index[p] & 1)


@dataclass(frozen=True)
class Diagnostics:
    form: str
    points: int
    triples_checked: int
    status: str = "pass"


def validate_space(S: MedianSpace) -> Diagnostics:
    """Check the median property; raises :class:`NonMedian` with a witness triple.

    Connectivity and positive weights are enforced when the space is built.
    """
    if S._table is not None:
        return _validate_table(S)
    n = S.n
    T = S._intervals().view(np.uint64)
    checked = 0
    for a in range(n - 2):
        rest = T[a, a + 1 :]
        X = rest[:, None, :] & rest[None, :, :] & T[a + 1 :, a + 1 :]
        counts = np.bitwise_count(X).sum(axis=2, dtype=np.int64)
        upper = np.triu(np.ones(counts.shape, dtype=bool), k=1)
        checked += int(upper.sum())
        bad = np.argwhere((counts != 1) & upper)
        if bad.size:
            b, c = (a + 1 + int(t) for t in bad[0])
            found = S.labels(int.from_bytes(X[tuple(bad[0])].tobytes(), "little"))
            raise NonMedian(
                f"triple ({S.points[a]}, {S.points[b]}, {S.points[c]}) has {len(found)} medians",
                witness=(S.points[a], S.points[b], S.points[c]),
                axiom="unique median",
            )
    return Diagnostics("graph", n, checked)


def ensure_valid(S: MedianSpace) -> Diagnostics:
    """Validate once per space; later calls reuse the cached diagnostics."""
    diag = S._cache.get("diagnostics")
    if diag is None:
        diag = S._cache["diagnostics"] = validate_space(S)
    return diag


def _validate_table(S: MedianSpace) -> Diagnostics:
    n, T, P = S.n, S._table, S.points
    ar = np.arange(n)
    for i in range(n):
        bad = np.flatnonzero(T[i, i] != i)
        if bad.size:
            raise NonMedian("m(x,x,y) != x", witness=(P[i], P[i], P[int(bad[0])]), axiom="majority")
    for perm in ((1, 0, 2), (0, 2, 1)):
        diff = np.argwhere(T != T.transpose(perm))
        if diff.size:
            raise NonMedian("median is not symmetric", witness=tuple(P[int(t)] for t in diff[0]),
                            axiom="symmetry")
    for x in range(n):
        for y in range(n):
            for z in range(n):
                lhs = T[T[x, y, z]]
                rhs = T[x][T[y], T[z]]
                diff = np.argwhere(lhs != rhs)
                if diff.size:
                    u, v = (P[int(t)] for t in diff[0])
                    raise NonMedian("m(m(x,y,z),u,v) != m(x,m(y,u,v),m(z,u,v))",
                                    witness=(P[x], P[y], P[z], u, v), axiom="distributivity")
    # the covering-graph metric must have the same intervals as the table
    It = S._intervals()
    for a in range(n):
        for b in range(n):
            metric = np.unpackbits(It[a, b], bitorder="little")[:n].astype(bool)
            algebraic = T[a, b] == ar
            diff = np.flatnonzero(metric != algebraic)
            if diff.size:
                raise NonMedian("metric interval differs from median interval",
                                witness=(P[a], P[b], P[int(diff[0])]), axiom="interval")
    return Diagnostics("table", n, n**3)


def _as_mask(S, A, what="point set") -> int:
    mask = S.mask(A)
    if not mask:
        raise BadParams(f"empty {what}")
    return mask


def median(S: MedianSpace, a, b, c) -> str:
    return S.points[S.median_index(S.index[a], S.index[b], S.index[c])]


def interval(S: MedianSpace, a, b) -> frozenset:
    return S.labels(S.interval_mask(S.index[a], S.index[b]))


def join(S: MedianSpace, A, B) -> frozenset:
    return S.labels(S.join_mask(_as_mask(S, A), _as_mask(S, B)))


def convex_hull(S: MedianSpace, A) -> ConvexSet:
    """Smallest convex superset, by iterating the join; stabilises within rank(S) steps."""
    from .halfspaces import rank

    hull, steps = S.hull_mask(_as_mask(S, A))
    n = rank(S)
    assert steps <= n, f"join iteration took {steps} steps on a rank-{n} space"
    return ConvexSet(S, hull)


def is_convex(S: MedianSpace, A) -> bool:
    return S.is_convex_mask(_as_mask(S, A))


def gate_project(S: MedianSpace, C, x) -> str:
    cmask = _as_mask(S, C, "convex set")
    i = S.index[x]
    g = int(S.gate_array(cmask)[i])
    return S.points[g]


def helly_intersection(S: MedianSpace, Cs) -> frozenset:
    masks = [_as_mask(S, C, "convex set") for C in Cs]
    if not masks:
        raise BadParams("no convex sets given")
    common = S.full
    for m in masks:
        common &= m
    if all(masks[i] & masks[j] for i in range(len(masks)) for j in range(i + 1, len(masks))):
        assert common, "pairwise intersecting convex sets with empty intersection"
    return S.labels(common)


def hausdorff_distance(S: MedianSpace, A, B) -> Fraction:
    amask, bmask = _as_mask(S, A), _as_mask(S, B)
    to_b = S.dist_to_set(bmask)[S.indices(amask)].max()
    to_a = S.dist_to_set(amask)[S.indices(bmask)].max()
    return S.unscaled(max(to_a, to_b))


def subspace(S: MedianSpace, C, name="") -> MedianSpace:
    """The convex set ``C`` as a median space in its own right."""
    cmask = _as_mask(S, C, "convex set")
    keep = [int(i) for i in S.indices(cmask)]
    pts = [S.points[i] for i in keep]
    if S._table is not None:
        pos = {old: new for new, old in enumerate(keep)}
        sub = S._table[np.ix_(keep, keep, keep)]
        rows = [(pts[a], pts[b], pts[c], pts[pos[int(sub[a, b, c])]])
                for a in range(len(keep)) for b in range(a, len(keep)) for c in range(b, len(keep))]
        return MedianSpace.from_table(pts, rows, name=name)
    edges = [(S.points[i], S.points[j], w) for i, j, w in S.edges if cmask >> i & 1 and cmask >> j & 1]
    return MedianSpace.from_graph(pts, edges, name=name)
