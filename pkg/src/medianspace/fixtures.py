"""Builders for the standard test spaces, plus seeded random median graphs."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as cartesian

import numpy as np

from .errors import BadParams
from .rational import format_rational, parse_rational
from .space import MedianSpace


def _need(cond, msg):
    if not cond:
        raise BadParams(msg)


def hypercube(n: int) -> MedianSpace:
    _need(isinstance(n, int) and 0 <= n <= 12, "hypercube dimension must be in 0..12")
    pts = ["".join(bits) for bits in cartesian("01", repeat=n)]
    edges = []
    for p in pts:
        for i, ch in enumerate(p):
            if ch == "0":
                edges.append((p, p[:i] + "1" + p[i + 1 :], 1))
    return MedianSpace.from_graph(pts, edges, name=f"Q{n}")


def grid_label(x, y) -> str:
    return f"{format_rational(x)},{format_rational(y)}"


def grid(k: int, m: int | None = None, spacing=1) -> MedianSpace:
    """Points (x, y), 0 <= x <= k, 0 <= y <= m, scaled by ``spacing``."""
    m = k if m is None else m
    _need(k >= 0 and m >= 0, "grid sides must be nonnegative")
    step = Fraction(spacing)
    _need(step > 0, "grid spacing must be positive")
    lab = lambda x, y: grid_label(x * step, y * step)
    pts = [lab(x, y) for x in range(k + 1) for y in range(m + 1)]
    edges = [(lab(x, y), lab(x + 1, y), step) for x in range(k) for y in range(m + 1)]
    edges += [(lab(x, y), lab(x, y + 1), step) for x in range(k + 1) for y in range(m)]
    name = f"GRID({k})" if m == k else f"GRID({k}x{m})"
    return MedianSpace.from_graph(pts, edges, name=name)


def eps_grid(level: int) -> MedianSpace:
    """The unit square sampled at spacing ``1/level``."""
    _need(level >= 1, "refinement level must be positive")
    S = grid(level, spacing=Fraction(1, level))
    S.name = f"eps-grid(1/{level})"
    return S


def path(k: int, weight=1) -> MedianSpace:
    _need(k >= 1, "path needs at least one vertex")
    pts = [f"v{i}" for i in range(1, k + 1)]
    return MedianSpace.from_graph(pts, [(pts[i], pts[i + 1], weight) for i in range(k - 1)], name=f"P{k}")


def star(b: int) -> MedianSpace:
    _need(b >= 1, "star needs at least one leaf")
    pts = ["c"] + [f"v{i}" for i in range(1, b + 1)]
    return MedianSpace.from_graph(pts, [("c", p, 1) for p in pts[1:]], name=f"STAR{b}")


def weighted_star(K: int) -> MedianSpace:
    """Center ``c`` and leaves v1..vK, leaf i at distance 1/i."""
    _need(K >= 1, "weighted star needs at least one leaf")
    pts = ["c"] + [f"v{i}" for i in range(1, K + 1)]
    return MedianSpace.from_graph(
        pts, [("c", f"v{i}", Fraction(1, i)) for i in range(1, K + 1)], name=f"STAR(w,{K})"
    )


def substar_branch(i: int, length: int = 2) -> list[str]:
    """Labels along branch ``i``, from the center outwards."""
    if length == 2:
        return [f"i{i}", f"t{i}"]
    return [f"i{i}_{j}" for j in range(1, length)] + [f"t{i}"]


def substar(branches: int = 3, length: int = 2, weight=1) -> MedianSpace:
    """A spider: center ``c`` with ``branches`` legs of ``length`` edges."""
    _need(branches >= 1 and length >= 1, "substar needs positive branch count and length")
    pts, edges = ["c"], []
    for i in range(1, branches + 1):
        leg = substar_branch(i, length)
        pts += leg
        chain = ["c"] + leg
        edges += [(chain[j], chain[j + 1], weight) for j in range(length)]
    return MedianSpace.from_graph(pts, edges, name="SUBSTAR")


def product(A: MedianSpace, B: MedianSpace) -> MedianSpace:
    """The l1 product; points are labelled ``a|b``."""
    lab = lambda a, b: f"{a}|{b}"
    pts = [lab(a, b) for a in A.points for b in B.points]
    edges = [(lab(A.points[i], b), lab(A.points[j], b), w) for i, j, w in A.edges for b in B.points]
    edges += [(lab(a, B.points[i]), lab(a, B.points[j]), w) for a in A.points for i, j, w in B.edges]
    return MedianSpace.from_graph(pts, edges, name=f"{A.name}x{B.name}")


def eps_ball(n: int, r, eps) -> MedianSpace:
    """Lattice points of spacing ``eps`` in the closed l1 ball of radius ``r`` in R^n."""
    r, eps = Fraction(r), Fraction(eps)
    _need(n >= 1 and r >= 0 and eps > 0, "eps_ball needs n >= 1, r >= 0, eps > 0")
    steps = int(r // eps)
    coords = [
        z for z in cartesian(range(-steps, steps + 1), repeat=n) if sum(abs(t) for t in z) <= steps
    ]
    lab = lambda z: ",".join(format_rational(t * eps) for t in z)
    present = set(coords)
    edges = []
    for z in coords:
        for i in range(n):
            up = z[:i] + (z[i] + 1,) + z[i + 1 :]
            if up in present:
                edges.append((lab(z), lab(up), eps))
    S = MedianSpace.from_graph([lab(z) for z in coords], edges,
                               name=f"eps_ball({n},{format_rational(r)},{format_rational(eps)})")
    return S


def cycle(k: int) -> MedianSpace:
    _need(k >= 3, "cycle needs at least 3 vertices")
    pts = [f"u{i}" for i in range(k)]
    return MedianSpace.from_graph(pts, [(pts[i], pts[(i + 1) % k], 1) for i in range(k)], name=f"C{k}")


def k4_minus_edge() -> MedianSpace:
    pts = ["a", "b", "c", "d"]
    edges = [("a", "b", 1), ("a", "c", 1), ("a", "d", 1), ("b", "c", 1), ("b", "d", 1)]
    return MedianSpace.from_graph(pts, edges, name="K4-e")


def median_closure(seeds, dim: int) -> list[int]:
    """Smallest subset of Q_dim (as ints) containing ``seeds`` and closed under majority."""
    closed = sorted(set(seeds))
    while True:
        arr = np.array(closed, dtype=np.int64)
        a, b, c = np.meshgrid(arr, arr, arr, indexing="ij", sparse=True)
        maj = np.unique((a & b) | (b & c) | (a & c))
        if maj.size == len(closed):
            return closed
        closed = sorted(set(closed) | set(maj.tolist()))


def random_median_graph(rng, dim: int | None = None, seeds: int | None = None) -> MedianSpace:
    """Median closure of random vertices of Q_dim, with Hamming-weighted covering edges."""
    rng = np.random.default_rng(rng)
    dim = int(rng.integers(3, 7)) if dim is None else dim
    seeds = int(rng.integers(3, 13)) if seeds is None else seeds
    picks = rng.choice(2**dim, size=min(seeds, 2**dim), replace=False)
    members = median_closure(picks.tolist(), dim)
    arr = np.array(members, dtype=np.int64)
    X = arr[:, None] ^ arr[None, :]
    pts = [format(v, f"0{dim}b") for v in members]
    edges = []
    for i in range(len(arr)):
        between = ((X[i][None, :] & X) == 0).sum(axis=1)  # size of interval [i, j] in the set
        for j in np.flatnonzero(between == 2):
            if j > i:
                edges.append((pts[i], pts[j], bin(int(X[i, j])).count("1")))
    return MedianSpace.from_graph(pts, edges, name=f"random(Q{dim},{len(pts)})")


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise BadParams(f"expected an integer, got {text!r}") from None


def build_fixture(name: str, *params) -> MedianSpace:
    """Build a fixture by name; ``params`` may be strings as typed on the command line."""
    p = list(params)
    try:
        if name == "hypercube":
            return hypercube(_int(p[0]))
        if name == "grid":
            return grid(_int(p[0]), _int(p[1]) if len(p) > 1 else None)
        if name == "path":
            return path(_int(p[0]))
        if name == "star":
            return star(_int(p[0]))
        if name == "weighted_star":
            return weighted_star(_int(p[0]))
        if name == "substar":
            b = _int(p[0]) if p else 3
            length = _int(p[1]) if len(p) > 1 else 2
            w = parse_rational(p[2]) if len(p) > 2 else 1
            return substar(b, length, w)
        if name == "eps_ball":
            return eps_ball(_int(p[0]), parse_rational(p[1]), parse_rational(p[2]))
        if name == "eps_grid":
            return eps_grid(_int(p[0]))
        if name == "cycle":
            return cycle(_int(p[0]))
        if name == "k4_minus_edge":
            return k4_minus_edge()
        if name == "random":
            return random_median_graph(_int(p[0]))
        if name == "product":
            A, B = (x if isinstance(x, MedianSpace) else parse_fixture(x) for x in p[:2])
            return product(A, B)
    except IndexError:
        raise BadParams(f"fixture {name!r} is missing parameters") from None
    except ValueError as exc:
        if isinstance(exc, BadParams):
            raise
        raise BadParams(str(exc)) from None
    raise BadParams(f"unknown fixture {name!r}")


def parse_fixture(spec: str) -> MedianSpace:
    """``hypercube:3``, ``grid:4:2``, ``star:3*path:3`` (``*`` is the l1 product)."""
    factors = [f.strip() for f in spec.split("*")]
    spaces = []
    for f in factors:
        name, *params = f.split(":")
        spaces.append(build_fixture(name, *params))
    out = spaces[0]
    for other in spaces[1:]:
        out = product(out, other)
    return out


CORPUS = (
    "hypercube:3",
    "hypercube:4",
    "grid:2",
    "grid:3",
    "grid:4",
    "grid:4:1",
    "path:2",
    "path:4",
    "path:8",
    "star:3",
    "weighted_star:5",
    "weighted_star:20",
    "substar",
    "substar:3:2:1/2",
    "star:3*path:3",
    "substar*path:2",
    "path:3*path:3*path:2",
    "eps_ball:2:1:1/2",
    "eps_grid:4",
)


def corpus() -> dict[str, MedianSpace]:
    return {spec: parse_fixture(spec) for spec in CORPUS}
