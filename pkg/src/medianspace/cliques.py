"""Exact maximum clique / independent set by branch and bound.

Graphs are adjacency bitmasks: ``adj[v]`` has bit ``u`` set iff u ~ v.
Colouring bounds keep the search fast on the family sizes used here (< 100).
"""

from __future__ import annotations


def _colour_classes(P: int, adj: list[int]):
    order, colours = [], []
    uncoloured, colour = P, 0
    while uncoloured:
        colour += 1
        Q = uncoloured
        while Q:
            v = (Q & -Q).bit_length() - 1
            Q &= ~(1 << v) & ~adj[v]
            uncoloured &= ~(1 << v)
            order.append(v)
            colours.append(colour)
    return order, colours


def max_clique(adj: list[int]) -> list[int]:
    best: list[int] = []

    def expand(R: list[int], P: int):
        nonlocal best
        if not P:
            if len(R) > len(best):
                best = sorted(R)
            return
        order, colours = _colour_classes(P, adj)
        for v, c in zip(reversed(order), reversed(colours)):
            if len(R) + c <= len(best):
                return
            R.append(v)
            expand(R, P & adj[v])
            R.pop()
            P &= ~(1 << v)

    expand([], (1 << len(adj)) - 1)
    return best


def max_independent_set(adj: list[int]) -> list[int]:
    full = (1 << len(adj)) - 1
    comp = [full & ~a & ~(1 << v) for v, a in enumerate(adj)]
    return max_clique(comp)
