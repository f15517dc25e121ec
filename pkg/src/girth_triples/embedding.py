"""Plain-Python vertex-by-vertex embedding search.

Deliberately independent of the compiled triple-centric search used by the
process: patterns are mapped one vertex at a time, each pattern triple is
checked against the host once its last vertex is placed.  Used by the
brute-force oracles and diagnostic counters.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Iterator, Sequence

Triple = tuple[int, int, int]


class TripleSystem:
    """Set of sorted triples with vertex adjacency, for oracle-side lookups."""

    def __init__(self, triples: Iterable[Sequence[int]] = ()):
        self.triples: set[Triple] = set()
        self.neighbors: dict[int, set[int]] = defaultdict(set)
        self.by_vertex: dict[int, list[Triple]] = defaultdict(list)
        for t in triples:
            self.add(t)

    def add(self, t: Sequence[int]) -> None:
        a, b, c = sorted(int(x) for x in t)
        tt = (a, b, c)
        if tt in self.triples:
            return
        self.triples.add(tt)
        for x in tt:
            self.by_vertex[x].append(tt)
            self.neighbors[x].update(y for y in tt if y != x)

    def __contains__(self, t) -> bool:
        return tuple(sorted(t)) in self.triples

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(sorted(self.triples))

    @property
    def vertices(self) -> set[int]:
        return {x for t in self.triples for x in t}


def _vertex_order(pattern: Sequence[Triple], nv: int, fixed: Iterable[int]) -> list[int]:
    order = list(dict.fromkeys(fixed))
    seen = set(order)
    while len(order) < nv:
        best, score = None, -1
        for v in range(nv):
            if v in seen:
                continue
            s = sum(1 for t in pattern if v in t and any(u in seen for u in t if u != v))
            if s > score:
                best, score = v, s
        order.append(best)
        seen.add(best)
    return order


def iter_embeddings(pattern: Sequence[Triple], nv: int, n: int,
                    has_triple: Callable[[Triple], bool],
                    neighbors: Callable[[int], Iterable[int]],
                    fixed: dict[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield injective maps ``phi`` (as tuples) with every pattern triple satisfying ``has_triple``.

    ``fixed`` pins some pattern vertices.  A vertex adjacent (in the pattern)
    to an already placed vertex is drawn from ``neighbors`` of its image;
    otherwise it ranges over ``range(n)``.
    """
    fixed = dict(fixed or {})
    order = _vertex_order(pattern, nv, fixed)
    pos_in_order = {v: i for i, v in enumerate(order)}
    # triples checked when their last vertex (in order) is placed
    check_at: list[list[Triple]] = [[] for _ in range(nv)]
    for t in pattern:
        last = max(t, key=lambda v: pos_in_order[v])
        check_at[pos_in_order[last]].append(t)
    # earlier-placed pattern neighbours of each vertex
    earlier: list[list[int]] = [
        sorted({u for t in pattern if v in t for u in t if u != v and pos_in_order[u] < i})
        for i, v in enumerate(order)
    ]

    phi = [-1] * nv
    used: set[int] = set()

    def place(i: int):
        if i == nv:
            yield tuple(phi)
            return
        v = order[i]
        if v in fixed:
            cands: Iterable[int] = (fixed[v],)
        elif earlier[i]:
            common = set(neighbors(phi[earlier[i][0]]))
            for u in earlier[i][1:]:
                common.intersection_update(neighbors(phi[u]))
            cands = sorted(common)
        else:
            cands = range(n)
        for w in cands:
            if w in used:
                continue
            phi[v] = w
            if all(has_triple(tuple(sorted(phi[x] for x in t))) for t in check_at[i]):
                used.add(w)
                yield from place(i + 1)
                used.discard(w)
            phi[v] = -1

    yield from place(0)
