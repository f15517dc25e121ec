"""Minimal forbidden configurations for the high-girth triple process.

An obstruction is a 3-uniform hypergraph ``F`` on ``4 <= v <= ell`` vertices
with exactly ``v - 2`` triples that contains no proper subhypergraph ``J``
with ``v_J >= 4`` and ``e_J = v_J - 2``.  The full family (diamond
included) is ``ObstructionCatalog.all_members``; the members on at least six
vertices, which drive the closing of available triples, are
``ObstructionCatalog.large_members``.

Enumeration is orderly: hypergraphs are grown one triple at a time, each
level deduplicated by canonical form, keeping only "clean" intermediates
(no subhypergraph with ``e_J = v_J - 2``).  Every obstruction minus any of
its triples is clean, so growing clean hypergraphs by one triple reaches
every obstruction.
"""
from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

MAX_ELL = 9
MAX_LABEL_VERTICES = 12

Triple = tuple[int, int, int]


def _normalize(triples: Iterable[Sequence[int]]) -> tuple[Triple, ...]:
    out = set()
    for t in triples:
        a, b, c = sorted(int(x) for x in t)
        if a == b or b == c:
            raise ValueError(f"degenerate triple {tuple(t)}")
        out.add((a, b, c))
    return tuple(sorted(out))


def _vertex_set(triples: Iterable[Triple]) -> set[int]:
    return {x for t in triples for x in t}


# ---------------------------------------------------------------------------
# canonical labelling (individualization-refinement)
# ---------------------------------------------------------------------------

def _refine(nv: int, incident: list[list[tuple[int, int]]], colors: list[int]) -> list[int]:
    """Equitable refinement; colour ids are canonical ranks of signatures."""
    ncol = len(set(colors))
    while True:
        sigs = []
        for v in range(nv):
            around = sorted(
                (min(colors[a], colors[b]), max(colors[a], colors[b])) for a, b in incident[v]
            )
            sigs.append((colors[v], tuple(around)))
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == ncol:
            return new
        colors, ncol = new, len(ranks)


def _encode(nv: int, triples: Sequence[Triple], perm: Sequence[int]) -> tuple[bytes, tuple[Triple, ...]]:
    relabeled = tuple(sorted(tuple(sorted(perm[x] for x in t)) for t in triples))
    flat = [nv, len(relabeled)] + [x for t in relabeled for x in t]
    return bytes(flat), relabeled


def _canonical(nv: int, triples: tuple[Triple, ...]) -> tuple[bytes, tuple[Triple, ...]]:
    if nv > MAX_LABEL_VERTICES:
        raise ValueError(f"canonical labelling supports at most {MAX_LABEL_VERTICES} vertices, got {nv}")
    if not triples:
        return bytes([nv, 0]), ()
    incident: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for a, b, c in triples:
        incident[a].append((b, c))
        incident[b].append((a, c))
        incident[c].append((a, b))

    best: list = [None, None]

    def search(colors: list[int]) -> None:
        colors = _refine(nv, incident, colors)
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        if len(counts) == nv:
            key, rel = _encode(nv, triples, colors)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, rel
            return
        target = min(c for c, k in counts.items() if k > 1)
        for v in range(nv):
            if colors[v] == target:
                ind = [2 * c + 1 for c in colors]
                ind[v] = 2 * target
                search(ind)

    search([len(incident[v]) for v in range(nv)])
    return best[0], best[1]


def canonical_label(triples: Iterable[Sequence[int]], num_vertices: int | None = None) -> bytes:
    """Return a byte string identifying the hypergraph up to vertex relabelling.

    Vertices are relabelled densely (order of first appearance in sorted
    vertex order) before labelling, so ``{acd, abd}`` written on arbitrary
    integer labels gives the same key as ``{012, 013}``.  ``num_vertices``
    adds isolated vertices; an empty hypergraph yields the sentinel
    ``bytes([v, 0])``.
    """
    tr = _normalize(triples)
    verts = sorted(_vertex_set(tr))
    nv = len(verts) if num_vertices is None else int(num_vertices)
    if nv < len(verts):
        raise ValueError("num_vertices smaller than the number of vertices used")
    if nv > MAX_LABEL_VERTICES:
        raise ValueError(f"canonical labelling supports at most {MAX_LABEL_VERTICES} vertices, got {nv}")
    relabel = {x: i for i, x in enumerate(verts)}
    dense = _normalize([[relabel[x] for x in t] for t in tr])
    return _canonical(nv, dense)[0]


# ---------------------------------------------------------------------------
# structural predicates
# ---------------------------------------------------------------------------

def _dense_subsystem_exists(triples: Sequence[Triple], must_contain: int | None = None,
                            proper: bool = True) -> bool:
    """Is there a triple subset J with v_J >= 4 and e_J = v_J - 2?"""
    e = len(triples)
    idx = range(e)
    for size in range(2, e + (0 if proper else 1)):
        for sub in itertools.combinations(idx, size):
            if must_contain is not None and must_contain not in sub:
                continue
            nvj = len(_vertex_set(triples[i] for i in sub))
            if nvj >= 4 and size == nvj - 2:
                return True
    return False


def is_minimal(triples: Iterable[Sequence[int]]) -> bool:
    """True iff no proper subhypergraph has ``v_J >= 4`` and ``e_J = v_J - 2``.

    The candidate is expected to satisfy ``e = v - 2`` with ``v >= 4``;
    the predicate itself only inspects proper triple subsets.
    """
    return not _dense_subsystem_exists(_normalize(triples), proper=True)


def iter_automorphisms(nv: int, triples: Sequence[Triple]):
    """Yield every automorphism as a tuple ``image[v]`` (degree-pruned backtracking)."""
    tset = set(triples)
    deg = [0] * nv
    closing: list[list[Triple]] = [[] for _ in range(nv)]
    for t in triples:
        for x in t:
            deg[x] += 1
        closing[max(t)].append(t)
    image = [-1] * nv
    used = [False] * nv

    def extend(v: int):
        if v == nv:
            yield tuple(image)
            return
        for w in range(nv):
            if used[w] or deg[w] != deg[v]:
                continue
            image[v] = w
            if all(tuple(sorted(image[x] for x in t)) in tset for t in closing[v]):
                used[w] = True
                yield from extend(v + 1)
                used[w] = False
        image[v] = -1

    yield from extend(0)


def _automorphisms(nv: int, triples: Sequence[Triple]) -> int:
    return sum(1 for _ in iter_automorphisms(nv, triples))


def automorphism_count(F) -> int:
    """Number of vertex permutations of ``{0..v-1}`` fixing the triple set.

    Accepts an :class:`Obstruction` or any triple list on dense labels.
    """
    if isinstance(F, Obstruction):
        return _automorphisms(F.vertex_count, F.triples)
    tr = _normalize(F)
    nv = max((max(t) for t in tr), default=-1) + 1
    return _automorphisms(nv, tr)


def is_connected(triples: Sequence[Triple]) -> bool:
    if not triples:
        return True
    verts = _vertex_set(triples)
    seen = set(triples[0])
    changed = True
    while changed:
        changed = False
        for t in triples:
            if seen.intersection(t) and not seen.issuperset(t):
                seen.update(t)
                changed = True
    return seen == verts


def is_linear(triples: Sequence[Triple]) -> bool:
    pairs = set()
    for a, b, c in triples:
        for p in ((a, b), (a, c), (b, c)):
            if p in pairs:
                return False
            pairs.add(p)
    return True


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Obstruction:
    vertex_count: int
    triples: tuple[Triple, ...]
    aut_count: int
    canonical_key: bytes

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[int]]) -> "Obstruction":
        """Build the canonical representative of the class of ``triples``."""
        tr = _normalize(triples)
        verts = sorted(_vertex_set(tr))
        relabel = {x: i for i, x in enumerate(verts)}
        dense = _normalize([[relabel[x] for x in t] for t in tr])
        key, canon = _canonical(len(verts), dense)
        return cls(len(verts), canon, _automorphisms(len(verts), canon), key)

    @property
    def edge_count(self) -> int:
        return len(self.triples)

    @property
    def key_hex(self) -> str:
        return self.canonical_key.hex()

    @property
    def is_linear(self) -> bool:
        return is_linear(self.triples)

    @property
    def is_connected(self) -> bool:
        return is_connected(self.triples)

    @property
    def name(self) -> str:
        if self.vertex_count == 4:
            return "diamond"
        if self.vertex_count == 6:
            return "pasch"
        return f"v{self.vertex_count}_{self.key_hex[-8:]}"

    def to_dict(self) -> dict:
        return {"v": self.vertex_count, "triples": [list(t) for t in self.triples],
                "aut": self.aut_count, "key": self.key_hex}

    @classmethod
    def from_dict(cls, d: dict) -> "Obstruction":
        ob = cls(int(d["v"]), _normalize(d["triples"]), int(d["aut"]), bytes.fromhex(d["key"]))
        return ob


@dataclass(frozen=True)
class ObstructionCatalog:
    ell: int
    all_members: tuple[Obstruction, ...]
    large_members: tuple[Obstruction, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "large_members", tuple(F for F in self.all_members if F.vertex_count >= 6)
        )

    def __len__(self) -> int:
        return len(self.all_members)

    def by_key(self, key) -> Obstruction:
        if isinstance(key, str):
            key = bytes.fromhex(key)
        for F in self.all_members:
            if F.canonical_key == key:
                return F
        raise KeyError(key)

    def pasch(self) -> Obstruction:
        for F in self.all_members:
            if F.vertex_count == 6:
                return F
        raise KeyError(f"no 6-vertex obstruction for ell={self.ell}")

    def to_json(self) -> dict:
        return {"schema_version": 1, "ell": self.ell,
                "obstructions": [F.to_dict() for F in self.all_members]}

    @classmethod
    def from_json(cls, data: dict) -> "ObstructionCatalog":
        members = tuple(Obstruction.from_dict(d) for d in data["obstructions"])
        return cls(int(data["ell"]), members)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path) -> "ObstructionCatalog":
        return cls.from_json(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _check_ell(ell: int) -> None:
    if ell < 4:
        raise ValueError(f"ell must be >= 4, got {ell}")
    if ell > MAX_ELL:
        raise ValueError(
            f"ell={ell} exceeds the supported cap {MAX_ELL}: enumeration cost grows "
            "exponentially (ell=9 already takes minutes)"
        )


def _candidate_triples(nv: int, ell: int):
    """Triples over the existing vertices plus up to three fresh ones (labels nv, nv+1, ...)."""
    for fresh in range(0, 4):
        if nv + fresh > ell:
            break
        old = 3 - fresh
        new = tuple(range(nv, nv + fresh))
        for base in itertools.combinations(range(nv), old):
            yield base + new, nv + fresh


@functools.lru_cache(maxsize=None)
def enumerate_obstructions(ell: int) -> ObstructionCatalog:
    """All isomorphism classes of minimal obstructions on at most ``ell`` vertices.

    Members are sorted by ``(vertex_count, canonical_key)``.
    """
    _check_ell(ell)
    found: dict[bytes, Obstruction] = {}
    level: dict[bytes, tuple[int, tuple[Triple, ...]]] = {bytes([3, 1, 0, 1, 2]): (3, ((0, 1, 2),))}
    # an obstruction on v <= ell vertices has v - 2 <= ell - 2 triples
    for e in range(2, ell - 1):
        nxt: dict[bytes, tuple[int, tuple[Triple, ...]]] = {}
        for nv, tr in level.values():
            for t, nv2 in _candidate_triples(nv, ell):
                if t in tr:
                    continue
                cand = tuple(sorted(tr + (t,)))
                pos = cand.index(t)
                if e == nv2 - 2:
                    if nv2 >= 4 and not _dense_subsystem_exists(cand, proper=True):
                        key, canon = _canonical(nv2, cand)
                        if key not in found:
                            found[key] = Obstruction(nv2, canon, _automorphisms(nv2, canon), key)
                    continue
                if e > ell - 3:
                    continue
                if _dense_subsystem_exists(cand, must_contain=pos, proper=False):
                    continue
                key, canon = _canonical(nv2, cand)
                if key not in nxt:
                    nxt[key] = (nv2, canon)
        level = nxt
    members = sorted(found.values(), key=lambda F: (F.vertex_count, F.canonical_key))
    return ObstructionCatalog(ell, tuple(members))


def enumerate_obstructions_naive(ell: int) -> ObstructionCatalog:
    """Reference enumerator: filter every (v-2)-subset of triples on v labelled vertices.

    Independent of the orderly generator; practical up to ``ell = 7``.
    """
    _check_ell(ell)
    found: dict[bytes, Obstruction] = {}
    for v in range(4, ell + 1):
        all_triples = list(itertools.combinations(range(v), 3))
        full = set(range(v))
        for sub in itertools.combinations(all_triples, v - 2):
            if _vertex_set(sub) != full:
                continue
            if not is_minimal(sub):
                continue
            key = canonical_label(sub)
            if key not in found:
                found[key] = Obstruction.from_triples(sub)
    members = sorted(found.values(), key=lambda F: (F.vertex_count, F.canonical_key))
    return ObstructionCatalog(ell, tuple(members))


def remark_bound(ell: int) -> int:
    """Counting bound ``sum_r C(C(r,3), r-2)`` on the size of the family."""
    return sum(math.comb(math.comb(r, 3), r - 2) for r in range(4, ell + 1))


DIAMOND = ((0, 1, 2), (0, 1, 3))
PASCH = ((0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5))
