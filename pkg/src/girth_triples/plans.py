"""Compile obstructions into flat search plans for the compiled kernels."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .catalog import Obstruction, iter_automorphisms


@dataclass(frozen=True)
class TriplePlans:
    """Triple-centric plans: arrays consumed by ``_kernels.run_plan``."""
    anchor: np.ndarray   # (P, 3) pattern vertices sent to x, y, z
    length: np.ndarray   # (P,)
    steps: np.ndarray    # (P, S, 4) f0, f1, f2, kind
    nverts: np.ndarray   # (P,)

    def __len__(self) -> int:
        return int(self.length.shape[0])

    def arrays(self):
        return self.anchor, self.length, self.steps, self.nverts


def _order_steps(triples, mapped: set[int]) -> list[tuple[int, int, int, int]]:
    """Greedy order: next triple is the one with most mapped vertices."""
    mapped = set(mapped)
    rest = list(triples)
    out = []
    while rest:
        best = max(range(len(rest)), key=lambda j: (len(mapped.intersection(rest[j])), -j))
        t = rest.pop(best)
        kind = len(mapped.intersection(t))
        ordered = [x for x in t if x in mapped] + [x for x in t if x not in mapped]
        out.append((*ordered, kind))
        mapped.update(t)
    return out


def _ordered_triple_orbits(F: Obstruction) -> dict[tuple, int]:
    """Representatives of ordered triples of F under Aut(F), with orbit sizes."""
    auts = list(iter_automorphisms(F.vertex_count, F.triples))
    reps: dict[tuple, int] = {}
    seen = set()
    for A in F.triples:
        for o in itertools.permutations(A):
            if o in seen:
                continue
            orbit = {tuple(g[x] for x in o) for g in auts}
            seen.update(orbit)
            reps[o] = len(orbit)
    return reps


def _pack(rows: list[tuple[tuple[int, int, int], list, int]]) -> TriplePlans:
    P = len(rows)
    S = max((len(r[1]) for r in rows), default=0)
    anchor = np.zeros((max(P, 0), 3), np.int64)
    length = np.zeros(P, np.int64)
    steps = np.zeros((P, max(S, 1), 4), np.int64)
    nverts = np.zeros(P, np.int64)
    for p, (anc, st, nv) in enumerate(rows):
        anchor[p] = anc
        length[p] = len(st)
        nverts[p] = nv
        for j, s in enumerate(st):
            steps[p, j] = s
    return TriplePlans(anchor, length, steps, nverts)


def closing_plans(obstructions) -> TriplePlans:
    """One plan per Aut(F)-orbit of (ordered anchor triple, missing triple).

    Plans in one orbit report identical triple sets, so a representative
    suffices.  The missing triple is always the final step.
    """
    rows = []
    for F in obstructions:
        tr = list(F.triples)
        auts = list(iter_automorphisms(F.vertex_count, F.triples))
        seen = set()
        for ai, A in enumerate(tr):
            for mi, M in enumerate(tr):
                if mi == ai:
                    continue
                others = [t for j, t in enumerate(tr) if j not in (ai, mi)]
                for perm in itertools.permutations(A):
                    if (perm, M) in seen:
                        continue
                    seen.update((tuple(g[x] for x in perm), tuple(sorted(g[x] for x in M))) for g in auts)
                    steps = _order_steps(others, set(A))
                    mapped = set(A).union(*[set(s[:3]) for s in steps]) if steps else set(A)
                    kind = len(mapped.intersection(M))
                    if kind < 2:
                        raise NotImplementedError(
                            f"closing triple with {kind} determined vertices in {F.triples}")
                    ordered = [x for x in M if x in mapped] + [x for x in M if x not in mapped]
                    steps.append((*ordered, kind))
                    for s in steps:
                        if s[3] == 0:
                            raise NotImplementedError(f"disconnected pattern {F.triples}")
                    rows.append((perm, steps, F.vertex_count))
    return _pack(rows)


def embedding_plans(obstructions) -> TriplePlans:
    """One plan per Aut(F)-orbit of ordered triples.

    Run from every host triple (sorted), these find every copy: some ordered
    triple of the copy's preimage lands on the sorted host triple, and it is
    an automorphic image of a representative.
    """
    rows = []
    for F in obstructions:
        tr = list(F.triples)
        for perm in _ordered_triple_orbits(F):
            rest = [t for t in tr if set(t) != set(perm)]
            steps = _order_steps(rest, set(perm))
            for s in steps:
                if s[3] == 0:
                    raise NotImplementedError(f"disconnected pattern {F.triples}")
            rows.append((perm, steps, F.vertex_count))
    return _pack(rows)


@dataclass(frozen=True)
class ExtensionPlan:
    """Vertex-centric plan for counting copies of F through a fixed triple."""
    obstruction: Obstruction
    weights: np.ndarray  # orbit sizes
    anchors: np.ndarray  # (R, 3) one ordered triple per orbit
    orders: np.ndarray   # (R, nv-3)
    ncons: np.ndarray    # (R, nv-3)
    cons: np.ndarray     # (R, nv-3, C, 2)


def extension_plan(F: Obstruction) -> ExtensionPlan:
    tr = list(F.triples)
    rows = []
    weights = []
    for perm, size in _ordered_triple_orbits(F).items():
        A = tuple(sorted(perm))
        weights.append(size)
        mapped = list(perm)
        rest = [v for v in range(F.vertex_count) if v not in A]
        order, cons = [], []
        while rest:
            def score(v):
                return sum(1 for t in tr if v in t and all(u in mapped for u in t if u != v))
            v = max(rest, key=lambda u: (score(u), -u))
            rest.remove(v)
            c = [tuple(u for u in t if u != v) for t in tr
                 if v in t and all(u in mapped for u in t if u != v)]
            mapped.append(v)
            order.append(v)
            cons.append(c)
        covered = sum(len(c) for c in cons) + 1
        if covered != len(tr):
            raise NotImplementedError(f"pattern triples inside the anchor: {F.triples}")
        rows.append((perm, order, cons))
    nl = F.vertex_count - 3
    C = max(1, max(len(c) for r in rows for c in r[2]))
    anchors = np.array([r[0] for r in rows], np.int64)
    orders = np.array([r[1] for r in rows], np.int64).reshape(len(rows), nl)
    ncons = np.zeros((len(rows), nl), np.int64)
    cons = np.zeros((len(rows), nl, C, 2), np.int64)
    for p, (_, _, cs) in enumerate(rows):
        for L, c in enumerate(cs):
            ncons[p, L] = len(c)
            for j, pr in enumerate(c):
                cons[p, L, j] = pr
    return ExtensionPlan(F, np.array(weights, np.int64), anchors, orders, ncons, cons)
