"""Measurements on a live process state and independent girth oracles."""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .catalog import Obstruction, ObstructionCatalog, enumerate_obstructions
from .embedding import TripleSystem, iter_embeddings
from .engine import ProcessState, encode_triple
from .plans import embedding_plans, extension_plan
from .trajectories import TrajectoryPoint, evaluate

DEFAULT_PAIR_SAMPLES = 200
DEFAULT_TRIPLE_SAMPLES = 50
ABS_ERROR_BELOW = 1e-9


def codegree_Y(state: ProcessState, u: int, v: int, check: bool = True) -> int:
    """Available codegree of the alive pair uv: #{z : uvz available}.

    Read from the incrementally maintained counter; with ``check`` it is
    also recounted by scanning z and the two must agree.
    """
    u, v = int(u), int(v)
    if u == v or not state.pair_alive(u, v):
        raise ValueError(f"pair {(u, v)} is not alive")
    a, b = min(u, v), max(u, v)
    val = int(state.Y[a, b])
    if check:
        scan = K.codegree_scan(a, b, state.n, state.c2, state.c3, state.pos)
        if scan != val:
            raise AssertionError(f"Y counter {val} != scan {scan} for pair {(a, b)}")
    return val


def codegree_scan(state: ProcessState, u: int, v: int) -> int:
    return int(K.codegree_scan(min(u, v), max(u, v), state.n, state.c2, state.c3, state.pos))


def sum_codegrees(state: ProcessState) -> int:
    """Sum of Y over alive pairs (equals 3|Q|)."""
    iu, iv = np.triu_indices(state.n, 1)
    mask = state.pair_tri[iu, iv] < 0
    return int(state.Y[iu[mask], iv[mask]].sum(dtype=np.int64))


# ---------------------------------------------------------------------------
# extension counts W
# ---------------------------------------------------------------------------

class _QBits:
    """Per-pair bitsets of available third vertices, built on demand."""

    def __init__(self, state: ProcessState):
        n = state.n
        self.words = (n + 63) // 64
        self.bits = np.zeros((n, n, self.words), np.uint64)
        K.build_qbits(n, state.Q, state.q_size, state.c2, state.c3, self.bits)
        full = np.zeros(self.words, np.uint64)
        for v in range(n):
            full[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        self.full = full
        self.stamp = (state.i, state.q_size)


@functools.lru_cache(maxsize=None)
def _ext_plan(F: Obstruction):
    return extension_plan(F)


def _qbits(state: ProcessState) -> _QBits:
    cache = getattr(state, "_qbits_cache", None)
    if cache is None or cache.stamp != (state.i, state.q_size):
        cache = _QBits(state)
        state._qbits_cache = cache
    return cache


def count_W(state: ProcessState, uvw: Sequence[int], F: Obstruction, k: int) -> int:
    """Copies F' of F through the available triple uvw with e_F - k triples
    available and k triples chosen."""
    u, v, w = sorted(int(x) for x in uvw)
    if not state.is_available((u, v, w)):
        raise ValueError(f"{(u, v, w)} is not available")
    if not 0 <= k <= F.edge_count - 2:
        raise ValueError(f"k={k} outside [0, {F.edge_count - 2}]")
    qb = _qbits(state)
    plan = _ext_plan(F)
    total = 0
    for p in range(plan.anchors.shape[0]):
        total += plan.weights[p] * K.count_extensions(plan.anchors[p], u, v, w, k, F.vertex_count, plan.orders[p],
                                    plan.ncons[p], plan.cons[p], state.n, qb.bits, qb.full,
                                    state.pair_tri, state.chosen_v)
    if total % F.aut_count:
        raise AssertionError(f"labelled count {total} not divisible by |Aut|={F.aut_count}")
    return int(total // F.aut_count)


def count_W_bruteforce(state: ProcessState, uvw: Sequence[int], F: Obstruction, k: int) -> int:
    """Same count by trying every injection of F's vertices (small n only).

    Each injection sends exactly one triple of F onto uvw, so injections are
    enumerated by that triple, its ordering, and the images of the rest.
    """
    uvw = tuple(sorted(int(x) for x in uvw))
    H = set(state.chosen_triples())
    others = [x for x in range(state.n) if x not in uvw]
    hits = 0
    for A in F.triples:
        rest = [x for x in range(F.vertex_count) if x not in A]
        for perm in itertools.permutations(uvw):
            for img in itertools.permutations(others, len(rest)):
                phi = dict(zip(A, perm))
                phi.update(zip(rest, img))
                nh = nq = 0
                for t in F.triples:
                    tt = tuple(sorted(phi[x] for x in t))
                    if tt in H:
                        nh += 1
                    elif state.is_available(tt):
                        nq += 1
                if nh == k and nq == F.edge_count - k:
                    hits += 1
    if hits % F.aut_count:
        raise AssertionError("labelled count not divisible by |Aut|")
    return hits // F.aut_count


# ---------------------------------------------------------------------------
# rooted extensions
# ---------------------------------------------------------------------------

@dataclass
class ExtensionReport:
    count: int
    bound: float
    exponent: float


def count_rooted_extensions(state: ProcessState, G: Sequence[Sequence[int]],
                            H: Sequence[Sequence[int]], rho: dict[int, int],
                            alpha: float = 0.75) -> ExtensionReport:
    """Injections psi: V(H) -> [n] extending rho with psi(H \\ G) inside the chosen triples.

    ``G`` and ``H`` are triple lists on dense pattern labels ``0..v_H-1``;
    ``rho`` maps every vertex of G (the root) to a host vertex.  The bound
    ``n^(alpha/9) * max_J n^((v_H - e_H) + (e_J - v_J))`` over
    ``G <= J <= H`` is reported, not enforced.
    """
    Ht = [tuple(sorted(t)) for t in H]
    Gt = {tuple(sorted(t)) for t in G}
    if not Gt.issubset(Ht):
        raise ValueError("G must be a subhypergraph of H")
    v_H = max(max((max(t) for t in Ht), default=-1), max(rho, default=-1)) + 1
    root = set(rho)
    if {x for t in Gt for x in t} - root:
        raise ValueError("rho must map every vertex of G")
    ell = state.ell
    if v_H > 2 * ell or len(Ht) > 2 * ell:
        raise ValueError(f"pattern larger than 2*ell = {2 * ell}")
    if len(set(rho.values())) != len(rho):
        raise ValueError("rho must be injective")
    host = TripleSystem(state.chosen_triples())
    free = [t for t in Ht if t not in Gt]
    count = sum(1 for _ in iter_embeddings(free, v_H, state.n, host.__contains__,
                                           lambda x: host.neighbors.get(x, ()), rho))
    n = state.n
    best = -math.inf
    for r in range(len(free) + 1):
        for sub in itertools.combinations(free, r):
            vJ = len(root | {x for t in sub for x in t})
            eJ = len(Gt) + r
            best = max(best, (v_H - len(Ht)) + (eJ - vJ))
    return ExtensionReport(count, n ** (alpha / 9.0) * n**best, best)


# ---------------------------------------------------------------------------
# girth oracles
# ---------------------------------------------------------------------------

def _as_triples(H: Iterable[Sequence[int]]) -> list[tuple[int, int, int]]:
    out = []
    for t in H:
        a, b, c = sorted(int(x) for x in t)
        if a == b or b == c:
            raise ValueError(f"degenerate triple {tuple(t)}")
        out.append((a, b, c))
    return out


def girth_witness_subsets(H: Iterable[Sequence[int]], ell: int,
                          max_vertices: int = 64) -> frozenset | None:
    """A vertex set of size g in [4, ell] spanning at least g - 2 triples, or None.

    Only connected unions of triples are grown: if any violating set exists
    then some connected one does.
    """
    tr = sorted(set(_as_triples(H)))
    verts = {x for t in tr for x in t}
    if len(verts) > max_vertices:
        raise ValueError(f"{len(verts)} vertices exceed the subset-search guard of {max_vertices}")
    by_vertex: dict[int, list] = {}
    for t in tr:
        for x in t:
            by_vertex.setdefault(x, []).append(t)

    def spanned(S: frozenset) -> int:
        seen = set()
        for x in S:
            for t in by_vertex.get(x, ()):
                if t[0] in S and t[1] in S and t[2] in S:
                    seen.add(t)
        return len(seen)

    seen: set[frozenset] = set()
    frontier = [frozenset(t) for t in tr]
    seen.update(frontier)
    while frontier:
        nxt = []
        for S in frontier:
            if len(S) >= 4 and spanned(S) >= len(S) - 2:
                return S
            for x in S:
                for t in by_vertex[x]:
                    S2 = S.union(t)
                    if len(S2) == len(S) or len(S2) > ell or S2 in seen:
                        continue
                    seen.add(S2)
                    nxt.append(S2)
        frontier = nxt
    return None


def girth_check_subsets(H: Iterable[Sequence[int]], ell: int, max_vertices: int = 64) -> bool:
    """True iff no g-set with 4 <= g <= ell spans at least g - 2 triples."""
    return girth_witness_subsets(H, ell, max_vertices) is None


def _linear_arrays(tr: list[tuple[int, int, int]]):
    n = max((t[2] for t in tr), default=0) + 1
    pair_tri = np.full((n, n), -1, np.int32)
    chosen_v = np.array(tr, np.int32).reshape(-1, 3)
    deg = np.zeros(n, np.int32)
    for t in tr:
        for x in t:
            deg[x] += 1
    inc = np.zeros((n, max(1, int(deg.max(initial=0)))), np.int32)
    fill = np.zeros(n, np.int32)
    for h, (a, b, c) in enumerate(tr):
        for u, v in ((a, b), (a, c), (b, c)):
            pair_tri[u, v] = pair_tri[v, u] = h
        for x in (a, b, c):
            inc[x, fill[x]] = h
            fill[x] += 1
    return n, pair_tri, chosen_v, inc, deg


def partial_sts_witness(H: Iterable[Sequence[int]]):
    """Two triples sharing a pair (or a repeated triple), or None."""
    owner = {}
    for t in _as_triples(H):
        for pr in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
            if pr in owner:
                return owner[pr], t
            owner[pr] = t
    return None


def girth_witness_patterns(H: Iterable[Sequence[int]], catalog: ObstructionCatalog):
    """A triple of H through which some obstruction embeds, or None."""
    tr = _as_triples(H)
    w = partial_sts_witness(tr)
    if w is not None:
        return w
    if not tr or not catalog.large_members:
        return None
    n, pair_tri, chosen_v, inc, deg = _linear_arrays(tr)
    plans = _embed_plans(catalog)
    idx = np.arange(n + 1)
    c2 = (idx * (idx - 1) // 2).astype(np.int64)
    c3 = (idx * (idx - 1) * (idx - 2) // 6).astype(np.int64)
    h = K.find_embedding(n, c2, c3, *plans.arrays(), pair_tri, chosen_v,
                         np.array([len(tr)], np.int64), inc, deg)
    return None if h < 0 else tuple(int(x) for x in chosen_v[h])


@functools.lru_cache(maxsize=None)
def _embed_plans(catalog: ObstructionCatalog):
    return embedding_plans(catalog.large_members)


def girth_check_patterns(H: Iterable[Sequence[int]], catalog: ObstructionCatalog) -> bool:
    """True iff H contains no copy of any obstruction on at most ell vertices."""
    return girth_witness_patterns(H, catalog) is None


# ---------------------------------------------------------------------------
# snapshots
# ---------------------------------------------------------------------------

def _rel_error(obs: float, pred: float) -> float:
    if abs(pred) < ABS_ERROR_BELOW:
        return obs - pred
    return (obs - pred) / pred


@dataclass
class Snapshot:
    i: int
    t: float
    q_size: int
    y_samples: list = field(default_factory=list)   # [(u, v, Y)]
    w_samples: list = field(default_factory=list)   # [(triple, key hex, k, count)]
    predicted: TrajectoryPoint | None = None
    rel_errors: dict = field(default_factory=dict)

    @property
    def y_mean(self) -> float:
        return float(np.mean([y for _, _, y in self.y_samples])) if self.y_samples else math.nan

    def w_mean(self, key: str, k: int) -> float:
        vals = [c for _, kk, k2, c in self.w_samples if kk == key and k2 == k]
        return float(np.mean(vals)) if vals else math.nan

    def to_dict(self) -> dict:
        return {
            "i": self.i, "t": self.t, "q_size": self.q_size,
            "y_samples": [list(s) for s in self.y_samples],
            "w_samples": [[list(tr), key, k, c] for tr, key, k, c in self.w_samples],
            "predicted": None if self.predicted is None else self.predicted.to_dict(),
            "rel_errors": dict(self.rel_errors),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Snapshot":
        return cls(
            i=int(d["i"]), t=float(d["t"]), q_size=int(d["q_size"]),
            y_samples=[tuple(int(x) for x in s) for s in d["y_samples"]],
            w_samples=[(tuple(int(x) for x in tr), key, int(k), int(c)) for tr, key, k, c in d["w_samples"]],
            predicted=None if d.get("predicted") is None else TrajectoryPoint.from_dict(d["predicted"]),
            rel_errors={k: float(v) for k, v in d.get("rel_errors", {}).items()},
        )


def take_snapshot(state: ProcessState, pair_samples: int = DEFAULT_PAIR_SAMPLES,
                  triple_samples: int = DEFAULT_TRIPLE_SAMPLES, w_ks: Sequence[int] | None = None,
                  check_codegrees: bool = True) -> Snapshot:
    """Observed |Q|, sampled Y and W values, and predictions at t = i/n^2.

    Samples come from the state's dedicated sampling generator so the
    process itself is not perturbed.  ``w_ks`` restricts the k values
    counted (all ``0..e_F-2`` by default).
    """
    rng = state.sample_rng
    n = state.n
    t = state.t
    pred = evaluate(min(t, 1.0 / 6.0), n, state.catalog)
    snap = Snapshot(i=state.i, t=t, q_size=state.q_size, predicted=pred)

    pairs = state.alive_pairs()
    if pair_samples and len(pairs):
        pick = rng.choice(len(pairs), size=min(pair_samples, len(pairs)), replace=False)
        for j in np.sort(pick):
            u, v = (int(x) for x in pairs[j])
            snap.y_samples.append((u, v, codegree_Y(state, u, v, check=check_codegrees)))

    if triple_samples and state.q_size and state.catalog.large_members:
        pick = rng.choice(state.q_size, size=min(triple_samples, state.q_size), replace=False)
        codes = sorted(int(state.Q[j]) for j in pick)
        for code in codes:
            tr = K.unrank3(code, n, state.c2, state.c3)
            tr = tuple(int(x) for x in tr)
            for F in state.catalog.large_members:
                ks = range(F.edge_count - 1) if w_ks is None else [k for k in w_ks if k <= F.edge_count - 2]
                for k in ks:
                    snap.w_samples.append((tr, F.key_hex, k, count_W(state, tr, F, k)))

    snap.rel_errors["q"] = _rel_error(snap.q_size, pred.q_hat)
    if snap.y_samples:
        snap.rel_errors["y"] = _rel_error(snap.y_mean, pred.y_hat)
    for (key, k), val in sorted(pred.w_hat.items()):
        m = snap.w_mean(key, k)
        if not math.isnan(m):
            snap.rel_errors[f"w:{key}:{k}"] = _rel_error(m, val)
    return snap


def verify_triple_system(H: Iterable[Sequence[int]], ell: int, catalog: ObstructionCatalog | None = None,
                         subset_max_vertices: int = 64) -> dict:
    """Report used by the ``verify`` command: partial STS and girth > ell checks."""
    tr = _as_triples(H)
    if catalog is None:
        catalog = enumerate_obstructions(ell)
    elif catalog.ell != ell:
        raise ValueError(f"catalog is for ell={catalog.ell}, asked for ell={ell}")
    sts = partial_sts_witness(tr)
    pat = girth_witness_patterns(tr, catalog)
    report = {
        "schema_version": 1,
        "ell": ell,
        "triples": len(tr),
        "partial_sts_ok": sts is None,
        "girth_ok": pat is None,
        "witnesses": [],
    }
    if sts is not None:
        report["witnesses"].append({"kind": "shared_pair", "triples": [list(x) for x in sts]})
    if pat is not None and sts is None:
        report["witnesses"].append({"kind": "obstruction_through", "triple": list(pat)})
    nverts = len({x for t in tr for x in t})
    if nverts <= subset_max_vertices:
        sub = girth_witness_subsets(tr, ell, subset_max_vertices)
        report["subset_girth_ok"] = sub is None
        if sub is not None:
            report["witnesses"].append({"kind": "dense_set", "vertices": sorted(sub)})
    return report
