"""The high-girth triple process.

State layout (all numpy, mutated in place by compiled kernels):

* ``Q`` / ``pos``: dense array of available triple codes with a code ->
  position map; uniform sampling is a uniform index, deletion is
  swap-with-last.  ``pos[code] == -1`` means unavailable.
* ``Y[u, v]`` (``u < v``): number of available triples through the pair,
  decremented on every deletion.
* ``pair_tri[u, v]``: index of the chosen triple covering the pair, or -1
  while the pair is alive.
* ``inc[v, :deg[v]]``: chosen triples through ``v``.

A triple code is the colex rank ``C(c,3) + C(b,2) + a`` of ``a < b < c``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .catalog import MAX_ELL, ObstructionCatalog, enumerate_obstructions
from .embedding import TripleSystem, iter_embeddings
from .plans import TriplePlans, closing_plans

log = logging.getLogger(__name__)

DEFAULT_MAX_BYTES = 4 * 1024**3


class MemoryBudgetError(MemoryError):
    """Raised before allocation when a state would exceed the byte budget."""


def encode_triple(a: int, b: int, c: int) -> int:
    a, b, c = sorted((int(a), int(b), int(c)))
    if a < 0 or a == b or b == c:
        raise ValueError(f"not a triple of distinct non-negative vertices: {(a, b, c)}")
    return math.comb(c, 3) + math.comb(b, 2) + a


def decode_triple(code: int) -> tuple[int, int, int]:
    code = int(code)
    if code < 0:
        raise ValueError("negative triple code")
    c = 2
    while math.comb(c + 1, 3) <= code:
        c += 1
    code -= math.comb(c, 3)
    b = 1
    while math.comb(b + 1, 2) <= code:
        b += 1
    code -= math.comb(b, 2)
    return code, b, c


def estimate_bytes(n: int) -> int:
    """Bytes allocated by :func:`init_process` for ``n`` vertices."""
    total = math.comb(n, 3)
    maxm = math.comb(n, 2) // 3 + 1
    return 8 * total + 8 * n * n + 4 * n * (n // 2 + 1) + 16 * maxm + 16 * (n + 1)


@dataclass
class ProcessState:
    n: int
    ell: int
    seed: int
    catalog: ObstructionCatalog
    plans: TriplePlans
    rng: np.random.Generator
    sample_rng: np.random.Generator
    c2: np.ndarray
    c3: np.ndarray
    Q: np.ndarray
    pos: np.ndarray
    qsize: np.ndarray
    Y: np.ndarray
    pair_tri: np.ndarray
    chosen: np.ndarray
    chosen_v: np.ndarray
    inc: np.ndarray
    deg: np.ndarray
    nchosen: np.ndarray
    terminated: bool = False
    removed_last: int = field(default=0, repr=False)

    @property
    def i(self) -> int:
        """Number of chosen triples so far."""
        return int(self.nchosen[0])

    @property
    def t(self) -> float:
        return self.i / self.n**2

    @property
    def q_size(self) -> int:
        return int(self.qsize[0])

    @property
    def alive_pair_count(self) -> int:
        return math.comb(self.n, 2) - 3 * self.i

    def available(self) -> set[int]:
        return set(int(x) for x in self.Q[: self.q_size])

    def available_triples(self) -> set[tuple[int, int, int]]:
        return {decode_triple(x) for x in self.Q[: self.q_size]}

    def chosen_codes(self) -> list[int]:
        return [int(x) for x in self.chosen[: self.i]]

    def chosen_triples(self) -> list[tuple[int, int, int]]:
        return [tuple(int(x) for x in row) for row in self.chosen_v[: self.i]]

    def is_available(self, triple: Sequence[int]) -> bool:
        return bool(self.pos[encode_triple(*triple)] >= 0)

    def pair_alive(self, u: int, v: int) -> bool:
        return u != v and self.pair_tri[u, v] < 0

    def alive_pairs(self) -> np.ndarray:
        """Array of shape (k, 2) of alive pairs ``u < v``."""
        iu, iv = np.triu_indices(self.n, 1)
        mask = self.pair_tri[iu, iv] < 0
        return np.stack([iu[mask], iv[mask]], axis=1)


def _closing_catalog(ell: int, catalog: ObstructionCatalog | None) -> ObstructionCatalog:
    if catalog is None:
        return enumerate_obstructions(ell)
    if catalog.ell != ell:
        raise ValueError(f"catalog is for ell={catalog.ell}, process asked for ell={ell}")
    return catalog


def init_process(n: int, ell: int, seed: int, catalog: ObstructionCatalog | None = None,
                 max_bytes: int = DEFAULT_MAX_BYTES) -> ProcessState:
    """Empty hypergraph on ``n`` vertices with every triple available."""
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    if not 4 <= ell <= MAX_ELL:
        raise ValueError(f"ell must lie in [4, {MAX_ELL}], got {ell}")
    need = estimate_bytes(n)
    if need > max_bytes:
        raise MemoryBudgetError(f"n={n} needs ~{need / 2**30:.2f} GiB, budget {max_bytes / 2**30:.2f} GiB")
    if math.comb(n, 3) >= 2**31:
        raise MemoryBudgetError(f"n={n}: triple codes overflow int32")
    catalog = _closing_catalog(ell, catalog)
    total = math.comb(n, 3)
    maxm = math.comb(n, 2) // 3 + 1
    ss = np.random.SeedSequence(seed)
    proc_ss, sample_ss = ss.spawn(2)
    idx = np.arange(n + 1)
    c2 = (idx * (idx - 1) // 2).astype(np.int64)
    c3 = (idx * (idx - 1) * (idx - 2) // 6).astype(np.int64)
    state = ProcessState(
        n=n, ell=ell, seed=seed, catalog=catalog,
        plans=closing_plans(catalog.large_members),
        rng=np.random.Generator(np.random.PCG64(proc_ss)),
        sample_rng=np.random.Generator(np.random.PCG64(sample_ss)),
        c2=c2, c3=c3,
        Q=np.empty(total, np.int32), pos=np.empty(total, np.int32),
        qsize=np.array([total], np.int64),
        Y=np.zeros((n, n), np.int32),
        pair_tri=np.full((n, n), -1, np.int32),
        chosen=np.zeros(maxm, np.int32), chosen_v=np.zeros((maxm, 3), np.int32),
        inc=np.zeros((n, n // 2 + 1), np.int32), deg=np.zeros(n, np.int32),
        nchosen=np.zeros(1, np.int64),
    )
    K.init_arrays(n, state.Q, state.pos, state.Y)
    return state


def _add(state: ProcessState, code: int) -> int:
    return K.add_triple(code, state.n, state.c2, state.c3, state.Q, state.pos, state.qsize,
                        state.Y, state.pair_tri, state.chosen, state.chosen_v, state.inc,
                        state.deg, state.nchosen)


def _close(state: ProcessState, triple, remove: bool, out: np.ndarray) -> int:
    x, y, z = triple
    return K.close_triples(x, y, z, remove, state.n, state.c2, state.c3, *state.plans.arrays(),
                           state.pair_tri, state.chosen_v, state.nchosen, state.inc, state.deg,
                           state.Q, state.pos, state.qsize, state.Y, out)


_EMPTY = np.zeros(0, np.int64)


def add_triple(state: ProcessState, triple: Sequence[int]) -> int:
    """Force an available triple into H and apply all resulting deletions.

    Used to build hand-made states; :func:`step` draws the triple at random.
    """
    code = encode_triple(*triple)
    if code >= state.pos.shape[0] or state.pos[code] < 0:
        raise ValueError(f"triple {tuple(triple)} is not available")
    before = state.q_size
    _add(state, code)
    if len(state.plans):
        _close(state, decode_triple(code), True, _EMPTY)
    state.removed_last = before - state.q_size
    return code


def step(state: ProcessState) -> int | None:
    """Add one uniformly random available triple; ``None`` once Q is empty."""
    if state.terminated or state.q_size == 0:
        state.terminated = True
        return None
    j = int(state.rng.integers(state.q_size))
    code = int(state.Q[j])
    before = state.q_size
    _add(state, code)
    if len(state.plans):
        _close(state, decode_triple(code), True, _EMPTY)
    state.removed_last = before - state.q_size
    return code


def find_closing_triples(state: ProcessState, new_triple: Sequence[int] | int) -> set[int]:
    """Codes of available triples t such that H + t has a copy of some large
    obstruction using both ``new_triple`` (already in H) and t.

    Read-only: Q is not modified.
    """
    triple = decode_triple(new_triple) if isinstance(new_triple, (int, np.integer)) else tuple(sorted(new_triple))
    h = state.pair_tri[triple[0], triple[1]]
    if h < 0 or tuple(state.chosen_v[h]) != triple:
        raise ValueError(f"{triple} is not a chosen triple")
    if not len(state.plans):
        return set()
    out = np.zeros(256, np.int64)
    while True:
        found = _close(state, triple, False, out)
        if found <= out.shape[0]:
            return set(int(x) for x in out[:found])
        out = np.zeros(2 * found, np.int64)


@dataclass
class RunResult:
    triples: list[tuple[int, int, int]]
    m: int
    snapshots: list


def run_to_completion(state: ProcessState, snapshot_every: int | None = None,
                      snapshot_times: Iterable[float] = (),
                      snapshot_fn: Callable | None = None,
                      on_step: Callable[[ProcessState, int], None] | None = None,
                      max_steps: int | None = None) -> RunResult:
    """Step until no triple is available (or ``max_steps`` more steps were taken).

    Snapshots are taken at step indices that are multiples of
    ``snapshot_every`` and at ``round(t * n^2)`` for each requested time,
    before the corresponding step is taken.
    """
    targets = set()
    n2 = state.n**2
    for t in snapshot_times:
        targets.add(int(round(t * n2)))
    if snapshot_fn is None and (snapshot_every or targets):
        from .observables import take_snapshot as snapshot_fn
    snaps = []
    taken = 0
    while True:
        i = state.i
        if snapshot_fn is not None and (i in targets or (snapshot_every and i % snapshot_every == 0)):
            snaps.append(snapshot_fn(state))
        if max_steps is not None and taken >= max_steps:
            break
        code = step(state)
        if code is None:
            break
        taken += 1
        if on_step is not None:
            on_step(state, code)
    return RunResult(state.chosen_triples(), state.i, snaps)


# ---------------------------------------------------------------------------
# brute-force availability oracles
# ---------------------------------------------------------------------------

def _host(state: ProcessState) -> TripleSystem:
    return TripleSystem(state.chosen_triples())


def _copy_through(host: TripleSystem, xyz: tuple[int, int, int], F, n: int) -> bool:
    """Does host + xyz contain a copy of F that uses xyz?"""
    def has(t):
        return t == xyz or t in host.triples

    def nbrs(v):
        s = set(host.neighbors.get(v, ()))
        if v in xyz:
            s.update(w for w in xyz if w != v)
        return s

    for A in F.triples:
        for perm in _perms(xyz):
            fixed = dict(zip(A, perm))
            for _ in iter_embeddings(F.triples, F.vertex_count, n, has, nbrs, fixed):
                return True
    return False


def _perms(t):
    a, b, c = t
    return ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a))


def is_available_bruteforce(state: ProcessState, xyz: Sequence[int], family: str = "large") -> bool:
    """Ground-truth availability from the definition.

    ``family="large"``: meets every chosen triple in at most one vertex and
    H + xyz has no copy of an obstruction on >= 6 vertices.
    ``family="all"``: H + xyz has no copy of any obstruction (diamond included).
    """
    xyz = tuple(sorted(int(v) for v in xyz))
    host = _host(state)
    if xyz in host.triples:
        return False
    if family == "large":
        for t in host.triples:
            if len(set(t).intersection(xyz)) >= 2:
                return False
        members = state.catalog.large_members
    elif family == "all":
        members = state.catalog.all_members
    else:
        raise ValueError(f"unknown family {family!r}")
    return not any(_copy_through(host, xyz, F, state.n) for F in members)


def closed_triples_bruteforce(triples: Iterable[Sequence[int]], catalog: ObstructionCatalog,
                              n: int) -> set[tuple[int, int, int]]:
    """Triples t not in H whose addition completes a large obstruction.

    Enumerates, from scratch, every embedding of F minus one triple into H.
    """
    host = TripleSystem(triples)

    def nbrs(v):
        return host.neighbors.get(v, ())

    closed = set()
    for F in catalog.large_members:
        for M in F.triples:
            rest = [t for t in F.triples if t != M]
            for phi in iter_embeddings(rest, F.vertex_count, n, host.__contains__, nbrs):
                img = tuple(sorted(phi[x] for x in M))
                if img in host.triples:
                    raise AssertionError(f"H already contains a copy of {F.triples}")
                closed.add(img)
    return closed


def available_set_bruteforce(state: ProcessState) -> set[int]:
    """All available triple codes, recomputed from H alone."""
    n = state.n
    pairs = set()
    for a, b, c in state.chosen_triples():
        pairs.update(((a, b), (a, c), (b, c)))
    closed = closed_triples_bruteforce(state.chosen_triples(), state.catalog, n)
    out = set()
    for c in range(2, n):
        for b in range(1, c):
            if (b, c) in pairs:
                continue
            for a in range(b):
                if (a, b) in pairs or (a, c) in pairs or (a, b, c) in closed:
                    continue
                out.add(encode_triple(a, b, c))
    return out
