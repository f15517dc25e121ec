"""Multi-trial runs, sweeps, concentration reports and exponent fits."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import enumerate_obstructions
from .engine import DEFAULT_MAX_BYTES, init_process, run_to_completion
from .observables import Snapshot, take_snapshot
from .trajectories import counting_estimate

SCHEMA_VERSION = 1
DEFAULT_T_GRID = (0.02, 0.05, 0.10, 0.13, 0.15)
DEFAULT_TOLERANCES = {"q": 0.05, "y": 0.10, "w": 0.20}


@dataclass
class RunConfig:
    n: int
    ell: int
    seed: int
    snapshot_every: int | None = None
    snapshot_times: tuple[float, ...] = DEFAULT_T_GRID
    pair_samples: int = 200
    triple_samples: int = 50
    w_ks: tuple[int, ...] | None = None
    max_steps: int | None = None
    max_bytes: int = DEFAULT_MAX_BYTES

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snapshot_times"] = list(self.snapshot_times)
        d["w_ks"] = None if self.w_ks is None else list(self.w_ks)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        d = dict(d)
        d["snapshot_times"] = tuple(d.get("snapshot_times") or ())
        if d.get("w_ks") is not None:
            d["w_ks"] = tuple(d["w_ks"])
        return cls(**d)


@dataclass
class RunRecord:
    config: RunConfig
    snapshots: list[Snapshot]
    m: int
    remaining_edges: int
    wall_time: float = 0.0
    triples: list[tuple[int, int, int]] | None = None

    def to_dict(self, timing: bool = True, triples: bool = False) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "snapshots": [s.to_dict() for s in self.snapshots],
            "terminal": {"m": self.m, "remaining_edges": self.remaining_edges},
        }
        if timing:
            d["terminal"]["wall_time"] = self.wall_time
        if triples and self.triples is not None:
            d["triples"] = [list(t) for t in self.triples]
        return d

    def to_json(self, timing: bool = True, triples: bool = False) -> str:
        return json.dumps(self.to_dict(timing, triples), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunRecord":
        term = d["terminal"]
        tr = d.get("triples")
        return cls(
            config=RunConfig.from_dict(d["config"]),
            snapshots=[Snapshot.from_dict(s) for s in d["snapshots"]],
            m=int(term["m"]), remaining_edges=int(term["remaining_edges"]),
            wall_time=float(term.get("wall_time", 0.0)),
            triples=None if tr is None else [tuple(int(x) for x in t) for t in tr],
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunRecord):
            return NotImplemented
        return self.to_json(timing=False, triples=True) == other.to_json(timing=False, triples=True)

    @property
    def covered_fraction(self) -> float:
        n = self.config.n
        return 3 * self.m / math.comb(n, 2)

    def csv_rows(self) -> list[dict]:
        rows = []
        for s in self.snapshots:
            pr = s.predicted
            row = {
                "i": s.i, "t": s.t,
                "q_obs": s.q_size, "q_pred": pr.q_hat, "q_relerr": s.rel_errors.get("q", math.nan),
                "y_mean_obs": s.y_mean, "y_pred": pr.y_hat, "y_relerr": s.rel_errors.get("y", math.nan),
            }
            for (key, k) in sorted(pr.w_hat):
                row[f"w_obs:{key}:{k}"] = s.w_mean(key, k)
                row[f"w_pred:{key}:{k}"] = pr.w_hat[(key, k)]
                row[f"w_relerr:{key}:{k}"] = s.rel_errors.get(f"w:{key}:{k}", math.nan)
            rows.append(row)
        return rows

    def to_csv(self) -> str:
        rows = self.csv_rows()
        buf = io.StringIO()
        buf.write(f"# schema_version={SCHEMA_VERSION} n={self.config.n} ell={self.config.ell} "
                  f"seed={self.config.seed} m={self.m} remaining_edges={self.remaining_edges}\n")
        fields = list(rows[0]) if rows else ["i", "t", "q_obs", "q_pred", "q_relerr",
                                             "y_mean_obs", "y_pred", "y_relerr"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()


def parse_csv(text: str) -> tuple[dict, list[dict]]:
    """Inverse of :meth:`RunRecord.to_csv`: (header metadata, rows)."""
    lines = text.splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        for tok in lines[0][1:].split():
            k, v = tok.split("=", 1)
            meta[k] = int(v)
        lines = lines[1:]
    rows = []
    for r in csv.DictReader(lines):
        rows.append({k: (int(v) if k in ("i", "q_obs") else float(v)) for k, v in r.items()})
    return meta, rows


def run_trial(config: RunConfig, keep_triples: bool = False) -> RunRecord:
    catalog = enumerate_obstructions(config.ell)
    start = time.perf_counter()
    state = init_process(config.n, config.ell, config.seed, catalog, max_bytes=config.max_bytes)

    def snap(st):
        return take_snapshot(st, config.pair_samples, config.triple_samples, config.w_ks)

    res = run_to_completion(state, config.snapshot_every, config.snapshot_times, snap,
                            max_steps=config.max_steps)
    wall = time.perf_counter() - start
    return RunRecord(config, res.snapshots, res.m, math.comb(config.n, 2) - 3 * res.m, wall,
                     res.triples if keep_triples else None)


def run_trials(n: int, ell: int, seeds: Sequence[int], snapshot_every: int | None = None,
               workers: int = 1, keep_triples: bool = False, **kwargs) -> list[RunRecord]:
    """One record per seed, in seed order; seeds are independent."""
    configs = [RunConfig(n=n, ell=ell, seed=int(s), snapshot_every=snapshot_every, **kwargs) for s in seeds]
    if workers <= 1 or len(configs) <= 1:
        return [run_trial(c, keep_triples) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_trial, configs, [keep_triples] * len(configs)))


def fit_exponent(remaining: Mapping[int, Sequence[float]], min_seeds: int = 3) -> float:
    """Least-squares slope of log(mean remaining edges) against log n."""
    ns = sorted(remaining)
    if len(ns) < 3:
        raise ValueError("need at least 3 distinct n values")
    means = []
    for n in ns:
        vals = np.asarray(remaining[n], dtype=float)
        if len(vals) < min_seeds:
            raise ValueError(f"n={n}: need at least {min_seeds} samples, got {len(vals)}")
        mu = vals.mean()
        if not mu > 0:
            raise ValueError(f"n={n}: mean remaining edges must be positive")
        means.append(mu)
    slope, _ = np.polyfit(np.log(ns), np.log(means), 1)
    return float(slope)


@dataclass
class ConcentrationRow:
    t: float
    worst: dict            # observable -> worst |relative error| over runs
    passed: dict           # observable -> bool

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


@dataclass
class SweepReport:
    ell: int
    per_n: dict = field(default_factory=dict)   # n -> {"mean", "std", "count", "covered"}
    fitted_exponent: float | None = None
    concentration: list[ConcentrationRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION, "ell": self.ell,
            "per_n": {str(n): v for n, v in sorted(self.per_n.items())},
            "fitted_exponent": self.fitted_exponent,
            "concentration": [{"t": r.t, "worst": r.worst, "passed": r.passed} for r in self.concentration],
        }


def _tol_for(name: str, tolerances: Mapping[str, float]) -> float:
    if name in tolerances:
        return tolerances[name]
    return tolerances[name.split(":", 1)[0]]


def concentration_report(records: Iterable[RunRecord], tolerances: Mapping[str, float] = DEFAULT_TOLERANCES,
                         t_grid: Sequence[float] | None = None) -> list[ConcentrationRow]:
    """Worst relative error of each observable at each snapshot time, with pass/fail."""
    by_t: dict[float, dict[str, float]] = {}
    for rec in records:
        n2 = rec.config.n ** 2
        for s in rec.snapshots:
            if t_grid is not None:
                near = min(t_grid, key=lambda g: abs(g - s.t))
                if abs(round(near * n2) - s.i) > 0:
                    continue
                t = near
            else:
                t = round(s.t, 6)
            row = by_t.setdefault(t, {})
            for name, err in s.rel_errors.items():
                row[name] = max(row.get(name, 0.0), abs(err))
    out = []
    for t in sorted(by_t):
        worst = by_t[t]
        passed = {k: bool(v <= _tol_for(k, tolerances)) for k, v in worst.items()}
        out.append(ConcentrationRow(t, worst, passed))
    return out


def aggregate(records: Iterable[RunRecord]) -> dict[int, dict]:
    groups: dict[int, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.config.n, []).append(r)
    out = {}
    for n in sorted(groups):
        # fixed order so float sums do not depend on the input order
        recs = sorted(groups[n], key=lambda r: (r.config.seed, r.m))
        rem = np.array([r.remaining_edges for r in recs], dtype=float)
        cov = np.array([r.covered_fraction for r in recs])
        out[n] = {"mean": float(rem.mean()), "std": float(rem.std(ddof=1)) if len(rem) > 1 else 0.0,
                  "count": len(recs), "covered": float(cov.mean())}
    return out


def sweep(ns: Sequence[int], ell: int, seeds: Sequence[int], workers: int = 1,
          tolerances: Mapping[str, float] = DEFAULT_TOLERANCES, **kwargs) -> tuple[SweepReport, list[RunRecord]]:
    records = []
    for n in ns:
        records.extend(run_trials(n, ell, seeds, workers=workers, **kwargs))
    return summarize(records, ell, tolerances), records


def summarize(records: Sequence[RunRecord], ell: int,
              tolerances: Mapping[str, float] = DEFAULT_TOLERANCES) -> SweepReport:
    per_n = aggregate(records)
    fitted = None
    if len(per_n) >= 3 and all(v["count"] >= 3 and v["mean"] > 0 for v in per_n.values()):
        rem: dict[int, list[float]] = {}
        for r in records:
            rem.setdefault(r.config.n, []).append(r.remaining_edges)
        fitted = fit_exponent({n: sorted(v) for n, v in rem.items()})
    return SweepReport(ell, per_n, fitted, concentration_report(records, tolerances))


def counting_table(ns: Sequence[int], ell: int) -> list[dict]:
    catalog = enumerate_obstructions(ell)
    rows = []
    for n in ns:
        est = counting_estimate(n, catalog)
        rows.append({"n": n, **est._asdict()})
    return rows
