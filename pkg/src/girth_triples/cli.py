"""Command line entry point: ``python -m girth_triples <command> ...``.

Relative output paths are resolved against ``$GIRTH_TRIPLES_OUTPUT_DIR``
when set.  ``--config FILE`` reads ``key = value`` lines (option names with
dashes or underscores); explicit flags override the file, which overrides
built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .catalog import enumerate_obstructions
from .engine import DEFAULT_MAX_BYTES
from .experiments import (DEFAULT_T_GRID, DEFAULT_TOLERANCES, SCHEMA_VERSION, RunConfig, RunRecord,
                          concentration_report, counting_table, run_trial, summarize, sweep)
from .observables import verify_triple_system
from .trajectories import evaluate

OUTPUT_ENV = "GIRTH_TRIPLES_OUTPUT_DIR"
log = logging.getLogger("girth_triples")


def _out_path(path: str | None) -> Path | None:
    if path is None or path == "-":
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit(text: str, path: str | None) -> None:
    p = _out_path(path)
    if p is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        p.write_text(text)
        log.info("wrote %s", p)


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None:
            raise SystemExit(f"config: unknown option {key!r}")
        conv = act.type or str
        if act.nargs in ("+", "*"):
            defaults[key] = [conv(x) for x in raw.replace(",", " ").split()]
        elif isinstance(act, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = conv(raw)
        act.required = False
    sub.set_defaults(**defaults)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_catalog(args) -> int:
    cat = enumerate_obstructions(args.ell)
    _emit(json.dumps(cat.to_json(), indent=1), args.out)
    return 0


def _record_text(rec: RunRecord, path: str | None, keep_triples: bool) -> str:
    if path and path.endswith(".csv"):
        return rec.to_csv()
    return json.dumps(rec.to_dict(timing=True, triples=keep_triples), indent=1, sort_keys=True)


def cmd_run(args) -> int:
    cfg = RunConfig(n=args.n, ell=args.ell, seed=args.seed, snapshot_every=args.snapshot_every,
                    snapshot_times=tuple(args.times), pair_samples=args.pair_samples,
                    triple_samples=args.triple_samples, w_ks=tuple(args.w_k) if args.w_k else None,
                    max_steps=args.max_steps, max_bytes=args.max_bytes)
    rec = run_trial(cfg, keep_triples=args.triples_out is not None or args.keep_triples)
    _emit(_record_text(rec, args.out, args.keep_triples), args.out)
    if args.triples_out:
        _emit("".join(f"{a} {b} {c}\n" for a, b, c in rec.triples), args.triples_out)
    log.info("n=%d ell=%d seed=%d: m=%d remaining=%d (%.1fs)", args.n, args.ell, args.seed,
             rec.m, rec.remaining_edges, rec.wall_time)
    return 0


def cmd_sweep(args) -> int:
    report, records = sweep(args.ns, args.ell, args.seeds, workers=args.workers,
                            snapshot_times=tuple(args.times), pair_samples=args.pair_samples,
                            triple_samples=args.triple_samples,
                            w_ks=tuple(args.w_k) if args.w_k else None, max_bytes=args.max_bytes)
    out = report.to_dict()
    if args.records:
        out["records"] = [r.to_dict() for r in records]
    _emit(json.dumps(out, indent=1, sort_keys=True), args.out)
    return 0


def cmd_trajectory(args) -> int:
    cat = enumerate_obstructions(args.ell)
    ts = np.linspace(0.0, 1.0 / 6.0, args.points)
    keys = [(F.key_hex, k) for F in cat.large_members for k in range(F.edge_count - 1)]
    rows = []
    for t in ts:
        pt = evaluate(float(t), args.n, cat)
        row = [repr(pt.t), repr(pt.p), repr(pt.q), repr(pt.q_hat), repr(pt.y_hat)]
        row += [repr(pt.w_hat[k]) for k in keys]
        rows.append(row)
    import io
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "p", "q", "q_hat", "y_hat"] + [f"{key}+{k}" for key, k in keys])
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return 0


def read_triple_file(path: str) -> list[tuple[int, int, int]]:
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"bad triple line: {line!r}")
        out.append(tuple(int(x) for x in parts))
    return out


def cmd_verify(args) -> int:
    triples = read_triple_file(args.infile)
    report = verify_triple_system(triples, args.ell, subset_max_vertices=args.subset_max_vertices)
    _emit(json.dumps(report, indent=1, sort_keys=True), args.out)
    ok = report["girth_ok"] and report["partial_sts_ok"] and report.get("subset_girth_ok", True)
    return 0 if ok else 1


def cmd_report(args) -> int:
    out: dict = {"schema_version": SCHEMA_VERSION}
    if args.infiles:
        records = [RunRecord.from_json(Path(p).read_text()) for p in args.infiles]
        tol = dict(DEFAULT_TOLERANCES)
        tol.update({"q": args.tol_q, "y": args.tol_y, "w": args.tol_w})
        ell = records[0].config.ell
        rep = summarize(records, ell, tol)
        out["sweep"] = rep.to_dict()
        rows = concentration_report(records, tol)
        out["all_pass"] = all(r.ok for r in rows)
    if args.counting:
        out["counting"] = counting_table(args.ns, args.ell)
    _emit(json.dumps(out, indent=1, sort_keys=True), args.out)
    return 0 if out.get("all_pass", True) else 1


# ---------------------------------------------------------------------------

def _add_sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--times", type=float, nargs="*", default=list(DEFAULT_T_GRID),
                   help="snapshot times t = i/n^2")
    p.add_argument("--pair-samples", type=int, default=200)
    p.add_argument("--triple-samples", type=int, default=50)
    p.add_argument("--w-k", type=int, nargs="*", default=None,
                   help="restrict extension counts to these k")
    p.add_argument("--max-bytes", type=int, default=DEFAULT_MAX_BYTES)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="girth_triples", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--config", default=None, help="key=value defaults file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="enumerate obstructions and write the catalog JSON")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("run", help="run one process to completion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snapshot-every", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--out", default=None, help="*.json or *.csv")
    p.add_argument("--triples-out", default=None, help="write the final triples, one per line")
    p.add_argument("--keep-triples", action="store_true")
    _add_sampling(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="several n and seeds; aggregates and exponent fit")
    p.add_argument("--ns", type=int, nargs="+", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--records", action="store_true", help="embed every run record")
    p.add_argument("--out", default=None)
    _add_sampling(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trajectory", help="predicted trajectories as CSV")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("verify", help="check a triple file: partial STS and girth > ell")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--subset-max-vertices", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="concentration report over run records; counting estimates")
    p.add_argument("--in", dest="infiles", nargs="*", default=[])
    p.add_argument("--tol-q", type=float, default=DEFAULT_TOLERANCES["q"])
    p.add_argument("--tol-y", type=float, default=DEFAULT_TOLERANCES["y"])
    p.add_argument("--tol-w", type=float, default=DEFAULT_TOLERANCES["w"])
    p.add_argument("--counting", action="store_true")
    p.add_argument("--ell", type=int, default=6)
    p.add_argument("--ns", type=int, nargs="*", default=[100, 1000, 10000])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre_parser = argparse.ArgumentParser(add_help=False)
    pre_parser.add_argument("--config", default=None)
    pre, rest = pre_parser.parse_known_args(argv)
    choices = parser._subparsers._group_actions[0].choices
    command = next((a for a in rest if a in choices), None)
    if pre.config and command is not None:
        _apply_config(choices[command], _read_config(pre.config))
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
