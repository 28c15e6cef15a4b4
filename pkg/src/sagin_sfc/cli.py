"""Batch command line: single runs, parameter sweeps, oracle comparison and
ILP export.  Every output is CSV (comma, header row, UTF-8) or plain text,
written deterministically so that repeated invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import yaml

from sagin_sfc.engine import EVENT_COLUMNS, RunReport, rows_to_csv, run_simulation
from sagin_sfc.oracle import (STATE_LIMIT, OracleRefusal, TinyInstance, enumerate_optimal,
                              export_ilp, estimate_states, heuristic_value, random_tiny_instance)
from sagin_sfc.recovery import POLICY_CLASSES
from sagin_sfc.scenario import ScenarioError, parse_config, scenario_from_dict
from sagin_sfc.topology import GeometricNetwork

log = logging.getLogger("sagin_sfc")

OUT_ENV = "SAGIN_SFC_OUT"
EXIT_INVALID, EXIT_AUDIT, EXIT_REFUSED = 2, 1, 3

SLOT_COLUMNS = ["slot", "unfinished", "processing", "processed_ratio", "completed", "failed_nodes"]
FAILURE_COLUMNS = ["slot", "failed", "affected_sfcs"]
BREAKDOWN_COLUMNS = ["sfc", "completed", "total", "processing", "transmission", "storage",
                     "redeploy", "other", "completion_time", "first_tx"]
SWEEP_COLUMNS = ["axis", "value", "policy", "seed", "total_time_s", "mean_time_s",
                 "max_completion_s", "mean_processed_ratio", "completed", "audit"]
SUMMARY_METRICS = ["total_time_s", "mean_time_s", "max_completion_s", "mean_processed_ratio",
                   "completed"]
SUMMARY_COLUMNS = (["axis", "value", "policy", "runs", "failed_runs"]
                   + [f"{m}_{s}" for m in SUMMARY_METRICS for s in ("mean", "std")])
ORACLE_COLUMNS = ["instance", "status", "states", "oracle", "frmg", "gap", "reason"]

AXES = {"uav_count", "sfc_count", "lambda", "data_range", "vnf_range", "failure_interval"}


# --------------------------------------------------------------------------
# scenario documents

def read_doc(path) -> dict:
    if path is None:
        return {}
    try:
        doc = parse_config(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario file is not valid YAML/JSON: {exc}") from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a mapping")
    return doc


def with_seed(doc: dict, seed) -> dict:
    out = dict(doc)
    if seed is not None:
        out["seed"] = int(seed)
    out.setdefault("seed", 1)
    return out


def _section(doc, name):
    sec = dict(doc.get(name) or {})
    doc[name] = sec
    return sec


def _pair(text: str, cast):
    lo, sep, hi = str(text).partition(":")
    if not sep:
        raise ScenarioError(f"range value {text!r} must look like lo:hi")
    return [cast(lo), cast(hi)]


def apply_axis(doc: dict, axis: str, value: str) -> dict:
    """Set one sweep coordinate on a copy of ``doc``."""
    out = dict(doc)
    if axis == "uav_count":
        out.pop("uav_count", None)
        _section(out, "geometry")["uav_count"] = int(value)
    elif axis == "sfc_count":
        out.pop("sfcs", None)
        out["sfc_count"] = int(value)
    elif axis == "lambda":
        _section(out, "failure")["lambda"] = float(value)
    elif axis == "failure_interval":
        _section(out, "failure")["update_interval_slots"] = int(value)
    elif axis == "data_range":
        out.pop("sfcs", None)
        out["data_range_mbit"] = _pair(value, float)
    elif axis == "vnf_range":
        out.pop("sfcs", None)
        out["vnf_range"] = _pair(value, int)
    else:
        raise ScenarioError(f"unknown sweep axis {axis!r}; expected one of {sorted(AXES)}")
    return out


# --------------------------------------------------------------------------
# run

def report_text(report: RunReport) -> str:
    doc = {
        "scenario_digest": report.scenario_digest,
        "policy": report.policy,
        "seed": report.seed,
        "audit": report.audit,
        "violations": list(report.violations),
        "metrics": {k: report.metrics[k] for k in sorted(report.metrics)},
        "failure_digest": report.failure_digest(),
        "energy": {n: {k: float(v) for k, v in sorted(e.items())}
                   for n, e in sorted(report.energy.items())},
    }
    return yaml.safe_dump(doc, sort_keys=False)


def breakdown_rows(report: RunReport) -> list:
    return [(b.sfc, int(b.completed), b.total, b.processing, b.transmission, b.storage,
             b.redeploy, b.other, b.completion_time, b.first_tx) for b in report.breakdowns]


def write_run(report: RunReport, out_dir: Path) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "report.txt": report_text(report),
        "events.csv": rows_to_csv(EVENT_COLUMNS, report.events),
        "slots.csv": rows_to_csv(SLOT_COLUMNS, report.slots),
        "failures.csv": rows_to_csv(FAILURE_COLUMNS, report.failures),
        "breakdown.csv": rows_to_csv(BREAKDOWN_COLUMNS, breakdown_rows(report)),
    }
    for name, text in files.items():
        (out_dir / name).write_text(text, encoding="utf-8", newline="")
    return sorted(files)


def cmd_run(scenario_file, out_dir, seed=None, policy=None) -> RunReport:
    doc = with_seed(read_doc(scenario_file), seed)
    if policy is not None:
        doc["policy"] = policy
    scenario = scenario_from_dict(doc)
    report = run_simulation(scenario)
    write_run(report, Path(out_dir))
    return report


# --------------------------------------------------------------------------
# sweep

def _sweep_cell(args):
    """All policies for one (value, seed): they share network and failures."""
    axis, value, seed, base, policies = args
    rows = []
    try:
        scenario = scenario_from_dict(with_seed(apply_axis(base, axis, value), seed))
        net = GeometricNetwork(scenario)
    except Exception as exc:            # recorded, never fatal for the sweep
        log.warning("cell %s=%s seed %s failed: %s", axis, value, seed, exc)
        return [(axis, value, p, seed, "", "", "", "", "", "fail") for p in policies]
    for p in policies:
        try:
            r = run_simulation(scenario, net, p)
            m = r.metrics
            rows.append((axis, value, p, seed, m["total_time_s"], m["mean_time_s"],
                         m["max_completion_s"], m["mean_processed_ratio"], m["completed"],
                         r.audit))
        except Exception as exc:
            log.warning("run %s=%s %s seed %s failed: %s", axis, value, p, seed, exc)
            rows.append((axis, value, p, seed, "", "", "", "", "", "fail"))
    return rows


def summarize(rows, policies) -> list:
    cells: dict = {}
    for r in rows:
        cells.setdefault((r[1], r[2]), []).append(r)
    out = []
    values = list(dict.fromkeys(r[1] for r in rows))
    for v in values:
        for p in policies:
            group = cells.get((v, p), [])
            ok = [r for r in group if r[9] == "pass"]
            line = [rows[0][0], v, p, len(group), len(group) - len(ok)]
            for i, _ in enumerate(SUMMARY_METRICS):
                xs = [float(r[4 + i]) for r in ok]
                line.append(statistics.fmean(xs) if xs else math.nan)
                line.append(statistics.stdev(xs) if len(xs) > 1 else 0.0)
            out.append(tuple(line))
    return out


def cmd_sweep(scenario_file, axis, values, reps, policies, out_dir, jobs=1, seed0=1):
    if axis not in AXES:
        raise ScenarioError(f"unknown sweep axis {axis!r}; expected one of {sorted(AXES)}")
    if not values:
        raise ScenarioError("sweep needs at least one value")
    for p in policies:
        if p not in POLICY_CLASSES:
            raise ScenarioError(f"unknown policy {p!r}")
    base = read_doc(scenario_file)
    tasks = [(axis, str(v), seed0 + i, base, list(policies)) for v in values for i in range(reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_cell, tasks))
    else:
        chunks = [_sweep_cell(t) for t in tasks]
    rows = [r for c in chunks for r in c]
    rows.sort(key=lambda r: (values.index(r[1]) if r[1] in values else 0,
                             list(policies).index(r[2]), r[3]))
    summary = summarize(rows, policies)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"sweep_{axis}.csv").write_text(rows_to_csv(SWEEP_COLUMNS, rows), encoding="utf-8",
                                           newline="")
    (out / f"sweep_{axis}_summary.csv").write_text(rows_to_csv(SUMMARY_COLUMNS, summary),
                                                   encoding="utf-8", newline="")
    return rows, summary


# --------------------------------------------------------------------------
# oracle

def cmd_oracle_compare(instances_dir, out_dir, generate: int = 0, seed0: int = 0):
    src = Path(instances_dir)
    src.mkdir(parents=True, exist_ok=True)
    for i in range(generate):
        inst = random_tiny_instance(seed0 + i)
        (src / f"tiny_{seed0 + i:04d}.yaml").write_text(inst.dumps(), encoding="utf-8")
    rows = []
    for path in sorted(src.glob("*.yaml")):
        name = path.stem
        try:
            inst = TinyInstance.loads(path.read_text(encoding="utf-8"))
            res = enumerate_optimal(inst)
        except (ScenarioError, OracleRefusal) as exc:
            rows.append((name, "skipped", getattr(exc, "states", ""), "", "", "", str(exc)))
            continue
        if not res.feasible:
            rows.append((name, "infeasible", res.states, "", "", "", "no complete schedule"))
            continue
        h = heuristic_value(inst)
        rows.append((name, "ok", res.states, res.value, h, h / res.value, ""))
    gaps = [r[5] for r in rows if r[1] == "ok"]
    finite = [g for g in gaps if g < math.inf]
    summary = [("instances", len(rows)), ("compared", len(gaps)),
               ("max_gap", max(gaps) if gaps else math.nan),
               ("median_gap", statistics.median(gaps) if gaps else math.nan),
               ("max_finite_gap", max(finite) if finite else math.nan),
               ("dominance_violations", sum(1 for g in gaps if g < 1.0 - 1e-9))]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "oracle_gaps.csv").write_text(rows_to_csv(ORACLE_COLUMNS, rows), encoding="utf-8",
                                         newline="")
    (out / "oracle_summary.csv").write_text(rows_to_csv(["stat", "value"], summary),
                                            encoding="utf-8", newline="")
    return rows, summary


def load_instance(path) -> TinyInstance:
    doc = read_doc(path)
    if "nodes" not in doc:
        # a full scenario: estimate its schedule space from the sizes alone
        sc = scenario_from_dict(with_seed(doc, None))
        n = len(sc.geometry.ground_stations) + sc.geometry.uav_count + len(sc.geometry.satellites)
        relays = n - len(sc.geometry.ground_stations)
        vnfs = sum(len(s.sigma) for s in sc.sfcs)
        states = (relays * sc.time.slot_count) ** vnfs
        raise OracleRefusal(f"scenario with {n} nodes, {sc.time.slot_count} slots and "
                            f"{len(sc.sfcs)} SFCs has at least {states:.3g} schedules, "
                            f"limit is {STATE_LIMIT}", states)
    return TinyInstance.from_dict(doc)


def cmd_export_ilp(scenario_file, out_file) -> str:
    inst = load_instance(scenario_file)
    states = estimate_states(inst)
    if states > STATE_LIMIT:
        raise OracleRefusal(f"instance has about {states} schedules, limit is {STATE_LIMIT}",
                            states)
    text = export_ilp(inst)
    out = Path(out_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8", newline="")
    return text


# --------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sagin-sfc", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    default_out = os.environ.get(OUT_ENV, "out")

    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("--scenario")
    r.add_argument("--out", default=default_out)
    r.add_argument("--seed", type=int)
    r.add_argument("--policy", choices=sorted(POLICY_CLASSES))

    s = sub.add_parser("sweep", help="sweep one axis over seeds and policies")
    s.add_argument("--scenario")
    s.add_argument("--out", default=default_out)
    s.add_argument("--axis", required=True, choices=sorted(AXES))
    s.add_argument("--values", required=True, help="comma separated; ranges as lo:hi")
    s.add_argument("--reps", type=int, default=100)
    s.add_argument("--seed", type=int, default=1, help="first replication seed")
    s.add_argument("--policy", default="FRMG,FLTS,RSSP,RSNT", help="comma separated")
    s.add_argument("--jobs", type=int, default=1)

    o = sub.add_parser("oracle-compare", help="exact optimum vs FRMG on tiny instances")
    o.add_argument("--scenario", required=True, help="directory of tiny instance files")
    o.add_argument("--out", default=default_out)
    o.add_argument("--generate", type=int, default=0, help="write N random instances first")
    o.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("export-ilp", help="write a tiny instance as an LP file")
    e.add_argument("--scenario", required=True)
    e.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.command == "run":
            report = cmd_run(args.scenario, args.out, args.seed, args.policy)
            print(f"total_time_s={report.total_time!r} completed="
                  f"{report.metrics['completed']}/{report.metrics['sfc_count']} audit={report.audit}")
            return 0 if report.valid else EXIT_AUDIT
        if args.command == "sweep":
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            policies = [p.strip() for p in args.policy.split(",") if p.strip()]
            rows, summary = cmd_sweep(args.scenario, args.axis, values, args.reps, policies,
                                      args.out, args.jobs, args.seed)
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(
                (r[1], r[2], f"{r[5]:.3f}") for r in summary)
            print(buf.getvalue(), end="")
            return 0
        if args.command == "oracle-compare":
            rows, summary = cmd_oracle_compare(args.scenario, args.out, args.generate, args.seed)
            for k, v in summary:
                print(f"{k}={v}")
            return 0
        if args.command == "export-ilp":
            cmd_export_ilp(args.scenario, args.out)
            print(args.out)
            return 0
    except OracleRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
