"""Budgeted optimizer comparison over graph suites.

Every (instance, depth, optimizer, attempt) cell gets a fresh sampled-mode
objective with its own derived noise stream; optimizers that need a start
point share the same per-(instance, depth, attempt) draw so no method gets
luckier initial conditions.  Rankings use exact re-scored energies; the
shot-noisy best stays in the record for transparency.
"""

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median

import numpy as np

from .baselines import nelder_mead, random_search
from .engine import QaoaParams
from .errors import ConfigError, DomainError
from .graphs import group_of, instance_id, max_cut_bruteforce, realize, \
    spec_from_id
from .kde import kde_optimize
from .objective import MeteredObjective
from .rl import rl_optimize
from .seeding import derive_seed, stream_rng

RECORDS_SCHEMA = "qaoabench-records-v1"
TAU_SCHEMA = "qaoabench-tau-v1"
METRICS_SCHEMA = "qaoabench-metrics-v1"

ROSTER = ("random", "nm", "kde", "rl")
START_CONSUMING = ("nm", "rl")
LEARNED = ("kde", "rl")


@dataclass(frozen=True)
class BenchConfig:
    depths: tuple = (1, 2, 4)
    budget: int = 192
    attempts: int = 10
    shots: int | None = 1024   # None = exact metered evaluations
    roster: tuple = ROSTER
    max_n: int | None = None   # instance filter; None keeps the whole suite
    seed: int = 0

    def __post_init__(self):
        if self.attempts < 1 or self.budget < 1:
            raise DomainError("attempts and budget must be >= 1")
        unknown = [o for o in self.roster if o not in ROSTER]
        if unknown:
            raise ConfigError(f"unknown optimizers in roster: {unknown}")
        if not self.depths or not self.roster:
            raise DomainError("depths and roster must be non-empty")


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    group: str
    depth: int
    optimizer: str
    attempt: int
    best_value: float
    best_exact: float
    evals_used: int


@dataclass
class MetricsTable:
    """Group-level medians keyed by tuples.

    tau: (group, depth, optimizer) -> median expected optimality ratio
    gap: (group, depth, optimizer) -> gap-reduction factor vs nelder-mead
    eta: (group, depth) -> median expected approximation ratio
    """

    tau: dict = field(default_factory=dict)
    gap: dict = field(default_factory=dict)
    eta: dict = field(default_factory=dict)


def _shared_start(root_seed: int, iid: str, depth: int,
                  attempt: int) -> QaoaParams:
    rng = stream_rng(root_seed, "start", iid, depth, attempt)
    return QaoaParams.from_vector(rng.uniform(-math.pi, math.pi, 2 * depth))


def _run_cell(spec, g, depth: int, optimizer: str, attempt: int,
              cfg: BenchConfig, model) -> BenchRecord:
    iid = instance_id(spec)
    obj = MeteredObjective.for_graph(
        g, depth=depth, budget=cfg.budget, shots=cfg.shots,
        seed=derive_seed(cfg.seed, "cell-noise", iid, depth, optimizer,
                         attempt))
    opt_seed = derive_seed(cfg.seed, "cell-opt", iid, depth, optimizer,
                           attempt)
    if optimizer == "random":
        res = random_search(obj, opt_seed)
    elif optimizer == "nm":
        res = nelder_mead(obj, _shared_start(cfg.seed, iid, depth, attempt))
    elif optimizer == "kde":
        res = kde_optimize(obj, model, opt_seed)
    elif optimizer == "rl":
        res = rl_optimize(obj, model, opt_seed,
                          start=_shared_start(cfg.seed, iid, depth, attempt))
    else:
        raise ConfigError(f"unknown optimizer {optimizer!r}")
    if obj.calls > cfg.budget:
        raise AssertionError("budget law violated")   # meter makes this dead
    return BenchRecord(instance=iid, group=group_of(spec), depth=depth,
                       optimizer=optimizer, attempt=attempt,
                       best_value=res.best_value, best_exact=res.best_exact,
                       evals_used=res.evals_used)


def _model_for(models, optimizer: str, depth: int):
    if optimizer not in LEARNED:
        return None
    table = (models or {}).get(optimizer, {})
    if depth not in table:
        raise ConfigError(
            f"roster includes {optimizer!r} but no model for p={depth} "
            f"was provided")
    return table[depth]


def run_bench(suite, roster, cfg: BenchConfig, models=None,
              threads: int = 1) -> list:
    """All roster x suite x depth x attempt cells, canonically sorted.

    `models` maps optimizer name -> {depth: model} for the learned methods.
    Cells are independent; threads > 1 fans them over a process pool
    without changing any result.
    """
    instances = [(spec, g) for spec, g in suite
                 if cfg.max_n is None or g.n <= cfg.max_n]
    jobs = []
    for spec, g in instances:
        for depth in cfg.depths:
            for optimizer in roster:
                model = _model_for(models, optimizer, depth)
                for attempt in range(cfg.attempts):
                    jobs.append((spec, g, depth, optimizer, attempt, cfg,
                                 model))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_cell_star, jobs, chunksize=4))
    else:
        records = [_run_cell(*job) for job in jobs]
    records.sort(key=lambda r: (r.instance, r.depth, r.optimizer, r.attempt))
    return records


def _run_cell_star(job):
    return _run_cell(*job)


def _expected_tau_cells(records):
    """(instance, group, depth, optimizer) -> mean over attempts of tau.

    tau = best_exact / f_opt with f_opt the best exact value any optimizer
    reached on that (instance, depth); non-positive f_opt (edgeless
    instances) are dropped with a warning.
    """
    f_opt = {}
    for r in records:
        key = (r.instance, r.depth)
        f_opt[key] = max(f_opt.get(key, -math.inf), r.best_exact)
    dropped = sorted({k[0] for k, v in f_opt.items() if v <= 0})
    if dropped:
        warnings.warn(f"excluding instances with non-positive best value: "
                      f"{dropped}")
    sums, counts = {}, {}
    for r in records:
        if f_opt[(r.instance, r.depth)] <= 0:
            continue
        key = (r.instance, r.group, r.depth, r.optimizer)
        sums[key] = sums.get(key, 0.0) + r.best_exact / f_opt[(r.instance,
                                                               r.depth)]
        counts[key] = counts.get(key, 0) + 1
    return {k: sums[k] / counts[k] for k in sums}


def optimality_ratios(records) -> dict:
    """(group, depth, optimizer) -> median over instances of expected tau."""
    if not records:
        raise DomainError("no records to aggregate")
    cells = _expected_tau_cells(records)
    buckets = {}
    for (_, group, depth, optimizer), tau in cells.items():
        buckets.setdefault((group, depth, optimizer), []).append(tau)
    return {key: float(median(vals)) for key, vals in sorted(buckets.items())}


def gap_reduction(tau: dict) -> dict:
    """(group, depth, optimizer) -> (1 - tau_nm) / (1 - tau_optimizer).

    Needs nelder-mead medians in `tau`; a method that exactly matches the
    baseline scores 1, and a method reaching tau = 1 scores infinity.
    """
    keys = sorted({(g, d) for (g, d, o) in tau})
    out = {}
    for g, d in keys:
        if ("nm" not in {o for (gg, dd, o) in tau if (gg, dd) == (g, d)}):
            raise DomainError(f"gap reduction needs nelder-mead ratios for "
                              f"group={g!r} p={d}")
        base = tau[(g, d, "nm")]
        for (gg, dd, o) in tau:
            if (gg, dd) != (g, d) or o == "nm":
                continue
            t = tau[(g, d, o)]
            if t == base:
                out[(g, d, o)] = 1.0
            elif t >= 1.0:
                out[(g, d, o)] = math.inf
            else:
                out[(g, d, o)] = (1.0 - base) / (1.0 - t)
    return out


def approximation_ratios(records, cut_values: dict) -> dict:
    """(group, depth) -> median over instances of the best optimizer's
    expected best_exact / C_opt.

    `cut_values` maps instance id to its brute-force maximum cut; instances
    missing from the map are excluded with a warning.
    """
    missing = sorted({r.instance for r in records
                      if r.instance not in cut_values})
    if missing:
        warnings.warn(f"no max-cut value for {missing}; excluded from "
                      f"approximation ratios")
    sums, counts = {}, {}
    for r in records:
        if r.instance not in cut_values:
            continue
        c_opt = cut_values[r.instance]
        if c_opt <= 0:
            continue
        key = (r.instance, r.group, r.depth, r.optimizer)
        sums[key] = sums.get(key, 0.0) + r.best_exact / c_opt
        counts[key] = counts.get(key, 0) + 1
    best = {}
    for (iid, group, depth, _), total in sums.items():
        eta = total / counts[(iid, group, depth, _)]
        key = (iid, group, depth)
        best[key] = max(best.get(key, 0.0), eta)
    buckets = {}
    for (_, group, depth), eta in best.items():
        buckets.setdefault((group, depth), []).append(eta)
    return {key: float(median(vals)) for key, vals in sorted(buckets.items())}


def suite_cut_values(suite, cap: int = 24) -> dict:
    """Brute-force max cuts for every instance with n <= cap."""
    out = {}
    for spec, g in suite:
        if g.n <= cap:
            out[instance_id(spec)] = float(max_cut_bruteforce(g).value)
    return out


def compute_metrics(records, cut_values: dict) -> MetricsTable:
    if not records:
        return MetricsTable()
    tau = optimality_ratios(records)
    return MetricsTable(tau=tau, gap=gap_reduction(tau),
                        eta=approximation_ratios(records, cut_values))


# ---------------------------------------------------------------- reports

def _fmt(x: float) -> str:
    return repr(float(x))


def export_report(table: MetricsTable, records, out_dir,
                  formats=("csv", "json")) -> list:
    """Write records.csv + tau_long.csv (csv) and metrics.json (json).

    Returns the list of paths written.  Files are deterministic: sorted
    rows, no timestamps, schema id on the first line.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        path = out_dir / "records.csv"
        with open(path, "w", newline="") as fh:
            fh.write(f"# {RECORDS_SCHEMA}\n")
            w = csv.writer(fh)
            w.writerow(["instance", "group", "p", "optimizer", "attempt",
                        "best_value", "best_exact", "evals_used"])
            for r in records:
                w.writerow([r.instance, r.group, r.depth, r.optimizer,
                            r.attempt, _fmt(r.best_value), _fmt(r.best_exact),
                            r.evals_used])
        written.append(path)

        f_opt = {}
        for r in records:
            key = (r.instance, r.depth)
            f_opt[key] = max(f_opt.get(key, -math.inf), r.best_exact)
        path = out_dir / "tau_long.csv"
        with open(path, "w", newline="") as fh:
            fh.write(f"# {TAU_SCHEMA}\n")
            w = csv.writer(fh)
            w.writerow(["group", "p", "optimizer", "attempt", "tau"])
            for r in records:
                if f_opt[(r.instance, r.depth)] <= 0:
                    continue
                w.writerow([r.group, r.depth, r.optimizer, r.attempt,
                            _fmt(r.best_exact / f_opt[(r.instance, r.depth)])])
        written.append(path)
    if "json" in formats:
        path = out_dir / "metrics.json"
        with open(path, "w") as fh:
            json.dump(metrics_to_json(table), fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def metrics_to_json(table: MetricsTable) -> dict:
    def dump3(d):
        return [{"group": g, "p": p, "optimizer": o,
                 "value": "inf" if math.isinf(v) else v}
                for (g, p, o), v in sorted(d.items())]

    return {
        "schema": METRICS_SCHEMA,
        "tau": dump3(table.tau),
        "gap": dump3(table.gap),
        "eta": [{"group": g, "p": p, "value": v}
                for (g, p), v in sorted(table.eta.items())],
    }


def metrics_from_json(payload: dict) -> MetricsTable:
    if payload.get("schema") != METRICS_SCHEMA:
        raise ConfigError(f"unexpected metrics schema "
                          f"{payload.get('schema')!r}")

    def value(v):
        return math.inf if v == "inf" else float(v)

    return MetricsTable(
        tau={(e["group"], e["p"], e["optimizer"]): value(e["value"])
             for e in payload["tau"]},
        gap={(e["group"], e["p"], e["optimizer"]): value(e["value"])
             for e in payload["gap"]},
        eta={(e["group"], e["p"]): value(e["value"])
             for e in payload["eta"]})


def read_metrics(path) -> MetricsTable:
    with open(path) as fh:
        return metrics_from_json(json.load(fh))


def read_records(path) -> list:
    records = []
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    for row in csv.DictReader(lines):
        records.append(BenchRecord(
            instance=row["instance"], group=row["group"], depth=int(row["p"]),
            optimizer=row["optimizer"], attempt=int(row["attempt"]),
            best_value=float(row["best_value"]),
            best_exact=float(row["best_exact"]),
            evals_used=int(row["evals_used"])))
    return records


def records_cut_values(records, cap: int = 24) -> dict:
    """Recompute brute-force cuts for the instances named in records."""
    out = {}
    for iid in sorted({r.instance for r in records}):
        g = realize(spec_from_id(iid))
        if g.n <= cap:
            out[iid] = float(max_cut_bruteforce(g).value)
    return out
