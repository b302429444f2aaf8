"""Experiment runner, result files and the ``heavyhitters`` command line.

A run takes one algorithm, one parameter pair and one workload, executes a
trial per seed and compares each report against the exact truth sets. Rows
come back in seed order whatever the execution order was.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    HHParams,
    HHReport,
    Stream,
    exact_profile,
    gen_planted,
    gen_spike,
    gen_zipf,
    truth_l1,
    truth_l2,
)
from .countsketch import CountSketch, cs_space_bits
from .l1hh import SampledL1, l1_space_bits
from .l2sieve import IsolatedSieve, SieveConfig, sieve_space_bits
from .mg import MisraGries
from .stream_io import StreamFormatError, read_stream, write_stream

ALGOS = ("mg", "l1", "cs", "sieve")
WORKLOADS = ("zipf", "spike", "planted")


class HarnessError(Exception):
    """Bad configuration or unusable input."""


@dataclass
class Workload:
    """Either a generator description or a stream file.

    ``seed=None`` regenerates the stream with each trial's seed; a fixed seed
    replays one stream for every trial.
    """

    kind: str = "zipf"
    n: int | None = None  # generators fall back to 1000; files infer it
    m: int | None = None
    s: float = 1.1
    star: int = 1
    f_star: int = 0
    seed: int | None = None
    input: str | None = None

    def build(self, trial_seed: int) -> Stream:
        if self.input:
            try:
                return read_stream(self.input, n=self.n)
            except (OSError, StreamFormatError, ValueError) as exc:
                raise HarnessError(f"cannot read stream {self.input}: {exc}") from exc
        seed = trial_seed if self.seed is None else self.seed
        n = self.n or 1000
        if self.kind == "zipf":
            return gen_zipf(n, 10_000 if self.m is None else self.m, self.s, seed)
        if self.kind == "spike":
            # default: the sqrt(n) log n spike over n - 1 singletons
            f_star = self.f_star or math.isqrt(n) * math.ceil(math.log2(n))
            m = f_star + n - 1 if self.m is None else self.m
            return gen_spike(n, m, self.star, f_star, seed=seed)
        if self.kind == "planted":
            noise = n // 2 if self.m is None else self.m - self.f_star
            return gen_planted(n, noise, {self.star: self.f_star}, seed=seed)
        raise HarnessError(f"unknown workload {self.kind!r}; choose from {', '.join(WORKLOADS)}")


@dataclass
class ExperimentConfig:
    algo: str
    params: HHParams
    workload: Workload = field(default_factory=Workload)
    seeds: list[int] = field(default_factory=lambda: [0])
    output: str | None = None
    format: str = "csv"
    buckets: int = 0  # CountSketch width; 0 means ceil(4/eps^2)
    rows: int = 0  # CountSketch depth; 0 means ceil(log2 n) + 1
    f2_mode: str = "exact"
    workers: int = 1

    def validate(self) -> None:
        if self.algo not in ALGOS:
            raise HarnessError(f"unknown algo {self.algo!r}; choose from {', '.join(ALGOS)}")
        if not self.seeds:
            raise HarnessError("at least one seed is required")
        if self.format not in ("csv", "json"):
            raise HarnessError(f"unknown output format {self.format!r}")
        if self.f2_mode not in ("exact", "sketch"):
            raise HarnessError(f"unknown f2 mode {self.f2_mode!r}")


@dataclass
class MetricsRow:
    seed: int
    recall_must: float
    false_forbidden: int
    max_abs_err: float
    space_bits_ideal: int
    space_bits_actual: int
    wall_time_ms: float

    @property
    def success(self) -> bool:
        return self.recall_must == 1 and self.false_forbidden == 0


FIELDS = [f.name for f in dataclasses.fields(MetricsRow)]
_TYPES = {"seed": int, "false_forbidden": int, "space_bits_ideal": int, "space_bits_actual": int}


# -- trials ---------------------------------------------------------------------


def _run_algo(cfg: ExperimentConfig, stream: Stream, seed: int, f2: int):
    p, n, m = cfg.params, stream.n, stream.m
    eps, phi = float(p.epsilon), float(p.phi)
    if cfg.algo == "mg":
        mg = MisraGries(eps)
        mg.consume(stream.items.tolist())
        bits = mg.space_bits(n, m)
        return mg.report(phi), bits, bits
    if cfg.algo == "l1":
        st = SampledL1(eps, phi, max(m, 1), seed=seed)
        st.consume(stream.items)
        bits = st.space_bits(n)
        return st.report(), bits, bits
    if cfg.algo == "cs":
        cs = CountSketch(cfg.buckets or math.ceil(4 / eps**2), cfg.rows, seed, n=n)
        cs.update_many(stream.items)
        return cs.l2_report(phi, f2, eps), cs.space_bits(max(m, 1), n), cs.actual_space_bits(max(m, 1))
    iso = IsolatedSieve(n, phi, eps, seed, SieveConfig(f2_mode=cfg.f2_mode))
    iso.consume(stream.items)
    sp = iso.space_bits(max(m, 1))
    return iso.report(), sp["idealized"], sp["actual"]


def run_trial(cfg: ExperimentConfig, seed: int) -> MetricsRow:
    stream = cfg.workload.build(seed)
    prof = exact_profile(stream)
    truth = truth_l1 if cfg.algo in ("mg", "l1") else truth_l2
    must, forbidden = truth(prof, cfg.params)
    start = time.perf_counter()
    report, ideal, actual = _run_algo(cfg, stream, seed, prof.f2)
    elapsed = (time.perf_counter() - start) * 1000
    return _score(seed, report, prof.counts, must, forbidden, ideal, actual, elapsed)


def _score(seed, report: HHReport, counts, must, forbidden, ideal, actual, elapsed) -> MetricsRow:
    recall = len(must & report.items) / len(must) if must else 1.0
    err = max((abs(v - counts.get(i, 0)) for i, v in report), default=0.0)
    return MetricsRow(seed, recall, len(report.items & forbidden), float(err),
                      int(ideal), int(actual), round(elapsed, 3))


def run_experiment(cfg: ExperimentConfig) -> list[MetricsRow]:
    cfg.validate()
    if cfg.workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return list(pool.map(run_trial, [cfg] * len(cfg.seeds), cfg.seeds))
    return [run_trial(cfg, s) for s in cfg.seeds]


def aggregate(rows: list[MetricsRow]) -> dict:
    """Success fraction plus mean and 5/50/95% quantiles of each metric."""
    if not rows:
        raise ValueError("cannot aggregate an empty list of rows")
    out = {"trials": len(rows), "success_fraction": sum(r.success for r in rows) / len(rows)}
    for name in FIELDS[1:]:
        vals = np.array([getattr(r, name) for r in rows], dtype=np.float64)
        out[f"mean_{name}"] = float(vals.mean())
        for q in (5, 50, 95):
            out[f"q{q:02d}_{name}"] = float(np.percentile(vals, q))
    return out


# -- result files -------------------------------------------------------------------


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FIELDS)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in dataclasses.astuple(r)])


def _row_from(d: dict) -> MetricsRow:
    return MetricsRow(**{k: _TYPES.get(k, float)(d[k]) for k in FIELDS})


def read_csv(path) -> list[MetricsRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != FIELDS:
            raise HarnessError(f"{path}: expected columns {FIELDS}")
        return [_row_from(d) for d in reader]


def write_json(rows, path) -> None:
    Path(path).write_text(json.dumps([dataclasses.asdict(r) for r in rows], indent=1) + "\n")


def read_json(path) -> list[MetricsRow]:
    return [_row_from(d) for d in json.loads(Path(path).read_text())]


def write_rows(rows, path, fmt: str) -> None:
    (write_json if fmt == "json" else write_csv)(rows, path)


# -- config files -------------------------------------------------------------------


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise HarnessError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise HarnessError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def parse_seeds(text: str) -> list[int]:
    """``"0-9"``, ``"1,5,7"`` or a mix such as ``"0-4,10"``."""
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        lo, dash, hi = part.partition("-")
        if dash:
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


# -- command line ---------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--algo", choices=ALGOS)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--phi", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--s", type=float, help="Zipf exponent")
    common.add_argument("--workload", choices=WORKLOADS)
    common.add_argument("--star", type=int)
    common.add_argument("--f-star", type=int, dest="f_star")
    common.add_argument("--seed", type=int)
    common.add_argument("--seeds", help="e.g. 0-99 or 1,2,3")
    common.add_argument("--input")
    common.add_argument("--format")
    common.add_argument("--output")
    common.add_argument("--buckets", type=int)
    common.add_argument("--rows", type=int)
    common.add_argument("--f2-mode", dest="f2_mode", choices=("exact", "sketch"))
    common.add_argument("--workers", type=int)

    p = argparse.ArgumentParser(prog="heavyhitters", description="Heavy hitter sketches and experiments.")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("gen", parents=[common], help="write a synthetic stream file")
    sub.add_parser("run", parents=[common], help="run an experiment over seeds")
    t = sub.add_parser("truth", parents=[common], help="print the exact must and forbidden sets")
    t.add_argument("--norm", choices=("l1", "l2"))
    sp = sub.add_parser("space", parents=[common], help="space accounting sweep over n")
    sp.add_argument("--exponents", help="log2 n values, default 10,12,...,20")
    return p


def _settings(args) -> dict:
    merged = read_config_file(args.config) if args.config else {}
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "verb"):
            merged[k] = v
    return merged


def _need(opts, key, cast):
    if key not in opts:
        raise HarnessError(f"missing required setting --{key.replace('_', '-')}")
    try:
        return cast(opts[key])
    except ValueError as exc:
        raise HarnessError(f"bad value for {key}: {opts[key]!r}") from exc


def _workload(opts) -> Workload:
    w = Workload()
    for key, cast in (("n", int), ("m", int), ("s", float), ("star", int), ("f_star", int)):
        if key in opts:
            setattr(w, key, cast(opts[key]))
    w.kind = opts.get("workload", w.kind)
    if "seed" in opts:
        w.seed = int(opts["seed"])
    w.input = opts.get("input")
    return w


def _params(opts) -> HHParams:
    try:
        return HHParams(_need(opts, "epsilon", float), _need(opts, "phi", float))
    except ValueError as exc:
        raise HarnessError(str(exc)) from exc


def config_from(opts: dict) -> ExperimentConfig:
    seeds = parse_seeds(opts["seeds"]) if "seeds" in opts else [0]
    fmt = opts.get("format")
    out = opts.get("output")
    if fmt is None:
        fmt = "json" if out and str(out).endswith(".json") else "csv"
    cfg = ExperimentConfig(
        algo=_need(opts, "algo", str),
        params=_params(opts),
        workload=_workload(opts),
        seeds=seeds,
        output=out,
        format=fmt,
        buckets=int(opts.get("buckets", 0)),
        rows=int(opts.get("rows", 0)),
        f2_mode=opts.get("f2_mode", "exact"),
        workers=int(opts.get("workers", 1)),
    )
    cfg.validate()
    return cfg


def _cmd_gen(opts) -> None:
    w = _workload(opts)
    try:
        stream = w.build(int(opts.get("seed", 0)))
    except (ValueError, TypeError) as exc:
        raise HarnessError(str(exc)) from exc
    out = _need(opts, "output", str)
    write_stream(stream, out, fmt=opts.get("format"))
    print(f"wrote {stream.m} items over n={stream.n} to {out}")


def _cmd_run(opts) -> None:
    cfg = config_from(opts)
    rows = run_experiment(cfg)
    if cfg.output:
        write_rows(rows, cfg.output, cfg.format)
    print(json.dumps(aggregate(rows), indent=1))


def _cmd_truth(opts) -> None:
    stream = _workload(opts).build(int(opts.get("seed", 0)))
    prof = exact_profile(stream)
    truth = truth_l2 if opts.get("norm") == "l2" else truth_l1
    must, forbidden = truth(prof, _params(opts))
    print(json.dumps({
        "m": prof.m, "f2": prof.f2, "distinct": len(prof.counts),
        "must": sorted(must), "forbidden_count": len(forbidden),
    }))


def space_table(exponents, epsilon: float | None = None, phi: float = 0.1,
                buckets: int = 256) -> list[dict]:
    """Bits per sketch at n = 2**L; epsilon defaults to 1/L."""
    out = []
    for L in exponents:
        n = 2**L
        eps = epsilon or 1 / L
        out.append({
            "log2_n": L,
            "mg": MisraGries(eps).space_bits(n, n),
            "l1": l1_space_bits(eps, phi, n),
            "cs": cs_space_bits(n, n, buckets),
            "sieve": sieve_space_bits(n, n)["idealized"],
        })
    return out


def _cmd_space(opts) -> None:
    exps = parse_seeds(opts.get("exponents", "10,12,14,16,18,20"))
    eps = float(opts["epsilon"]) if "epsilon" in opts else None
    table = space_table(exps, eps, float(opts.get("phi", 0.1)), int(opts.get("buckets", 256)))
    out = opts.get("output")
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(table[0]))
            w.writeheader()
            w.writerows(table)
    w = csv.DictWriter(sys.stdout, fieldnames=list(table[0]))
    w.writeheader()
    w.writerows(table)


_COMMANDS = {"gen": _cmd_gen, "run": _cmd_run, "truth": _cmd_truth, "space": _cmd_space}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        _COMMANDS[args.verb](_settings(args))
    except (HarnessError, StreamFormatError, OSError, ValueError) as exc:
        print(f"heavyhitters {args.verb}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
