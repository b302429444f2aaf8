"""Run a small multi-seed experiment and save the rows.

Same as:  heavyhitters run --algo cs --epsilon 0.1 --phi 0.25 --workload spike \
              --n 4096 --buckets 256 --seeds 0-19 --output cs_rows.csv
"""
import json
import tempfile
from pathlib import Path

from heavyhitters import HHParams
from heavyhitters.harness import ExperimentConfig, Workload, aggregate, read_csv, run_experiment, write_csv

cfg = ExperimentConfig(
    algo="cs",
    params=HHParams(0.1, 0.25),
    workload=Workload("spike", n=4096, f_star=64),
    seeds=list(range(20)),
    buckets=256,
)
rows = run_experiment(cfg)
summary = aggregate(rows)
print(json.dumps({k: summary[k] for k in ("trials", "success_fraction", "mean_max_abs_err")}, indent=1))

with tempfile.TemporaryDirectory() as d:
    path = Path(d) / "cs_rows.csv"
    write_csv(rows, path)
    print("csv round trip exact:", read_csv(path) == rows)
