#!/usr/bin/env python3
"""Run a benchmark suite and print per-family CNOT reductions for three optimizer settings.

    python3 scripts/run_benchmark.py [--suite scripts/suite.json] [--out results/]
"""
import argparse
import json
from pathlib import Path

from qspdc.pipeline import OptimizeConfig, benchmark_csv, run_benchmark

SETTINGS = {
    "no-dc": OptimizeConfig(use_cdc=False, use_odc=False),
    "cdc": OptimizeConfig(use_odc=False),
    "full": OptimizeConfig(),
}


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--suite", default=str(Path(__file__).with_name("suite.json")))
    p.add_argument("--out", type=Path, help="directory for CSV/JSON per setting")
    a = p.parse_args()
    suite = json.loads(Path(a.suite).read_text())
    table = {}
    for name, cfg in SETTINGS.items():
        res = run_benchmark(suite, cfg)
        assert all(i["verified"] for i in res["instances"])
        table[name] = res["families"]
        if a.out:
            a.out.mkdir(parents=True, exist_ok=True)
            (a.out / f"{name}.csv").write_text(benchmark_csv(res))
            (a.out / f"{name}.json").write_text(json.dumps(res, indent=2, sort_keys=True) + "\n")
    families = sorted(table["full"])
    print(f"{'family':22s}" + "".join(f"{s:>10s}" for s in SETTINGS))
    for f in families:
        print(f"{f:22s}" + "".join(f"{table[s][f]['mean_reduction_pct']:9.1f}%" for s in SETTINGS))
    mean = {s: sum(v["mean_reduction_pct"] for v in table[s].values()) / max(len(table[s]), 1) for s in SETTINGS}
    print(f"{'mean of families':22s}" + "".join(f"{mean[s]:9.1f}%" for s in SETTINGS))


if __name__ == "__main__":
    main()
