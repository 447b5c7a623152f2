"""Run every YAML config in configs/ and write the result tables.

    python3 scripts/run_all.py                 # full sizes (minutes to hours)
    python3 scripts/run_all.py --quick         # L=8, small samples, for a smoke run
"""
import argparse
import time
from pathlib import Path

from ptchaos.experiments import RunConfig, run

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("configs", nargs="*", type=Path)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--out-dir", type=Path, default=ROOT / "results")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    for path in args.configs or sorted((ROOT / "configs").glob("*.yaml")):
        cfg = RunConfig.load(path)
        cfg.workers = args.workers
        cfg.out = str(args.out_dir / Path(cfg.out or f"{path.stem}.tsv").name)
        if args.quick:
            cfg.L = [min(L, 8) for L in cfg.L]
            cfg.L = sorted(set(cfg.L))
            cfg.n_B = [min(n, 6) for n in cfg.n_B]
            cfg.samples = min(cfg.samples, 500)
        t0 = time.perf_counter()
        table = run(cfg.normalised())
        print(f"{path.name}: {len(table.rows)} rows -> {cfg.out} ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
