"""QDE versus number of interventions, compared with the Haar line n_B ln 2."""
import argparse
from math import log

from ptchaos.experiments import RunConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=12)
    ap.add_argument("--n-B", type=int, default=12)
    ap.add_argument("--dt", type=float, default=1.75)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = RunConfig(experiment="qde-growth", L=[args.L], n_B=[args.n_B], dt=args.dt, out=args.out,
                    models=["xxz-nnn", "xxz", "iaa-chaotic", "iaa-mbl", "free-fermion"]).normalised()
    table = run(cfg)
    cols = table.columns
    by_model = {}
    for row in table.rows:
        r = dict(zip(cols, row))
        by_model.setdefault(r["model"], []).append(r["qde_bits"])
    print(f"QDE in bits, L={args.L}, dt={args.dt}; Haar line = n_B, cap = {table.rows[0][-1] / log(2):.3f}")
    print("n_B   " + "  ".join(f"{m:>13}" for m in by_model))
    for n in range(args.n_B):
        print(f"{n + 1:3d}   " + "  ".join(f"{v[n]:13.4f}" for v in by_model.values()))


if __name__ == "__main__":
    main()
