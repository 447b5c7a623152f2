"""Equilibrium process, effective dimension and the three equilibration bounds."""
import argparse

from ptchaos.experiments import RunConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = RunConfig(experiment="equilibration", L=[args.L], n_B=[1, 2], samples=args.samples, out=args.out,
                    models=["xxz-nnn", "xxz", "iaa-chaotic", "iaa-mbl"]).normalised()
    table = run(cfg)
    cols = table.columns
    for row in table.rows:
        r = dict(zip(cols, row))
        print(f"{r['model']:>12} n_B={r['n_B']} d_eff={r['d_eff']:7.3f}  <D>={r['mean_D']:.4f} <= {r['D_bound']:.4f}  "
              f"<|dS|>={r['mean_dS']:.4f} <= {r['dS_bound']:.4f}  P={r['exceedance']:.3f} <= {r['p_cap']:.3f}  "
              f"|mean - Omega|={r['omega_error']:.4f}")


if __name__ == "__main__":
    main()
