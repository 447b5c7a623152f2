"""Mean and spread of trajectory entanglement versus system size, with Haar references."""
import argparse

from ptchaos.experiments import RunConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, nargs="+", default=[6, 8, 10, 12])
    ap.add_argument("--n-B", type=int, default=10)
    ap.add_argument("--samples", type=int, default=4096)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = RunConfig(experiment="ppe-scaling", L=args.L, n_B=[args.n_B], kinds="both", samples=args.samples,
                    models=["xxz-nnn", "xxz", "free-fermion"], out=args.out).normalised()
    table = run(cfg)
    cols = table.columns
    print(f"{'model':>13} {'kind':>13} {'L':>3} {'mean':>8} {'std':>8} {'haar':>8} {'haar std':>8}")
    for row in table.rows:
        r = dict(zip(cols, row))
        print(f"{r['model']:>13} {r['kind']:>13} {r['L']:3d} {r['mean']:8.4f} {r['std']:8.4f} "
              f"{r['haar_mean']:8.4f} {r['haar_std']:8.4f}")


if __name__ == "__main__":
    main()
