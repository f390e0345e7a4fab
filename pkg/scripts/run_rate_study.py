"""Monte Carlo rate study: risk vs n with the fitted log-log slope.

Reproduces the convergence-rate experiments: pointwise squared risk at the
kink of the absolute-value frontier, or empirical L_q risk over the design,
for any builtin frontier and error model.  Writes the same rates.csv and
report.json the `frontier-adapt rates` subcommand produces, via the library.

Examples:
  python3 scripts/run_rate_study.py --out rates.csv
  python3 scripts/run_rate_study.py --f f2 --em neggamma --shape 2 \
      --target lq:1 --n-list 200,400,800 --reps 50 --out gamma2.csv
"""

import argparse
import json

from frontier_adapt.adapt import EstimatorConfig
from frontier_adapt.simkit import ErrorModel, builtin_f, mc_risk, rate_fit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f", default="absdip")
    ap.add_argument("--em", default="negexp")
    ap.add_argument("--rate", type=float, default=1.0)
    ap.add_argument("--shape", type=float, default=1.0)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--target", default="point:0.5", help="point:X0 or lq:Q")
    ap.add_argument("--n-list", default="200,400,800,1600,3200,6400")
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--c-beta", type=float, default=None)
    ap.add_argument("--beta-star", type=int, default=None)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    kind, value = args.target.split(":")
    target = (kind, float(value))
    overrides = {}
    if args.c_beta is not None:
        overrides["c_beta"] = args.c_beta
    if args.beta_star is not None:
        overrides["beta_star"] = args.beta_star
    cfg = EstimatorConfig(seed=args.seed, **overrides)
    f = builtin_f(args.f)
    em = ErrorModel(args.em, rate=args.rate, shape=args.shape, lam=args.lam)
    ns = [int(tok) for tok in args.n_list.split(",")]

    risks, errs = [], []
    for n in ns:
        risk, err = mc_risk(f, em, cfg, n, args.reps, target, args.seed)
        risks.append(risk)
        errs.append(err)
        print(f"n={n:6d}  risk={risk:.6g}  stderr={err:.2g}")
    report = rate_fit(ns, risks, errs)

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("n,risk,stderr\n")
        for n, r, e in zip(report.n_values, report.risks, report.stderrs):
            fh.write(f"{n},{r:.17g},{e:.17g}\n")
    report_path = args.out.rsplit(".", 1)[0] + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "target": {"kind": target[0], "value": target[1]},
                "n_values": report.n_values,
                "risks": report.risks,
                "stderrs": report.stderrs,
                "slope": report.slope,
                "slope_ci": list(report.slope_ci),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    lo, hi = report.slope_ci
    print(f"slope {report.slope:.4f}  ci [{lo:.4f}, {hi:.4f}]")
    print(f"wrote {args.out} and {report_path}")


if __name__ == "__main__":
    main()
