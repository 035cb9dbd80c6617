"""Search the super-solution box, then probe which corner checks each width constraint controls.

    python3 scripts/supersolution_search.py --out supersolution.json
"""
import argparse
import json

from frontlab.model import ModelParams
from frontlab.verify import search_supersolution, supersolution_audit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=float, default=2.0)
    ap.add_argument("--delta-star", type=float, default=0.05)
    ap.add_argument("--delta-0", type=float, default=0.01)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="supersolution.json")
    args = ap.parse_args()

    res = search_supersolution(args.b, 1.0, 1.0, args.delta_star, args.delta_0, workers=args.workers)
    out = res.as_dict()
    if res.found:
        sp, w = res.params, res.base_profile
        target = ModelParams(1 - args.delta_0, args.b)
        lam = sp.lambda_1 + sp.lambda_2
        probes = {
            "delta_1=1.5/(l1+l2)": dict(delta_1=1.5 / lam),
            "delta_1=1/l1": dict(delta_1=1 / sp.lambda_1),
            "delta_5=0.5/l2": dict(delta_5=0.5 / sp.lambda_2, delta_7=0.25 / sp.lambda_2),
        }
        out["probes"] = {}
        for name, change in probes.items():
            rep = supersolution_audit(sp.rematched(**change), w, target, args.delta_0)
            out["probes"][name] = sorted(rep.failed_corners)
            print(f"{name:<22} fails corners {sorted(rep.failed_corners)}; segments ok={rep.segments_ok}")
        out["refine_2_verdict"] = supersolution_audit(sp, w, target, args.delta_0, refine=2).verdict
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True, default=str)
    print(f"found={res.found} after {res.tried} candidates, choice {res.choice}; written to {args.out}")


if __name__ == "__main__":
    main()
