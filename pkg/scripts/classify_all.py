"""Classify both spaces and certify every named structure; print a summary table.

    python scripts/classify_all.py [--samples N] [--seed N] [--out results.json]
"""

import argparse
import json
import time

from homstruct.models import make_h2xr, make_s2xr, named_structure
from homstruct.verifier import VerificationConfig, invariance_residual, verify_ambrose_singer


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = VerificationConfig(samples=args.samples, seed=args.seed)

    runs = [(make_s2xr, "T_lambda", lam) for lam in cfg.lambdas]
    runs += [(make_h2xr, "T_lambda", lam) for lam in cfg.lambdas]
    runs.append((make_h2xr, "T_solv", 0.0))

    rows = []
    print(f"{'space':6} {'coset':20} {'λ':>5} {'∇̃g':>10} {'∇̃R':>10} {'∇̃T':>10} {'inv':>10}  ok")
    for make, label, lam in runs:
        st = named_structure(make(), label, lam)
        t0 = time.perf_counter()
        rep = verify_ambrose_singer(st.model, st, cfg)
        inv = invariance_residual(st, 20, cfg.seed)
        row = rep.to_dict() | {"coset": st.coset, "invariance": inv, "seconds": time.perf_counter() - t0}
        rows.append(row)
        lam_s = "-" if rep.lam is None else f"{rep.lam:g}"
        print(f"{rep.model:6} {st.coset:20} {lam_s:>5} {rep.nabla_g:10.2e} {rep.nabla_R:10.2e} "
              f"{rep.nabla_T:10.2e} {inv:10.2e}  {'yes' if rep.passed and inv < cfg.tol else 'NO'}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2, ensure_ascii=False)


if __name__ == "__main__":
    main()
