"""Print Betti, Dolbeault and Bott-Chern tables with class flags for the built-in models."""

import argparse
import time

from foliage.cohomology import betti_table
from foliage.models import BUILTIN_MODELS, build_model

DEFAULT_K = {"carriere": 8, "product_j1": 6, "product_j2": 6, "taut_torus": 4}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("models", nargs="*", default=list(BUILTIN_MODELS))
    p.add_argument("--K", type=int, help="override the per-model truncation")
    p.add_argument("--tol", type=float, default=1e-8)
    args = p.parse_args()
    for name in args.models:
        K = args.K if args.K is not None else DEFAULT_K.get(name, 4)
        t0 = time.perf_counter()
        rep = betti_table(build_model(name), K, args.tol, strict=False)
        secs = time.perf_counter() - t0
        print(f"{name} (K={K}, {secs:.1f}s, converged={rep.converged})")
        print(f"  h_B          {rep.betti}")
        print(f"  h^(r,s)      {rep.dolbeault}")
        print(f"  h_BC^(p,p)   {rep.bott_chern}")
        print(f"  flags        {dict(sorted(rep.flags.items()))}")


if __name__ == "__main__":
    main()
