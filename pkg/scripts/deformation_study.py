"""Compare tables and flags before and after seeded leafwise deformations."""

import argparse

from foliage.cohomology import automorphic_test, betti_table
from foliage.harness import random_deformation
from foliage.models import BUILTIN_MODELS, build_model, deform_leafwise

DEFAULT_K = {"carriere": 8, "product_j1": 6, "product_j2": 6, "taut_torus": 4}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("models", nargs="*", default=list(BUILTIN_MODELS))
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--bandwidth", type=int, default=1)
    args = p.parse_args()
    for name in args.models:
        m = build_model(name)
        K = DEFAULT_K.get(name, 4)
        base = betti_table(m, K, strict=False)
        print(f"{name} base: h_B={base.betti} flags={dict(sorted(base.flags.items()))}")
        for seed in range(args.seeds):
            dm = deform_leafwise(m, random_deformation(m.dims, seed, bandwidth=args.bandwidth))
            rep = betti_table(dm, K, strict=False)
            same = (rep.betti, rep.dolbeault, rep.bott_chern) == (base.betti, base.dolbeault, base.bott_chern)
            flips = sorted(k for k in rep.flags if rep.flags[k] != base.flags[k])
            witness = automorphic_test(dm).residual_lie
            print(f"  seed {seed}: tables {'same' if same else 'CHANGED'}, flipped {flips or 'none'}, "
                  f"||[L_kappa#, J]|| = {witness:.3e}")


if __name__ == "__main__":
    main()
