"""Run the identity suite on every built-in model and print the worst residual per identity."""

import argparse

from foliage.harness import run_identities
from foliage.models import BUILTIN_MODELS, build_model


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("models", nargs="*", default=list(BUILTIN_MODELS))
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--suite", default="all")
    args = p.parse_args()
    for name in args.models:
        res = run_identities(build_model(name), args.suite, K=args.K, seed=args.seed, trials=args.trials)
        print(f"{name}: all applicable pass = {res.all_pass}")
        for e in res.entries:
            state = ("pass" if e.passed else "FAIL") if e.applicable else f"skip ({e.skip_reason})"
            print(f"  {e.id:<4} {e.level:<12} {e.residual:.3e}  {state}")


if __name__ == "__main__":
    main()
