"""Seeded random search for a parametrized monad over the 2-chain whose Kleisli
total is not also a fibration, or whose EM total is not also an opfibration.

Candidates are S => T along c0 -> c1 for monads S, T on a random finite
category and a monad morphism between them."""

from __future__ import annotations

import argparse
import random
import time

from fibalg import fixtures as fx
from fibalg.fincat import FibalgError, validate
from fibalg.grothfib import build_total, monads_on, verify_fibration
from fibalg.monadkit import find_monad_morphisms, param_monad

CHECKS = (("kl", "fibration"), ("em", "opfibration"))


def search(seed: int, seconds: float, max_objects: int, max_morphisms: int, max_monads: int):
    rng = random.Random(seed)
    base = fx.chain2()
    found = {}
    tried = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < seconds and len(found) < len(CHECKS):
        x = fx.random_category(rng, max_objects, max_morphisms)
        if not validate(x).ok:
            continue
        try:
            mons = monads_on(x)[:max_monads]
        except FibalgError:
            continue
        tried += 1
        for s in mons:
            for t in mons:
                for mm in find_monad_morphisms(s, t)[:3]:
                    p = param_monad("cand", base, x, {"c0": s, "c1": t}, {"c0_c1": mm.alpha.components})
                    for flavor, variance in CHECKS:
                        if flavor in found:
                            continue
                        v = verify_fibration(build_total(p, flavor), variance)
                        if not v.holds:
                            found[flavor] = (p, v)
    return tried, found


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--seconds", type=float, default=60.0)
    ap.add_argument("--max-objects", type=int, default=4)
    ap.add_argument("--max-morphisms", type=int, default=16)
    ap.add_argument("--max-monads", type=int, default=12)
    args = ap.parse_args()
    tried, found = search(args.seed, args.seconds, args.max_objects, args.max_morphisms, args.max_monads)
    print(f"searched {tried} carrier categories")
    if not found:
        print("no non-example found")
    for flavor, (p, v) in found.items():
        print(f"{flavor}: {v.reason}; carriers {p.carriers.objects}, witness {v.witness}")


if __name__ == "__main__":
    main()
