"""Run the recognition pipeline on every bundled fibration and tabulate the verdicts."""

from __future__ import annotations

import argparse
import json
import time

from fibalg import fixtures as fx
from fibalg.grothfib import build_total
from fibalg.recognize import recognize


def subjects():
    for build in (fx.writer_chain2, fx.writer_chain3, fx.writer_bool4, fx.const_chain3, fx.finset_param):
        yield f"{build.__name__} (em)", build_total(build(), "em")
        yield f"{build.__name__} (kl)", build_total(build(), "kl")
    yield "coreader_bool4 (coem)", build_total(fx.coreader_bool4(), "coem")
    yield "semiauto_m2 (alg)", build_total(fx.semiauto_m2(), "alg")
    yield "collapse_alg (alg)", build_total(fx.collapse_alg(), "alg")
    yield "codomain2", fx.codomain2()
    yield "identity on chain3", fx.identity_fibration()
    yield "points_splitepi", fx.points_splitepi()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = []
    for label, t in subjects():
        t0 = time.perf_counter()
        r = recognize(t)
        d = r.as_dict()
        rows.append({
            "subject": label,
            "variance": t.variance,
            "objects": len(t.cat.objects),
            "pruned": d["pruned"],
            "is_em": d["is_em"],
            "reason": d["failure"] or d["reason"],
            "seconds": round(time.perf_counter() - t0, 3),
        })
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'subject':26} {'variance':12} {'objs':>4} {'pruned':>6} {'em':>5}  reason")
    for row in rows:
        print(f"{row['subject']:26} {row['variance']:12} {row['objects']:4d} {str(row['pruned']):>6} "
              f"{str(row['is_em']):>5}  {row['reason']}")


if __name__ == "__main__":
    main()
