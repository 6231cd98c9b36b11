#!/usr/bin/env python3
"""Build a bounded generic structure and audit it at every budget up to the
build budget.  Prints the audit verdicts and writes the structure file.

    python scripts/build_and_audit.py --alpha 1/2 --steps 50 --budget 2 \
        --seed 7 --out generic.json
"""

import argparse
import sys
import time

from bicolor.colored import empty_structure
from bicolor.exactnum import Alpha
from bicolor.workbench import audit_richness, build_generic, save


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="1/2")
    ap.add_argument("--steps", type=int, default=50)
    ap.add_argument("--budget", type=int, default=2)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    alpha = Alpha.parse(args.alpha)
    t0 = time.time()
    built = build_generic(empty_structure(alpha, 0), args.steps, args.budget, args.seed)
    print(
        f"built: {len(built)} elements, ambient {built.backend.ambient_dim}, "
        f"{len(built.colored)} colored, {time.time() - t0:.1f}s"
    )
    for budget in range(1, args.budget + 1):
        rep = audit_richness(built, budget)
        verdict = "pass" if rep.passed else "FAIL"
        detail = ", ".join(f"{t.task_id}:{t.tried}tried" for t in rep.tasks)
        print(f"audit budget {budget}: {verdict} ({detail})")
    if args.out:
        save(built, args.out)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
