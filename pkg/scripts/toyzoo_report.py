#!/usr/bin/env python3
"""Run the self-test battery on every toy theory and print a summary table.

Each theory is checked for compositional laws, normalisation preservation and
discard behaviour on randomly generated morphisms.

Example:
    python3 scripts/toyzoo_report.py --seed 5 --rounds 20
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from catprob.backend import backend_self_test, toy_theory, toyzoo_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20170901)
    ap.add_argument("--rounds", type=int, default=15)
    ap.add_argument("--modal-p", type=int, default=2, help="prime for the modal theory")
    args = ap.parse_args(argv)

    rows = toyzoo_table()
    width = max(len(r[0]) for r in rows) + 2
    failures = 0
    print(f"{'theory':<{width}}{'scalars':<12}{'positive part':<14}status")
    for name, scalars, _invol, positive_part, _desc in rows:
        theory_name = f"modal({args.modal_p})" if name == "modal" else name
        backend = toy_theory(theory_name)
        violations = backend_self_test(backend, seed=args.seed, rounds=args.rounds)
        status = "ok" if not violations else f"FAIL ({len(violations)})"
        failures += bool(violations)
        print(f"{theory_name:<{width}}{scalars:<12}{positive_part:<14}{status}")
        for v in violations:
            print(f"  {v}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
