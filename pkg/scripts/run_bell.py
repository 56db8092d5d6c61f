#!/usr/bin/env python3
"""Evaluate a Bell scenario file and print its empirical model with a
no-signalling report and, for two-choice two-outcome scenarios, the CHSH value.

Example:
    python3 scripts/run_bell.py scenarios/chsh-345.scn
    python3 scripts/run_bell.py scenarios/tsirelson.scn --format machine
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import catprob.bell as bell
import catprob.scenarios as scn


def chsh_value(model):
    if any(len(c) != 2 for c in model.choice_labels) or any(
        len(o) != 2 for o in model.outcome_labels
    ):
        return None

    def corr(ctx):
        return sum(
            (1 if j[0][0] == j[1][0] else -1) * float(v)
            for j, v in model.row(ctx).items()
        )

    a0, a1 = model.choice_labels[0]
    b0, b1 = model.choice_labels[1]
    return corr((a0, b0)) + corr((a0, b1)) + corr((a1, b0)) - corr((a1, b1))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenario", help="path to a .scn scenario file")
    ap.add_argument("--format", choices=["table", "machine"], default="table")
    args = ap.parse_args(argv)

    scenario = scn.load_scenario(args.scenario)
    model = bell.evaluate(scenario)
    print(bell.export_empirical_model(model, args.format))

    rep = bell.no_signalling_check(model)
    print(f"no-signalling: {'PASS' if rep.ok else 'FAIL'}")
    if model.sr.tolerance is not None:
        print(f"max marginal discrepancy: {rep.max_discrepancy:.3e}")
    if not rep.ok:
        print(f"violation: {rep.violation}")

    s = chsh_value(model)
    if s is not None:
        print(f"CHSH value: {s:.9f}")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
