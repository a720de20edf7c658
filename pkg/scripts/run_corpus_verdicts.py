"""Run the rigidity verdict over the bundled density corpus.

Prints one line per density: the cone/witness classification, the fitted
cone parameters or the witnessing slack, and whether the structural
precondition check let the density through at all.  With --json the full
reports are also dumped for downstream comparison runs.

Usage:
    python scripts/run_corpus_verdicts.py
    python scripts/run_corpus_verdicts.py --json out/verdicts.json --strict
"""

import argparse
import dataclasses
import json
import sys

from needlelab.corpus import standard_corpus
from needlelab.variational import McpPreconditionError, rigidity_verdict


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", metavar="PATH", help="also write full reports as JSON")
    ap.add_argument(
        "--strict",
        action="store_true",
        help="exit nonzero if any verdict disagrees with the corpus ground truth",
    )
    args = ap.parse_args()

    rows = []
    mismatches = 0
    for entry in standard_corpus():
        record = {"name": entry.name, "expected_cone": entry.is_cone}
        if not entry.mcp_passes:
            try:
                rigidity_verdict(entry.density, entry.dimension, entry.ckn)
            except McpPreconditionError as exc:
                record["verdict"] = "refused"
                record["reason"] = str(exc)
                print(f"{entry.name:20s}  refused    {exc}")
                rows.append(record)
                continue
            # a density that fails the curvature check must be refused
            record["verdict"] = "accepted-but-should-refuse"
            mismatches += 1
            rows.append(record)
            print(f"{entry.name:20s}  MISMATCH   precondition not enforced")
            continue

        v = rigidity_verdict(entry.density, entry.dimension, entry.ckn)
        record["verdict"] = v.variant
        record["report"] = dataclasses.asdict(v)
        if v.variant == "cone":
            detail = f"A={v.A:.6g}  dev={v.cone.max_rel_deviation:.2e}"
        else:
            detail = f"slack={v.witness_slack:.6g}  via {v.witness_kind}"
        agree = (v.variant == "cone") == entry.is_cone
        mismatches += 0 if agree else 1
        flag = "" if agree else "  <-- disagrees with ground truth"
        print(f"{entry.name:20s}  {v.variant:16s} {detail}{flag}")
        rows.append(record)

    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2, sort_keys=True, default=str)
        print(f"wrote {args.json}")

    if args.strict and mismatches:
        print(f"{mismatches} mismatch(es)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
