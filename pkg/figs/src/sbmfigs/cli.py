"""Render figures from an sbmlab result store.

Usage: sbmlab-figs --store <root> --run <run_id> --kind <kind>[,...] --fmt png
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .render import KINDS, render
from .store import MissingRun, SchemaMismatch, load_run


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="sbmlab-figs", description=__doc__)
    p.add_argument("--store", default=os.environ.get("SBMLAB_OUT", "sbmlab_out"))
    p.add_argument("--run", required=True, help="run id in the store")
    p.add_argument("--kind", default="all",
                   help="comma-separated figure kinds, or 'all'")
    p.add_argument("--fmt", default="png", choices=["png", "svg", "pdf"])
    p.add_argument("--out", default=None, help="output directory")
    args = p.parse_args(argv)

    kinds = list(KINDS) if args.kind == "all" else args.kind.split(",")
    unknown = set(kinds) - set(KINDS)
    if unknown:
        print(f"error: unknown figure kinds {sorted(unknown)}", file=sys.stderr)
        return 2
    out_dir = Path(args.out) if args.out else Path(args.store) / "figures"
    try:
        run = load_run(args.store, args.run)
        for kind in kinds:
            path = render(run, kind, out_dir, fmt=args.fmt)
            print(path)
    except (MissingRun, SchemaMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
