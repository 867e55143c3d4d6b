#!/usr/bin/env python3
"""Acceptance suite with a timing summary; exit status 1 if any criterion fails."""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from finslab.acceptance import verify
from finslab.experiments import DEFAULT_SEED, emit_report


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = DEFAULT_SEED
    only: frozenset[int] | None = None
    report: str | None = None


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--only", help="comma-separated criterion numbers")
    ap.add_argument("--report")
    a = ap.parse_args()
    cfg = VerifyConfig(a.seed, frozenset(int(v) for v in a.only.split(",")) if a.only else None, a.report)
    t0 = time.perf_counter()
    checks = verify(cfg.seed, set(cfg.only) if cfg.only else None, progress=lambda c: print(c.line(), flush=True))
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks)} criteria, {len(failed)} failed, {time.perf_counter() - t0:.1f}s")
    if cfg.report:
        emit_report(checks, cfg.report)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
