#!/usr/bin/env python3
"""Hardy quotient on Berwald space: decade ratios and local log-log slopes.

Shows how the fitted slope over a finite window approaches the asymptotic
exponent p only as iota -> 0.
"""
from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from finslab import functionals as fn


@dataclass(frozen=True)
class DecadeConfig:
    n: int = 3
    p: float = 2.0
    first: int = 1
    last: int = 7


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--last", type=int, default=7, help="smallest iota is 10^-last")
    a = ap.parse_args()
    cfg = DecadeConfig(a.n, a.p, last=a.last)
    view, params = fn.berwald_view(cfg.n), fn.FunctionalParams(cfg.n, cfg.p)
    prev = None
    print("iota,quotient,decade_ratio,local_slope")
    for e in range(cfg.first, cfg.last + 1):
        iota = 10.0 ** -e
        q = fn.hardy_quotient(view, fn.exp_decay(iota), params)
        ratio = prev / q if prev else math.nan
        print(f"{iota!r},{q!r},{ratio:.6f},{math.log10(ratio) if prev else math.nan:.6f}")
        prev = q


if __name__ == "__main__":
    main()
