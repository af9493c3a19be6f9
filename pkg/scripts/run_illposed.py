#!/usr/bin/env python3
"""Supercritical inflation parameter algebra: verify, in exact arithmetic,
the rescaling identities lam^4 (lam nu)^(4-n) = eps^2 together with the
smallness and inflation conditions, over a grid of (n, eps, nu) cases.
"""

import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from _common import run

CONFIG = {
    "kind": "illposed",
    "study": {
        "cases": [
            {"n": n, "eps": eps, "nu": nu}
            for n in (9, 10, 12)
            for eps in ("1/10", "1/100")
            for nu in ("1/100", "1/1000")
        ],
        "t_nu": "1000",
    },
}

if __name__ == "__main__":
    sys.exit(run("illposed", CONFIG, __doc__))
