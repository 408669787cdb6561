#!/usr/bin/env python3
"""Run the full certification suite: tensor identities, the projector
rewrite, and the superoperator oracle for every cut with order at most 6.

Exits nonzero if any residual exceeds its tolerance.  Restrict the
decomposition checks with e.g. ``--sizes 2 3``.
"""

import argparse

from mczcut import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="*", default=None,
                        help="gate orders to check (default: 2..6)")
    args = parser.parse_args()
    return cli.cmd_verify(sizes=args.sizes)


if __name__ == "__main__":
    raise SystemExit(main())
