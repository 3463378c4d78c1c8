#!/usr/bin/env python3
"""Sweep the exhaustive characterization over every size under the cap and
print one verdict line per (n, m, class, mode)."""

import argparse

from serialquota import MechanismSpace, lex_class, strict_monotone_class, verify_characterization
from serialquota.search import ENUMERATION_CAP


def classes_for(m: int):
    yield lex_class(m)
    if m <= 3:
        yield strict_monotone_class(m)


def run(max_n: int, max_m: int) -> int:
    bad = 0
    for n in range(1, max_n + 1):
        for m in range(1, max_m + 1):
            for cls in classes_for(m):
                for partition_only in (True, False):
                    space = MechanismSpace(n, m, cls, partition_only)
                    if space.size > ENUMERATION_CAP:
                        continue
                    report = verify_characterization(n, m, cls, partition_only)
                    mode = "partition" if partition_only else "allocation"
                    print(
                        f"n={n} m={m} class={cls.tag} {mode}: {report.verdict} "
                        f"({len(report.satisfying)} tables = {len(report.family)} pairs)"
                    )
                    bad += report.verdict != "sets-equal"
    return 1 if bad else 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=3)
    parser.add_argument("--max-m", type=int, default=3)
    args = parser.parse_args()
    raise SystemExit(run(args.max_n, args.max_m))
