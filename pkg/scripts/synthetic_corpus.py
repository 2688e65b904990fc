#!/usr/bin/env python3
"""Write a synthetic patent corpus in the canonical CSV format.

Codes are group-level IPC codes spread over a handful of subclasses. Each
patent picks a home topic and draws most of its codes from that topic with
a skewed popularity, which yields clustered co-occurrence structure similar
to real filings.

    python scripts/synthetic_corpus.py out.csv --patents 10000 --codes 500
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import random
from pathlib import Path

SUBCLASSES = ["A63F", "G06F", "G06T", "G06Q", "H04L", "H04N", "G07F", "A63B", "G06N", "G06K"]


def code_pool(n_codes: int) -> list[str]:
    codes = []
    for i in range(n_codes):
        sub = SUBCLASSES[i % len(SUBCLASSES)]
        major = 1 + (i // len(SUBCLASSES)) % 40
        minor = "00" if i % 13 == 0 else str(10 + i)
        codes.append(f"{sub} {major}/{minor}")
    return codes


def synthetic_rows(n_patents: int, n_codes: int, seed: int = 0, topics: int = 12):
    rng = random.Random(seed)
    codes = code_pool(n_codes)
    rng.shuffle(codes)
    groups = [codes[t::topics] for t in range(topics)]
    applicants = ["Activision Publishing, Inc.", "King.com Ltd.", "Blizzard Entertainment, Inc."]
    offices = ["US"] * 8 + ["WO", "EP"]
    start = dt.date(2008, 1, 1).toordinal()
    span = dt.date(2023, 12, 31).toordinal() - start
    for i in range(n_patents):
        home = groups[rng.randrange(topics)]
        k = min(len(home), 1 + int(rng.expovariate(0.5)))
        chosen = {home[min(int(rng.paretovariate(1.2)) - 1, len(home) - 1)] for _ in range(k)}
        if rng.random() < 0.3:
            chosen.add(codes[rng.randrange(n_codes)])
        yield {
            "patent_id": f"SY{i:07d}",
            "office": rng.choice(offices),
            "publication_date": dt.date.fromordinal(start + rng.randrange(span + 1)).isoformat(),
            "applicants": rng.choice(applicants),
            "ipc_codes": ";".join(sorted(chosen)),
        }


def write_corpus(path: Path, n_patents: int, n_codes: int, seed: int = 0) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, ["patent_id", "office", "publication_date", "applicants", "ipc_codes"], lineterminator="\n")
        w.writeheader()
        w.writerows(synthetic_rows(n_patents, n_codes, seed))
    return path


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("output")
    ap.add_argument("--patents", type=int, default=10_000)
    ap.add_argument("--codes", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    write_corpus(args.output, args.patents, args.codes, args.seed)


if __name__ == "__main__":
    main()
