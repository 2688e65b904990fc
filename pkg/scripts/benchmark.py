#!/usr/bin/env python3
"""Time each pipeline stage on a synthetic group-level corpus.

    python scripts/benchmark.py --patents 10000 --codes 500
"""

from __future__ import annotations

import argparse
import tempfile
import time
from pathlib import Path

from synthetic_corpus import write_corpus

from ipcmap.config import PipelineConfig
from ipcmap.corpus import load_corpus
from ipcmap.layout import force_atlas2
from ipcmap.pipeline import build_networks


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--patents", type=int, default=10_000)
    ap.add_argument("--codes", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    with tempfile.TemporaryDirectory() as tmp:
        path = write_corpus(Path(tmp) / "synthetic.csv", args.patents, args.codes, args.seed)
        t0 = time.perf_counter()
        corpus = load_corpus(path)
        t1 = time.perf_counter()
        config = PipelineConfig(input=str(path), level="group", applicant_patterns=())
        nets = build_networks(corpus, config)
        t2 = time.perf_counter()
        force_atlas2(nets.modularity, config.layout)
        force_atlas2(nets.mst, config.layout)
        t3 = time.perf_counter()

    print(f"codes={len(nets.full.nodes)} co-occurrence edges={len(nets.full.edges)} "
          f"modularity edges={len(nets.modularity.edges)} communities={len(set(nets.partition.values()))}")
    print(f"load     {t1 - t0:6.2f} s")
    print(f"networks {t2 - t1:6.2f} s  (graph, threshold, Louvain, forest, metrics)")
    print(f"layouts  {t3 - t2:6.2f} s  (two ForceAtlas2 runs)")
    print(f"total    {t3 - t1:6.2f} s  excluding load")


if __name__ == "__main__":
    main()
