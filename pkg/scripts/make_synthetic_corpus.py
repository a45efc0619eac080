#!/usr/bin/env python3
"""Generate a synthetic corpus shard with planted duplicates and benchmark
overlaps, plus a matching benchmark shard. Handy for demos and for exercising
the filter -> dedup -> decontam pipeline end to end.

Usage:
  python scripts/make_synthetic_corpus.py --outdir demo-data --docs 5000 --seed 7
"""

import argparse
import random
from pathlib import Path

from corpusmix import Document, write_shard_file


def build(outdir: Path, n_docs: int, seed: int) -> None:
    rng = random.Random(seed)
    outdir.mkdir(parents=True, exist_ok=True)

    bench_docs = [
        Document(
            id=f"bench{i:03d}",
            source="demo-suite",
            text=" ".join(f"bv{i}q{j}" for j in range(20)),
        )
        for i in range(40)
    ]
    write_shard_file(outdir / "benchmarks.jsonl", bench_docs)

    n_dups = max(1, n_docs // 100)
    n_contam = max(1, n_docs // 200)
    docs = []
    for i in range(n_docs - n_dups - n_contam):
        score = float(rng.randrange(6)) if rng.random() < 0.85 else None
        docs.append(
            Document(
                id=f"doc{i:06d}",
                source=("web", "code", "math")[i % 3],
                text=" ".join(f"c{i}w{rng.randrange(300)}" for _ in range(40)),
                quality_score=score,
                language="en",
            )
        )
    for d in range(n_dups):
        docs.append(
            Document(
                id=f"dup{d:05d}",
                source="web",
                text=docs[d].text,
                quality_score=5.0,
                language="en",
            )
        )
    for k in range(n_contam):
        item = bench_docs[k % len(bench_docs)]
        noise = " ".join(f"pn{k}x{j}" for j in range(10))
        docs.append(
            Document(
                id=f"contam{k:04d}",
                source="web",
                text=f"{noise} {item.text}",
                quality_score=4.0,
                language="en",
            )
        )
    rng.shuffle(docs)
    write_shard_file(outdir / "corpus.jsonl", docs)
    print(f"wrote {len(docs)} documents to {outdir / 'corpus.jsonl'}")
    print(f"  planted duplicates:   {n_dups}")
    print(f"  planted contaminated: {n_contam}")
    print(f"wrote {len(bench_docs)} benchmark items to {outdir / 'benchmarks.jsonl'}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=Path, default=Path("demo-data"))
    parser.add_argument("--docs", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    build(args.outdir, args.docs, args.seed)


if __name__ == "__main__":
    main()
