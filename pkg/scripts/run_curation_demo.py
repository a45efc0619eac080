#!/usr/bin/env python3
"""End-to-end curation demo: generate synthetic data, then run the
filter -> dedup -> decontam pipeline twice (as a pipeline config and as three
standalone commands) and confirm the artifacts are byte-identical.

Usage:
  python scripts/run_curation_demo.py --workdir demo-run --docs 5000
"""

import argparse
import json
import sys
from pathlib import Path

from corpusmix.cli import run

sys.path.insert(0, str(Path(__file__).parent))
from make_synthetic_corpus import build  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", type=Path, default=Path("demo-run"))
    parser.add_argument("--docs", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    data = args.workdir / "data"
    build(data, args.docs, args.seed)
    corpus = data / "corpus.jsonl"
    bench = data / "benchmarks.jsonl"

    config_path = args.workdir / "pipeline.json"
    pipe_dir = args.workdir / "pipeline"
    config_path.parent.mkdir(parents=True, exist_ok=True)
    config_path.write_text(json.dumps({
        "version": 1,
        "master_seed": args.seed,
        "input": str(corpus),
        "workdir": str(pipe_dir),
        "steps": [
            {"command": "filter", "params": {"min_score": 3}},
            {"command": "dedup", "params": {"seed": args.seed}},
            {"command": "decontam", "params": {"benchmarks": [str(bench)]}},
        ],
    }, indent=2))

    print("\n== pipeline run ==")
    code = run(["pipeline", "--config", str(config_path)])
    if code != 0:
        return code

    print("\n== manual composition ==")
    manual = args.workdir / "manual"
    manual.mkdir(parents=True, exist_ok=True)
    f_out, d_out, c_out = (manual / n for n in ("filtered.jsonl", "deduped.jsonl", "clean.jsonl"))
    for argv in (
        ["filter", str(corpus), "--output", str(f_out), "--min-score", "3"],
        ["dedup", str(f_out), "--output", str(d_out), "--seed", str(args.seed)],
        ["decontam", str(d_out), "--benchmarks", str(bench), "--output", str(c_out)],
    ):
        code = run(argv)
        if code != 0:
            return code

    pipeline_final = (pipe_dir / "step02-decontam.jsonl").read_bytes()
    if pipeline_final == c_out.read_bytes():
        print("\npipeline output == manual composition: OK")
    else:
        print("\npipeline output != manual composition: MISMATCH")
        return 1

    print("\n== final stats ==")
    return run(["stats", str(c_out)])


if __name__ == "__main__":
    sys.exit(main())
