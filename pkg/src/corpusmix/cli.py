"""Batch CLI tying the curation and planning modules into pipelines.

Every subcommand writes machine-readable reports plus a run manifest (content
digests of inputs and outputs, parameters, seed, tool version) so that runs
are auditable and reproducible: identical inputs, config, and seed give
byte-identical outputs regardless of machine or worker count.

Exit codes: 0 success, 1 validation failure, 2 IO/parse failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .corpus import (
    Document,
    corpus_stats,
    read_shard_file,
    write_shard_file,
)
from .decontaminate import (
    benchmark_items_from_documents,
    build_index,
    decontaminate,
)
from .errors import ConfigError, InputError, ParseError
from .hashing import derive_seed
from .lr_schedule import (
    CosineConfig,
    WsdConfig,
    cosine_lr,
    small_model_presets,
    wsd_lr,
    wsd_phase,
)
from .minhash import dedup
from .mixture import (
    StagePlan,
    builtin_sources,
    builtin_stages,
    compose_schedule,
    epoch_report,
    load_plan_file,
    parse_token_count,
    projected_epochs,
    validate_stage,
)
from .quality import (
    ClassifierConfig,
    classify,
    load_model,
    save_model,
    threshold_filter,
    train_classifier,
)
from .sampler import sample_stream

SEED_ENV_VAR = "CORPUSMIX_SEED"

REPORT_SCHEMA_VERSION = 1
PIPELINE_CONFIG_VERSION = 1

# parameters each command accepts inside a pipeline config; anything else
# is rejected up front
PIPELINE_PARAMS = {
    "stats": {"chars_per_token"},
    "filter": {"min_score", "per_language_thresholds"},
    "dedup": {"seed", "shingle_width", "num_hashes", "bands", "threads"},
    "decontam": {
        "benchmarks",
        "ngram",
        "min_ratio",
        "window_guard",
        "max_candidates",
        "denominator",
    },
    "classify-score": {"model"},
}


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path, payload) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_report(path, kind: str, payload: dict) -> None:
    _write_json(path, {"schema_version": REPORT_SCHEMA_VERSION, "kind": kind, **payload})


def _write_manifest(path, command: str, params: dict, seed: int | None, inputs, outputs) -> None:
    manifest = {
        "tool": "corpusmix",
        "version": __version__,
        "command": command,
        "parameters": params,
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    _write_json(path, manifest)


def _manifest_path(args, *outputs):
    if getattr(args, "manifest", None):
        return args.manifest
    for out in outputs:
        if out:
            return str(out) + ".manifest.json"
    return None


def _load_corpus(paths, strict: bool) -> list[Document]:
    docs: list[Document] = []
    for path in paths:
        errors: list[ParseError] = []
        docs.extend(read_shard_file(path, strict=strict, error_sink=errors))
        if errors:
            print(f"{path}: skipped {len(errors)} malformed line(s)", file=sys.stderr)
            for err in errors[:5]:
                print(f"  {err}", file=sys.stderr)
    return docs


def _parse_threshold_map(text: str | None) -> dict[str, int]:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"bad threshold entry {item!r}, expected lang=score")
        lang, _, value = item.partition("=")
        try:
            out[lang.strip()] = int(value)
        except ValueError as exc:
            raise ConfigError(f"bad threshold value in {item!r}") from exc
    return out


def _fmt_tokens(value) -> str:
    value = float(value)
    for unit, scale in (("T", 1e12), ("B", 1e9), ("M", 1e6), ("k", 1e3)):
        if abs(value) >= scale:
            return f"{value / scale:.4g}{unit}"
    return f"{value:.4g}"


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_stats(args) -> int:
    docs = _load_corpus(args.inputs, args.strict)
    stats = corpus_stats(docs, chars_per_token=args.chars_per_token)
    print(f"documents: {stats.document_count}")
    print(f"tokens:    {stats.total_tokens}")
    for name in sorted(stats.per_source):
        tally = stats.per_source[name]
        print(f"  {name}: {tally.documents} docs, {tally.tokens} tokens")
    if stats.score_histogram:
        buckets = " ".join(
            f"{b}:{stats.score_histogram[b]}" for b in sorted(stats.score_histogram)
        )
        print(f"score histogram: {buckets}")
    if args.report:
        _write_report(
            args.report,
            "corpus_stats",
            {
                "document_count": stats.document_count,
                "total_tokens": stats.total_tokens,
                "per_source": {
                    name: {"documents": t.documents, "tokens": t.tokens}
                    for name, t in stats.per_source.items()
                },
                "score_histogram": {str(b): c for b, c in stats.score_histogram.items()},
            },
        )
        manifest = _manifest_path(args, args.report)
        _write_manifest(
            manifest,
            "stats",
            {"chars_per_token": args.chars_per_token},
            None,
            args.inputs,
            [args.report],
        )
    return 0


def _cmd_filter(args) -> int:
    docs = _load_corpus(args.inputs, args.strict)
    thresholds = _parse_threshold_map(args.per_language_thresholds)
    kept, report = threshold_filter(docs, args.min_score, language_thresholds=thresholds)
    write_shard_file(args.output, kept)
    print(
        f"filter: kept {report.kept}, dropped {report.dropped_low_score} low-score, "
        f"{report.dropped_unscored} unscored"
    )
    if args.report:
        _write_report(
            args.report,
            "filter_report",
            {
                "kept": report.kept,
                "dropped_low_score": report.dropped_low_score,
                "dropped_unscored": report.dropped_unscored,
                "min_score": report.min_score,
                "language_thresholds": report.language_thresholds,
            },
        )
    outputs = [args.output] + ([args.report] if args.report else [])
    _write_manifest(
        _manifest_path(args, args.output),
        "filter",
        {
            "min_score": args.min_score,
            "per_language_thresholds": thresholds,
        },
        None,
        args.inputs,
        outputs,
    )
    return 0


def _cmd_dedup(args) -> int:
    docs = _load_corpus(args.inputs, args.strict)
    seed = _default_seed(args.seed)
    kept, report = dedup(
        docs,
        shingle_width=args.shingle_width,
        num_hashes=args.num_hashes,
        master_seed=seed,
        bands=args.bands,
        threads=args.threads,
    )
    write_shard_file(args.output, kept)
    print(
        f"dedup: kept {len(kept)} of {len(docs)} "
        f"({len(report.dropped)} dropped, {report.cluster_count} clusters)"
    )
    if args.report:
        _write_report(
            args.report,
            "dedup_report",
            {
                "kept_count": len(report.kept),
                "dropped": report.dropped,
                "cluster_count": report.cluster_count,
            },
        )
    outputs = [args.output] + ([args.report] if args.report else [])
    _write_manifest(
        _manifest_path(args, args.output),
        "dedup",
        {
            "shingle_width": args.shingle_width,
            "num_hashes": args.num_hashes,
            "bands": args.bands,
        },
        seed,
        args.inputs,
        outputs,
    )
    return 0


def _cmd_decontam(args) -> int:
    docs = _load_corpus(args.inputs, args.strict)
    bench_docs = _load_corpus(args.benchmarks, args.strict)
    items = benchmark_items_from_documents(bench_docs)
    index = build_index(items, n=args.ngram)
    clean, report = decontaminate(
        docs,
        index,
        items,
        min_ratio=args.min_ratio,
        max_candidates=args.max_candidates,
        denominator=args.denominator,
        window_guard=args.window_guard,
    )
    write_shard_file(args.output, clean)
    print(f"decontam: flagged {len(report.flagged)} of {len(docs)}, clean {report.clean_count}")
    if args.report:
        _write_report(
            args.report,
            "contamination_report",
            {
                "clean_count": report.clean_count,
                "flagged": {
                    doc_id: [
                        {"bench_id": bench_id, "overlap_ratio": ratio}
                        for bench_id, ratio in matches
                    ]
                    for doc_id, matches in report.flagged.items()
                },
                "truncated_candidates": report.truncated_candidates,
            },
        )
    outputs = [args.output] + ([args.report] if args.report else [])
    _write_manifest(
        _manifest_path(args, args.output),
        "decontam",
        {
            "ngram": args.ngram,
            "min_ratio": args.min_ratio,
            "window_guard": args.window_guard,
            "max_candidates": args.max_candidates,
            "denominator": args.denominator,
        },
        None,
        list(args.inputs) + list(args.benchmarks),
        outputs,
    )
    return 0


def _cmd_classify_train(args) -> int:
    docs = _load_corpus(args.inputs, args.strict)
    labeled = [(d.text, d.quality_score) for d in docs if d.quality_score is not None]
    skipped = len(docs) - len(labeled)
    if skipped:
        print(f"classify-train: ignoring {skipped} unlabeled document(s)", file=sys.stderr)
    seed = _default_seed(args.seed)
    config = ClassifierConfig(
        feature_dim=args.feature_dim,
        ngram_orders=tuple(int(o) for o in args.ngram_orders.split(",")),
        seed=seed,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        holdout_fraction=args.holdout_fraction,
        binary_threshold=args.binary_threshold,
    )
    model, report = train_classifier(labeled, config)
    save_model(model, args.model_out)
    f1 = "n/a" if report.holdout_f1 is None else f"{report.holdout_f1:.4f}"
    print(
        f"classify-train: {report.examples} examples, holdout {report.holdout_size}, "
        f"F1@{report.binary_threshold} = {f1}"
    )
    if args.report:
        _write_report(
            args.report,
            "train_report",
            {
                "examples": report.examples,
                "holdout_size": report.holdout_size,
                "holdout_f1": report.holdout_f1,
                "binary_threshold": report.binary_threshold,
                "epochs": report.epochs,
            },
        )
    outputs = [args.model_out] + ([args.report] if args.report else [])
    _write_manifest(
        _manifest_path(args, args.model_out),
        "classify-train",
        {
            "feature_dim": args.feature_dim,
            "ngram_orders": args.ngram_orders,
            "epochs": args.epochs,
            "learning_rate": args.learning_rate,
            "holdout_fraction": args.holdout_fraction,
            "binary_threshold": args.binary_threshold,
        },
        seed,
        args.inputs,
        outputs,
    )
    return 0


def _cmd_classify_score(args) -> int:
    docs = _load_corpus(args.inputs, args.strict)
    model = load_model(args.model)
    scored = []
    for doc in docs:
        raw = classify(model, doc.text)
        scored.append(
            Document(
                id=doc.id,
                source=doc.source,
                text=doc.text,
                url=doc.url,
                domain=doc.domain,
                token_count=doc.token_count,
                quality_score=raw,
                language=doc.language,
                extra=doc.extra,
            )
        )
    write_shard_file(args.output, scored)
    print(f"classify-score: scored {len(scored)} documents")
    _write_manifest(
        _manifest_path(args, args.output),
        "classify-score",
        {"model": str(args.model)},
        None,
        list(args.inputs) + [args.model],
        [args.output],
    )
    return 0


def _cmd_plan(args) -> int:
    if args.plan_file:
        plan_file = load_plan_file(args.plan_file)
        sources = plan_file.sources
        stages = plan_file.stages
        schedule_names = [stage.name for stage in stages]
    else:
        sources = builtin_sources()
        presets = builtin_stages()
        stages = list(presets.values())
        schedule_names = ["stage1", "stage2", "stage3", "stage4"]

    problems = []
    for stage in stages:
        problems.extend(validate_stage(stage, sources))
    if problems:
        for problem in problems:
            print(f"plan: {problem}", file=sys.stderr)
        return 1

    schedule_stages = [s for s in stages if s.name in schedule_names]
    schedule = compose_schedule(schedule_stages) if schedule_stages else None
    total = schedule.total_tokens if schedule else sum(s.token_budget for s in stages)

    payload_stages = {}
    had_violation = False
    for stage in stages:
        report = epoch_report(stage, sources, cap=args.cap)
        projection = projected_epochs(stage, sources, total)
        flag = " (approximate)" if stage.approximate else ""
        print(f"stage {stage.name}{flag}: budget {_fmt_tokens(stage.token_budget)}")
        rows = {}
        for name in stage.weights:
            draw = report.per_source[name]
            proj = projection[name]
            violation = any(v[0] == name for v in report.violations)
            marker = "  !cap" if violation else ""
            print(
                f"  {name:<28} w={float(stage.weights[name]):<10.6g}"
                f" drawn={_fmt_tokens(draw.tokens_drawn):<9}"
                f" epochs={float(draw.epochs):7.2f}"
                f" epochs@{_fmt_tokens(total)}={float(proj):7.2f}{marker}"
            )
            rows[name] = {
                "weight": float(stage.weights[name]),
                "tokens_drawn": float(draw.tokens_drawn),
                "epochs": float(draw.epochs),
                "epochs_at_total": float(proj),
            }
        if report.violations:
            had_violation = True
            for name, epochs, cap in report.violations:
                print(f"  warning: {name} reaches {epochs:.2f} epochs (cap {cap})")
        payload_stages[stage.name] = {
            "token_budget": stage.token_budget,
            "approximate": stage.approximate,
            "per_source": rows,
            "violations": [
                {"source": n, "epochs": e, "cap": c} for n, e, c in report.violations
            ],
        }

    if schedule:
        boundary_text = ", ".join(_fmt_tokens(b) for b in schedule.boundaries)
        print(f"schedule boundaries: {boundary_text}")

    if args.report:
        _write_report(
            args.report,
            "plan_report",
            {
                "cap": args.cap,
                "total_tokens": total,
                "boundaries": list(schedule.boundaries) if schedule else [],
                "stages": payload_stages,
            },
        )
        _write_manifest(
            _manifest_path(args, args.report),
            "plan",
            {"cap": args.cap, "plan_file": args.plan_file},
            None,
            [args.plan_file] if args.plan_file else [],
            [args.report],
        )
    if had_violation and args.fail_on_cap:
        return 1
    return 0


def _cmd_lr_curve(args) -> int:
    if args.plan_file:
        plan_file = load_plan_file(args.plan_file)
        if args.name not in plan_file.schedules:
            raise ConfigError(
                f"schedule {args.name!r} not found in {args.plan_file}; "
                f"available: {', '.join(sorted(plan_file.schedules)) or 'none'}"
            )
        cfg = plan_file.schedules[args.name]
        schedule = "wsd" if isinstance(cfg, WsdConfig) else "cosine"
    elif args.preset:
        presets = small_model_presets()
        if args.preset not in presets:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(presets))}"
            )
        cfg = presets[args.preset]
        schedule = "wsd"
    elif args.schedule == "wsd":
        cfg = WsdConfig(
            warmup_steps=args.warmup,
            peak_lr=args.peak,
            total_steps=args.total_steps,
            decay_fraction=args.decay_fraction,
        )
        schedule = "wsd"
    else:
        cfg = CosineConfig(
            warmup_steps=args.warmup,
            peak_lr=args.peak,
            total_steps=args.total_steps,
            final_lr=args.final_lr,
        )
        schedule = "cosine"

    stride = args.stride if args.stride else max(1, cfg.total_steps // 1000)
    steps = list(range(0, cfg.total_steps + 1, stride))
    if steps[-1] != cfg.total_steps:
        steps.append(cfg.total_steps)

    lines = []
    for step in steps:
        if schedule == "wsd":
            lr = wsd_lr(step, cfg)
            phase = wsd_phase(step, cfg)
        else:
            lr = cosine_lr(step, cfg)
            phase = "warmup" if step < cfg.warmup_steps else "cosine"
        lines.append(f"{step}\t{lr:.12g}\t{phase}")
    body = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("step\tlr\tphase\n")
            handle.write(body)
    else:
        sys.stdout.write("step\tlr\tphase\n")
        sys.stdout.write(body)
    return 0


def _cmd_sample(args) -> int:
    if args.plan_file:
        plan_file = load_plan_file(args.plan_file)
        matching = [s for s in plan_file.stages if s.name == args.stage]
        if not matching:
            raise ConfigError(f"stage {args.stage!r} not found in {args.plan_file}")
        plan = matching[0]
    elif args.preset:
        presets = builtin_stages()
        if args.preset not in presets:
            raise ConfigError(f"unknown preset {args.preset!r}")
        plan = presets[args.preset]
    else:
        raise ConfigError("sample needs --plan-file with --stage, or --preset")
    if args.budget:
        plan = StagePlan(
            name=plan.name,
            token_budget=parse_token_count(args.budget),
            weights=plan.weights,
            notes=plan.notes,
            approximate=plan.approximate,
        )

    source_paths: dict[str, str] = {}
    for entry in args.source or []:
        if "=" not in entry:
            raise ConfigError(f"bad --source entry {entry!r}, expected name=path")
        name, _, path = entry.partition("=")
        source_paths[name] = path
    # loading is the only parallel part; the stream itself is sequential by
    # contract, so output is identical for any --threads value
    names = list(source_paths)
    if args.threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            loaded = list(pool.map(lambda n: read_shard_file(source_paths[n]), names))
        sources = dict(zip(names, loaded))
    else:
        sources = {name: read_shard_file(path) for name, path in source_paths.items()}

    seed = _default_seed(args.seed)
    stream = sample_stream(
        sources, plan, seed, mode=args.mode, chars_per_token=args.chars_per_token
    )
    limit = parse_token_count(args.limit_tokens) if args.limit_tokens else None

    emitted_tokens = 0
    count = 0
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
        for sample in stream:
            if args.emit == "ids":
                record = {
                    "id": sample.document.id,
                    "sampled_from": sample.source,
                    "epoch": sample.epoch,
                }
            else:
                doc = sample.document
                record = {
                    "id": doc.id,
                    "source": doc.source,
                    "text": doc.text,
                }
                for key in ("url", "domain", "token_count", "quality_score", "language"):
                    value = getattr(doc, key)
                    if value is not None:
                        record[key] = value
                for key in sorted(doc.extra):
                    record.setdefault(key, doc.extra[key])
                record["sampled_from"] = sample.source
                record["sample_epoch"] = sample.epoch
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")
            count += 1
            emitted_tokens = sum(stream.state.tokens_emitted.values())
            if limit is not None and emitted_tokens >= limit:
                break

    summary = stream.summary()
    summary["documents_emitted"] = count
    print(
        f"sample: emitted {count} documents, {emitted_tokens} tokens "
        f"from plan {plan.name!r}"
    )
    if args.summary:
        _write_report(args.summary, "sample_summary", summary)
    outputs = [args.output] + ([args.summary] if args.summary else [])
    _write_manifest(
        _manifest_path(args, args.output),
        "sample",
        {
            "plan": plan.name,
            "budget": plan.token_budget,
            "mode": args.mode,
            "emit": args.emit,
            "limit_tokens": args.limit_tokens,
            "sources": source_paths,
        },
        seed,
        list(source_paths.values()) + ([args.plan_file] if args.plan_file else []),
        outputs,
    )
    return 0


# ---------------------------------------------------------------------------
# Pipeline driver
# ---------------------------------------------------------------------------


def _step_argv(command: str, params: dict, inputs: list[str], output: str | None, report: str, master_seed: int, step_index: int) -> list[str]:
    argv = [command, *inputs]
    if output:
        argv += ["--output", output]
    argv += ["--report", report]
    if command in ("dedup",) and "seed" not in params:
        argv += ["--seed", str(derive_seed(master_seed, command, str(step_index)))]
    for key, value in params.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif isinstance(value, list):
            argv.append(flag)
            argv.extend(str(v) for v in value)
        elif isinstance(value, dict):
            argv += [flag, ",".join(f"{k}={v}" for k, v in value.items())]
        else:
            argv += [flag, str(value)]
    return argv


def _cmd_pipeline(args) -> int:
    with open(args.config, "r", encoding="utf-8") as handle:
        try:
            config = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid pipeline config: {exc}") from exc
    if config.get("version") != PIPELINE_CONFIG_VERSION:
        raise ConfigError(
            f"unsupported pipeline config version {config.get('version')!r}"
        )
    steps = config.get("steps")
    if not isinstance(steps, list) or not steps:
        raise ConfigError("pipeline config needs a non-empty 'steps' list")
    master_seed = int(config.get("master_seed", _default_seed(None)))
    inputs = config.get("input")
    if isinstance(inputs, str):
        inputs = [inputs]
    if not inputs:
        raise ConfigError("pipeline config needs 'input'")
    workdir = Path(config.get("workdir", "pipeline-out"))
    workdir.mkdir(parents=True, exist_ok=True)

    for step in steps:
        command = step.get("command")
        if command not in PIPELINE_PARAMS:
            raise ConfigError(f"pipeline step command {command!r} is not supported")
        params = step.get("params", {})
        unknown = set(params) - PIPELINE_PARAMS[command]
        if unknown:
            raise ConfigError(
                f"step {command!r}: unknown parameter(s) {', '.join(sorted(unknown))}"
            )

    current: list[str] = [str(p) for p in inputs]
    final_output = current
    for i, step in enumerate(steps):
        command = step["command"]
        params = dict(step.get("params", {}))
        stem = workdir / f"step{i:02d}-{command}"
        report = str(stem) + ".report.json"
        output = None if command == "stats" else str(stem) + ".jsonl"
        argv = _step_argv(command, params, current, output, report, master_seed, i)
        code = run(argv)
        if code != 0:
            print(f"pipeline: step {i} ({command}) failed with exit code {code}", file=sys.stderr)
            return code
        if output:
            current = [output]
            final_output = current

    _write_manifest(
        str(workdir / "pipeline.manifest.json"),
        "pipeline",
        {"config": str(args.config), "steps": [s["command"] for s in steps]},
        master_seed,
        [args.config] + [str(p) for p in inputs],
        final_output,
    )
    print(f"pipeline: done, final output {final_output[0]}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpusmix",
        description="Corpus curation and pretraining mixture planning toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"corpusmix {__version__}")
    sub = parser.add_subparsers(dest="command")

    def add_common_io(p, needs_output=True):
        p.add_argument("inputs", nargs="+", help="input shard file(s)")
        if needs_output:
            p.add_argument("--output", required=True, help="output shard path")
        p.add_argument("--report", help="machine-readable report path")
        p.add_argument("--manifest", help="run manifest path")
        p.add_argument("--strict", action="store_true", help="abort on malformed shard lines")

    p = sub.add_parser("stats", help="corpus statistics")
    add_common_io(p, needs_output=False)
    p.add_argument("--chars-per-token", type=float, default=4.0)
    p.set_defaults(handler=_cmd_stats)

    p = sub.add_parser("filter", help="quality-score threshold filter")
    add_common_io(p)
    p.add_argument("--min-score", type=int, required=True)
    p.add_argument(
        "--per-language-thresholds",
        help="per-language overrides, e.g. 'java=2,markdown=3'",
    )
    p.set_defaults(handler=_cmd_filter)

    p = sub.add_parser("dedup", help="near-duplicate removal (MinHash LSH)")
    add_common_io(p)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV_VAR} or 0)")
    p.add_argument("--shingle-width", type=int, default=5)
    p.add_argument("--num-hashes", type=int, default=10)
    p.add_argument("--bands", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(handler=_cmd_dedup)

    p = sub.add_parser("decontam", help="benchmark decontamination")
    add_common_io(p)
    p.add_argument("--benchmarks", nargs="+", required=True, help="benchmark shard file(s)")
    p.add_argument("--ngram", type=int, default=13)
    p.add_argument("--min-ratio", type=float, default=0.6)
    p.add_argument("--window-guard", type=int, default=8192)
    p.add_argument("--max-candidates", type=int, default=1000)
    p.add_argument("--denominator", choices=("benchmark", "min"), default="benchmark")
    p.set_defaults(handler=_cmd_decontam)

    p = sub.add_parser("classify-train", help="train the quality classifier")
    add_common_io(p, needs_output=False)
    p.add_argument("--model-out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--feature-dim", type=int, default=1 << 20)
    p.add_argument("--ngram-orders", default="1,2")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--holdout-fraction", type=float, default=0.1)
    p.add_argument("--binary-threshold", type=int, default=3)
    p.set_defaults(handler=_cmd_classify_train)

    p = sub.add_parser("classify-score", help="score documents with a trained model")
    add_common_io(p)
    p.add_argument("--model", required=True)
    p.set_defaults(handler=_cmd_classify_score)

    p = sub.add_parser("plan", help="validate mixture plans and report epochs")
    p.add_argument("--plan-file", help="plan config (JSON); defaults to built-in presets")
    p.add_argument("--cap", type=float, default=5.0, help="epoch cap for warnings")
    p.add_argument("--fail-on-cap", action="store_true", help="exit 1 on cap violations")
    p.add_argument("--report", help="machine-readable report path")
    p.add_argument("--manifest", help="run manifest path")
    p.set_defaults(handler=_cmd_plan)

    p = sub.add_parser("lr-curve", help="emit (step, lr, phase) rows")
    p.add_argument("--schedule", choices=("wsd", "cosine"), default="wsd")
    p.add_argument("--preset", help="named WSD preset (e.g. 1.7b, 135m-360m)")
    p.add_argument("--plan-file", help="plan config with a 'schedules' section")
    p.add_argument("--name", default="main", help="schedule name inside --plan-file")
    p.add_argument("--warmup", type=int, default=2000)
    p.add_argument("--peak", type=float, default=5.0e-4)
    p.add_argument("--total-steps", type=int, default=100_000)
    p.add_argument("--decay-fraction", type=float, default=0.10)
    p.add_argument("--final-lr", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=0, help="step stride (default total/1000)")
    p.add_argument("--output", help="write rows to a file instead of stdout")
    p.set_defaults(handler=_cmd_lr_curve)

    p = sub.add_parser("sample", help="deterministic weighted sampling of a stage plan")
    p.add_argument("--plan", "--plan-file", dest="plan_file", help="plan config (JSON)")
    p.add_argument("--stage", help="stage name inside --plan-file")
    p.add_argument("--preset", help="built-in stage preset name")
    p.add_argument("--budget", help="override token budget (accepts T/B/M/k)")
    p.add_argument("--source", action="append", help="name=path shard binding (repeatable)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=("deficit", "proportional"), default="deficit")
    p.add_argument("--emit", choices=("full", "ids"), default="full")
    p.add_argument("--limit-tokens", help="stop after this many tokens")
    p.add_argument("--chars-per-token", type=float, default=4.0)
    p.add_argument("--threads", type=int, default=1, help="threads for source loading")
    p.add_argument("--output", required=True)
    p.add_argument("--summary", help="summary report path")
    p.add_argument("--manifest", help="run manifest path")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("pipeline", help="run a multi-step pipeline config")
    p.add_argument("--config", required=True, help="PipelineConfig JSON path")
    p.set_defaults(handler=_cmd_pipeline)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.handler(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
