"""Corpus curation and pretraining mixture planning toolkit.

Library surface for deduplication, benchmark decontamination, quality
filtering, multi-stage mixture planning, learning-rate schedules, and
deterministic multi-source sampling; `corpusmix` is the batch CLI.
"""

from .corpus import (
    CorpusStats,
    Document,
    approx_token_count,
    corpus_stats,
    effective_token_count,
    normalize_text,
    read_shard,
    read_shard_file,
    score_bucket,
    tokenize_words,
    word_tokens,
    write_shard,
    write_shard_file,
)
from .decontaminate import (
    BenchmarkIndex,
    BenchmarkItem,
    ContaminationReport,
    build_index,
    decontaminate,
    lcs_len,
    overlap_ratio,
)
from .domains import registrable_domain
from .errors import ConfigError, Error, InputError, ParseError
from .lr_schedule import (
    CosineConfig,
    WsdConfig,
    ablation_cosine_preset,
    cosine_lr,
    small_model_presets,
    wsd_lr,
    wsd_phase,
)
from .minhash import (
    DedupReport,
    MinHashSignature,
    dedup,
    jaccard_estimate,
    sentinel_signature,
    shingles,
    signature,
)
from .mixture import (
    EpochReport,
    SourceSpec,
    StagePlan,
    TrainingSchedule,
    anneal_plan,
    builtin_sources,
    builtin_stages,
    category_shares,
    compose_schedule,
    epoch_report,
    parse_token_count,
    validate_stage,
)
from .quality import (
    ClassifierConfig,
    ClassifierModel,
    ScoredPage,
    classify,
    domain_select,
    expand_urls,
    load_model,
    save_model,
    threshold_filter,
    train_classifier,
)
from .sampler import (
    SampledDocument,
    SampleStream,
    long_context_filter,
    pack_accounting,
    sample_stream,
)

__version__ = "0.1.0"
