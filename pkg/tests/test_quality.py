import random

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from corpusmix import (
    ClassifierConfig,
    ConfigError,
    Document,
    InputError,
    ScoredPage,
    classify,
    domain_select,
    expand_urls,
    load_model,
    save_model,
    score_bucket,
    threshold_filter,
    train_classifier,
)
from corpusmix.quality import DEFAULT_LANGUAGE_THRESHOLDS


def _scored_doc(i, score, language=None):
    return Document(
        id=f"d{i:04d}", source="s", text=f"text {i}", quality_score=score, language=language
    )


# ---------------------------------------------------------------------------
# threshold_filter
# ---------------------------------------------------------------------------


def test_threshold_keeps_4_and_5():
    docs = [_scored_doc(0, 3), _scored_doc(1, 4), _scored_doc(2, 5)]
    kept, report = threshold_filter(docs, 4)
    assert [d.quality_score for d in kept] == [4, 5]
    assert report.kept == 2 and report.dropped_low_score == 1


def test_threshold_zero_is_identity_on_scored():
    docs = [_scored_doc(i, i % 6) for i in range(12)]
    kept, _ = threshold_filter(docs, 0)
    assert kept == docs


def test_threshold_drops_and_counts_unscored():
    docs = [_scored_doc(0, 4), Document(id="u", source="s", text="x")]
    kept, report = threshold_filter(docs, 3)
    assert [d.id for d in kept] == ["d0000"]
    assert report.dropped_unscored == 1


def test_threshold_matches_counting_oracle():
    rng = random.Random(17)
    docs = [_scored_doc(i, rng.randrange(6)) for i in range(1000)]
    kept, _ = threshold_filter(docs, 3)
    assert len(kept) == sum(1 for d in docs if d.quality_score >= 3)


def test_threshold_buckets_real_scores():
    docs = [_scored_doc(0, 3.5), _scored_doc(1, 3.49)]
    kept, _ = threshold_filter(docs, 4)
    assert [d.id for d in kept] == ["d0000"]


@given(
    st.lists(st.floats(min_value=0.0, max_value=5.0, allow_nan=False), max_size=30),
    st.integers(min_value=0, max_value=5),
    st.integers(min_value=0, max_value=5),
)
def test_threshold_composition(scores, a, b):
    docs = [_scored_doc(i, s) for i, s in enumerate(scores)]
    two_pass, _ = threshold_filter(threshold_filter(docs, a)[0], b)
    one_pass, _ = threshold_filter(docs, max(a, b))
    assert two_pass == one_pass


def test_threshold_per_language_table():
    table = dict(DEFAULT_LANGUAGE_THRESHOLDS)
    assert table["java"] == 2 and table["markdown"] == 3
    docs = [
        _scored_doc(0, 2, language="java"),
        _scored_doc(1, 2, language="python"),
        _scored_doc(2, 3, language="python"),
        _scored_doc(3, 2, language="Java"),  # case-insensitive match
    ]
    kept, _ = threshold_filter(docs, 3, language_thresholds=table)
    assert [d.id for d in kept] == ["d0000", "d0002", "d0003"]


def test_threshold_rejects_bad_score():
    with pytest.raises(ConfigError):
        threshold_filter([], 6)


# ---------------------------------------------------------------------------
# domain_select / expand_urls
# ---------------------------------------------------------------------------


def _pages(domain, count, score):
    return [
        ScoredPage(url=f"http://{domain}/p{i}", domain=domain, score=score)
        for i in range(count)
    ]


def test_domain_select_boundary():
    pages = _pages("keep.test", 10, 2) + _pages("drop.test", 9, 2)
    assert domain_select(pages) == ["keep.test"]


def test_domain_select_ignores_low_scores():
    pages = _pages("low.test", 50, 1) + _pages("ok.test", 10, 5)
    assert domain_select(pages) == ["ok.test"]


def test_domain_select_matches_grouping_oracle():
    rng = random.Random(23)
    pages = []
    for i in range(400):
        domain = f"site{rng.randrange(25)}.test"
        pages.append(ScoredPage(url=f"http://{domain}/{i}", domain=domain, score=rng.randrange(6)))
    got = domain_select(pages, min_pages=5, min_score=3)
    counts = {}
    for page in pages:
        if page.score >= 3:
            counts[page.domain] = counts.get(page.domain, 0) + 1
    expected = sorted(d for d, c in counts.items() if c >= 5)
    assert got == expected


def test_scored_page_from_url():
    page = ScoredPage.from_url("https://www.shop.example.co.uk/item", 4)
    assert page.domain == "example.co.uk"
    with pytest.raises(InputError):
        ScoredPage.from_url("not a url", 4)


def test_expand_urls_allowlist_only():
    result = expand_urls(["d1.test"], {"main": ["http://d1.test/a", "http://d2.test/b"]})
    assert result.urls == ["http://d1.test/a"]
    assert result.provenance == {"main": 1}


def test_expand_urls_seed_list_rule():
    seed_urls = [f"http://d2.test/{i}" for i in range(10)]
    result = expand_urls([], {"seeds": seed_urls})
    assert result.urls == seed_urls
    result9 = expand_urls([], {"seeds": seed_urls[:9]})
    assert result9.urls == []


def test_expand_urls_first_source_wins_and_counts_match_recount():
    rng = random.Random(31)
    lists = {
        "classifier": [f"http://dom{rng.randrange(40)}.test/c{i}" for i in range(5000)],
        "mathset": [f"http://dom{rng.randrange(60)}.test/m{i}" for i in range(5000)],
    }
    allow = [f"dom{i}.test" for i in range(8)]
    result = expand_urls(allow, lists, min_urls_per_domain=100)
    # brute-force recount
    from corpusmix import registrable_domain

    counts = {name: {} for name in lists}
    for name, urls in lists.items():
        for url in urls:
            dom = registrable_domain(url)
            counts[name][dom] = counts[name].get(dom, 0) + 1
    qualified = set(allow)
    for name in lists:
        qualified |= {d for d, c in counts[name].items() if c >= 100}
    seen = set()
    expect_prov = {name: 0 for name in lists}
    expect_urls = []
    for name, urls in lists.items():
        for url in urls:
            if registrable_domain(url) in qualified and url not in seen:
                seen.add(url)
                expect_prov[name] += 1
                expect_urls.append(url)
    assert result.urls == expect_urls
    assert result.provenance == expect_prov


def test_expand_urls_skips_unparseable():
    result = expand_urls(["d1.test"], {"main": ["http://d1.test/a", "%%%", "localhost"]})
    assert result.urls == ["http://d1.test/a"]
    assert result.skipped == 2


# ---------------------------------------------------------------------------
# classifier
# ---------------------------------------------------------------------------

_CFG = ClassifierConfig(feature_dim=1 << 16, seed=7, epochs=25)


def _separable_data(n_per_class=200, seed=0):
    rng = random.Random(seed)
    low_vocab = [f"junk{i}" for i in range(60)]
    high_vocab = [f"proof{i}" for i in range(60)]
    data = []
    for i in range(n_per_class):
        data.append((" ".join(rng.choice(low_vocab) for _ in range(25)), 1.0))
        data.append((" ".join(rng.choice(high_vocab) for _ in range(25)), 5.0))
    rng.shuffle(data)
    return data


def test_classifier_separates_disjoint_vocabularies():
    model, report = train_classifier(_separable_data(), _CFG)
    assert report.holdout_size > 0
    assert report.holdout_f1 >= 0.95


def test_classifier_training_is_bit_deterministic():
    data = _separable_data(60, seed=3)
    model_a, _ = train_classifier(data, _CFG)
    model_b, _ = train_classifier(data, _CFG)
    assert model_a.bias == model_b.bias
    assert np.array_equal(model_a.weights, model_b.weights)


def test_classifier_empty_text_returns_clamped_bias():
    model, _ = train_classifier(_separable_data(40), _CFG)
    assert classify(model, "") == min(5.0, max(0.0, model.bias))


def test_classifier_class5_vocab_hits_bucket_5():
    model, _ = train_classifier(_separable_data(), _CFG)
    rng = random.Random(11)
    probe = " ".join(f"proof{rng.randrange(60)}" for _ in range(25))
    assert score_bucket(classify(model, probe)) == 5
    low_probe = " ".join(f"junk{rng.randrange(60)}" for _ in range(25))
    assert score_bucket(classify(model, low_probe)) == 1


def test_classifier_prediction_is_pure():
    model, _ = train_classifier(_separable_data(40), _CFG)
    text = "proof1 proof2 junk3"
    assert classify(model, text) == classify(model, text)


def test_classifier_rejects_single_class():
    data = [("a b c", 3.0), ("d e f", 3.0)]
    with pytest.raises(InputError):
        train_classifier(data, _CFG)


def test_classifier_rejects_bad_feature_dim():
    with pytest.raises(ConfigError):
        ClassifierConfig(feature_dim=1000)


def test_model_save_load_roundtrip(tmp_path):
    model, _ = train_classifier(_separable_data(40), _CFG)
    path = tmp_path / "model.bin"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.feature_dim == model.feature_dim
    assert loaded.ngram_orders == model.ngram_orders
    assert loaded.seed == model.seed
    assert loaded.bias == model.bias
    assert np.array_equal(loaded.weights, model.weights)
    assert classify(loaded, "proof1 proof2") == classify(model, "proof1 proof2")


def test_model_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"not a model at all")
    from corpusmix import ParseError

    with pytest.raises(ParseError):
        load_model(path)


@settings(max_examples=20)
@given(st.text(max_size=80))
def test_classify_stays_in_range(text):
    model, _ = train_classifier(_separable_data(30), _CFG)
    assert 0.0 <= classify(model, text) <= 5.0
