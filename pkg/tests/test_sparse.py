import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wren.analysis import analyze
from wren.errors import InputError, SchemaError
from wren.sparse import (
    BM25Params,
    build_sparse_index,
    load_sparse_index,
    save_sparse_index,
    search_sparse,
)

from .test_corpus import make_passage


def brute_force_bm25(passages, query, k1=0.9, b=0.4):
    """Independent oracle: score every passage straight from the formula."""
    texts = [analyze(p.title + " " + p.text) for p in passages]
    n = len(texts)
    avgdl = sum(len(t) for t in texts) / n if n else 0.0
    df = Counter()
    for terms in texts:
        for term in set(terms):
            df[term] += 1
    query_terms = analyze(query)
    scores = []
    for pid, terms in zip((p.passage_id for p in passages), texts):
        tf = Counter(terms)
        dl = len(terms)
        s = 0.0
        for term in query_terms:
            if tf[term] == 0:
                continue
            idf = math.log(1.0 + (n - df[term] + 0.5) / (df[term] + 0.5))
            s += idf * tf[term] * (k1 + 1.0) / (tf[term] + k1 * (1.0 - b + b * dl / avgdl))
        scores.append((pid, s))
    positive = [(pid, s) for pid, s in scores if s > 0.0]
    positive.sort(key=lambda x: (-x[1], x[0]))
    return positive


class TestAnalyze:
    def test_folds_and_strips_punctuation(self):
        assert analyze("The Great Gatsby!") == ["the", "great", "gatsby"]

    def test_empty(self):
        assert analyze("") == []

    def test_hyphen_splits_runs(self):
        assert analyze("B-25 bomber") == ["b", "25", "bomber"]

    def test_underscore_splits_runs(self):
        assert analyze("snake_case") == ["snake", "case"]

    def test_unicode_letters_kept(self):
        assert analyze("Joëlle!") == ["joëlle"]


class TestBuild:
    def test_single_passage_counts(self):
        index = build_sparse_index([make_passage("a b a", "d")])
        assert index.passage_count == 1
        assert index.avgdl == 3
        plist = index.postings["a"]
        assert plist.document_frequency == 1
        assert plist.postings == [(0, 2)]

    def test_empty_corpus(self):
        index = build_sparse_index([])
        assert index.passage_count == 0
        assert search_sparse(index, "anything", 5) == []

    def test_duplicate_passage_id_rejected(self):
        passages = [make_passage("a", "d"), make_passage("b", "d")]
        with pytest.raises(InputError) as excinfo:
            build_sparse_index(passages)
        assert "d::0" in str(excinfo.value)

    def test_title_terms_indexed(self):
        index = build_sparse_index([make_passage("body words", "d", title="Great Title")])
        assert "great" in index.postings
        assert index.doc_lengths == [4]

    def test_document_frequencies_match_exhaustive_count(self):
        passages = [
            make_passage("apple banana apple", "d1"),
            make_passage("banana cherry", "d2"),
            make_passage("cherry cherry date", "d3"),
        ]
        index = build_sparse_index(passages)
        # oracle: brute-force term counting over the fixture
        expected_df = Counter()
        for p in passages:
            for term in set(analyze(p.title + " " + p.text)):
                expected_df[term] += 1
        for term, df in expected_df.items():
            assert index.postings[term].document_frequency == df


class TestScore:
    def test_hand_evaluated_single_doc(self):
        # oracle: hand evaluation of the stated formula
        # corpus "a b a": N=1, df(a)=1, tf=2, dl=3, avgdl=3, k1=0.9, b=0.4
        # idf = ln(1 + 0.5/1.5); score = idf * (2*1.9)/(2 + 0.9*1)
        index = build_sparse_index([make_passage("a b a", "d")], BM25Params(k1=0.9, b=0.4))
        expected = math.log(4.0 / 3.0) * (3.8 / 2.9)
        assert index.score(["a"], 0) == pytest.approx(expected, abs=1e-12)

    def test_absent_term_contributes_zero(self):
        index = build_sparse_index([make_passage("a b a", "d")])
        assert index.score(["zzz"], 0) == 0.0

    def test_duplicate_query_terms_count_per_occurrence(self):
        index = build_sparse_index([make_passage("a b a", "d")])
        assert index.score(["a", "a"], 0) == pytest.approx(2 * index.score(["a"], 0))

    def test_identical_passages_score_equally(self):
        index = build_sparse_index(
            [make_passage("x y z", "d1"), make_passage("x y z", "d2")]
        )
        assert index.score(["x", "y"], 0) == index.score(["x", "y"], 1)

    def test_scores_nonnegative(self):
        rng = random.Random(7)
        passages = [
            make_passage(" ".join(rng.choice("abcdef") for _ in range(10)), f"d{i}")
            for i in range(30)
        ]
        index = build_sparse_index(passages)
        for ordinal in range(30):
            assert index.score(["a", "b", "zzz"], ordinal) >= 0.0

    @given(
        tf=st.integers(1, 50),
        k1=st.fractions(0, 3),
        norm=st.fractions(0, 5),
    )
    def test_monotone_in_tf_at_fixed_length_norm(self, tf, k1, norm):
        # exact rational arithmetic; float evaluation can dip by one ulp
        def contribution(f):
            return f * (k1 + 1) / (f + norm) if f else 0

        assert contribution(tf + 1) >= contribution(tf)


class TestSearch:
    def test_self_query_single_passage(self):
        index = build_sparse_index([make_passage("only one passage here", "d")])
        results = search_sparse(index, "only one passage here", 3)
        assert len(results) == 1
        assert results[0].passage_id == "d::0"
        assert results[0].rank == 1

    def test_unmatched_query_returns_empty(self):
        index = build_sparse_index([make_passage("a b c", "d")])
        assert search_sparse(index, "zzz", 10) == []

    def test_empty_query_returns_empty(self):
        index = build_sparse_index([make_passage("a b c", "d")])
        assert search_sparse(index, "!!!", 10) == []

    def test_ties_break_by_passage_id(self):
        index = build_sparse_index(
            [make_passage("x y", "b"), make_passage("x y", "a")]
        )
        results = search_sparse(index, "x", 2)
        assert [r.passage_id for r in results] == ["a::0", "b::0"]

    def test_k_must_be_positive(self):
        index = build_sparse_index([make_passage("a", "d")])
        with pytest.raises(ValueError):
            search_sparse(index, "a", 0)

    def test_matches_brute_force_on_random_fixture(self):
        rng = random.Random(20)
        vocab = [f"w{i}" for i in range(15)]
        passages = [
            make_passage(" ".join(rng.choice(vocab) for _ in range(rng.randint(3, 12))), f"p{i:03d}")
            for i in range(20)
        ]
        index = build_sparse_index(passages)
        query = "w1 w2 w3"
        expected = brute_force_bm25(passages, query)[:5]
        results = search_sparse(index, query, 5)
        assert [r.passage_id for r in results] == [pid for pid, _ in expected]
        for r, (_, score) in zip(results, expected):
            assert r.score == pytest.approx(score, abs=1e-9)

    def test_determinism(self):
        rng = random.Random(3)
        passages = [
            make_passage(" ".join(rng.choice("pqrs") for _ in range(8)), f"d{i}")
            for i in range(25)
        ]
        index = build_sparse_index(passages)
        first = search_sparse(index, "p q", 10)
        second = search_sparse(index, "p q", 10)
        assert first == second


class TestPersistence:
    def test_round_trip_preserves_search(self, tmp_path):
        rng = random.Random(11)
        vocab = [f"t{i}" for i in range(20)]
        passages = [
            make_passage(
                " ".join(rng.choice(vocab) for _ in range(rng.randint(2, 15))),
                f"d{i}",
                title=rng.choice(["", "Some Title"]),
            )
            for i in range(40)
        ]
        index = build_sparse_index(passages, BM25Params(k1=1.2, b=0.75))
        save_sparse_index(index, tmp_path / "idx")
        loaded = load_sparse_index(tmp_path / "idx")
        assert loaded.params == index.params
        assert loaded.avgdl == index.avgdl
        assert loaded.passage_ids == index.passage_ids
        for query in ["t1 t2", "t19", "t5 t5 t7"]:
            assert search_sparse(loaded, query, 10) == search_sparse(index, query, 10)

    def test_version_gate(self, tmp_path):
        index = build_sparse_index([make_passage("a", "d")])
        save_sparse_index(index, tmp_path / "idx")
        meta = (tmp_path / "idx" / "meta.json").read_text()
        (tmp_path / "idx" / "meta.json").write_text(meta.replace('"format_version": 1', '"format_version": 99'))
        with pytest.raises(SchemaError):
            load_sparse_index(tmp_path / "idx")


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_oracle_equivalence_property(data):
    """search must equal sort-all-by-score with the same tie-break, for all k."""
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    vocab = [f"v{i}" for i in range(8)]
    n = data.draw(st.integers(1, 60))
    passages = [
        make_passage(" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 10))), f"p{i:03d}")
        for i in range(n)
    ]
    index = build_sparse_index(passages)
    query = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 4)))
    expected = brute_force_bm25(passages, query)
    for k in (1, 5, 20, 100):
        results = search_sparse(index, query, k)
        want = expected[:k]
        assert [r.passage_id for r in results] == [pid for pid, _ in want]
        for r, (_, score) in zip(results, want):
            assert abs(r.score - score) < 1e-9
