import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphsumm.corpus import (
    Cluster,
    CorpusFormatError,
    build_tfidf,
    cluster_from_texts,
    corpus_vocabulary,
    cosine,
    load_corpus,
    split_sentences,
    tfidf_vector,
    tokenize,
    word_count,
)


class TestTokenize:
    def test_basic_sentence(self):
        assert tokenize("The cat sat.") == ["the", "cat", "sat", "."]

    def test_empty(self):
        assert tokenize("") == []

    def test_punctuation_split_off(self):
        assert tokenize('He said: "go!"') == ["he", "said", ":", '"', "go", "!", '"']

    def test_internal_apostrophe_kept(self):
        assert tokenize("don't stop") == ["don't", "stop"]

    def test_case_preserving_mode(self):
        assert tokenize("Barack Obama spoke", lowercase=False) == [
            "Barack",
            "Obama",
            "spoke",
        ]

    @given(
        st.lists(
            st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=8),
            min_size=1,
            max_size=10,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_idempotent_on_alphanumeric_tokens(self, tokens):
        assert tokenize(" ".join(tokens)) == tokens


def test_word_count_excludes_standalone_punctuation():
    assert word_count(["the", "cat", "sat", "."]) == 3
    assert word_count([".", "!", "?"]) == 0
    assert word_count(["it's", "1990s"]) == 2


def test_split_sentences_fallback():
    assert split_sentences("One here. Two there! Three?") == [
        "One here.",
        "Two there!",
        "Three?",
    ]


class TestClusterLoading:
    def test_well_formed_single_cluster(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        record = {
            "id": "c1",
            "documents": [["A cat sat.", "A dog ran."], ["Birds fly south."]],
            "references": ["Animals move."],
        }
        path.write_text(json.dumps(record) + "\n")
        clusters = load_corpus(path)
        assert len(clusters) == 1
        assert clusters[0].n_sentences == 3
        assert [s.index for s in clusters[0].sentences] == [0, 1, 2]
        assert clusters[0].references == [["animals", "move", "."]]

    def test_zero_sentence_document_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        record = {"id": "bad", "documents": [["One sentence."], []]}
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(CorpusFormatError, match="document 1"):
            load_corpus(path)

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "ok", "documents": [["Hi there."]]}\n{broken\n')
        with pytest.raises(CorpusFormatError, match="line 2"):
            load_corpus(path)

    def test_fixture_two_docs_two_sentences_gives_four_nodes(self, data_dir):
        clusters = load_corpus(data_dir / "fixture_corpus.jsonl")
        fixture = next(c for c in clusters if c.cluster_id == "fixture-2x2")
        assert len(fixture.documents) == 2
        assert all(len(doc) == 2 for doc in fixture.documents)
        assert fixture.n_sentences == 4
        assert fixture.document_boundaries() == [(0, 2), (2, 4)]

    def test_blank_sentence_rejected(self):
        with pytest.raises(CorpusFormatError, match="tokenizes to nothing"):
            cluster_from_texts("c", [["   "]])


def dense_tfidf_matrix(sentences):
    """Brute-force dense tf-idf over the full vocabulary (the oracle)."""
    vocab = sorted({t for s in sentences for t in s})
    n = len(sentences)
    df = {t: sum(1 for s in sentences if t in s) for t in vocab}
    idf = {t: math.log(n / df[t]) for t in vocab}
    mat = np.zeros((n, len(vocab)))
    for i, s in enumerate(sentences):
        for t in s:
            mat[i, vocab.index(t)] += idf[t]
    return vocab, mat


class TestTfIdf:
    toy = [
        ["the", "cat", "sat"],
        ["the", "cat", "ran"],
        ["dogs", "ran", "fast"],
    ]

    def test_single_term_sentence(self):
        model = build_tfidf([["cat"], ["dog"]])
        vec = tfidf_vector(["cat"], model)
        assert vec == {"cat": pytest.approx(math.log(2))}

    def test_identical_sentences_identical_vectors(self):
        model = build_tfidf(self.toy)
        assert tfidf_vector(self.toy[0], model) == tfidf_vector(list(self.toy[0]), model)

    def test_hand_computed_weights(self):
        model = build_tfidf(self.toy)
        vec = tfidf_vector(self.toy[0], model)
        assert vec["the"] == pytest.approx(math.log(3 / 2))
        assert vec["cat"] == pytest.approx(math.log(3 / 2))
        assert vec["sat"] == pytest.approx(math.log(3))

    def test_out_of_vocabulary_dropped(self):
        model = build_tfidf(self.toy)
        assert "zebra" not in tfidf_vector(["zebra", "cat"], model)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(11)
        words = [f"w{i}" for i in range(50)]
        for _ in range(20):
            sentences = [
                [words[j] for j in rng.integers(0, 50, size=rng.integers(1, 12))]
                for _ in range(rng.integers(2, 8))
            ]
            model = build_tfidf(sentences)
            vocab, dense = dense_tfidf_matrix(sentences)
            for i, s in enumerate(sentences):
                sparse = tfidf_vector(s, model)
                rebuilt = np.zeros(len(vocab))
                for t, w in sparse.items():
                    rebuilt[vocab.index(t)] = w
                np.testing.assert_allclose(rebuilt, dense[i], atol=1e-12)

    def test_cosine_matches_dense_oracle(self):
        rng = np.random.default_rng(12)
        words = [f"w{i}" for i in range(30)]
        sentences = [
            [words[j] for j in rng.integers(0, 30, size=10)] for _ in range(6)
        ]
        model = build_tfidf(sentences)
        vocab, dense = dense_tfidf_matrix(sentences)
        for i in range(6):
            for j in range(6):
                u = tfidf_vector(sentences[i], model)
                v = tfidf_vector(sentences[j], model)
                du, dv = dense[i], dense[j]
                denom = np.linalg.norm(du) * np.linalg.norm(dv)
                expected = float(du @ dv / denom) if denom else 0.0
                assert cosine(u, v) == pytest.approx(expected, abs=1e-12)


class TestCosine:
    def test_self_similarity(self):
        u = {"a": 1.0, "b": 2.0}
        assert cosine(u, u) == pytest.approx(1.0)

    def test_disjoint_supports(self):
        assert cosine({"a": 1.0}, {"b": 1.0}) == 0.0

    def test_hand_value(self):
        assert cosine({"a": 1.0}, {"a": 1.0, "b": 1.0}) == pytest.approx(1 / math.sqrt(2))

    def test_empty_is_zero(self):
        assert cosine({}, {"a": 1.0}) == 0.0


def test_corpus_vocabulary_sorted_union():
    cluster = cluster_from_texts("c", [["b a", "c b"]], references=["d"])
    assert corpus_vocabulary([cluster]) == ["a", "b", "c", "d"]


def test_cluster_validation_requires_documents():
    with pytest.raises(CorpusFormatError):
        Cluster(cluster_id="x", documents=[])
