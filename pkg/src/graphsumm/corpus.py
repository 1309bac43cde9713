"""Corpus ingestion, tokenization and tf-idf sentence vectors.

A corpus file is JSONL with one cluster per line:

    {"id": "c1", "documents": [["First sentence.", "Second."], ...],
     "references": ["A reference summary. ..."]}

Documents arrive pre-split into sentences; ``split_sentences`` exists as
a fallback for raw text. Tokenization lowercases, keeps word-internal
apostrophes and hyphens, and splits every other punctuation character
into its own token. A sentence's word count excludes standalone
punctuation tokens; selection length bounds rely on that rule.

Tf-idf is sentence-level within one cluster: idf(t) = ln(N / df(t))
where df counts the cluster sentences containing t.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

__all__ = [
    "Sentence",
    "Cluster",
    "TfIdfModel",
    "CorpusFormatError",
    "tokenize",
    "split_sentences",
    "word_count",
    "load_corpus",
    "save_corpus",
    "build_tfidf",
    "tfidf_vector",
    "cosine",
    "corpus_vocabulary",
]

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*|[^\sA-Za-z0-9]")
_ALNUM_RE = re.compile(r"[A-Za-z0-9]")
_SENT_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+")


class CorpusFormatError(ValueError):
    """Raised when a corpus file violates the JSONL schema."""


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split text into word and punctuation tokens, lowercased by default."""
    tokens = _TOKEN_RE.findall(text)
    if lowercase:
        tokens = [t.lower() for t in tokens]
    return tokens


def word_count(tokens: list[str]) -> int:
    """Number of tokens containing at least one alphanumeric character."""
    return sum(1 for t in tokens if _ALNUM_RE.search(t))


def split_sentences(text: str) -> list[str]:
    """Fallback raw-text splitter on sentence-final punctuation."""
    parts = [p.strip() for p in _SENT_BOUNDARY_RE.split(text)]
    return [p for p in parts if p]


@dataclass
class Sentence:
    index: int  # cluster-local, contiguous from 0
    doc_index: int
    position: int  # 0-based within its document
    text: str
    tokens: list[str] = field(repr=False)

    @property
    def word_count(self) -> int:
        return word_count(self.tokens)


@dataclass
class Cluster:
    cluster_id: str
    documents: list[list[Sentence]]
    references: list[list[str]] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.documents:
            raise CorpusFormatError(f"cluster {self.cluster_id!r}: no documents")
        expected = 0
        for d, doc in enumerate(self.documents):
            if not doc:
                raise CorpusFormatError(
                    f"cluster {self.cluster_id!r}: document {d} has no sentences"
                )
            for sent in doc:
                if not sent.tokens:
                    raise CorpusFormatError(
                        f"cluster {self.cluster_id!r}: document {d}, sentence "
                        f"{sent.position} tokenizes to nothing"
                    )
                if sent.index != expected:
                    raise CorpusFormatError(
                        f"cluster {self.cluster_id!r}: sentence indices not "
                        f"contiguous at {sent.index} (expected {expected})"
                    )
                expected += 1

    @property
    def sentences(self) -> list[Sentence]:
        return [s for doc in self.documents for s in doc]

    @property
    def n_sentences(self) -> int:
        return sum(len(doc) for doc in self.documents)

    def document_boundaries(self) -> list[tuple[int, int]]:
        """Half-open (start, end) sentence-index ranges, one per document."""
        bounds = []
        start = 0
        for doc in self.documents:
            bounds.append((start, start + len(doc)))
            start += len(doc)
        return bounds


def cluster_from_texts(
    cluster_id: str,
    documents: list[list[str]],
    references: list[str] | None = None,
) -> Cluster:
    """Build a validated Cluster from per-document sentence strings."""
    docs: list[list[Sentence]] = []
    index = 0
    for d, doc in enumerate(documents):
        sentences = []
        for pos, text in enumerate(doc):
            sentences.append(
                Sentence(
                    index=index,
                    doc_index=d,
                    position=pos,
                    text=text,
                    tokens=tokenize(text),
                )
            )
            index += 1
        docs.append(sentences)
    refs = [tokenize(r) for r in (references or [])]
    return Cluster(cluster_id=cluster_id, documents=docs, references=refs)


def load_corpus(path) -> list[Cluster]:
    """Read a JSONL corpus, validating every cluster; ordering is stable."""
    clusters = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: {exc}") from None
            try:
                clusters.append(_cluster_from_payload(payload))
            except (CorpusFormatError, KeyError, TypeError) as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: {exc}") from None
    return clusters


def _cluster_from_payload(payload: dict) -> Cluster:
    if not isinstance(payload, dict):
        raise CorpusFormatError("cluster record must be a JSON object")
    for key in ("id", "documents"):
        if key not in payload:
            raise CorpusFormatError(f"missing key {key!r}")
    documents = payload["documents"]
    if not isinstance(documents, list) or not all(
        isinstance(doc, list) and all(isinstance(s, str) for s in doc)
        for doc in documents
    ):
        raise CorpusFormatError("'documents' must be a list of lists of strings")
    references = payload.get("references", [])
    if not isinstance(references, list) or not all(
        isinstance(r, str) for r in references
    ):
        raise CorpusFormatError("'references' must be a list of strings")
    return cluster_from_texts(str(payload["id"]), documents, references)


def save_corpus(path, clusters: list[Cluster]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for cluster in clusters:
            record = {
                "id": cluster.cluster_id,
                "documents": [[s.text for s in doc] for doc in cluster.documents],
                "references": [" ".join(r) for r in cluster.references],
            }
            fh.write(json.dumps(record) + "\n")


@dataclass
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: dict[str, float]


def build_tfidf(sentences: list[list[str]] | Cluster) -> TfIdfModel:
    """Sentence-level tf-idf model over one cluster's token lists."""
    if isinstance(sentences, Cluster):
        sentences = [s.tokens for s in sentences.sentences]
    n = len(sentences)
    df: dict[str, int] = {}
    for tokens in sentences:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    vocabulary = {term: col for col, term in enumerate(sorted(df))}
    idf = {term: math.log(n / df[term]) for term in df}
    return TfIdfModel(vocabulary=vocabulary, idf=idf)


def tfidf_vector(tokens: list[str], model: TfIdfModel) -> dict[str, float]:
    """tf x idf weights; out-of-vocabulary and zero-idf terms are dropped."""
    counts: dict[str, int] = {}
    for t in tokens:
        if t in model.vocabulary:
            counts[t] = counts.get(t, 0) + 1
    return {
        term: tf * model.idf[term]
        for term, tf in counts.items()
        if model.idf[term] != 0.0
    }


def cosine(u: dict[str, float], v: dict[str, float]) -> float:
    """Cosine similarity of sparse weight maps; 0 when either is zero."""
    if not u or not v:
        return 0.0
    if len(v) < len(u):
        u, v = v, u
    dot = sum(w * v[t] for t, w in u.items() if t in v)
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


def corpus_vocabulary(clusters: list[Cluster]) -> list[str]:
    """Sorted union of all sentence and reference tokens."""
    vocab: set[str] = set()
    for cluster in clusters:
        for sent in cluster.sentences:
            vocab.update(sent.tokens)
        for ref in cluster.references:
            vocab.update(ref)
    return sorted(vocab)
