"""Word-vector table with word2vec text-format loading.

The table covers a fixed vocabulary plus a reserved ``<unk>`` row and is
trainable end to end (rows are fine-tuned during training). Words absent
from the vector file keep a seeded uniform(-0.05, 0.05) row, so out-of-
vocabulary initialization is reproducible under the same seed.
"""

from __future__ import annotations

import numpy as np

from .autodiff import Param

__all__ = ["EmbeddingTable", "EmbeddingFormatError", "load_embeddings", "build_embedding_table"]

UNK_TOKEN = "<unk>"


class EmbeddingFormatError(ValueError):
    """Raised on malformed word2vec text input."""


class EmbeddingTable:
    """Token-to-row mapping over a trainable (|V|+1, dim) matrix."""

    def __init__(self, vocabulary: dict[str, int], param: Param, dim: int):
        self.vocabulary = vocabulary
        self.param = param
        self.dim = dim

    @property
    def matrix(self) -> np.ndarray:
        return self.param.value

    def row_index(self, token: str) -> int:
        return self.vocabulary.get(token, self.vocabulary[UNK_TOKEN])

    def lookup_indices(self, tokens: list[str]) -> list[int]:
        return [self.row_index(t) for t in tokens]

    def __contains__(self, token: str) -> bool:
        return token in self.vocabulary


def build_embedding_table(
    vocab: list[str], dim: int = 300, seed: int = 0
) -> EmbeddingTable:
    """Seeded uniform(-0.05, 0.05) table over vocab plus the unk row."""
    words = [UNK_TOKEN] + [w for w in vocab if w != UNK_TOKEN]
    vocabulary = {w: i for i, w in enumerate(words)}
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-0.05, 0.05, size=(len(words), dim))
    return EmbeddingTable(vocabulary, Param("embeddings", matrix), dim)


def load_embeddings(path, vocab: list[str], dim: int = 300, seed: int = 0) -> EmbeddingTable:
    """Build a table for ``vocab``, overwriting rows found in the file.

    The file is word2vec text format: an optional "<count> <dim>" header
    line, then one "<word> <v1> ... <vD>" line per word. Words outside
    ``vocab`` are ignored; in-vocabulary words get the file's vector.
    """
    table = build_embedding_table(vocab, dim=dim, seed=seed)
    wanted = set(table.vocabulary)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p != ""]
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                # header: vocabulary size and declared dimension
                try:
                    declared = int(parts[1])
                except ValueError:
                    raise EmbeddingFormatError(
                        f"{path}: line 1: malformed header {line!r}"
                    ) from None
                if declared != dim:
                    raise EmbeddingFormatError(
                        f"{path}: header dimension {declared} != configured {dim}"
                    )
                continue
            word, values = parts[0], parts[1:]
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"{path}: line {lineno}: expected {dim} values for "
                    f"{word!r}, got {len(values)}"
                )
            if word not in wanted:
                continue
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(
                    f"{path}: line {lineno}: non-numeric value for {word!r}"
                ) from None
            table.matrix[table.vocabulary[word]] = vec
    return table
