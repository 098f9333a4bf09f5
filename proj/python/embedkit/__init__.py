"""Corpus cleaning, statistics, word-embedding training and evaluation."""

from ._embedkit import (  # noqa: F401
    DataError,
    DivergenceError,
    Embedding,
    char_ngrams,
    clean_files,
    clean_text,
    cosine,
    letter_frequencies,
    load_vectors,
    neighbors,
    project_words,
    save_vectors,
    spearman,
    stopword_candidates,
    train,
    word_frequencies,
    wordsim,
    zipf_fit,
)

__all__ = [
    "DataError",
    "DivergenceError",
    "Embedding",
    "char_ngrams",
    "clean_files",
    "clean_text",
    "cosine",
    "letter_frequencies",
    "load_vectors",
    "neighbors",
    "project_words",
    "save_vectors",
    "spearman",
    "stopword_candidates",
    "train",
    "word_frequencies",
    "wordsim",
    "zipf_fit",
]
