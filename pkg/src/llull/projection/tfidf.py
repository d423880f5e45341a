"""TF-IDF vectorizer over the shared tokenizer.

Weights are raw term frequency times smoothed inverse document frequency,
idf(t) = ln((1 + N) / (1 + df(t))) + 1, with L2-normalized rows. Kept
dependency-light and estimator-shaped (fit/transform/get_params) so it can
slot into pipeline code that expects that API.
"""

import numpy as np

from .._text import tokenize


def _check_texts(docs) -> list[str]:
    docs = list(docs)
    if any(not isinstance(d, str) for d in docs):
        raise ValueError("documents must be strings")
    return docs


class TfidfVectorizer:
    """Learn a vocabulary + idf vector on fit; emit dense L2-normalized rows."""

    def __init__(self, tokenizer=tokenize):
        self.tokenizer = tokenizer

    def get_params(self, deep: bool = True) -> dict:
        return {"tokenizer": self.tokenizer}

    def set_params(self, **params) -> "TfidfVectorizer":
        for key, value in params.items():
            if not hasattr(self, key):
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, docs) -> "TfidfVectorizer":
        docs = _check_texts(docs)
        if len(docs) < 2:
            raise ValueError("need at least 2 documents")
        token_lists = [self.tokenizer(d) for d in docs]
        if all(not toks for toks in token_lists):
            raise ValueError("all documents are empty after tokenization")
        terms = sorted({t for toks in token_lists for t in toks})
        self.vocabulary_ = {t: i for i, t in enumerate(terms)}
        df = np.zeros(len(terms))
        for toks in token_lists:
            for t in set(toks):
                df[self.vocabulary_[t]] += 1
        n = len(docs)
        self.idf_ = np.log((1.0 + n) / (1.0 + df)) + 1.0
        return self

    def transform(self, docs) -> np.ndarray:
        if not hasattr(self, "vocabulary_"):
            raise ValueError("vectorizer is not fitted")
        docs = _check_texts(docs)
        X = np.zeros((len(docs), len(self.vocabulary_)))
        for row, doc in enumerate(docs):
            for t in self.tokenizer(doc):
                col = self.vocabulary_.get(t)
                if col is not None:
                    X[row, col] += 1.0
        X *= self.idf_
        norms = np.sqrt((X * X).sum(axis=1))
        nonzero = norms > 0
        X[nonzero] /= norms[nonzero, None]
        return X

    def fit_transform(self, docs) -> np.ndarray:
        return self.fit(docs).transform(docs)
