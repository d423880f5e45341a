"""Shared text normalization.

Every string comparison in the pipeline (element dedup, Jaccard, distinct-1,
BLEU) goes through this single tokenizer so the metrics stay mutually
consistent.
"""

import re
import unicodedata

_PUNCT = re.compile(r"[^\w\s]|_")


def normalize(surface: str) -> str:
    """Canonical token string: NFKC, lower-case, punctuation to single spaces.

    "Self-Attention" -> "self attention", "Mixture-of-Experts" -> "mixture of experts".
    """
    text = unicodedata.normalize("NFKC", surface).lower()
    text = _PUNCT.sub(" ", text)
    return " ".join(text.split())


def tokenize(text: str) -> list[str]:
    """Normalized token list; empty input yields an empty list."""
    return normalize(text).split()
