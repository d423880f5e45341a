"""Idea-batch evaluation: distinct-1 diversity, pairwise-BLEU relevance,
and top-K Jaccard similarity against a reference title set.

All metrics run on the shared tokenizer so they are mutually consistent and
bitwise reproducible. BLEU is sentence-level with orders 1..4,
epsilon-smoothed precisions, and a brevity penalty; unsmoothed BLEU-4
collapses to zero on short titles, which is why the epsilon floor exists.
"""

import math
from collections import Counter
from dataclasses import dataclass

from ._text import tokenize

__all__ = ["tokenize", "distinct1", "bleu", "relevance", "jaccard",
           "similarity_topk", "report", "MetricsReport", "report_to_csv",
           "format_table"]

BLEU_MAX_ORDER = 4
BLEU_EPSILON = 0.1


@dataclass
class MetricsReport:
    label: str
    idea_count: int
    word_count: int
    diversity: float
    similarity: float
    relevance: float
    reference_label: str


def distinct1(titles: list[str]) -> float:
    """Distinct unigrams over total tokens across the whole batch."""
    tokens: list[str] = []
    for t in titles:
        tokens.extend(tokenize(t))
    if not tokens:
        raise ValueError("no tokens in any title")
    return len(set(tokens)) / len(tokens)


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: list[str], reference: list[str],
         max_order: int = BLEU_MAX_ORDER, epsilon: float = BLEU_EPSILON) -> float:
    """Sentence-level BLEU over token lists.

    For each order n with at least one candidate n-gram: p_n = clipped
    matches / total, floored at epsilon / total when there are no matches.
    Score = BP * exp(mean of log p_n over available orders), with
    BP = min(1, exp(1 - len(reference)/len(candidate))).
    """
    if not candidate:
        raise ValueError("candidate must be nonempty")
    log_sum = 0.0
    orders = 0
    for n in range(1, max_order + 1):
        total = len(candidate) - n + 1
        if total <= 0:
            continue
        cand = _ngram_counts(candidate, n)
        ref = _ngram_counts(reference, n)
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        p = matches / total if matches > 0 else epsilon / total
        log_sum += math.log(p)
        orders += 1
    geo = math.exp(log_sum / orders)
    if len(candidate) >= len(reference):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(reference) / len(candidate))
    return bp * geo


def relevance(ideas: list[str], references: list[str]) -> float:
    """Mean BLEU over the full ideas x references cross product."""
    if not ideas or not references:
        raise ValueError("both title lists must be nonempty")
    idea_tokens = [tokenize(t) for t in ideas]
    ref_tokens = [tokenize(t) for t in references]
    total = 0.0
    for cand in idea_tokens:
        for ref in ref_tokens:
            total += bleu(cand, ref)
    return total / (len(ideas) * len(references))


def jaccard(a: list[str], b: list[str]) -> float:
    """Token-set Jaccard; an error when both sets are empty."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        raise ValueError("both token sets are empty")
    return len(sa & sb) / len(sa | sb)


def similarity_topk(ideas: list[str], references: list[str],
                    aggregate: str = "max") -> float:
    """Mean of the K highest per-reference similarities, K = len(ideas).

    Each reference scores its best (default) or mean Jaccard against the
    generated ideas; the top K reference scores are averaged.
    """
    if not ideas:
        raise ValueError("ideas must be nonempty")
    if len(references) < len(ideas):
        raise ValueError(f"need at least {len(ideas)} references, got {len(references)}")
    if aggregate not in ("max", "mean"):
        raise ValueError("aggregate must be 'max' or 'mean'")
    idea_sets = [set(tokenize(t)) for t in ideas]
    scores = []
    for ref in references:
        ref_set = set(tokenize(ref))
        pair = [(len(ref_set & s) / len(ref_set | s)) if (ref_set | s) else 1.0
                for s in idea_sets]
        scores.append(max(pair) if aggregate == "max" else sum(pair) / len(pair))
    scores.sort(reverse=True)
    k = len(ideas)
    return sum(scores[:k]) / k


def report(ideas: list[str], references: list[str], label: str = "",
           reference_label: str = "", aggregate: str = "max") -> MetricsReport:
    word_count = sum(len(tokenize(t)) for t in ideas)
    return MetricsReport(
        label=label,
        idea_count=len(ideas),
        word_count=word_count,
        diversity=distinct1(ideas),
        similarity=similarity_topk(ideas, references, aggregate=aggregate),
        relevance=relevance(ideas, references),
        reference_label=reference_label,
    )


def report_to_csv(reports: list[MetricsReport]) -> str:
    lines = ["label,n_ideas,n_words,diversity,similarity,relevance,reference"]
    for r in reports:
        lines.append(f"{r.label},{r.idea_count},{r.word_count},"
                     f"{r.diversity:.6f},{r.similarity:.6f},{r.relevance:.6f},"
                     f"{r.reference_label}")
    return "\n".join(lines) + "\n"


def format_table(reports: list[MetricsReport]) -> str:
    header = f"{'label':<24} {'#ideas':>7} {'#words':>7} {'diversity':>10} {'similarity':>11} {'relevance':>10}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(f"{r.label:<24} {r.idea_count:>7} {r.word_count:>7} "
                     f"{r.diversity:>10.4f} {r.similarity:>11.4f} {r.relevance:>10.4f}")
    return "\n".join(lines)
