"""llull: a combinatorial research-ideation engine.

Mines theme/domain/method elements and title templates from paper corpora,
spins them into raw ideas, rewrites the ideas into candidate titles through
a record/replay model gateway, and evaluates idea batches with diversity,
relevance, similarity, projection, and coverage analyses.
"""

__version__ = "0.1.0"

from ._text import normalize, tokenize  # noqa: F401
