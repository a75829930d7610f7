"""Statistical analyses over counted narratives."""

from . import classify, logodds, pmi, sentiment, sgns  # noqa: F401
