"""Multi-view recipe similarity: ingredient overlap, instruction semantics,
and nutrition profiles, fused into one score, with analytics, expert
annotation, and interpretable classifiers on the expert labels."""

__version__ = "0.1.0"
