"""Mining gameplay videos for issue reports.

Subtitle-driven segmentation, keyword filtering, segment categorization,
context and issue clustering, plus the evaluation machinery (MoJoFM, AUC,
agreement and rank statistics) used to validate each step.
"""

__version__ = "0.1.0"
