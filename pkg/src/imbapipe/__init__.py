"""imbapipe: end-to-end imbalanced binary classification pipelines.

The package covers the full workflow: dataset loading and normalization,
class-balance resampling, a from-scratch model zoo, cross-validated model
and feature selection, rank-based pipeline comparison, permutation
importance, and a small HTTP service for serving a trained pipeline.
"""

__version__ = "0.1.0"
