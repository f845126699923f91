"""Segment categorization: oversampling, attribute selection, classifiers, evaluation."""

from .metrics import ClassMetrics, Metrics, auc, compute_metrics, mean_auc
from .models import ALGORITHMS, Classifier, ModelError, predict_proba, train
from .selection import (discretize, info_gain, info_gain_rank, knn_cv_auc, stratified_folds,
                        wrapper_select)
from .smote import SmoteError, smote
from .validation import CVResult, PipelineSpec, cross_validate, fit_pipeline, fit_preprocessing

__all__ = [
    "ALGORITHMS", "CVResult", "ClassMetrics", "Classifier", "Metrics", "ModelError",
    "PipelineSpec", "SmoteError", "auc", "compute_metrics", "cross_validate", "discretize",
    "fit_pipeline", "fit_preprocessing", "info_gain", "info_gain_rank", "knn_cv_auc",
    "mean_auc", "predict_proba", "smote", "stratified_folds", "train", "wrapper_select",
]
