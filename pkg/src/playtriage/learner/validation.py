"""Stratified cross-validation of a preprocessing + classifier pipeline."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..corpus import Dataset
from .metrics import Metrics, compute_metrics
from .models import Classifier, train
from .selection import info_gain_rank, stratified_folds, wrapper_select
from .smote import smote

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineSpec:
    algorithm: str = "random_forest"
    smote: bool = False
    attr_select: bool = False
    smote_k: int = 5
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        pre = {(False, False): "none", (True, False): "smote", (False, True): "attr_select",
               (True, True): "smote+attr_select"}[(self.smote, self.attr_select)]
        return f"{self.algorithm}/{pre}"


def _sub_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


@dataclass
class FoldPreprocessing:
    features: list[str]
    training: Dataset


def fit_preprocessing(train_data: Dataset, pipeline: PipelineSpec, seed: int) -> FoldPreprocessing:
    """Attribute selection and SMOTE, fitted on ``train_data`` only.

    Selection runs on the original rows; SMOTE then balances the projected
    training set.
    """
    features = list(train_data.feature_names)
    if pipeline.attr_select:
        ranked = info_gain_rank(train_data)
        if ranked:
            features = wrapper_select(train_data, ranked, seed=_sub_seed(seed, 1))
        else:
            log.warning("no feature has positive information gain; keeping all features")
    data = train_data.subset(features=features)
    if pipeline.smote:
        data = smote(data, k=pipeline.smote_k, seed=_sub_seed(seed, 2))
    return FoldPreprocessing(features, data)


def fit_pipeline(data: Dataset, pipeline: PipelineSpec, seed: int = 0) -> Classifier:
    prep = fit_preprocessing(data, pipeline, seed)
    model = train(prep.training, pipeline.algorithm, pipeline.params, seed=_sub_seed(seed, 3))
    model.params = {**model.params, "pipeline": {"smote": pipeline.smote,
                                                 "attr_select": pipeline.attr_select}}
    return model


@dataclass
class CVResult:
    metrics: Metrics
    folds: list[np.ndarray]
    preprocessing: list[FoldPreprocessing]
    proba: np.ndarray
    predicted: list[str]


def cross_validate(data: Dataset, pipeline: Optional[PipelineSpec] = None, folds: int = 10,
                   seed: int = 0, return_details: bool = False):
    """Pooled out-of-fold metrics over stratified folds.

    Folds are reduced (with a warning) when the smallest class has fewer
    members than ``folds``.
    """
    pipeline = pipeline or PipelineSpec()
    if len(data) == 0:
        raise ValueError("cannot cross-validate an empty dataset")
    classes = data.classes
    if len(classes) < 2:
        raise ValueError("cross-validation needs at least two classes")
    smallest = min(data.labels.count(c) for c in classes)
    if smallest < folds:
        new = max(2, smallest)
        log.warning("smallest class has %d members; reducing folds from %d to %d",
                    smallest, folds, new)
        folds = new

    test_sets = stratified_folds(data.labels, folds, seed)
    all_rows = np.arange(len(data))
    proba = np.zeros((len(data), len(classes)))
    preps = []
    for f, test in enumerate(test_sets):
        fold_seed = _sub_seed(seed, 100 + f)
        train_part = data.subset(rows=np.setdiff1d(all_rows, test))
        prep = fit_preprocessing(train_part, pipeline, fold_seed)
        preps.append(prep)
        model = train(prep.training, pipeline.algorithm, pipeline.params,
                      seed=_sub_seed(fold_seed, 3))
        p = model.proba_for(data.subset(rows=test))
        for ci, c in enumerate(model.classes):
            proba[test, classes.index(c)] = p[:, ci]

    predicted = [classes[i] for i in np.argmax(proba, axis=1)]
    metrics = compute_metrics(predicted, data.labels, proba, classes)
    if return_details:
        return CVResult(metrics, test_sets, preps, proba, predicted)
    return metrics
