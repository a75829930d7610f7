"""Speaker partisanship classifier: L2 logistic regression from scratch.

Features are per-speaker narrative counts; the label is the speaker's
party (D or R, with R encoded as 1 so positive weights lean Republican,
matching the log-odds convention).  Training is plain batch gradient
descent with a backtracking line search, so the penalized loss never
increases.  The L2 strength is chosen by stratified k-fold
cross-validation on a stratified 75/25 train/test split.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

POSITIVE_CLASS = "R"
NEGATIVE_CLASS = "D"

DEFAULT_LAMBDA_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
DEFAULT_TEST_FRAC = 0.25
DEFAULT_FOLDS = 5
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 5000

_ARMIJO_C = 1e-4
_MAX_BACKTRACKS = 60


# ---------------------------------------------------------------------------
# loss / gradient / optimizer
# ---------------------------------------------------------------------------


def nll_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    """Penalized negative log-likelihood; the intercept is not penalized."""
    s = X @ w + b
    data = float(np.sum(np.logaddexp(0.0, s) - y * s))
    return data + 0.5 * lam * float(w @ w)


def nll_grad(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float
) -> tuple[np.ndarray, float]:
    s = X @ w + b
    p = _sigmoid(s)
    resid = p - y
    return X.T @ resid + lam * w, float(resid.sum())


def _sigmoid(s: np.ndarray) -> np.ndarray:
    out = np.empty_like(s, dtype=np.float64)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def fit_logreg(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, float, list[float], bool]:
    """Minimize the penalized NLL by gradient descent with backtracking.

    Starts from zero weights.  Each step moves along the negative gradient
    with the largest halved step satisfying the Armijo condition, so the
    recorded loss history is non-increasing.  Stops when the gradient's
    L2 norm (weights and intercept jointly) is at most ``tol``.  Returns
    ``(weights, bias, loss_history, converged)``.
    """
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    w = np.zeros(X.shape[1])
    b = 0.0
    loss = nll_loss(w, b, X, y, lam)
    history = [loss]
    converged = False
    step = 1.0
    for _ in range(max_iter):
        gw, gb = nll_grad(w, b, X, y, lam)
        gnorm2 = float(gw @ gw) + gb * gb
        if math.sqrt(gnorm2) <= tol:
            converged = True
            break
        t = step * 2.0
        accepted = False
        for _bt in range(_MAX_BACKTRACKS):
            w_new = w - t * gw
            b_new = b - t * gb
            loss_new = nll_loss(w_new, b_new, X, y, lam)
            if loss_new <= loss - _ARMIJO_C * t * gnorm2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if loss_new < loss:
                accepted = True
            else:
                break  # no descent possible at float precision
        w, b, loss = w_new, b_new, loss_new
        step = t
        history.append(loss)
    return w, b, history, converged


# ---------------------------------------------------------------------------
# data plumbing
# ---------------------------------------------------------------------------


def feature_matrix(
    features: Mapping[str, Mapping[str, float]],
    speakers: Sequence[str],
    feature_names: Sequence[str],
) -> np.ndarray:
    index = {name: i for i, name in enumerate(feature_names)}
    X = np.zeros((len(speakers), len(feature_names)))
    for row, speaker in enumerate(speakers):
        for name, value in features.get(speaker, {}).items():
            col = index.get(name)
            if col is not None:
                X[row, col] = float(value)
    return X


def encode_labels(labels: Mapping[str, str], speakers: Sequence[str]) -> np.ndarray:
    y = np.empty(len(speakers))
    for i, speaker in enumerate(speakers):
        label = labels[speaker]
        if label == POSITIVE_CLASS:
            y[i] = 1.0
        elif label == NEGATIVE_CLASS:
            y[i] = 0.0
        else:
            raise ValueError(
                f"speaker {speaker!r} has label {label!r}; expected "
                f"{NEGATIVE_CLASS!r} or {POSITIVE_CLASS!r}"
            )
    return y


def stratified_split(
    speakers: Sequence[str],
    labels: Mapping[str, str],
    test_frac: float,
    rng: np.random.Generator,
) -> tuple[list[str], list[str]]:
    """Seeded stratified split; every class keeps at least one speaker on
    each side."""
    train: list[str] = []
    test: list[str] = []
    for cls in (NEGATIVE_CLASS, POSITIVE_CLASS):
        members = sorted(s for s in speakers if labels[s] == cls)
        if len(members) < 2:
            raise ValueError(f"class {cls!r} needs at least 2 speakers, has {len(members)}")
        perm = rng.permutation(len(members))
        n_test = int(round(test_frac * len(members)))
        n_test = min(max(n_test, 1), len(members) - 1)
        test_idx = {int(i) for i in perm[:n_test]}
        for idx, speaker in enumerate(members):
            (test if idx in test_idx else train).append(speaker)
    return sorted(train), sorted(test)


def stratified_folds(
    speakers: Sequence[str],
    labels: Mapping[str, str],
    n_folds: int,
    rng: np.random.Generator,
) -> list[list[str]]:
    """Seeded stratified folds: shuffle each class, deal round-robin."""
    folds: list[list[str]] = [[] for _ in range(n_folds)]
    for cls in (NEGATIVE_CLASS, POSITIVE_CLASS):
        members = sorted(s for s in speakers if labels[s] == cls)
        if len(members) < n_folds:
            raise ValueError(
                f"class {cls!r} has {len(members)} training speakers; "
                f"needs at least {n_folds} for {n_folds}-fold validation"
            )
        perm = rng.permutation(len(members))
        for i, p in enumerate(perm):
            folds[i % n_folds].append(members[int(p)])
    return [sorted(f) for f in folds]


# ---------------------------------------------------------------------------
# the full training procedure
# ---------------------------------------------------------------------------


@dataclass
class LogisticModel:
    """A fitted linear scorer: sigmoid(x . w + b) is P(positive class)."""

    feature_names: list[str]
    weights: np.ndarray
    bias: float

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(X @ self.weights + self.bias)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.float64)


@dataclass
class ClassifierResult:
    """A fitted partisanship classifier with its selection diagnostics."""

    model: LogisticModel
    best_lambda: float
    cv_mean_accuracy: dict[float, float]
    fold_accuracies: list[float]
    test_accuracy: float
    train_speakers: list[str]
    test_speakers: list[str]
    converged: bool
    n_iterations: int
    loss_history: list[float] = field(default_factory=list)


def _accuracy(model: LogisticModel, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(model.predict(X) == y))


def fit_partisanship_classifier(
    features: Mapping[str, Mapping[str, float]],
    labels: Mapping[str, str],
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    seed: int = 13,
    test_frac: float = DEFAULT_TEST_FRAC,
    n_folds: int = DEFAULT_FOLDS,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClassifierResult:
    """Select the L2 strength by cross-validation, fit, and evaluate.

    Speakers are split 75/25 stratified by party; the grid is scored by
    mean fold accuracy on the training side (ties prefer the smaller
    lambda); the winning model is refit on all training speakers and
    scored once on the held-out test side.
    """
    if not lambda_grid:
        raise ValueError("lambda_grid must not be empty")
    speakers = sorted(labels)
    if not speakers:
        raise ValueError("no labeled speakers")
    feature_names = sorted({name for sp in speakers for name in features.get(sp, {})})
    if not feature_names:
        raise ValueError("no features for any labeled speaker")

    rng = np.random.default_rng(seed)
    train, test = stratified_split(speakers, labels, test_frac, rng)
    folds = stratified_folds(train, labels, n_folds, rng)

    def fit_on(names: Sequence[str], lam: float) -> LogisticModel:
        X = feature_matrix(features, names, feature_names)
        y = encode_labels(labels, names)
        w, b, _hist, _conv = fit_logreg(X, y, lam, tol=tol, max_iter=max_iter)
        return LogisticModel(feature_names=list(feature_names), weights=w, bias=b)

    cv_mean: dict[float, float] = {}
    cv_folds: dict[float, list[float]] = {}
    for lam in lambda_grid:
        accs = []
        for held in range(n_folds):
            fit_names = [s for i, f in enumerate(folds) if i != held for s in f]
            val_names = folds[held]
            model = fit_on(sorted(fit_names), lam)
            X_val = feature_matrix(features, val_names, feature_names)
            y_val = encode_labels(labels, val_names)
            accs.append(_accuracy(model, X_val, y_val))
        cv_folds[lam] = accs
        cv_mean[lam] = sum(accs) / len(accs)

    best_lambda = min(cv_mean, key=lambda lam: (-cv_mean[lam], lam))

    X_train = feature_matrix(features, train, feature_names)
    y_train = encode_labels(labels, train)
    w, b, history, converged = fit_logreg(X_train, y_train, best_lambda, tol=tol, max_iter=max_iter)
    model = LogisticModel(feature_names=list(feature_names), weights=w, bias=b)
    X_test = feature_matrix(features, test, feature_names)
    y_test = encode_labels(labels, test)

    return ClassifierResult(
        model=model,
        best_lambda=best_lambda,
        cv_mean_accuracy=cv_mean,
        fold_accuracies=cv_folds[best_lambda],
        test_accuracy=_accuracy(model, X_test, y_test),
        train_speakers=list(train),
        test_speakers=list(test),
        converged=converged,
        n_iterations=len(history) - 1,
        loss_history=history,
    )


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def save_classifier(path: str, result: ClassifierResult) -> None:
    obj = {
        "version": 1,
        "positive_class": POSITIVE_CLASS,
        "negative_class": NEGATIVE_CLASS,
        "feature_names": result.model.feature_names,
        "weights": [float(x) for x in result.model.weights],
        "bias": result.model.bias,
        "best_lambda": result.best_lambda,
        "cv_mean_accuracy": {str(k): v for k, v in result.cv_mean_accuracy.items()},
        "fold_accuracies": result.fold_accuracies,
        "test_accuracy": result.test_accuracy,
        "n_train": len(result.train_speakers),
        "n_test": len(result.test_speakers),
        "converged": result.converged,
        "n_iterations": result.n_iterations,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path: str) -> LogisticModel:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("version") != 1:
        raise ValueError(f"{path}: unsupported classifier version {obj.get('version')!r}")
    return LogisticModel(
        feature_names=list(obj["feature_names"]),
        weights=np.array(obj["weights"], dtype=np.float64),
        bias=float(obj["bias"]),
    )
