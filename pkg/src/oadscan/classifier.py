"""Hybrid OADS / non-OADS classifier.

Two layers: heuristic rules first (publisher denylist, ``.pdf`` paths),
then a learned linear model over context-sentence tokens and URI lexical
features.  A heuristic verdict short-circuits; the model never sees those
mentions.

Training is full-batch gradient descent on the regularized logistic loss,
implemented with plain floats and fixed-order accumulation so that the
same data, config, and seed always produce a byte-identical model file.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence
from urllib.parse import urlsplit

from .extraction import UriMention
from .fileio import atomic_write_text
from .scope import host_of, split_port

__all__ = [
    "Label",
    "Provenance",
    "Classification",
    "LabeledExample",
    "FeaturizerConfig",
    "Features",
    "TrainingConfig",
    "TrainedModel",
    "EvalMetrics",
    "TrainingError",
    "LabeledFileError",
    "DEFAULT_DENYLIST",
    "load_denylist",
    "classify_heuristic",
    "featurize",
    "train",
    "predict",
    "score_text",
    "classify_hybrid",
    "evaluate",
    "read_labeled_file",
    "write_labeled_file",
]


class Label(Enum):
    OADS = "OADS"
    NON_OADS = "Non-OADS"


class Provenance(Enum):
    HEURISTIC_PUBLISHER = "heuristic_publisher"
    HEURISTIC_PDF = "heuristic_pdf"
    LEARNED = "learned"


@dataclass(frozen=True)
class Classification:
    label: Label
    provenance: Provenance
    score: float

    def __post_init__(self) -> None:
        if self.provenance is not Provenance.LEARNED:
            assert self.label is Label.NON_OADS and self.score == 0.0


@dataclass(frozen=True)
class LabeledExample:
    context: str
    uri: str
    label: Label


class TrainingError(ValueError):
    """Training input unusable: empty, or only one label present."""


class LabeledFileError(ValueError):
    """A labeled-example record could not be parsed."""


# Publisher hosts removed by the heuristic layer; matching is by host
# suffix, so springer.com also covers link.springer.com.  The shipped set
# holds the named publishers; deployments extend it via a denylist file.
DEFAULT_DENYLIST = frozenset({"springer.com", "wiley.com", "sagepub.com"})


def load_denylist(path: str | Path) -> frozenset[str]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    hosts = data["publisher_hosts"] if isinstance(data, dict) else data
    return frozenset(str(h).lower() for h in hosts)


def _host_or_none(uri: str) -> str | None:
    try:
        host, _ = split_port(host_of(uri))
        return host
    except ValueError:
        return None


def classify_heuristic(
    mention: UriMention, denylist: frozenset[str] = DEFAULT_DENYLIST
) -> Classification | None:
    """Apply the rule layer; None defers the mention to the learned model."""
    host = _host_or_none(mention.uri)
    if host is not None:
        for entry in denylist:
            if host == entry or host.endswith("." + entry):
                return Classification(Label.NON_OADS, Provenance.HEURISTIC_PUBLISHER, 0.0)
    path = _path_of(mention.uri)
    if path.lower().endswith(".pdf"):
        return Classification(Label.NON_OADS, Provenance.HEURISTIC_PDF, 0.0)
    return None


def _path_of(uri: str) -> str:
    # Path only, before query/fragment.
    try:
        return urlsplit(uri).path
    except ValueError:
        return ""


# --- featurizer ----------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9_]+")
_URI_PLACEHOLDER = " _url_ "


@dataclass(frozen=True)
class FeaturizerConfig:
    """Feature extraction settings, echoed into the model file."""

    path_keywords: tuple[str, ...] = ("code", "data", "dataset", "software", "download")
    host_feature_prefix: str = "host:"
    tld_feature_prefix: str = "tld:"

    @property
    def fixed_feature_names(self) -> tuple[str, ...]:
        return tuple(f"path_kw:{k}" for k in self.path_keywords) + ("scheme:https",)


@dataclass(frozen=True)
class Features:
    """Sparse feature vector: token counts plus fixed URI-feature slots."""

    tokens: tuple[tuple[str, float], ...]
    fixed: tuple[float, ...]


def featurize(context: str, uri: str, config: FeaturizerConfig = FeaturizerConfig()) -> Features:
    """Bag-of-words over the context (URI masked) plus URI lexical features.

    Deterministic: tokens are reported in sorted order with raw counts.
    """
    masked = context
    if uri:
        masked = masked.replace(uri, _URI_PLACEHOLDER)
        head, sep, tail = uri.partition("://")
        if sep:
            masked = masked.replace(tail, _URI_PLACEHOLDER)
    counts: Counter[str] = Counter(_TOKEN_RE.findall(masked.lower()))

    host = _host_or_none(uri)
    if host is not None:
        counts[config.host_feature_prefix + host] += 1
        label = host.rsplit(".", 1)[-1]
        if label and label != host:
            counts[config.tld_feature_prefix + label] += 1

    path = _path_of(uri).lower()
    fixed = [1.0 if kw in path else 0.0 for kw in config.path_keywords]
    fixed.append(1.0 if uri.lower().startswith("https://") else 0.0)
    return Features(tuple(sorted(counts.items())), tuple(fixed))


# --- model ---------------------------------------------------------------

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.1
    iterations: int = 500
    l2: float = 1e-3
    threshold: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be non-negative, got {self.l2}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")


@dataclass
class TrainedModel:
    """Linear classifier over vocabulary tokens plus fixed URI features.

    ``weights`` has one slot per vocabulary entry followed by one per
    fixed URI feature.  Immutable by convention once constructed.
    """

    vocabulary: dict[str, int]
    weights: list[float]
    bias: float
    threshold: float
    featurizer: FeaturizerConfig = field(default_factory=FeaturizerConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    format_version: int = MODEL_FORMAT_VERSION

    def to_json(self) -> str:
        payload = {
            "format_version": self.format_version,
            "featurizer": asdict(self.featurizer),
            "training": asdict(self.training),
            "vocabulary": self.vocabulary,
            "weights": self.weights,
            "bias": self.bias,
            "threshold": self.threshold,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def save(self, path: str | Path) -> None:
        atomic_write_text(path, self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        data = json.loads(text)
        feat = FeaturizerConfig(
            path_keywords=tuple(data["featurizer"]["path_keywords"]),
            host_feature_prefix=data["featurizer"]["host_feature_prefix"],
            tld_feature_prefix=data["featurizer"]["tld_feature_prefix"],
        )
        model = cls(
            vocabulary=dict(data["vocabulary"]),
            weights=[float(w) for w in data["weights"]],
            bias=float(data["bias"]),
            threshold=float(data["threshold"]),
            featurizer=feat,
            training=TrainingConfig(**data["training"]),
            format_version=int(data["format_version"]),
        )
        expected = len(model.vocabulary) + len(feat.fixed_feature_names)
        if len(model.weights) != expected:
            raise ValueError(
                f"weight vector length {len(model.weights)} != vocabulary+fixed {expected}"
            )
        return model

    @classmethod
    def load(cls, path: str | Path) -> "TrainedModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _indexed(features: Features, vocabulary: dict[str, int], n_vocab: int) -> list[tuple[int, float]]:
    pairs = []
    for token, value in features.tokens:
        idx = vocabulary.get(token)
        if idx is not None:
            pairs.append((idx, value))
    for k, value in enumerate(features.fixed):
        if value:
            pairs.append((n_vocab + k, value))
    return pairs


def train(
    examples: Sequence[LabeledExample], config: TrainingConfig = TrainingConfig()
) -> TrainedModel:
    """Fit the logistic model by full-batch gradient descent.

    The vocabulary is the sorted set of all tokens seen in the training
    data; accumulation order is fixed, so repeated runs with the same
    inputs yield bit-identical weights.  The seed is recorded in the model
    for provenance (the zero-initialized full-batch fit itself draws no
    randomness).
    """
    examples = list(examples)
    if not examples:
        raise TrainingError("no training examples")
    labels = {ex.label for ex in examples}
    if len(labels) < 2:
        only = next(iter(labels)).value
        raise TrainingError(f"training data contains a single class: {only}")

    feat_config = FeaturizerConfig()
    featurized = [featurize(ex.context, ex.uri, feat_config) for ex in examples]
    vocab_tokens = sorted({tok for f in featurized for tok, _ in f.tokens})
    vocabulary = {tok: i for i, tok in enumerate(vocab_tokens)}
    n_vocab = len(vocabulary)
    n_fixed = len(feat_config.fixed_feature_names)
    n_weights = n_vocab + n_fixed

    rows = [_indexed(f, vocabulary, n_vocab) for f in featurized]
    targets = [1.0 if ex.label is Label.OADS else 0.0 for ex in examples]

    weights = [0.0] * n_weights
    bias = 0.0
    n = float(len(examples))
    for _ in range(config.iterations):
        grad_w = [0.0] * n_weights
        grad_b = 0.0
        for row, y in zip(rows, targets):
            z = bias
            for idx, value in row:
                z += weights[idx] * value
            err = _sigmoid(z) - y
            for idx, value in row:
                grad_w[idx] += err * value
            grad_b += err
        lr = config.learning_rate
        for j in range(n_weights):
            weights[j] -= lr * (grad_w[j] / n + config.l2 * weights[j])
        bias -= lr * (grad_b / n)

    return TrainedModel(
        vocabulary=vocabulary,
        weights=weights,
        bias=bias,
        threshold=config.threshold,
        featurizer=feat_config,
        training=config,
    )


def score_text(model: TrainedModel, context: str, uri: str) -> float:
    """OADS probability for a (context, uri) pair under the model."""
    features = featurize(context, uri, model.featurizer)
    z = model.bias
    for idx, value in _indexed(features, model.vocabulary, len(model.vocabulary)):
        z += model.weights[idx] * value
    return _sigmoid(z)


def predict(model: TrainedModel, mention: UriMention) -> Classification:
    """Learned-model verdict; the decision boundary assigns OADS at >= threshold."""
    score = score_text(model, mention.context, mention.uri)
    label = Label.OADS if score >= model.threshold else Label.NON_OADS
    return Classification(label, Provenance.LEARNED, score)


def classify_hybrid(
    mention: UriMention,
    model: TrainedModel,
    denylist: frozenset[str] = DEFAULT_DENYLIST,
) -> Classification:
    """Heuristic verdict when a rule matches, learned verdict otherwise."""
    verdict = classify_heuristic(mention, denylist)
    if verdict is not None:
        return verdict
    return predict(model, mention)


# --- evaluation ----------------------------------------------------------


@dataclass(frozen=True)
class EvalMetrics:
    """Accuracy, per-label precision/recall/F1, and the confusion counts.

    OADS is the positive class: tp counts OADS examples predicted OADS,
    fn counts OADS predicted Non-OADS, fp counts Non-OADS predicted OADS.
    Ratios with a zero denominator are reported as 0.0.
    """

    accuracy: float
    per_label: dict[str, dict[str, float]]
    confusion: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_label": self.per_label,
            "confusion": self.confusion,
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def evaluate(model: TrainedModel, examples: Sequence[LabeledExample]) -> EvalMetrics:
    if not examples:
        raise ValueError("no examples to evaluate")
    tp = fp = fn = tn = 0
    for ex in examples:
        score = score_text(model, ex.context, ex.uri)
        predicted = Label.OADS if score >= model.threshold else Label.NON_OADS
        if ex.label is Label.OADS:
            if predicted is Label.OADS:
                tp += 1
            else:
                fn += 1
        else:
            if predicted is Label.OADS:
                fp += 1
            else:
                tn += 1
    total = tp + fp + fn + tn
    per_label = {}
    for name, (correct, pred_count, true_count) in {
        Label.OADS.value: (tp, tp + fp, tp + fn),
        Label.NON_OADS.value: (tn, tn + fn, tn + fp),
    }.items():
        precision = _safe_div(correct, pred_count)
        recall = _safe_div(correct, true_count)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_label[name] = {"precision": precision, "recall": recall, "f1": f1}
    return EvalMetrics(
        accuracy=_safe_div(tp + tn, total),
        per_label=per_label,
        confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn},
    )


# --- labeled-example files -----------------------------------------------
#
# Line format: label<TAB>uri<TAB>context.  Contexts are stored raw, one
# record per line; the writer flattens internal newlines/tabs to spaces.

_LABEL_ALIASES = {
    "oads": Label.OADS,
    "non-oads": Label.NON_OADS,
    "nonoads": Label.NON_OADS,
}


def read_labeled_file(path: str | Path) -> list[LabeledExample]:
    examples: list[LabeledExample] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t", 2)
            if len(fields) != 3:
                raise LabeledFileError(f"{path}:{lineno}: expected 3 tab-separated fields")
            raw_label, uri, context = fields
            label = _LABEL_ALIASES.get(raw_label.strip().lower())
            if label is None:
                raise LabeledFileError(f"{path}:{lineno}: unknown label {raw_label!r}")
            examples.append(LabeledExample(context, uri, label))
    return examples


def write_labeled_file(path: str | Path, examples: Iterable[LabeledExample]) -> None:
    lines = []
    for ex in examples:
        context = re.sub(r"[\t\n\r]+", " ", ex.context)
        lines.append(f"{ex.label.value}\t{ex.uri}\t{context}")
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))
