"""Backend-independent training, prediction and model persistence."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..corpus import Corpus, DatasetSplit
from ..errors import ArtifactError, ArtifactVersionError, InputError, TrainingError
from ..extractor import PreprocessConfig, RenameMap, apply_config
from ..snippet import CLASS_ORDER, Origin, Snippet

logger = logging.getLogger(__name__)

FORMAT_NAME = "codeorigin-model"
FORMAT_VERSION = "1"
BACKENDS = ("linear", "encoder")
DEFAULT_CHECKPOINT = "microsoft/codebert-base"


@dataclass(frozen=True)
class Hyperparams:
    epochs: int = 5
    batch_size: int = 8
    learning_rate: float = 2e-5
    warmup_fraction: float = 0.1
    weight_decay: float = 0.01
    max_len: int = 512
    seed: int = 42

    def __post_init__(self):
        if self.epochs < 1:
            raise InputError("epochs must be >= 1")
        if self.batch_size < 1:
            raise InputError("batch_size must be >= 1")
        if not self.learning_rate > 0:
            raise InputError("learning_rate must be positive")
        if not 0.0 <= self.warmup_fraction <= 1.0:
            raise InputError("warmup_fraction must be in [0, 1]")
        if self.weight_decay < 0:
            raise InputError("weight_decay must be nonnegative")
        if self.max_len < 2:
            raise InputError("max_len must be >= 2")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d) -> "Hyperparams":
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def replace(self, **changes) -> "Hyperparams":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


# The encoder defaults above are tuned for fine-tuning; logistic regression
# on normalized count features needs far larger steps and more passes.
LINEAR_DEFAULTS = Hyperparams(epochs=30, batch_size=16, learning_rate=0.5, warmup_fraction=0.1, weight_decay=1e-4)


def default_hyperparams(backend: str) -> Hyperparams:
    return LINEAR_DEFAULTS if backend == "linear" else Hyperparams()


@dataclass(frozen=True)
class Prediction:
    snippet_id: str
    label: Origin
    score: float

    def to_dict(self) -> dict:
        return {"snippet_id": self.snippet_id, "label": self.label.value, "score": self.score}


@dataclass
class ModelHandle:
    backend: str
    impl: object
    training_config: Dict = field(default_factory=dict)
    artifact_path: Optional[Path] = None
    class_order: tuple = tuple(o.value for o in CLASS_ORDER)

    @property
    def preprocess_config(self) -> PreprocessConfig:
        return PreprocessConfig.from_dict(self.training_config["preprocess"])

    @property
    def hyperparams(self) -> Hyperparams:
        return Hyperparams.from_dict(self.training_config["hyperparams"])

    def predict_proba(self, texts: Sequence[str], batch_size: Optional[int] = None) -> np.ndarray:
        """Class probabilities, shape ``(n, 2)`` in ``class_order``."""
        return self.impl.predict_proba(list(texts), batch_size=batch_size)


def _backend_class(backend: str):
    if backend == "linear":
        from .linear import LinearModel

        return LinearModel
    if backend == "encoder":
        from .encoder import EncoderModel

        return EncoderModel
    raise InputError(f"unknown backend {backend!r} (expected one of {', '.join(BACKENDS)})")


def _preprocess(
    snippets: Sequence[Snippet], config: PreprocessConfig, rename_map, strict_rename: bool
) -> List[str]:
    return [apply_config(s, config, rename_map, strict=strict_rename).text for s in snippets]


def _labels(snippets: Sequence[Snippet]) -> np.ndarray:
    return np.array([CLASS_ORDER.index(s.origin) for s in snippets], dtype=np.int64)


def train(
    backend: str,
    split: DatasetSplit,
    corpus: Corpus,
    config: PreprocessConfig,
    hyperparams: Optional[Hyperparams] = None,
    rename_map: Optional[RenameMap] = None,
    strict_rename: bool = True,
    checkpoint: Optional[str] = None,
) -> ModelHandle:
    """Fit a classifier on the train part, selecting the epoch with the best validation accuracy."""
    cls = _backend_class(backend)
    hp = hyperparams or default_hyperparams(backend)
    # sort by id: the seeded shuffle, not the caller's order, decides batches
    train_snips = sorted(corpus.subset(split.train), key=lambda s: s.id)
    val_snips = sorted(corpus.subset(split.validation), key=lambda s: s.id)
    if not train_snips:
        raise TrainingError("training part is empty")
    y_train = _labels(train_snips)
    if len(set(y_train.tolist())) < 2:
        raise TrainingError("training part contains a single class")
    x_train = _preprocess(train_snips, config, rename_map, strict_rename)
    x_val = _preprocess(val_snips, config, rename_map, strict_rename)
    y_val = _labels(val_snips)

    logger.info(
        "training %s backend on %d snippets (%d validation), config %s",
        backend, len(x_train), len(x_val), config.name,
    )
    kwargs = {"checkpoint": checkpoint or DEFAULT_CHECKPOINT} if backend == "encoder" else {}
    impl, history = cls.fit(x_train, y_train, x_val, y_val, hp, **kwargs)
    training_config = {
        "hyperparams": hp.to_dict(),
        "preprocess": config.to_dict(),
        "corpus": corpus.name,
        "split": {"ratios": list(split.ratios), "seed": split.seed},
        "train_size": len(x_train),
        "validation_size": len(x_val),
        "history": history,
        "tokenizer": impl.tokenizer_identity,
    }
    return ModelHandle(backend, impl, training_config)


def predict_batch(
    model: ModelHandle,
    snippets: Sequence[Snippet],
    config: Optional[PreprocessConfig] = None,
    rename_map: Optional[RenameMap] = None,
    strict_rename: bool = False,
    batch_size: Optional[int] = None,
) -> List[Prediction]:
    """Predict labels in input order. ``config`` defaults to the one the model was trained with.

    Renaming at prediction time is lenient by default: an unseen snippet
    usually has no entry in the rename map.
    """
    if not snippets:
        return []
    config = config or model.preprocess_config
    texts = _preprocess(snippets, config, rename_map, strict_rename)
    probs = model.predict_proba(texts, batch_size=batch_size)
    out = []
    for s, row in zip(snippets, probs):
        k = int(np.argmax(row))
        out.append(Prediction(s.id, CLASS_ORDER[k], float(row[k])))
    return out


def predict(
    model: ModelHandle,
    snippet: Snippet,
    config: Optional[PreprocessConfig] = None,
    rename_map: Optional[RenameMap] = None,
    strict_rename: bool = False,
) -> Prediction:
    return predict_batch(model, [snippet], config, rename_map, strict_rename)[0]


def persist(model: ModelHandle, path: Union[str, Path]) -> Path:
    """Write the model directory atomically: build in a sibling temp dir, then swap it in."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{path.name}.", dir=path.parent))
    try:
        model.impl.save(tmp)
        meta = {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "backend": model.backend,
            "class_order": list(model.class_order),
            "hyperparams": model.training_config.get("hyperparams"),
            "preprocess_config": model.training_config.get("preprocess"),
            "tokenizer": model.impl.tokenizer_identity,
            "training": model.training_config,
        }
        (tmp / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        if path.exists():
            old = path.with_name(f".{path.name}.old")
            if old.exists():
                shutil.rmtree(old)
            os.replace(path, old)
            os.replace(tmp, path)
            shutil.rmtree(old)
        else:
            os.replace(tmp, path)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    model.artifact_path = path
    return path


def read_meta(path: Union[str, Path]) -> dict:
    path = Path(path)
    meta_path = path / "meta.json"
    if not meta_path.is_file():
        raise ArtifactError(f"no model artifact at {path}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{meta_path}: unreadable metadata ({exc})") from exc
    if meta.get("format") != FORMAT_NAME:
        raise ArtifactError(f"{path} is not a {FORMAT_NAME} artifact")
    if meta.get("version") != FORMAT_VERSION:
        raise ArtifactVersionError(
            f"{path}: artifact version {meta.get('version')!r}, this build reads version {FORMAT_VERSION!r}"
        )
    if tuple(meta.get("class_order", ())) != tuple(o.value for o in CLASS_ORDER):
        raise ArtifactError(f"{path}: unexpected class order {meta.get('class_order')}")
    return meta


def restore(path: Union[str, Path]) -> ModelHandle:
    path = Path(path)
    meta = read_meta(path)
    backend = meta.get("backend")
    impl = _backend_class(backend).load(path, meta)
    return ModelHandle(backend, impl, meta["training"], artifact_path=path)
