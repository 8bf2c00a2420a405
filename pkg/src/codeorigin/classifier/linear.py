"""Logistic regression over token-count features of the reference tokenizer.

Features are ``log1p`` token counts, L2-normalized per snippet. Training is
mini-batch gradient descent with a linear warmup/decay schedule, seeded and
bit-deterministic. The sigmoid is evaluated through ``tanh`` and the
residual is written so that flipping every training label produces exactly
the negated weights.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from ..tokenizer import ReferenceTokenizer, Vocabulary, build_reference_vocab

logger = logging.getLogger(__name__)


def lr_at(step: int, total: int, base: float, warmup_fraction: float) -> float:
    warmup = int(total * warmup_fraction)
    if step < warmup:
        return base * (step + 1) / warmup
    return base * (total - step) / max(1, total - warmup)


class LinearModel:
    def __init__(self, vocab: Vocabulary, weights: np.ndarray, bias: float, max_len: int):
        self.vocab = vocab
        self.tokenizer = ReferenceTokenizer(vocab)
        self.weights = weights
        self.bias = float(bias)
        self.max_len = max_len

    @property
    def tokenizer_identity(self) -> str:
        return self.tokenizer.identity

    def features(self, texts: Sequence[str]) -> sparse.csr_matrix:
        return featurize(self.tokenizer, texts, self.max_len)

    def decision(self, texts: Sequence[str]) -> np.ndarray:
        return self.features(texts) @ self.weights + self.bias

    def predict_proba(self, texts: Sequence[str], batch_size: Optional[int] = None) -> np.ndarray:
        if not texts:
            return np.zeros((0, 2))
        t = np.tanh(self.decision(texts) / 2.0)
        return np.column_stack([0.5 * (1.0 - t), 0.5 * (1.0 + t)])

    @classmethod
    def fit(cls, x_train, y_train, x_val, y_val, hp) -> Tuple["LinearModel", List[dict]]:
        vocab = build_reference_vocab(x_train)
        tok = ReferenceTokenizer(vocab)
        X = featurize(tok, x_train, hp.max_len)
        Xv = featurize(tok, x_val, hp.max_len) if len(x_val) else None
        # +1 for chatgpt, -1 for human
        sign = 1.0 - 2.0 * np.asarray(y_train, dtype=np.float64)
        n, dim = X.shape
        w = np.zeros(dim)
        b = 0.0
        rng = np.random.default_rng(hp.seed)
        steps_per_epoch = -(-n // hp.batch_size)
        total = steps_per_epoch * hp.epochs
        step = 0
        best = None
        history = []
        for epoch in range(hp.epochs):
            order = rng.permutation(n)
            for start in range(0, n, hp.batch_size):
                idx = order[start : start + hp.batch_size]
                Xb = X[idx]
                t = np.tanh((Xb @ w + b) / 2.0)
                # sigmoid(z) - y, arranged to be exactly odd under label flips
                r = 0.5 * (t + sign[idx])
                lr = lr_at(step, total, hp.learning_rate, hp.warmup_fraction)
                grad_w = (Xb.T @ r) / len(idx) + hp.weight_decay * w
                grad_b = r.sum() / len(idx)
                w = w - lr * grad_w
                b = b - lr * grad_b
                step += 1
            entry = {"epoch": epoch + 1}
            if Xv is not None:
                pred = (Xv @ w + b) > 0
                entry["val_accuracy"] = float(np.mean(pred == (np.asarray(y_val) == 1)))
                if best is None or entry["val_accuracy"] > best[0]:
                    best = (entry["val_accuracy"], epoch + 1, w.copy(), b)
            history.append(entry)
        if best is not None:
            _, best_epoch, w, b = best
        else:
            best_epoch = hp.epochs
        for entry in history:
            entry["selected"] = entry["epoch"] == best_epoch
        return cls(vocab, w, b, hp.max_len), history

    def save(self, path: Path) -> None:
        self.vocab.save(path / "vocab.txt")
        np.savez(path / "weights.npz", weights=self.weights, bias=np.array([self.bias]), max_len=np.array([self.max_len]))

    @classmethod
    def load(cls, path: Path, meta: dict) -> "LinearModel":
        vocab = Vocabulary.load(path / "vocab.txt")
        with np.load(path / "weights.npz") as data:
            weights = data["weights"]
            bias = float(data["bias"][0])
            max_len = int(data["max_len"][0])
        if weights.shape != (len(vocab),):
            raise ValueError(f"{path}: weights do not match vocabulary size")
        return cls(vocab, weights, bias, max_len)


def featurize(tok: ReferenceTokenizer, texts: Sequence[str], max_len: int) -> sparse.csr_matrix:
    rows, cols, vals = [], [], []
    for i, text in enumerate(texts):
        ids = tok.tokenize(text, max_len).ids[1:-1]
        if not ids:
            continue
        uniq, counts = np.unique(np.asarray(ids), return_counts=True)
        v = np.log1p(counts.astype(np.float64))
        v /= np.sqrt(np.dot(v, v))
        rows.extend([i] * len(uniq))
        cols.extend(uniq.tolist())
        vals.extend(v.tolist())
    shape = (len(texts), len(tok.vocab))
    return sparse.csr_matrix((vals, (rows, cols)), shape=shape, dtype=np.float64)
