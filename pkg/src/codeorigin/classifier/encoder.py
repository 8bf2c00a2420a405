"""Fine-tuned pre-trained code encoder with a two-way classification head.

Needs the optional ``torch`` and ``transformers`` dependencies. The head is
the stock sequence-classification head of the checkpoint family (first
position representation, dense layer, two-way softmax).
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ArtifactError, TrainingError
from ..tokenizer import EncoderTokenizer

logger = logging.getLogger(__name__)

MODEL_DIR = "model"


def _require_torch():
    try:
        import torch
        import transformers
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise TrainingError("the encoder backend needs torch and transformers installed") from exc
    return torch, transformers


class EncoderModel:
    def __init__(self, model, tokenizer: EncoderTokenizer, max_len: int, batch_size: int = 8):
        self.model = model
        self.tokenizer = tokenizer
        self.max_len = max_len
        self.batch_size = batch_size
        self.model.eval()

    @property
    def tokenizer_identity(self) -> str:
        return self.tokenizer.identity

    def _encode(self, texts: Sequence[str]) -> List[List[int]]:
        return [self.tokenizer.tokenize(t, self.max_len).ids for t in texts]

    def predict_proba(self, texts: Sequence[str], batch_size: Optional[int] = None) -> np.ndarray:
        torch, _ = _require_torch()
        if not texts:
            return np.zeros((0, 2))
        encoded = self._encode(texts)
        pad_id = _pad_id(self.tokenizer)
        bs = batch_size or self.batch_size
        out = []
        self.model.eval()
        with torch.no_grad():
            # padding is masked out, so batch size only moves results at float tolerance
            for start in range(0, len(encoded), bs):
                ids, mask = _pad(encoded[start : start + bs], pad_id, torch)
                logits = self.model(input_ids=ids, attention_mask=mask).logits.double()
                out.append(torch.softmax(logits, dim=-1).numpy())
        return np.concatenate(out, axis=0)

    @classmethod
    def fit(cls, x_train, y_train, x_val, y_val, hp, checkpoint: str) -> Tuple["EncoderModel", List[dict]]:
        torch, transformers = _require_torch()
        torch.manual_seed(hp.seed)
        tokenizer = EncoderTokenizer.from_pretrained(checkpoint)
        model = transformers.AutoModelForSequenceClassification.from_pretrained(checkpoint, num_labels=2)
        self = cls(model, tokenizer, hp.max_len, hp.batch_size)

        train_ids = self._encode(x_train)
        labels = torch.tensor(np.asarray(y_train), dtype=torch.long)
        no_decay = ("bias", "LayerNorm.weight", "layer_norm.weight")
        groups = [
            {"params": [p for n, p in model.named_parameters() if not n.endswith(no_decay)], "weight_decay": hp.weight_decay},
            {"params": [p for n, p in model.named_parameters() if n.endswith(no_decay)], "weight_decay": 0.0},
        ]
        optimizer = torch.optim.AdamW(groups, lr=hp.learning_rate)
        steps_per_epoch = -(-len(train_ids) // hp.batch_size)
        total = steps_per_epoch * hp.epochs
        scheduler = transformers.get_linear_schedule_with_warmup(optimizer, int(total * hp.warmup_fraction), total)
        gen = torch.Generator().manual_seed(hp.seed)
        pad_id = _pad_id(tokenizer)

        best = None
        history = []
        for epoch in range(hp.epochs):
            model.train()
            order = torch.randperm(len(train_ids), generator=gen).tolist()
            running = 0.0
            for start in range(0, len(order), hp.batch_size):
                idx = order[start : start + hp.batch_size]
                ids, mask = _pad([train_ids[i] for i in idx], pad_id, torch)
                loss = model(input_ids=ids, attention_mask=mask, labels=labels[idx]).loss
                loss.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
                optimizer.step()
                scheduler.step()
                optimizer.zero_grad()
                running += loss.item() * len(idx)
            entry = {"epoch": epoch + 1, "train_loss": running / len(order)}
            if len(x_val):
                pred = self.predict_proba(x_val).argmax(axis=1)
                entry["val_accuracy"] = float(np.mean(pred == np.asarray(y_val)))
                if best is None or entry["val_accuracy"] > best[0]:
                    best = (entry["val_accuracy"], epoch + 1, {k: v.detach().clone() for k, v in model.state_dict().items()})
            logger.info("epoch %d: %s", epoch + 1, entry)
            history.append(entry)
        best_epoch = hp.epochs
        if best is not None:
            best_epoch = best[1]
            model.load_state_dict(best[2])
        for entry in history:
            entry["selected"] = entry["epoch"] == best_epoch
        model.eval()
        return self, history

    def save(self, path: Path) -> None:
        target = path / MODEL_DIR
        self.model.save_pretrained(target)
        self.tokenizer.hf.save_pretrained(target)

    @classmethod
    def load(cls, path: Path, meta: dict) -> "EncoderModel":
        _, transformers = _require_torch()
        target = path / MODEL_DIR
        if not target.is_dir():
            raise ArtifactError(f"{target}: encoder weights missing")
        model = transformers.AutoModelForSequenceClassification.from_pretrained(target)
        hf_tok = transformers.AutoTokenizer.from_pretrained(target)
        name = str(meta.get("tokenizer", "")).split(":", 1)[-1] or str(target)
        hp = meta.get("hyperparams") or {}
        return cls(model, EncoderTokenizer(hf_tok, name), int(hp.get("max_len", 512)), int(hp.get("batch_size", 8)))


def _pad_id(tokenizer: EncoderTokenizer) -> int:
    pad = tokenizer.hf.pad_token_id
    return pad if pad is not None else tokenizer.eos_id


def _pad(batch: Sequence[Sequence[int]], pad_id: int, torch):
    width = max(len(s) for s in batch)
    ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(batch), width), dtype=torch.long)
    for i, seq in enumerate(batch):
        ids[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        mask[i, : len(seq)] = 1
    return ids, mask
