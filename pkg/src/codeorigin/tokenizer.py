"""Turn preprocessed code into bounded BOS ... EOS id sequences.

Two tokenizers share the ``tokenize(text, max_len)`` interface: the
reference tokenizer below (word/punctuation units over a vocabulary built
from the training corpus) and ``EncoderTokenizer``, a thin adapter over the
subword tokenizer that ships with a pre-trained encoder checkpoint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

DEFAULT_MAX_LEN = 512

BOS_TOKEN = "<s>"
EOS_TOKEN = "</s>"
UNK_TOKEN = "<unk>"
RESERVED = (BOS_TOKEN, EOS_TOKEN, UNK_TOKEN)
BOS_ID, EOS_ID, UNK_ID = 0, 1, 2

_UNIT_RE = re.compile(r"\w+|[^\w\s]")


@dataclass(frozen=True)
class TokenSequence:
    ids: List[int]
    max_len: int
    bos_id: int
    eos_id: int
    surface: Optional[List[str]] = None

    def __post_init__(self):
        if len(self.ids) < 2 or self.ids[0] != self.bos_id or self.ids[-1] != self.eos_id:
            raise ValueError("token sequence must start with BOS and end with EOS")
        if len(self.ids) > self.max_len:
            raise ValueError(f"token sequence longer than max_len={self.max_len}")

    def __len__(self) -> int:
        return len(self.ids)


def split_units(text: str) -> List[str]:
    """Word runs and single punctuation characters; whitespace is dropped."""
    return _UNIT_RE.findall(text)


def detokenize(units: Sequence[str]) -> str:
    return " ".join(units)


def _check_max_len(max_len: int) -> None:
    if max_len < 2:
        raise ValueError(f"max_len must be at least 2, got {max_len}")


class Vocabulary:
    """Token to id map with reserved ids 0=BOS, 1=EOS, 2=UNK; other ids in sorted token order."""

    def __init__(self, tokens: Iterable[str]):
        body = sorted(set(tokens) - set(RESERVED))
        self.tokens: List[str] = list(RESERVED) + body
        self._index: Dict[str, int] = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def id_of(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def token_of(self, idx: int) -> str:
        return self.tokens[idx]

    def save(self, path: Union[str, Path]) -> None:
        # reserved ids are implicit; line k holds id len(RESERVED)+k
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for tok in self.tokens[len(RESERVED):]:
                fh.write(tok + "\n")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        vocab = cls(tokens)
        if vocab.tokens[len(RESERVED):] != tokens:
            raise ValueError(f"{path}: vocabulary file is not sorted/unique")
        return vocab


def build_reference_vocab(texts: Iterable) -> Vocabulary:
    """Vocabulary over every unit of ``texts`` (strings or objects with ``.text``)."""
    units = set()
    n = 0
    for item in texts:
        text = item if isinstance(item, str) else item.text
        units.update(split_units(text))
        n += 1
    if n == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    return Vocabulary(units)


class ReferenceTokenizer:
    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab

    bos_id = BOS_ID
    eos_id = EOS_ID

    @property
    def identity(self) -> str:
        return f"reference:{len(self.vocab)}"

    def tokenize(self, text: str, max_len: int = DEFAULT_MAX_LEN) -> TokenSequence:
        _check_max_len(max_len)
        units = split_units(text)[: max_len - 2]
        surface = [BOS_TOKEN] + units + [EOS_TOKEN]
        ids = [BOS_ID] + [self.vocab.id_of(u) for u in units] + [EOS_ID]
        return TokenSequence(ids, max_len, BOS_ID, EOS_ID, surface)


def tokenize(text: str, max_len: int = DEFAULT_MAX_LEN, vocab: Optional[Vocabulary] = None) -> TokenSequence:
    """Reference tokenization; without a vocabulary every unit maps to UNK."""
    return ReferenceTokenizer(vocab or Vocabulary(())).tokenize(text, max_len)


class EncoderTokenizer:
    """Adapter giving a Hugging Face tokenizer the ``tokenize(text, max_len)`` interface."""

    def __init__(self, hf_tokenizer, name: str = ""):
        self.hf = hf_tokenizer
        self.name = name or getattr(hf_tokenizer, "name_or_path", "") or "encoder"
        self.bos_id = hf_tokenizer.cls_token_id if hf_tokenizer.cls_token_id is not None else hf_tokenizer.bos_token_id
        self.eos_id = hf_tokenizer.sep_token_id if hf_tokenizer.sep_token_id is not None else hf_tokenizer.eos_token_id

    @classmethod
    def from_pretrained(cls, name_or_path: str) -> "EncoderTokenizer":
        from transformers import AutoTokenizer

        return cls(AutoTokenizer.from_pretrained(name_or_path), str(name_or_path))

    @property
    def identity(self) -> str:
        return f"encoder:{self.name}"

    def tokenize(self, text: str, max_len: int = DEFAULT_MAX_LEN) -> TokenSequence:
        _check_max_len(max_len)
        enc = self.hf(text, truncation=True, max_length=max_len, add_special_tokens=True)
        ids = list(enc["input_ids"])
        return TokenSequence(ids, max_len, self.bos_id, self.eos_id, self.hf.convert_ids_to_tokens(ids))
