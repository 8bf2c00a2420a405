from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class Origin(str, Enum):
    HUMAN = "human"
    CHATGPT = "chatgpt"

    @classmethod
    def parse(cls, value) -> "Origin":
        if isinstance(value, Origin):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown label {value!r} (expected 'human' or 'chatgpt')") from None

    @property
    def other(self) -> "Origin":
        return Origin.CHATGPT if self is Origin.HUMAN else Origin.HUMAN


# Index order used by every classifier output.
CLASS_ORDER = (Origin.HUMAN, Origin.CHATGPT)


def count_loc(text: str) -> int:
    return text.count("\n") + 1 if text else 0


@dataclass(frozen=True)
class Snippet:
    """One labelled code sample."""

    id: str
    origin: Origin
    text: str
    pairing_key: Optional[str] = None
    language: str = "java"
    source: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "origin", Origin.parse(self.origin))

    @property
    def char_count(self) -> int:
        return len(self.text)

    @property
    def loc(self) -> int:
        return count_loc(self.text)

    def with_text(self, text: str) -> "Snippet":
        return dataclasses.replace(self, text=text)

    def with_origin(self, origin: Origin) -> "Snippet":
        return dataclasses.replace(self, origin=origin)
