"""Preprocessing configurations and the driver that applies them to snippets.

The eight presets C1..C8 are cumulative: each one keeps every rule of its
predecessor and switches one more on (C6 branches from C4 rather than C5).
Rules always run in the same order: package line, imports, comments, class
rename, formatting.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from ..errors import CodeOriginError, InputError, MissingRenameError, PreprocessError
from ..snippet import Origin, Snippet
from . import rules


class ClassRename(str, Enum):
    KEEP = "keep"
    COUNTERPART_NAME = "counterpart_name"
    HUMAN_CHOSEN_NAME = "human_chosen_name"


@dataclass(frozen=True)
class PreprocessConfig:
    name: str
    strip_package_decl: bool = False
    strip_self_imports: bool = False
    strip_comments: bool = False
    strip_all_imports: bool = False
    strip_formatting: bool = False
    class_rename: ClassRename = ClassRename.KEEP
    project_prefixes: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "class_rename", ClassRename(self.class_rename))
        object.__setattr__(self, "project_prefixes", tuple(self.project_prefixes))

    @property
    def renames(self) -> bool:
        return self.class_rename is not ClassRename.KEEP

    def with_prefixes(self, prefixes: Iterable[str]) -> "PreprocessConfig":
        return dataclasses.replace(self, project_prefixes=tuple(prefixes))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["class_rename"] = self.class_rename.value
        d["project_prefixes"] = list(self.project_prefixes)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "PreprocessConfig":
        return cls(**{f.name: d[f.name] for f in dataclasses.fields(cls) if f.name in d})


def _build_presets() -> Dict[str, PreprocessConfig]:
    c1 = PreprocessConfig("C1")
    c2 = dataclasses.replace(c1, name="C2", strip_package_decl=True)
    c3 = dataclasses.replace(c2, name="C3", strip_self_imports=True)
    c4 = dataclasses.replace(c3, name="C4", strip_comments=True)
    c5 = dataclasses.replace(c4, name="C5", class_rename=ClassRename.COUNTERPART_NAME)
    c6 = dataclasses.replace(c4, name="C6", class_rename=ClassRename.HUMAN_CHOSEN_NAME)
    c7 = dataclasses.replace(c6, name="C7", strip_all_imports=True)
    c8 = dataclasses.replace(c7, name="C8", strip_formatting=True)
    return {c.name: c for c in (c1, c2, c3, c4, c5, c6, c7, c8)}


PRESETS: Dict[str, PreprocessConfig] = _build_presets()


def preset(name: str, project_prefixes: Iterable[str] = ()) -> PreprocessConfig:
    try:
        config = PRESETS[name.strip().upper()]
    except KeyError:
        raise InputError(f"unknown preprocessing configuration {name!r}") from None
    return config.with_prefixes(project_prefixes)


@dataclass(frozen=True)
class RenameMap:
    """Replacement class names keyed by pairing key."""

    entries: Mapping[str, str] = field(default_factory=dict)
    provenance: ClassRename = ClassRename.HUMAN_CHOSEN_NAME

    def __post_init__(self):
        object.__setattr__(self, "provenance", ClassRename(self.provenance))
        for key, name in self.entries.items():
            if not rules.is_valid_identifier(name):
                raise InputError(f"rename map entry {key!r}: {name!r} is not a valid identifier")

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __getitem__(self, key: str) -> str:
        return self.entries[key]

    def __len__(self) -> int:
        return len(self.entries)


def read_rename_map(
    path: Union[str, Path], provenance: ClassRename = ClassRename.HUMAN_CHOSEN_NAME
) -> RenameMap:
    entries: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            try:
                key, name = line.split("\t")
            except ValueError:
                raise InputError(f"{path}:{lineno}: expected 'pairing_key<TAB>class_name'") from None
            entries[key] = name.strip()
    return RenameMap(entries, provenance)


def write_rename_map(rename_map: RenameMap, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, name in rename_map.entries.items():
            fh.write(f"{key}\t{name}\n")


def counterpart_rename_map(snippets: Iterable[Snippet]) -> RenameMap:
    """Map each pairing key to the class name used by its generated counterpart.

    When a task has several generated snippets the one with the smallest id
    wins, so the map does not depend on corpus order.
    """
    best: Dict[str, Tuple[str, str]] = {}
    for s in snippets:
        if s.origin is not Origin.CHATGPT or s.pairing_key is None:
            continue
        name = rules.primary_class_name(s.text)
        if name is None:
            continue
        if s.pairing_key not in best or s.id < best[s.pairing_key][0]:
            best[s.pairing_key] = (s.id, name)
    return RenameMap({k: v[1] for k, v in sorted(best.items())}, ClassRename.COUNTERPART_NAME)


def apply_config(
    snippet: Snippet,
    config: PreprocessConfig,
    rename_map: Optional[RenameMap] = None,
    strict: bool = True,
) -> Snippet:
    """Rewrite ``snippet`` under ``config``.

    Renaming only touches human-written snippets. With ``strict=False`` a
    human snippet missing from ``rename_map`` keeps its class name instead
    of raising.
    """
    text = snippet.text
    try:
        package = rules.declared_package(text) if config.strip_self_imports else None
        if config.strip_package_decl:
            text = rules.strip_package_declaration(text)
        if config.strip_all_imports:
            text = rules.strip_all_imports(text)
        elif config.strip_self_imports:
            root = package.split(".")[0] if package else ""
            text = rules.strip_self_imports(text, config.project_prefixes, package_root=root)
        if config.strip_comments:
            text = rules.strip_comments(text)
        if config.renames and snippet.origin is Origin.HUMAN:
            new_name = _lookup_rename(snippet, rename_map, strict)
            if new_name is not None:
                text = rules.rename_primary_class(text, new_name)
        if config.strip_formatting:
            text = rules.strip_formatting(text)
    except CodeOriginError as exc:
        raise PreprocessError(snippet.id, exc) from exc
    return snippet.with_text(text)


def _lookup_rename(snippet: Snippet, rename_map: Optional[RenameMap], strict: bool) -> Optional[str]:
    key = snippet.pairing_key
    if rename_map is not None and key is not None and key in rename_map:
        return rename_map[key]
    if not strict:
        return None
    if rename_map is None:
        raise MissingRenameError("configuration renames classes but no rename map was given")
    raise MissingRenameError(f"rename map has no entry for pairing key {key!r}")
