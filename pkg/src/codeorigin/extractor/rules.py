"""Token-level rewriting rules for Java snippets.

Each rule lexes its input, decides which character spans to drop or replace,
and then tidies the lines it touched: a touched line that ends up blank is
deleted together with its line break, and trailing blanks left on a touched
line are trimmed. Lines the rule did not touch are never modified, so every
stripping rule is idempotent.
"""

from __future__ import annotations

import re
from typing import Iterable, List, Optional, Sequence, Tuple

from ..errors import RenameCollisionError, RenameError
from .lexer import JAVA_KEYWORDS, CodeToken, TokenKind, lex_java

Edit = Tuple[int, int, str]

_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TYPE_KEYWORDS = frozenset({"class", "interface", "enum"})


def is_valid_identifier(name: str) -> bool:
    return bool(_IDENTIFIER_RE.match(name)) and name not in JAVA_KEYWORDS


def _apply_edits(text: str, edits: Sequence[Edit]) -> str:
    """Apply non-overlapping ``(start, end, replacement)`` edits and tidy touched lines."""
    if not edits:
        return text
    edits = sorted(edits)
    lines: List[str] = []
    buf: List[str] = []
    touched = False

    def flush(newline: str) -> None:
        line = "".join(buf)
        if touched:
            cr = line.endswith("\r")
            body = line[:-1] if cr else line
            body = body.rstrip(" \t")
            if not body.strip():
                return
            line = body + ("\r" if cr else "")
        lines.append(line + newline)

    pos = 0
    edit_iter = iter(edits)
    nxt = next(edit_iter, None)
    n = len(text)
    while pos < n or nxt is not None:
        if nxt is not None and pos == nxt[0]:
            start, end, repl = nxt
            touched = True
            buf.append(repl)
            pos = end
            nxt = next(edit_iter, None)
            continue
        if pos >= n:
            break
        stop = nxt[0] if nxt is not None else n
        chunk_end = text.find("\n", pos, stop)
        if chunk_end < 0:
            buf.append(text[pos:stop])
            pos = stop
            continue
        buf.append(text[pos:chunk_end])
        flush("\n")
        buf = []
        touched = False
        pos = chunk_end + 1
    flush("")
    return "".join(lines)


def _significant(tokens: Sequence[CodeToken]) -> List[int]:
    return [i for i, t in enumerate(tokens) if not t.is_trivia]


def _trailing_blank_end(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in " \t":
        pos += 1
    return pos


def _top_level_statements(tokens: Sequence[CodeToken], keyword: str):
    """Yield ``(first_sig, last_sig)`` token indices of top-level ``keyword ...;`` statements.

    Only statements that start at brace depth 0 right after the beginning of
    the file or another statement/block are considered, so ``import`` used
    as a word anywhere else is ignored.
    """
    sig = _significant(tokens)
    depth = 0
    prev = None
    k = 0
    while k < len(sig):
        tok = tokens[sig[k]]
        if (
            depth == 0
            and tok.kind is TokenKind.KEYWORD
            and tok.lexeme == keyword
            and (prev is None or prev.lexeme in (";", "}"))
        ):
            j = k + 1
            while j < len(sig) and tokens[sig[j]].lexeme not in (";", "{", "}"):
                j += 1
            if j < len(sig) and tokens[sig[j]].lexeme == ";":
                yield sig[k], sig[j]
                prev = tokens[sig[j]]
                k = j + 1
                continue
        if tok.lexeme == "{":
            depth += 1
        elif tok.lexeme == "}":
            depth = max(0, depth - 1)
        prev = tok
        k += 1


def _statement_edit(text: str, tokens: Sequence[CodeToken], first: int, last: int) -> Edit:
    start = tokens[first].offset
    end = _trailing_blank_end(text, tokens[last].end)
    return (start, end, "")


def _qualified_name(tokens: Sequence[CodeToken], first: int, last: int) -> str:
    parts = [
        t.lexeme
        for t in tokens[first + 1 : last]
        if not t.is_trivia and not (t.kind is TokenKind.KEYWORD and t.lexeme == "static")
    ]
    return "".join(parts)


def declared_package(text: str) -> Optional[str]:
    tokens = lex_java(text)
    for first, last in _top_level_statements(tokens, "package"):
        return _qualified_name(tokens, first, last)
    return None


def has_package_declaration(text: str) -> bool:
    return declared_package(text) is not None


def strip_package_declaration(text: str) -> str:
    tokens = lex_java(text)
    edits = [
        _statement_edit(text, tokens, first, last)
        for first, last in _top_level_statements(tokens, "package")
    ]
    return _apply_edits(text, edits)


def import_names(text: str) -> List[str]:
    tokens = lex_java(text)
    return [_qualified_name(tokens, f, l) for f, l in _top_level_statements(tokens, "import")]


def strip_self_imports(
    text: str,
    project_prefixes: Iterable[str] = (),
    package_root: Optional[str] = None,
) -> str:
    """Drop imports whose first package segment is a project root.

    The project roots are ``project_prefixes`` plus the first segment of the
    snippet's own package. ``package_root`` overrides the latter, which is
    needed when the package line has already been stripped.
    """
    tokens = lex_java(text)
    roots = set(project_prefixes)
    if package_root is None:
        for first, last in _top_level_statements(tokens, "package"):
            package_root = _qualified_name(tokens, first, last).split(".")[0]
            break
    if package_root:
        roots.add(package_root)
    edits = []
    for first, last in _top_level_statements(tokens, "import"):
        head = _qualified_name(tokens, first, last).split(".")[0]
        if head in roots:
            edits.append(_statement_edit(text, tokens, first, last))
    return _apply_edits(text, edits)


def strip_all_imports(text: str) -> str:
    tokens = lex_java(text)
    edits = [
        _statement_edit(text, tokens, first, last)
        for first, last in _top_level_statements(tokens, "import")
    ]
    return _apply_edits(text, edits)


def strip_comments(text: str) -> str:
    tokens = lex_java(text)
    edits: List[Edit] = []
    for tok in tokens:
        if not tok.is_comment:
            continue
        start, end = tok.offset, tok.end
        before = text[start - 1] if start > 0 else "\n"
        after = text[end] if end < len(text) else "\n"
        line_start = text.rfind("\n", 0, start) + 1
        if not text[line_start:start].strip(" \t"):
            # comment opens its line: take the blanks after it too, keep indentation
            edits.append((start, _trailing_blank_end(text, end), ""))
        elif before in " \t" and after in " \t":
            edits.append((start, _trailing_blank_end(text, end), ""))
        elif not before.isspace() and not after.isspace():
            # keep adjacent tokens apart, e.g. int/**/x
            edits.append((start, end, " "))
        else:
            edits.append((start, end, ""))
    return _apply_edits(text, edits)


def primary_class_name(text: str) -> Optional[str]:
    """Name of the first top-level class/interface/enum/record, or None."""
    tokens = lex_java(text)
    idx = _primary_type_index(tokens)
    return tokens[idx].lexeme if idx is not None else None


def _primary_type_index(tokens: Sequence[CodeToken]) -> Optional[int]:
    sig = _significant(tokens)
    braces = parens = 0
    for k, i in enumerate(sig):
        tok = tokens[i]
        lex = tok.lexeme
        if lex == "{":
            braces += 1
        elif lex == "}":
            braces = max(0, braces - 1)
        elif lex == "(":
            parens += 1
        elif lex == ")":
            parens = max(0, parens - 1)
        if braces or parens or k + 1 >= len(sig):
            continue
        nxt = tokens[sig[k + 1]]
        if nxt.kind is not TokenKind.IDENTIFIER:
            continue
        prev = tokens[sig[k - 1]].lexeme if k > 0 else None
        if tok.kind is TokenKind.KEYWORD and lex in _TYPE_KEYWORDS and prev != ".":
            return sig[k + 1]
        if (
            tok.kind is TokenKind.IDENTIFIER
            and lex == "record"
            and k + 2 < len(sig)
            and tokens[sig[k + 2]].lexeme in ("(", "<")
        ):
            return sig[k + 1]
    return None


def rename_primary_class(text: str, new_name: str) -> str:
    if not is_valid_identifier(new_name):
        raise RenameError(f"{new_name!r} is not a valid class name")
    tokens = lex_java(text)
    idx = _primary_type_index(tokens)
    if idx is None:
        raise RenameError("no top-level type declaration to rename")
    old = tokens[idx].lexeme
    if old == new_name:
        return text
    if any(t.kind is TokenKind.IDENTIFIER and t.lexeme == new_name for t in tokens):
        raise RenameCollisionError(f"{new_name!r} already names something else in the snippet")
    parts = [
        new_name if t.kind is TokenKind.IDENTIFIER and t.lexeme == old else t.lexeme
        for t in tokens
    ]
    return "".join(parts)


_FORMAT_RUN_RE = re.compile(r"[\t\n\r]+")


def strip_formatting(text: str) -> str:
    """Collapse each run of tabs/newlines/carriage returns outside literals to one space.

    A line comment still needs its line break, so the run right after one is
    collapsed to a single newline instead.
    """
    tokens = lex_java(text)
    out: List[str] = []
    prev: Optional[CodeToken] = None
    for tok in tokens:
        if tok.kind is TokenKind.WHITESPACE:
            if prev is not None and prev.kind is TokenKind.COMMENT_LINE:
                lex = tok.lexeme
                m = _FORMAT_RUN_RE.search(lex)
                if m is not None:
                    lex = lex[: m.start()] + "\n" + _FORMAT_RUN_RE.sub(" ", lex[m.end() :])
                out.append(lex)
            else:
                out.append(_FORMAT_RUN_RE.sub(" ", tok.lexeme))
        elif tok.kind is TokenKind.COMMENT_BLOCK:
            out.append(_FORMAT_RUN_RE.sub(" ", tok.lexeme))
        else:
            out.append(tok.lexeme)
        prev = tok
    return "".join(out)
