"""Lossless Java lexer.

The lexer never drops characters: joining the lexemes of the returned tokens
gives back the input exactly. Comments and string/char literals are always a
single token, which is what lets the rewriting rules touch comments and
imports without corrupting literals that happen to contain ``//`` or
``import``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List

from ..errors import LexError


class TokenKind(str, Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    LITERAL_STRING = "literal_string"
    LITERAL_CHAR = "literal_char"
    LITERAL_NUMBER = "literal_number"
    PUNCTUATION = "punctuation"
    COMMENT_LINE = "comment_line"
    COMMENT_BLOCK = "comment_block"
    WHITESPACE = "whitespace"
    OTHER = "other"


@dataclass(frozen=True)
class CodeToken:
    kind: TokenKind
    lexeme: str
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.lexeme)

    @property
    def is_comment(self) -> bool:
        return self.kind in (TokenKind.COMMENT_LINE, TokenKind.COMMENT_BLOCK)

    @property
    def is_literal(self) -> bool:
        return self.kind in (TokenKind.LITERAL_STRING, TokenKind.LITERAL_CHAR)

    @property
    def is_trivia(self) -> bool:
        return self.kind is TokenKind.WHITESPACE or self.is_comment


JAVA_KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null _
    """.split()
)

# Longest operators first so the alternation is greedy in the right way.
_OPERATORS = sorted(
    """
    >>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= &= |= ^= %=
    << >> ( ) { } [ ] ; , . @ = > < ! ~ ? : + - * / & | ^ %
    """.split(),
    key=len,
    reverse=True,
)

_WHITESPACE_RE = re.compile(r"[ \t\f\r\n]+")
_LINE_COMMENT_RE = re.compile(r"//[^\r\n]*")
_IDENT_RE = re.compile(r"(?:[^\W\d]|\$)(?:\w|\$)*")
_NUMBER_RE = re.compile(
    r"""
    (?:
        0[xX][0-9a-fA-F_]*(?:\.[0-9a-fA-F_]*)?(?:[pP][+-]?[0-9_]+)?
      | 0[bB][01_]+
      | (?:[0-9][0-9_]*(?:\.[0-9_]*)?|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9_]+)?
    )
    [lLfFdD]?
    """,
    re.VERBOSE,
)
_DIGITS = frozenset("0123456789")
_OPERATOR_RE = re.compile("|".join(re.escape(op) for op in _OPERATORS))


def _scan_quoted(text: str, pos: int, quote: str, kind: str) -> int:
    """Return the end offset of a quoted literal starting at ``pos``."""
    i = pos + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n and text[i + 1] not in "\r\n":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c in "\r\n":
            break
        i += 1
    raise LexError(f"unterminated {kind} literal", pos)


def _scan_text_block(text: str, pos: int) -> int:
    i = pos + 3
    n = len(text)
    while i < n:
        if text[i] == "\\":
            i += 2
            continue
        if text.startswith('"""', i):
            return i + 3
        i += 1
    raise LexError("unterminated text block", pos)


def lex_java(text: str) -> List[CodeToken]:
    tokens: List[CodeToken] = []
    pos = 0
    n = len(text)
    append = tokens.append
    while pos < n:
        c = text[pos]
        if c in " \t\f\r\n":
            end = _WHITESPACE_RE.match(text, pos).end()
            append(CodeToken(TokenKind.WHITESPACE, text[pos:end], pos))
        elif text.startswith("//", pos):
            end = _LINE_COMMENT_RE.match(text, pos).end()
            append(CodeToken(TokenKind.COMMENT_LINE, text[pos:end], pos))
        elif text.startswith("/*", pos):
            close = text.find("*/", pos + 2)
            if close < 0:
                raise LexError("unterminated block comment", pos)
            end = close + 2
            append(CodeToken(TokenKind.COMMENT_BLOCK, text[pos:end], pos))
        elif c == '"':
            if text.startswith('"""', pos):
                end = _scan_text_block(text, pos)
            else:
                end = _scan_quoted(text, pos, '"', "string")
            append(CodeToken(TokenKind.LITERAL_STRING, text[pos:end], pos))
        elif c == "'":
            end = _scan_quoted(text, pos, "'", "char")
            append(CodeToken(TokenKind.LITERAL_CHAR, text[pos:end], pos))
        elif c in _DIGITS or (c == "." and pos + 1 < n and text[pos + 1] in _DIGITS):
            end = _NUMBER_RE.match(text, pos).end()
            append(CodeToken(TokenKind.LITERAL_NUMBER, text[pos:end], pos))
        elif (m := _IDENT_RE.match(text, pos)) is not None:
            end = m.end()
            word = m.group()
            kind = TokenKind.KEYWORD if word in JAVA_KEYWORDS else TokenKind.IDENTIFIER
            append(CodeToken(kind, word, pos))
        elif (m := _OPERATOR_RE.match(text, pos)) is not None:
            end = m.end()
            append(CodeToken(TokenKind.PUNCTUATION, m.group(), pos))
        else:
            end = pos + 1
            append(CodeToken(TokenKind.OTHER, c, pos))
        pos = end
    return tokens


LEXERS: Dict[str, Callable[[str], List[CodeToken]]] = {"java": lex_java}


def get_lexer(language: str) -> Callable[[str], List[CodeToken]]:
    try:
        return LEXERS[language]
    except KeyError:
        raise ValueError(f"no lexer registered for language {language!r}") from None
