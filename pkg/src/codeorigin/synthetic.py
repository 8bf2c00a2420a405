"""Generator for small paired Java corpora with a planted stylistic marker.

Both snippets of a pair share the same code body and draw their ordinary
comments from the same pool, so the only systematic difference between the
two classes is one marker comment carried by the generated snippet. Once
comments are stripped the two members of a pair are identical.
"""

from __future__ import annotations

import random
from typing import List

from .corpus import Corpus, Provenance
from .snippet import Origin, Snippet

DEFAULT_MARKER = "// Here is a clean, well-structured solution to the problem."

_NOUNS = [
    "count", "total", "index", "value", "score", "limit", "result", "buffer", "item", "node",
    "width", "height", "size", "offset", "price", "rate", "sum", "step", "grade", "level",
]
_VERBS = ["compute", "find", "update", "check", "print", "load", "merge", "scan", "parse", "build"]
_CLASSES = ["Exercise", "Task", "Lab", "Problem", "Assignment", "Homework"]
_COMMENTS = [
    "// read the input values",
    "// loop over all elements",
    "// TODO handle edge cases",
    "// keep track of the running value",
    "/* helper used below */",
    "// print the result",
    "// check the bounds first",
    "// update the counter",
]


def _name(rng: random.Random) -> str:
    a = rng.choice(_NOUNS)
    b = rng.choice(_NOUNS)
    return a if a == b else a + b.capitalize()


def _statement(rng: random.Random, var: str) -> List[str]:
    kind = rng.randrange(4)
    other = _name(rng)
    if kind == 0:
        return [f"int {other} = {var} * {rng.randint(2, 9)} + {rng.randint(0, 99)};", f"{var} += {other};"]
    if kind == 1:
        return [f"for (int i = 0; i < {rng.randint(2, 20)}; i++) {{", f"    {var} += i % {rng.randint(2, 7)};", "}"]
    if kind == 2:
        return [f"if ({var} > {rng.randint(0, 50)}) {{", f"    {var} -= {rng.randint(1, 9)};", "}"]
    return [f'System.out.println("{rng.choice(_VERBS)} " + {var});']


def _body(rng: random.Random) -> List[List[str]]:
    """Methods as lists of lines (without comments)."""
    methods = []
    for _ in range(rng.randint(2, 3)):
        var = _name(rng)
        lines = [f"static int {rng.choice(_VERBS)}{_name(rng).capitalize()}(int {var}) {{"]
        for _ in range(rng.randint(2, 4)):
            lines.extend("    " + s for s in _statement(rng, var))
        lines.append(f"    return {var};")
        lines.append("}")
        methods.append(lines)
    return methods


def _render(class_name: str, methods: List[List[str]], rng: random.Random, marker: str = "") -> str:
    out = ["import java.util.Scanner;", ""]
    if marker:
        out.append(marker)
    out.append(f"public class {class_name} {{")
    for lines in methods:
        if rng.random() < 0.6:
            out.append("    " + rng.choice(_COMMENTS))
        for line in lines:
            out.append("    " + line)
        out.append("")
    out.append("}")
    return "\n".join(out) + "\n"


def synthetic_paired_corpus(
    n_pairs: int = 200, seed: int = 42, marker: str = DEFAULT_MARKER, name: str = "synthetic"
) -> Corpus:
    """``n_pairs`` human/chatgpt pairs; only the chatgpt member carries ``marker``."""
    rng = random.Random(seed)
    snippets = []
    width = max(4, len(str(n_pairs)))
    for k in range(n_pairs):
        key = f"task{k:0{width}d}"
        class_name = f"{rng.choice(_CLASSES)}{rng.randint(1, 40):02d}_{rng.randint(1, 60):02d}"
        methods = _body(rng)
        human = _render(class_name, methods, rng)
        generated = _render(class_name, methods, rng, marker)
        snippets.append(Snippet(f"h{k:0{width}d}", Origin.HUMAN, human, key))
        snippets.append(Snippet(f"g{k:0{width}d}", Origin.CHATGPT, generated, key))
    return Corpus(tuple(snippets), Provenance.PAIRED_DBETA, name)
