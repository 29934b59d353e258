"""Caption grammar: production table, recursive-descent parser, NP extraction.

The caption language is
    CAP   -> NP
    NP    -> DET ADJP? N PARTP?
    ADJP  -> CLR
    PARTP -> VBG NP
with disjoint terminal classes, so one token of lookahead decides every
branch. Questions are minted from the NP subtrees of parsed captions,
including synthetic copies with the participial modifier stripped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from twentyq.scenes import AttributeVocabulary, DEFAULT_VOCAB

DETERMINERS = ("a", "an", "the")

START_SYMBOL = "CAP"


class ParseError(ValueError):
    """Token sequence outside the caption language.

    index points at the offending token (== len(tokens) when input ended
    too early).
    """

    def __init__(self, index: int, token: str | None, expected: str):
        self.index = index
        self.token = token
        self.expected = expected
        shown = "end of input" if token is None else repr(token)
        super().__init__(f"expected {expected} at token {index}, got {shown}")


@dataclass(frozen=True)
class ParseTree:
    """Labelled tree over token spans. Leaves carry the surface token.

    synthetic marks NP copies manufactured by stripping a PARTP; their
    spans still index the original token sequence.
    """

    label: str
    children: tuple["ParseTree", ...] = ()
    token: str | None = None
    span: tuple[int, int] = (0, 0)
    synthetic: bool = False

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def child(self, label: str) -> "ParseTree | None":
        for c in self.children:
            if c.label == label:
                return c
        return None

    def tokens(self) -> tuple[str, ...]:
        if self.is_leaf:
            return (self.token,)
        out: list[str] = []
        for c in self.children:
            out.extend(c.tokens())
        return tuple(out)


def classify_token(token: str, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> str | None:
    """Terminal class of a token, or None for words outside the caption language."""
    if token in DETERMINERS:
        return "DET"
    if token in vocab.colors:
        return "CLR"
    if vocab.singular_noun(token) is not None:
        return "N"
    if token in vocab.verbs:
        return "VBG"
    return None


class _Parser:
    def __init__(self, tokens: tuple[str, ...], vocab: AttributeVocabulary):
        self.tokens = tokens
        self.vocab = vocab
        self.pos = 0

    def peek_class(self) -> str | None:
        if self.pos >= len(self.tokens):
            return None
        return classify_token(self.tokens[self.pos], self.vocab)

    def take(self, terminal: str) -> ParseTree:
        if self.pos >= len(self.tokens):
            raise ParseError(self.pos, None, terminal)
        token = self.tokens[self.pos]
        if classify_token(token, self.vocab) != terminal:
            raise ParseError(self.pos, token, terminal)
        leaf = ParseTree(label=terminal, token=token, span=(self.pos, self.pos + 1))
        self.pos += 1
        return leaf

    def parse_np(self) -> ParseTree:
        start = self.pos
        children = [self.take("DET")]
        if self.peek_class() == "CLR":
            clr = self.take("CLR")
            children.append(ParseTree(label="ADJP", children=(clr,), span=clr.span))
        children.append(self.take("N"))
        if self.peek_class() == "VBG":
            p_start = self.pos
            vbg = self.take("VBG")
            inner = self.parse_np()
            children.append(
                ParseTree(
                    label="PARTP", children=(vbg, inner), span=(p_start, self.pos)
                )
            )
        return ParseTree(label="NP", children=tuple(children), span=(start, self.pos))


def parse(tokens, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> ParseTree:
    """Parse a token sequence (or whitespace-joined string) into a CAP tree."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    tokens = tuple(tokens)
    parser = _Parser(tokens, vocab)
    np = parser.parse_np()
    if parser.pos != len(tokens):
        raise ParseError(parser.pos, tokens[parser.pos], "end of input")
    return ParseTree(label=START_SYMBOL, children=(np,), span=(0, len(tokens)))


def _strip_partp(np: ParseTree) -> ParseTree:
    kept = tuple(c for c in np.children if c.label != "PARTP")
    return replace(np, children=kept, synthetic=True)


def np_subtrees(tree: ParseTree) -> list[ParseTree]:
    """All NP nodes in pre-order, then synthetic PARTP-stripped copies.

    A caption "a red square touching a blue circle" therefore yields three
    NPs: the full phrase, "a blue circle", and a synthetic "a red square".
    """
    found: list[ParseTree] = []

    def walk(node: ParseTree) -> None:
        if node.label == "NP":
            found.append(node)
        for c in node.children:
            walk(c)

    walk(tree)
    stripped = [_strip_partp(np) for np in found if np.child("PARTP") is not None]
    return found + stripped


def production_table(vocab: AttributeVocabulary = DEFAULT_VOCAB) -> dict:
    """The grammar as plain data, for serialization and cross-checking."""
    nouns = list(vocab.nouns()) + [vocab.plural_of(n) for n in vocab.nouns()]
    return {
        "start": START_SYMBOL,
        "productions": {
            "CAP": [["NP"]],
            "NP": [
                ["DET", "ADJP", "N", "PARTP"],
                ["DET", "ADJP", "N"],
                ["DET", "N", "PARTP"],
                ["DET", "N"],
            ],
            "ADJP": [["CLR"]],
            "PARTP": [["VBG", "NP"]],
        },
        "terminals": {
            "DET": list(DETERMINERS),
            "CLR": list(vocab.colors),
            "N": nouns,
            "VBG": list(vocab.verbs),
        },
    }


def validate_table(table: dict) -> None:
    """Structural checks: symbols resolve, start exists, classes are disjoint."""
    productions = table.get("productions")
    terminals = table.get("terminals")
    if not isinstance(productions, dict) or not isinstance(terminals, dict):
        raise ValueError("table needs 'productions' and 'terminals' dicts")
    start = table.get("start")
    if start not in productions:
        raise ValueError(f"start symbol {start!r} has no productions")
    if set(productions) & set(terminals):
        raise ValueError("a symbol cannot be both nonterminal and terminal")
    for nt, rules in productions.items():
        if not rules:
            raise ValueError(f"nonterminal {nt!r} has no productions")
        for rhs in rules:
            if not rhs:
                raise ValueError(f"empty production for {nt!r}")
            for sym in rhs:
                if sym not in productions and sym not in terminals:
                    raise ValueError(f"unknown symbol {sym!r} in production for {nt!r}")
    seen: dict[str, str] = {}
    for cls, words in terminals.items():
        if not words:
            raise ValueError(f"terminal class {cls!r} is empty")
        for w in words:
            if w in seen:
                raise ValueError(f"word {w!r} in both {seen[w]!r} and {cls!r}")
            seen[w] = cls


def write_table(path: str, table: dict) -> None:
    validate_table(table)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(table, fh, indent=2, sort_keys=True)


def read_table(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    validate_table(table)
    return table
