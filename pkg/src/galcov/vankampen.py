"""Van Kampen relations from braid monodromy factors.

A factor (halftwist(P))^eps conjugated by a braid C imposes one relation
between two loops A, B around the endpoints of P, transported by the
conjugation: an equality A = B for a branch point, [A, B] = e for a node,
<A, B> = e for a cusp.  The affine relators of all factors plus the single
projective relator assemble the presentation of the complement.

Generator naming: puncture label "3" -> G3, "3'" -> G3p.  Relator strings
use a small word grammar: juxtaposed names with optional ^k powers, the
macros <a, b> (braid) and [a, b] (commutator), and a top-level A = B
equality form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .braid import BraidWord, Factor, Factorization, Frame, artin_action, compile_halftwist_parts
from .words import Word, braid_rel, commutator, inv, mul, reduce_word


class GrammarError(Exception):
    pass


def gen_name(label: str) -> str:
    """Puncture label to generator name: '2' -> 'G2', "2'" -> 'G2p'."""
    if label.endswith("'"):
        return f"G{label[:-1]}p"
    return f"G{label}"


@dataclass(frozen=True)
class Relation:
    """kind in {'equality', 'commutator', 'braid', 'word'} with 1-2 operands.

    Operand words are over 1-based generator positions of the owning
    presentation; relator() is the single defining relator word.
    """

    kind: str
    operands: tuple[Word, ...]

    def __post_init__(self):
        arity = {"equality": 2, "commutator": 2, "braid": 2, "word": 1}
        if self.kind not in arity:
            raise ValueError(f"unknown relation kind {self.kind}")
        if len(self.operands) != arity[self.kind]:
            raise ValueError(f"{self.kind} needs {arity[self.kind]} operands")
        object.__setattr__(self, "operands", tuple(reduce_word(w) for w in self.operands))

    def relator(self) -> Word:
        if self.kind == "equality":
            a, b = self.operands
            return mul(a, inv(b))
        if self.kind == "commutator":
            return commutator(*self.operands)
        if self.kind == "braid":
            return braid_rel(*self.operands)
        return self.operands[0]


@dataclass(frozen=True)
class Presentation:
    """Generators with affine relations and an optional projective relation."""

    gens: tuple[str, ...]
    relations: tuple[Relation, ...]
    projective: Optional[Relation] = None

    def all_relations(self) -> tuple[Relation, ...]:
        if self.projective is None:
            return self.relations
        return self.relations + (self.projective,)

    def to_fpgroup(self):
        from .fpgroup import FPGroup

        return FPGroup(self.gens, tuple(r.relator() for r in self.all_relations()))


# ---------------------------------------------------------------------------
# Braid factor -> relation
# ---------------------------------------------------------------------------

def factor_loops(factor: Factor, frame: Frame) -> tuple[Word, Word]:
    """The two loops tied by the factor's relation, as words in x_1..x_p.

    With the half-twist compiled as U^-1 sigma_a U, the untransported loops
    are action(U)(x_a) and action(U)(x_{a+1}); the conjugator stack then
    acts in order.  This is the loop pair that makes the relator set of the
    factor's braid equal to the normal closure of the single relation.
    """
    U, a = compile_halftwist_parts(factor.path, frame)
    uw = BraidWord(frame.p, U)
    A = artin_action(uw, (a,))
    B = artin_action(uw, (a + 1,))
    for conj_factor, power in factor.conj:
        c = conj_factor.braid(frame) ** power
        A = artin_action(c, A)
        B = artin_action(c, B)
    return A, B


def relations_from_factor(factor: Factor, frame: Frame) -> list[Relation]:
    """Relation(s) imposed by one factor: equality / commutator / braid."""
    A, B = factor_loops(factor, frame)
    kind = {1: "equality", 2: "commutator", 3: "braid"}[abs(factor.eps)]
    return [Relation(kind, (A, B))]


def projective_relation(frame: Frame) -> Relation:
    """The relator G_p G_{p-1} ... G_1 = e (descending puncture order)."""
    word = tuple(range(frame.p, 0, -1))
    return Relation("word", (word,))


def assemble_presentation(f: Factorization) -> Presentation:
    """Affine relations of all factors plus the projective relation."""
    gens = tuple(gen_name(lab) for lab in f.frame.labels)
    rels: list[Relation] = []
    for factor in f.factors:
        rels += relations_from_factor(factor, f.frame)
    return Presentation(gens, tuple(rels), projective_relation(f.frame))


# ---------------------------------------------------------------------------
# Word grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*|\^-?\d+|[<>\[\](),=])")


def _tokenize(s: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            if s[pos:].strip():
                raise GrammarError(f"bad token at {s[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str], gens: Sequence[str]):
        self.tokens = tokens
        self.i = 0
        self.index = {g: k + 1 for k, g in enumerate(gens)}

    def peek(self) -> Optional[str]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise GrammarError("unexpected end of input")
        self.i += 1
        return tok

    def parse_word(self, stop: tuple[str, ...]) -> Word:
        out: Word = ()
        while True:
            tok = self.peek()
            if tok is None or tok in stop:
                return out
            out = mul(out, self.parse_term())

    def parse_term(self) -> Word:
        tok = self.next()
        if tok == "(":
            w = self.parse_word((")",))
            if self.next() != ")":
                raise GrammarError("expected )")
        elif tok == "<":
            a = self.parse_word((",",))
            self.next()
            b = self.parse_word((">",))
            if self.next() != ">":
                raise GrammarError("expected >")
            w = braid_rel(a, b)
        elif tok == "[":
            a = self.parse_word((",",))
            self.next()
            b = self.parse_word(("]",))
            if self.next() != "]":
                raise GrammarError("expected ]")
            w = commutator(a, b)
        elif tok in self.index:
            w = (self.index[tok],)
        else:
            raise GrammarError(f"unknown generator {tok!r}")
        nxt = self.peek()
        if nxt is not None and nxt.startswith("^"):
            self.next()
            n = int(nxt[1:])
            base = w
            w = ()
            for _ in range(abs(n)):
                w = mul(w, base)
            if n < 0:
                w = inv(w)
        return w


def parse_word(s: str, gens: Sequence[str]) -> Word:
    p = _Parser(_tokenize(s), gens)
    w = p.parse_word(())
    if p.peek() is not None:
        raise GrammarError(f"trailing tokens in {s!r}")
    return w


def parse_relation(s: str, gens: Sequence[str]) -> Relation:
    """Parse a relator string: 'A = B', '<a, b>', '[a, b]' or a plain word."""
    tokens = _tokenize(s)
    if "=" in tokens:
        k = tokens.index("=")
        p1 = _Parser(tokens[:k], gens)
        lhs = p1.parse_word(())
        p2 = _Parser(tokens[k + 1:], gens)
        rhs = p2.parse_word(())
        if p1.peek() is not None or p2.peek() is not None:
            raise GrammarError(f"trailing tokens in {s!r}")
        return Relation("equality", (lhs, rhs))
    if tokens and tokens[0] == "<" and tokens[-1] == ">":
        p = _Parser(tokens[1:-1], gens)
        a = p.parse_word((",",))
        p.next()
        b = p.parse_word(())
        if p.peek() is None:
            return Relation("braid", (a, b))
    if tokens and tokens[0] == "[" and tokens[-1] == "]":
        p = _Parser(tokens[1:-1], gens)
        a = p.parse_word((",",))
        p.next()
        b = p.parse_word(())
        if p.peek() is None:
            return Relation("commutator", (a, b))
    return Relation("word", (parse_word(s, gens),))


def format_word(w: Word, gens: Sequence[str]) -> str:
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        a = w[i]
        j = i
        while j + 1 < len(w) and w[j + 1] == a:
            j += 1
        n = (j - i + 1) * (1 if a > 0 else -1)
        name = gens[abs(a) - 1]
        parts.append(name if n == 1 else f"{name}^{n}")
        i = j + 1
    return " ".join(parts)


def format_relation(r: Relation, gens: Sequence[str]) -> str:
    if r.kind == "equality":
        return f"{format_word(r.operands[0], gens)} = {format_word(r.operands[1], gens)}"
    if r.kind == "braid":
        return f"<{format_word(r.operands[0], gens)}, {format_word(r.operands[1], gens)}>"
    if r.kind == "commutator":
        return f"[{format_word(r.operands[0], gens)}, {format_word(r.operands[1], gens)}]"
    return format_word(r.operands[0], gens)


def presentation_to_json(p: Presentation) -> dict:
    return {
        "gens": list(p.gens),
        "relators": [format_relation(r, p.gens) for r in p.relations],
        "projective": None if p.projective is None else format_relation(p.projective, p.gens),
    }


def presentation_from_json(obj: dict) -> Presentation:
    gens = tuple(obj["gens"])
    rels = tuple(parse_relation(s, gens) for s in obj["relators"])
    proj = obj.get("projective")
    return Presentation(gens, rels, None if proj is None else parse_relation(proj, gens))
