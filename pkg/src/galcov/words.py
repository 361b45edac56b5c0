"""Words in free groups.

A word is a tuple of nonzero integers: letter ``+i`` is the i-th generator
(1-based), ``-i`` its inverse.  All functions return freely reduced words,
so tuples can be compared directly.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Word = tuple[int, ...]


def reduce_word(letters: Iterable[int]) -> Word:
    """Freely reduce, cancelling adjacent x x^-1 pairs."""
    out: list[int] = []
    for a in letters:
        if a == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def inv(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def mul(*ws: Sequence[int]) -> Word:
    out: list[int] = []
    for w in ws:
        for a in w:
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
    return tuple(out)


def conj(w: Sequence[int], b: Sequence[int]) -> Word:
    """w conjugated by b, with the convention w^b = b^-1 w b."""
    return mul(inv(b), w, b)


def power(w: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(inv(w), -n)
    out: Word = ()
    for _ in range(n):
        out = mul(out, w)
    return out


def commutator(a: Sequence[int], b: Sequence[int]) -> Word:
    """[a, b] = a b a^-1 b^-1."""
    return mul(a, b, inv(a), inv(b))


def braid_rel(a: Sequence[int], b: Sequence[int]) -> Word:
    """<a, b> = a b a b^-1 a^-1 b^-1, trivial iff aba = bab."""
    return mul(a, b, a, inv(b), inv(a), inv(b))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = reduce_word(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return tuple(w[i:j])


def cyclic_canon(w: Sequence[int]) -> Word:
    """Least rotation of the cyclic reduction of w or w^-1.

    Two relators have equal canon iff they differ by rotation/inversion,
    which is what relator-set deduplication needs.
    """
    w = cyclic_reduce(w)
    if not w:
        return ()
    best = None
    for u in (w, inv(w)):
        for k in range(len(u)):
            rot = u[k:] + u[:k]
            if best is None or rot < best:
                best = rot
    return best  # type: ignore[return-value]


def substitute(w: Sequence[int], gen: int, repl: Sequence[int]) -> Word:
    """Replace generator `gen` (positive index) by the word `repl`."""
    rinv = inv(repl)
    out: list[int] = []
    for a in w:
        if a == gen:
            seg: Sequence[int] = repl
        elif a == -gen:
            seg = rinv
        else:
            seg = (a,)
        for x in seg:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def renumber(w: Sequence[int], mapping: dict[int, int]) -> Word:
    """Apply a generator renumbering {old: new} to every letter."""
    return reduce_word((mapping[a] if a > 0 else -mapping[-a]) for a in w)


def letters_used(ws: Iterable[Sequence[int]]) -> set[int]:
    return {abs(a) for w in ws for a in w}
