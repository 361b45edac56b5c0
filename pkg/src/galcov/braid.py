"""Exact braid algebra on a punctured disk.

Punctures sit on the real axis, numbered 1..p left to right; sigma_i is the
positive half-twist exchanging punctures i, i+1.  Braid words are sequences
of signed sigma indices applied left to right.

Conventions (fixed once, verified by the relation tests):
  * Artin action of sigma_i on the free basis x_1..x_p:
        x_i -> x_{i+1},   x_{i+1} -> x_{i+1} x_i x_{i+1}^-1,
    other letters fixed; words act left to right, i.e.
    action(u v, w) = action(v, action(u, w)).
  * A path between non-adjacent punctures records, for every strictly
    intermediate puncture, whether it is passed below ('b') or above ('a').
    Below-passages entangle the transported loop (they lie on the side of
    the loop tails); above-passed punctures are fixed by the twist.
  * The half-twist along a path from a to b (positions a < b) compiles to
    U^-1 sigma_a U with U = sigma_{a+1}^e ... sigma_{b-1}^e, where e = +1
    for a below-passage and -1 for an above-passage.
  * Conjugation is a^b = b^-1 a b, matching the bar/exponent notation of
    braid monodromy factorizations; negative factor exponents encode
    inverse ("bar") twisting along the same path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import perms
from .words import Word, inv, mul, reduce_word


class BraidError(Exception):
    pass


@dataclass(frozen=True)
class Frame:
    """Ordered punctures of the reference fiber, e.g. 1, 1', 2, 2', ..."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise BraidError(f"duplicate puncture labels in {self.labels}")

    @property
    def p(self) -> int:
        return len(self.labels)

    def position(self, label: str) -> int:
        """1-based position of a puncture label."""
        try:
            return self.labels.index(label) + 1
        except ValueError:
            raise BraidError(f"label {label!r} not in frame {self.labels}") from None

    @staticmethod
    def lines(m: int) -> "Frame":
        return Frame(tuple(str(i) for i in range(1, m + 1)))

    def doubled(self) -> "Frame":
        """Insert L' immediately to the right of every label L."""
        out: list[str] = []
        for lab in self.labels:
            out += [lab, lab + "'"]
        return Frame(tuple(out))


@dataclass(frozen=True)
class Path:
    """Path between two punctures with above/below passage flags.

    `passages` covers the strictly intermediate punctures left to right;
    'b' = below, 'a' = above.
    """

    ends: tuple[str, str]
    passages: tuple[str, ...] = ()

    def __post_init__(self):
        if self.ends[0] == self.ends[1]:
            raise BraidError("path endpoints must differ")
        for f in self.passages:
            if f not in ("a", "b"):
                raise BraidError(f"bad passage flag {f!r}")

    def span(self, frame: Frame) -> tuple[int, int]:
        a = frame.position(self.ends[0])
        b = frame.position(self.ends[1])
        if a > b:
            a, b = b, a
        return a, b


@dataclass(frozen=True)
class BraidWord:
    """Word in the sigma generators of B_p, letters applied left to right."""

    p: int
    letters: Word

    def __post_init__(self):
        for s in self.letters:
            if not 1 <= abs(s) <= self.p - 1:
                raise BraidError(f"sigma index {s} out of range for p={self.p}")
        object.__setattr__(self, "letters", reduce_word(self.letters))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.p != other.p:
            raise BraidError("braid words on different frames")
        return BraidWord(self.p, mul(self.letters, other.letters))

    def inverse(self) -> "BraidWord":
        return BraidWord(self.p, inv(self.letters))

    def __pow__(self, n: int) -> "BraidWord":
        w: Word = ()
        base = self.letters if n >= 0 else inv(self.letters)
        for _ in range(abs(n)):
            w = mul(w, base)
        return BraidWord(self.p, w)

    def permutation(self) -> perms.Perm:
        q = perms.identity(self.p)
        for s in self.letters:
            q = perms.pmul(q, perms.transposition(self.p, abs(s), abs(s) + 1))
        return q


def artin_action(braid: BraidWord, word: Sequence[int]) -> Word:
    """Image of a free word under the braid's automorphism.

    Letters of the free word are puncture positions 1..p.  The action is a
    free-group automorphism for fixed braid and anti-multiplicative in the
    braid: action(u v, w) = action(v, action(u, w)).
    """
    p = braid.p
    w = reduce_word(word)
    for a in w:
        if not 1 <= abs(a) <= p:
            raise BraidError(f"free letter {a} out of range for p={p}")
    for s in braid.letters:
        i = abs(s)
        out: list[int] = []

        def emit(seq: Iterable[int]) -> None:
            for x in seq:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)

        for a in w:
            k = abs(a)
            if s > 0:
                if k == i:
                    img: Word = (i + 1,)
                elif k == i + 1:
                    img = (i + 1, i, -(i + 1))
                else:
                    img = (k,)
            else:
                if k == i:
                    img = (-i, i + 1, i)
                elif k == i + 1:
                    img = (i,)
                else:
                    img = (k,)
            emit(img if a > 0 else inv(img))
        w = tuple(out)
    return w


def compile_halftwist_parts(path: Path, frame: Frame) -> tuple[Word, int]:
    """Transport word U and base position a with halftwist = U^-1 sigma_a U."""
    a, b = path.span(frame)
    if len(path.passages) != b - a - 1:
        raise BraidError(
            f"path {path.ends} needs {b - a - 1} passage flags, got {len(path.passages)}"
        )
    U: list[int] = []
    for offset, flag in enumerate(path.passages):
        j = a + 1 + offset
        U.append(j if flag == "b" else -j)
    return tuple(U), a


def compile_halftwist(path: Path, frame: Frame) -> BraidWord:
    """Half-twist along the path, as a conjugate of one sigma generator."""
    U, a = compile_halftwist_parts(path, frame)
    return BraidWord(frame.p, mul(inv(U), (a,), U))


@dataclass(frozen=True)
class Factor:
    """One factor of a braid monodromy factorization.

    The underlying braid is (halftwist(path))^eps conjugated by the stack:
    each (factor, power) entry acts as a^b = b^-1 a b, applied in order.
    |eps| of 1 / 2 / 3 marks a branch point / node / cusp; negative eps is
    the bar convention (inverse twisting).
    """

    path: Path
    eps: int
    conj: tuple[tuple["Factor", int], ...] = ()

    def __post_init__(self):
        if self.eps == 0 or abs(self.eps) > 3:
            raise BraidError(f"factor exponent {self.eps} not in +-{{1,2,3}}")

    def kind(self) -> str:
        return {1: "branch", 2: "node", 3: "cusp"}[abs(self.eps)]

    def conjugator_word(self, frame: Frame) -> BraidWord:
        w = BraidWord(frame.p, ())
        for factor, power in self.conj:
            w = w * (factor.braid(frame) ** power)
        return w

    def braid(self, frame: Frame) -> BraidWord:
        """Full braid including exponent and conjugators."""
        core = compile_halftwist(self.path, frame) ** self.eps
        c = self.conjugator_word(frame)
        return c.inverse() * core * c

    def degree(self) -> int:
        return abs(self.eps)


@dataclass(frozen=True)
class Factorization:
    frame: Frame
    factors: tuple[Factor, ...]
    complete: bool = True

    def degree(self) -> int:
        return sum(f.degree() for f in self.factors)


def factorization_degree(f: Factorization) -> int:
    """Sum of |eps| over factors; equals p(p-1) for a full twist."""
    return f.degree()


def full_twist_degree(frame: Frame) -> int:
    return frame.p * (frame.p - 1)


# ---------------------------------------------------------------------------
# Regeneration rewriting
# ---------------------------------------------------------------------------

def _doubled_path(path: Path, frame: Frame, right_prime: bool) -> Path:
    """Path of the regenerated factor on the doubled frame.

    Endpoints (i, j) map to (i, j) or (i, j') with right_prime; every old
    intermediate keeps its flag on both of its copies, the left endpoint's
    double i' and, for the (i, j') variant, the old right endpoint j are
    passed below.
    """
    a_lab, b_lab = path.ends
    fa, fb = frame.position(a_lab), frame.position(b_lab)
    if fa > fb:
        a_lab, b_lab = b_lab, a_lab
        fa, fb = fb, fa
        flags = tuple(reversed(path.passages))
    else:
        flags = path.passages
    new_flags: list[str] = ["b"]  # the double a' of the left endpoint
    for f in flags:
        new_flags += [f, f]
    end = b_lab + "'" if right_prime else b_lab
    if right_prime:
        new_flags.append("b")  # skip the undoubled right endpoint
    return Path((a_lab, end), tuple(new_flags))


def regenerate(factor: Factor, frame: Frame) -> list[Factor]:
    """Regenerate one degenerate factor, doubling its right endpoint.

    Branch point -> two branch points; node Z^2_{ij} -> Z^2_{ij} Z^2_{ij'};
    cusp Z^3_{ij} -> Z^3_{ij}, (Z^3_{ij})^{Z_{jj'}}, (Z^3_{ij})^{Z^-1_{jj'}}.
    The результат lives on frame.doubled(); conjugated factors are not
    supported (no catalog case regenerates them).
    """
    if factor.conj:
        raise BraidError("regeneration of conjugated factors is not supported")
    sign = 1 if factor.eps > 0 else -1
    a_lab, b_lab = factor.path.ends
    if frame.position(a_lab) > frame.position(b_lab):
        a_lab, b_lab = b_lab, a_lab
    plain = _doubled_path(factor.path, frame, right_prime=False)
    primed = _doubled_path(factor.path, frame, right_prime=True)
    k = abs(factor.eps)
    if k == 1:
        return [Factor(plain, sign), Factor(primed, sign)]
    if k == 2:
        return [Factor(plain, 2 * sign), Factor(primed, 2 * sign)]
    twist = Factor(Path((b_lab, b_lab + "'")), 1)
    return [
        Factor(plain, 3 * sign),
        Factor(plain, 3 * sign, ((twist, 1),)),
        Factor(plain, 3 * sign, ((twist, -1),)),
    ]


def regenerate_factorization(f: Factorization) -> Factorization:
    """Regenerate a degenerate line-arrangement factorization, doubling all lines.

    Every node doubles in both endpoints (four nodes), and每 line acquires
    the two branch-point factors of its conic.  Total degree m(m-1) becomes
    2m(2m-1): 4*m(m-1) from the nodes plus 2m branch points.
    """
    doubled = f.frame.doubled()
    out: list[Factor] = []
    for factor in f.factors:
        if abs(factor.eps) != 2:
            raise BraidError("degenerate line arrangements only carry node factors")
        for half in regenerate(factor, f.frame):
            # now double the left endpoint: Z_{i x} -> Z_{i x} Z_{i' x};
            # the first passage flag of the doubled path belonged to i'
            a_lab, b_lab = half.path.ends
            flags = half.path.passages
            out.append(Factor(half.path, half.eps, half.conj))
            out.append(Factor(Path((a_lab + "'", b_lab), flags[1:]), half.eps, half.conj))
    for lab in f.frame.labels:
        b = Factor(Path((lab, lab + "'")), 1)
        out += [b, b]
    return Factorization(doubled, tuple(out))


# ---------------------------------------------------------------------------
# Braid monodromy of a degenerate line arrangement
# ---------------------------------------------------------------------------

def line_arrangement_monodromy(points: Sequence[Sequence[int]], m: int) -> Factorization:
    """Factorization of the full twist for m lines with given multiple points.

    `points` lists, per singular point, the sorted labels of the lines
    through it (k >= 2 each; a pair of lines may meet at most once).  Lines
    are realized with slope ordered by label, so punctures appear in label
    order in the far fiber; each point contributes its local full-twist
    block as pairwise node factors, and every pair of lines meeting nowhere
    contributes one parasitic node.  Total degree is m(m-1).
    """
    seen_pairs: set[tuple[int, int]] = set()
    frame = Frame.lines(m)
    factors: list[Factor] = []
    for pt in sorted(tuple(sorted(p)) for p in points):
        if len(pt) < 2:
            continue
        for i in range(len(pt)):
            for j in range(i + 1, len(pt)):
                pair = (pt[i], pt[j])
                if pair in seen_pairs:
                    raise BraidError(f"lines {pair} meet at two points")
                seen_pairs.add(pair)
        for i in range(len(pt)):
            for j in range(i + 1, len(pt)):
                factors.append(_node(frame, pt[i], pt[j]))
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if (i, j) not in seen_pairs:
                factors.append(_node(frame, i, j))
    fz = Factorization(frame, tuple(factors))
    assert fz.degree() == m * (m - 1)
    return fz


def _node(frame: Frame, i: int, j: int) -> Factor:
    return Factor(Path((str(i), str(j)), ("b",) * (j - i - 1)), 2)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def path_to_json(path: Path) -> dict:
    return {"ends": list(path.ends), "passages": list(path.passages)}


def path_from_json(obj: dict) -> Path:
    return Path(tuple(obj["ends"]), tuple(obj.get("passages", ())))


def factor_to_json(factor: Factor) -> dict:
    return {
        "path": path_to_json(factor.path),
        "eps": factor.eps,
        "conj": [
            {"factor": factor_to_json(c), "power": p} for c, p in factor.conj
        ],
    }


def factor_from_json(obj: dict) -> Factor:
    conj = tuple(
        (factor_from_json(e["factor"]), int(e["power"])) for e in obj.get("conj", [])
    )
    return Factor(path_from_json(obj["path"]), int(obj["eps"]), conj)


def factorization_to_json(f: Factorization) -> dict:
    return {
        "frame": list(f.frame.labels),
        "factors": [factor_to_json(x) for x in f.factors],
        "complete": f.complete,
    }


def factorization_from_json(obj: dict) -> Factorization:
    return Factorization(
        Frame(tuple(obj["frame"])),
        tuple(factor_from_json(x) for x in obj["factors"]),
        bool(obj.get("complete", True)),
    )
