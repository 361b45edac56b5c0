"""Small permutation helpers.

Permutations on {0, .., n-1} are tuples p with p[i] the image of i.
Products compose left to right: (p * q)[i] = q[p[i]].
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def pmul(p: Perm, q: Perm) -> Perm:
    return tuple(q[p[i]] for i in range(len(p)))


def pinv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def transposition(n: int, a: int, b: int) -> Perm:
    """Transposition (a b) on n points, a and b 1-based."""
    if not (1 <= a <= n and 1 <= b <= n and a != b):
        raise ValueError(f"bad transposition ({a},{b}) on {n} points")
    p = list(range(n))
    p[a - 1], p[b - 1] = p[b - 1], p[a - 1]
    return tuple(p)


def eval_word(word: Sequence[int], images: Sequence[Perm], n: int) -> Perm:
    """Image of a free word under generator images (1-based letters)."""
    p = identity(n)
    for a in word:
        g = images[abs(a) - 1]
        p = pmul(p, g if a > 0 else pinv(g))
    return p


def group_order(gens: Iterable[Perm], limit: int = 10**6) -> int:
    """Order of the permutation group generated, by breadth-first closure."""
    gens = [g for g in gens]
    if not gens:
        return 1
    n = len(gens[0])
    seen = {identity(n)}
    queue = deque(seen)
    while queue:
        p = queue.popleft()
        for g in gens:
            q = pmul(p, g)
            if q not in seen:
                if len(seen) >= limit:
                    raise RuntimeError("permutation group closure exceeded limit")
                seen.add(q)
                queue.append(q)
    return len(seen)


def is_transitive(perms: Iterable[Perm], n: int) -> bool:
    reach = {0}
    frontier = [0]
    perms = list(perms)
    while frontier:
        i = frontier.pop()
        for p in perms:
            for j in (p[i], pinv(p)[i]):
                if j not in reach:
                    reach.add(j)
                    frontier.append(j)
    return len(reach) == n


def cycle_notation(p: Perm) -> str:
    """One-line cycle string, 1-based, e.g. '(1 2)(3 4)'."""
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        parts.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(parts) if parts else "()"
