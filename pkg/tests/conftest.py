"""Shared generators and independent brute-force oracles.

The oracles recompute everything from scratch over bitmask subset tables and
never call the code paths they check.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from bicolor.colored import ColoredStructure
from bicolor.exactnum import Alpha
from bicolor.pregeom import Backend, GroundElement, LINEAR

ALPHA_ONE = Alpha.rational(1, 1)
ALPHA_HALF = Alpha.rational(1, 2)
ALPHA_TWO_THIRDS = Alpha.rational(2, 3)
ALPHA_INV_SQRT2 = Alpha.quadratic(0, 1, 2, 2)
ALL_ALPHAS = [ALPHA_ONE, ALPHA_HALF, ALPHA_TWO_THIRDS, ALPHA_INV_SQRT2]


def random_structure(rng: random.Random, alpha: Alpha, max_n=8, max_dim=5, color_p=0.45):
    """A random linear structure; not necessarily hereditarily positive."""
    dim = rng.randint(1, max_dim)
    n = rng.randint(0, max_n)
    elements = []
    colored = set()
    for i in range(n):
        while True:
            vec = tuple(Fraction(rng.randint(-2, 3)) for _ in range(dim))
            if any(vec):
                break
        eid = f"e{i}"
        elements.append(GroundElement(eid, vec))
        if rng.random() < color_p:
            colored.add(eid)
    return ColoredStructure(Backend(LINEAR, dim), tuple(elements), frozenset(colored), alpha)


def random_k_plus_structure(rng, alpha, max_n=8, max_dim=5, color_p=0.35):
    """Rejection-sample a hereditarily positive structure (brute-checked)."""
    while True:
        S = random_structure(rng, alpha, max_n=max_n, max_dim=max_dim, color_p=color_p)
        if brute_in_k_plus(S):
            return S


# -- bitmask oracle machinery ---------------------------------------------------


def _rank_of(vectors) -> int:
    rows = [list(v) for v in vectors]
    cols = len(rows[0]) if rows else 0
    rank = 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        rank += 1
        r += 1
    return rank


class SubsetTable:
    """Per-subset (dim, colored-count) table plus exact sign comparisons."""

    def __init__(self, S: ColoredStructure):
        self.S = S
        self.ids = list(S.ids_sorted)
        self.n = len(self.ids)
        vecs = [S.element(i).vec for i in self.ids]
        self.dim = [0] * (1 << self.n)
        self.col = [0] * (1 << self.n)
        for mask in range(1 << self.n):
            chosen = [vecs[i] for i in range(self.n) if mask >> i & 1]
            self.dim[mask] = _rank_of(chosen)
            self.col[mask] = sum(
                1 for i in range(self.n) if mask >> i & 1 and self.ids[i] in S.colored
            )
        a = S.alpha
        if a.is_rational:
            self._sign = lambda d, c: (a.den * d - a.num * c > 0) - (a.den * d - a.num * c < 0)
        else:
            # alpha = (aa + bb*sqrt(dd))/cc
            aa, bb, cc, dd = a.a, a.b, a.c, a.d

            def sign(d, c):
                u = cc * d - aa * c
                v = -bb * c
                if v == 0:
                    return (u > 0) - (u < 0)
                if u == 0:
                    return 1 if v > 0 else -1
                su = 1 if u > 0 else -1
                sv = 1 if v > 0 else -1
                if su == sv:
                    return su
                lhs, rhs = u * u, v * v * dd
                if lhs == rhs:
                    return 0
                return su if lhs > rhs else sv

            self._sign = sign

    def mask_of(self, ids) -> int:
        m = 0
        for i in ids:
            m |= 1 << self.ids.index(i)
        return m

    def ids_of(self, mask) -> frozenset:
        return frozenset(self.ids[i] for i in range(self.n) if mask >> i & 1)

    def delta_sign(self, mask, over=0) -> int:
        """Sign of delta(mask / over)."""
        d = self.dim[mask | over] - self.dim[over]
        c = self.col[mask | over] - self.col[over]
        return self._sign(d, c)

    def delta_pair(self, mask, over=0):
        full = mask | over
        return (self.dim[full] - self.dim[over], self.col[full] - self.col[over])

    def closed_masks(self):
        """Bit list: closed[mask] iff every superset extension stays nonnegative."""
        n = self.n
        closed = [True] * (1 << n)
        for mask in range(1 << n):
            rest = (~mask) & ((1 << n) - 1)
            sub = rest
            while sub:
                d = self.dim[mask | sub] - self.dim[mask]
                c = self.col[mask | sub] - self.col[mask]
                if self._sign(d, c) < 0:
                    closed[mask] = False
                    break
                sub = (sub - 1) & rest
        return closed


def brute_in_k_plus(S: ColoredStructure) -> bool:
    t = SubsetTable(S)
    return all(t.delta_sign(m) >= 0 for m in range(1 << t.n))


def brute_closure(S: ColoredStructure, a_ids) -> frozenset:
    """Intersection of all closed supersets (least closed superset)."""
    t = SubsetTable(S)
    closed = t.closed_masks()
    amask = t.mask_of(a_ids)
    out = (1 << t.n) - 1
    for mask in range(1 << t.n):
        if closed[mask] and (mask & amask) == amask:
            out &= mask
    return t.ids_of(out)


def brute_is_closed(S: ColoredStructure, x_ids) -> bool:
    t = SubsetTable(S)
    return t.closed_masks()[t.mask_of(x_ids)]


def brute_d_value(S: ColoredStructure, a_ids):
    """(dim, colored) pair minimizing delta over supersets of A."""
    t = SubsetTable(S)
    amask = t.mask_of(a_ids)
    best = None
    for mask in range(1 << t.n):
        if (mask & amask) != amask:
            continue
        pair = (t.dim[mask], t.col[mask])
        if best is None:
            best = pair
        else:
            d, c = pair[0] - best[0], pair[1] - best[1]
            if t._sign(d, c) < 0:
                best = pair
    return best


@pytest.fixture
def rng():
    return random.Random(0xB1C0)
