"""Bi-colored finite structures and the pre-dimension delta.

delta(A/X) = dim(A/X) - alpha * |colored points of A minus X|.  The class of
structures all of whose subsets have nonnegative delta is the hereditary
positive class; membership and every closedness question reduce to exact
minimization of delta over subsets.

Minimization strategy: plain points never lower delta, so minimizers live
among colored points.  Those split into connected components of the linear
matroid contracted by the conditioning set (computed from fundamental
circuits of a greedy basis), delta is additive across components, and each
component is searched exhaustively by branch-and-bound whose pruning bound is
the alpha-weighted rank deficiency of the untouched suffix.  Everything is
exact; searches that outgrow their node budget raise instead of degrading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BackendMismatch,
    InputError,
    InvariantError,
    NotInKPlus,
    SchemaError,
    SearchBudgetExceeded,
    UnknownElement,
)
from .exactnum import Alpha, PreDimValue, ZERO, compare
from .pregeom import FREE, LINEAR, Backend, GroundElement, SpanReducer, int_row

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass
class ColoredStructure:
    """A finite ground set with a pregeometry backend and a color predicate.

    Treated as immutable after construction; element order is canonical
    (sorted by id) so equality is structural.  The hereditary-positivity
    certificate is cached per instance and never trusted across file
    round-trips.
    """

    backend: Backend
    elements: tuple[GroundElement, ...]
    colored: frozenset[str]
    alpha: Alpha
    _by_id: dict = field(default=None, repr=False, compare=False)
    _introws: dict = field(default=None, repr=False, compare=False)
    _k_plus: object = field(default=None, repr=False, compare=False)
    _k_plus_witness: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        elts = tuple(sorted(self.elements, key=lambda e: e.id))
        object.__setattr__(self, "elements", elts)
        self.colored = frozenset(self.colored)
        ids = [e.id for e in elts]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise SchemaError(f"duplicate element ids {dup}")
        if not self.colored <= set(ids):
            raise SchemaError(f"colored ids not in structure: {sorted(self.colored - set(ids))}")
        if self.backend.kind == LINEAR:
            for e in elts:
                if e.vec is None:
                    raise SchemaError(f"element {e.id!r} lacks a vector payload")
                if len(e.vec) != self.backend.ambient_dim:
                    raise SchemaError(
                        f"element {e.id!r} payload length {len(e.vec)} != "
                        f"ambient {self.backend.ambient_dim}"
                    )
                if not any(e.vec):
                    raise SchemaError(f"element {e.id!r} has the forbidden zero payload")
        else:
            for e in elts:
                if e.vec is not None:
                    raise SchemaError(f"free-backend element {e.id!r} must not carry a payload")
        self._by_id = {e.id: e for e in elts}
        if self.backend.kind == LINEAR:
            self._introws = {e.id: int_row(e.vec) for e in elts}
        else:
            self._introws = {}

    # -- basic access -------------------------------------------------------

    @property
    def ids_sorted(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.elements)

    @property
    def id_set(self) -> frozenset[str]:
        return frozenset(self._by_id)

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, eid: str) -> GroundElement:
        try:
            return self._by_id[eid]
        except KeyError:
            raise UnknownElement(f"no element {eid!r}") from None

    def check_ids(self, ids) -> frozenset[str]:
        s = frozenset(ids)
        missing = s - self.id_set
        if missing:
            raise UnknownElement(f"unknown ids {sorted(missing)}")
        return s

    def is_colored(self, eid: str) -> bool:
        return eid in self.colored

    def introw(self, eid: str) -> list[int]:
        return self._introws[eid]

    def reducer_for(self, ids) -> SpanReducer:
        red = SpanReducer(self.backend.ambient_dim)
        for eid in sorted(ids):
            red.add(self._introws[eid])
        return red

    # -- derived structures -------------------------------------------------

    def restrict(self, ids) -> "ColoredStructure":
        keep = self.check_ids(ids)
        return ColoredStructure(
            backend=self.backend,
            elements=tuple(e for e in self.elements if e.id in keep),
            colored=self.colored & keep,
            alpha=self.alpha,
        )

    def extended(self, new_elements, new_colored=(), widen_by: int = 0) -> "ColoredStructure":
        """New structure with widened ambient (zero-padding preserves ranks)."""
        if self.backend.kind == FREE:
            if widen_by:
                raise InputError("free backend has no ambient to widen")
            return ColoredStructure(
                backend=self.backend,
                elements=self.elements + tuple(new_elements),
                colored=self.colored | frozenset(new_colored),
                alpha=self.alpha,
            )
        pad = (Fraction(0),) * widen_by
        old = tuple(
            GroundElement(e.id, e.vec + pad) if widen_by else e for e in self.elements
        )
        backend = Backend(LINEAR, self.backend.ambient_dim + widen_by)
        return ColoredStructure(
            backend=backend,
            elements=old + tuple(new_elements),
            colored=self.colored | frozenset(new_colored),
            alpha=self.alpha,
        )

    def fresh_ids(self, prefix: str, count: int) -> list[str]:
        used = set(self._by_id)
        out = []
        i = 1
        while len(out) < count:
            cand = f"{prefix}{i}"
            if cand not in used:
                out.append(cand)
                used.add(cand)
            i += 1
        return out


def empty_structure(alpha: Alpha, ambient: int = 0, kind: str = LINEAR) -> ColoredStructure:
    return ColoredStructure(
        backend=Backend(kind, ambient if kind == LINEAR else 0),
        elements=(),
        colored=frozenset(),
        alpha=alpha,
    )


# -- the pre-dimension ------------------------------------------------------


def delta(S: ColoredStructure, a_ids, x_ids=()) -> PreDimValue:
    """delta(A/X) as the exact pair (dim(A/X), |colored of A minus X|)."""
    a = S.check_ids(a_ids)
    x = S.check_ids(x_ids)
    fresh = a - x
    ncol = len([i for i in fresh if i in S.colored])
    if S.backend.kind == FREE:
        return PreDimValue(len(fresh), ncol)
    red = S.reducer_for(x)
    grow = 0
    for eid in sorted(fresh):
        if red.add(S.introw(eid)):
            grow += 1
    return PreDimValue(grow, ncol)


# -- colored component decomposition ---------------------------------------


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _solve_coeffs(basis_rows: list[list[int]], target: list[int]) -> list[Fraction] | None:
    """One exact solution c with sum c_i * basis_i = target, or None."""
    n = len(basis_rows)
    d = len(target)
    # Gaussian elimination on the transposed system (d equations, n unknowns).
    aug = [[Fraction(basis_rows[j][r]) for j in range(n)] + [Fraction(target[r])] for r in range(d)]
    piv_of_col = {}
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, d):
            if aug[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(d):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        piv_of_col[col] = row
        row += 1
    for r in range(row, d):
        if aug[r][n] != 0:
            return None
    coeffs = [Fraction(0)] * n
    for col, r in piv_of_col.items():
        coeffs[col] = aug[r][n]
    return coeffs


def colored_components(S: ColoredStructure, x_ids):
    """Split colored candidates over span(X) into (zero-residual, components).

    Zero-residual colored points always lower delta; the rest decompose into
    connected components of the contracted matroid, read off the fundamental
    circuits of the greedy basis.  delta minimization is additive across
    components.
    """
    x = S.check_ids(x_ids)
    cands = sorted(i for i in S.colored - x)
    if S.backend.kind == FREE:
        return [], [[c] for c in cands]
    base_red = S.reducer_for(x)
    drops = []
    residuals = {}
    for eid in cands:
        res = base_red.residual(S.introw(eid))
        if any(res):
            residuals[eid] = res
        else:
            drops.append(eid)
    uf = _UnionFind(residuals)
    basis_ids: list[str] = []
    basis_red = base_red.clone()
    for eid, res in residuals.items():
        if basis_red.add(S.introw(eid)):
            basis_ids.append(eid)
        else:
            coeffs = _solve_coeffs([residuals[b] for b in basis_ids], res)
            if coeffs is None:
                raise InvariantError("dependent residual not solvable in basis")
            support = [b for b, c in zip(basis_ids, coeffs) if c != 0]
            for b in support:
                uf.union(eid, b)
    comps: dict[str, list[str]] = {}
    for eid in residuals:
        comps.setdefault(uf.find(eid), []).append(eid)
    out = [sorted(v) for v in comps.values()]
    out.sort(key=lambda c: c[0])
    # Direct-sum sanity: component ranks must add up to the total.
    total = base_red.clone()
    got = sum(1 for eid in residuals if total.add(S.introw(eid)))
    per = 0
    for comp in out:
        red = base_red.clone()
        per += sum(1 for eid in comp if red.add(S.introw(eid)))
    if per != got:
        raise InvariantError("component decomposition lost rank")
    return drops, out


class _BudgetCounter:
    __slots__ = ("left",)

    def __init__(self, budget):
        self.left = budget

    def spend(self, amount=1):
        self.left -= amount
        if self.left < 0:
            raise SearchBudgetExceeded("exact search node budget exhausted")


def _component_min(S, base_red, comp, alpha, counter):
    """Exact min of delta(C/X) over C within one component, with witness."""
    n = len(comp)
    # Static suffix redundancy table: elements of the suffix counted minus
    # their rank over X and the *positional* prefix; a valid upper bound on
    # future collapses along any branch.
    red_static = [0] * (n + 1)
    prefix_red = base_red.clone()
    suffix_dim = []
    for i in range(n):
        probe = prefix_red.clone()
        grow = sum(1 for eid in comp[i:] if probe.add(S.introw(eid)))
        suffix_dim.append(grow)
        prefix_red.add(S.introw(comp[i]))
    for i in range(n):
        red_static[i] = (n - i) - suffix_dim[i]
    red_static[n] = 0

    best = ZERO
    best_set: tuple[str, ...] = ()

    def visit(i, red, dimc, chosen):
        nonlocal best, best_set
        counter.spend()
        cur = PreDimValue(dimc, len(chosen))
        if compare(cur, best, alpha) < 0:
            best = cur
            best_set = tuple(chosen)
        if i == n:
            return
        bound = PreDimValue(cur.dim_part, cur.color_part + red_static[i])
        if compare(bound, best, alpha) >= 0:
            return
        eid = comp[i]
        branch = red.clone()
        grew = branch.add(S.introw(eid))
        chosen.append(eid)
        visit(i + 1, branch, dimc + (1 if grew else 0), chosen)
        chosen.pop()
        visit(i + 1, red, dimc, chosen)

    visit(0, base_red.clone(), 0, [])
    return best, frozenset(best_set)


def min_relative_delta(S: ColoredStructure, x_ids, node_budget: int = DEFAULT_NODE_BUDGET):
    """Exact minimum of delta(A/X) over all A within S, with an attaining set.

    The minimum is at most zero (A may be empty).
    """
    x = S.check_ids(x_ids)
    if S.backend.kind == FREE:
        return ZERO, frozenset()
    drops, comps = colored_components(S, x)
    counter = _BudgetCounter(node_budget)
    total = PreDimValue(0, len(drops))
    witness = set(drops)
    base_red = S.reducer_for(x)
    for comp in comps:
        v, w = _component_min(S, base_red, comp, S.alpha, counter)
        total = total + v
        witness |= w
    return total, frozenset(witness)


def min_violating_witness(S: ColoredStructure, x_ids, node_budget: int = DEFAULT_NODE_BUDGET):
    """Smallest violating set (size, then lex by sorted ids), or None if closed."""
    x = S.check_ids(x_ids)
    if S.backend.kind == FREE:
        return None
    drops, comps = colored_components(S, x)
    if drops:
        return frozenset({min(drops)})
    counter = _BudgetCounter(node_budget)
    base_red = S.reducer_for(x)
    live = []
    for comp in comps:
        v, _ = _component_min(S, base_red, comp, S.alpha, counter)
        if v.sign(S.alpha) < 0:
            live.append(comp)
    if not live:
        return None
    maxlen = max(len(c) for c in live)
    for size in range(2, maxlen + 1):
        found = []
        for comp in live:
            for combo in itertools.combinations(comp, size):
                counter.spend()
                if delta(S, combo, x).sign(S.alpha) < 0:
                    found.append(tuple(sorted(combo)))
                    break
        if found:
            return frozenset(min(found))
    raise InvariantError("negative component minimum without a witness")


# -- hereditary positivity --------------------------------------------------


def in_k_plus(S: ColoredStructure, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff every subset has nonnegative pre-dimension (exact)."""
    if S._k_plus is None:
        v, _ = min_relative_delta(S, (), node_budget)
        ok = v.sign(S.alpha) >= 0
        S._k_plus = ok
        if not ok:
            S._k_plus_witness = min_violating_witness(S, (), node_budget)
    return S._k_plus


def k_plus_violation(S: ColoredStructure) -> frozenset | None:
    """Minimal violating subset (size, then lex), or None when hereditarily positive."""
    if in_k_plus(S):
        return None
    return S._k_plus_witness


def ensure_k_plus(S: ColoredStructure):
    if not in_k_plus(S):
        raise NotInKPlus(f"structure has a negative subset {sorted(k_plus_violation(S))}")


# -- structure-preserving maps ----------------------------------------------


@dataclass(frozen=True)
class EmbeddingMap:
    """A partial injection between ground sets, given as (source, target) pairs."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))
        srcs = [a for a, _ in self.pairs]
        tgts = [b for _, b in self.pairs]
        if len(set(srcs)) != len(srcs) or len(set(tgts)) != len(tgts):
            raise InputError("embedding map must be injective")

    @staticmethod
    def of(mapping: dict) -> "EmbeddingMap":
        return EmbeddingMap(tuple(mapping.items()))

    @staticmethod
    def identity(ids) -> "EmbeddingMap":
        return EmbeddingMap(tuple((i, i) for i in ids))

    @property
    def mapping(self) -> dict:
        return dict(self.pairs)

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.pairs)

    @property
    def image(self) -> frozenset[str]:
        return frozenset(b for _, b in self.pairs)

    def apply(self, eid: str) -> str:
        for a, b in self.pairs:
            if a == eid:
                return b
        raise UnknownElement(f"{eid!r} not in embedding domain")

    def to_json(self):
        return {a: b for a, b in self.pairs}


def _rref(rows: list[list[Fraction]]):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows[:r], pivots


def dependency_kernel(vectors: list[tuple[Fraction, ...]]):
    """Canonical basis of {c : sum_i c_i v_i = 0}; equality of kernels is
    equality of quantifier-free linear structure."""
    n = len(vectors)
    if n == 0:
        return ()
    d = len(vectors[0])
    mat = [[vectors[j][r] for j in range(n)] for r in range(d)]
    rref, pivots = _rref(mat) if d else ([], [])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * n
        vec[fcol] = Fraction(1)
        for prow, pcol in enumerate(pivots):
            vec[pcol] = -rref[prow][fcol]
        basis.append(tuple(vec))
    return tuple(basis)


def is_lp_embedding(f: EmbeddingMap, S: ColoredStructure, T: ColoredStructure) -> bool:
    """Total structure-and-color preserving embedding test.

    Linear backend: the rational dependency kernel of the source payloads must
    equal that of the image payloads (both directions come for free from
    kernel equality); colors must match on the whole domain.
    """
    if S.backend.kind != T.backend.kind:
        raise BackendMismatch(f"{S.backend.kind} vs {T.backend.kind}")
    if f.domain != S.id_set:
        raise InputError("embedding must be total on the source structure")
    T.check_ids(f.image)
    for a, b in f.pairs:
        if S.is_colored(a) != T.is_colored(b):
            return False
    if S.backend.kind == FREE:
        return True
    order = sorted(f.domain)
    mapping = f.mapping
    src = [S.element(i).vec for i in order]
    tgt = [T.element(mapping[i]).vec for i in order]
    return dependency_kernel(src) == dependency_kernel(tgt)


def _span_image(vectors, images, target):
    coeffs = _solve_fraction_coeffs(vectors, target)
    if coeffs is None:
        return None
    d = len(images[0])
    out = [Fraction(0)] * d
    for c, img in zip(coeffs, images):
        if c:
            out = [x + c * y for x, y in zip(out, img)]
    return tuple(out)


def _solve_fraction_coeffs(vectors, target):
    n = len(vectors)
    d = len(target)
    aug = [[vectors[j][r] for j in range(n)] + [target[r]] for r in range(d)]
    rref, pivots = _rref(aug)
    coeffs = [Fraction(0)] * n
    for prow, pcol in enumerate(pivots):
        if pcol == n:
            return None
        coeffs[pcol] = rref[prow][n]
    # pivots in the last column mean inconsistency; otherwise verify.
    for j in range(d):
        acc = Fraction(0)
        for i in range(n):
            acc += coeffs[i] * vectors[i][j]
        if acc != target[j]:
            return None
    return coeffs


def is_weak_iso(f: EmbeddingMap, S: ColoredStructure, T: ColoredStructure) -> bool:
    """Weak isomorphism of f's domain X onto its image Y.

    True iff f preserves colors on X and extends to a quantifier-free
    isomorphism of the generated traces acl_in(X, S) -> acl_in(Y, T); colors
    off X are unconstrained.
    """
    if S.backend.kind != T.backend.kind:
        raise BackendMismatch(f"{S.backend.kind} vs {T.backend.kind}")
    x_ids = sorted(S.check_ids(f.domain))
    T.check_ids(f.image)
    mapping = f.mapping
    for a in x_ids:
        if S.is_colored(a) != T.is_colored(mapping[a]):
            return False
    if S.backend.kind == FREE:
        return True
    src = [S.element(i).vec for i in x_ids]
    tgt = [T.element(mapping[i]).vec for i in x_ids]
    if dependency_kernel(src) != dependency_kernel(tgt):
        return False
    red_s = S.reducer_for(x_ids)
    red_t = T.reducer_for([mapping[i] for i in x_ids])
    trace_s = [e for e in S.elements if red_s.contains(S.introw(e.id))]
    trace_t = [e for e in T.elements if red_t.contains(T.introw(e.id))]
    if len(trace_s) != len(trace_t):
        return False
    imgs = []
    for e in trace_s:
        img = _span_image(src, tgt, e.vec)
        if img is None:
            return False
        imgs.append(img)
    return sorted(imgs) == sorted(e.vec for e in trace_t)
