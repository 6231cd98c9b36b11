"""Free amalgamation over a closed common base, with full verification.

The amalgam is canonical: coordinates are rebuilt block-diagonally with the
base span as shared leading coordinates (target ambient is rank(M1) +
rank(M2) - rank(base)), so the two complements sit in generic position and
the rank identity dim(M) = dim(M1) + dim(M2) - dim(M0) holds exactly.  Both
canonical injections are re-verified to be strong and the result is
re-certified hereditarily positive; failures raise, they are never returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .closure import is_closed
from .colored import (
    ColoredStructure,
    EmbeddingMap,
    ensure_k_plus,
    in_k_plus,
    is_lp_embedding,
    _solve_fraction_coeffs,
)
from .errors import (
    AlphaMismatch,
    BackendMismatch,
    InvariantError,
    MatchInvalid,
    NotClosed,
)
from .pregeom import FREE, LINEAR, Backend, GroundElement, dim_independent as _dim_indep
from .report import Check


@dataclass
class AmalgamResult:
    structure: ColoredStructure
    left: EmbeddingMap
    right: EmbeddingMap
    checks: list


def verify_strong(f: EmbeddingMap, M: ColoredStructure, N: ColoredStructure) -> bool:
    """Structure-and-color embedding whose image is closed in the target."""
    return is_lp_embedding(f, M, N) and is_closed(f.image, N)


def verify_free(M: ColoredStructure, part1, part2, base) -> bool:
    """part1 and part2 intersect exactly in base and are dim-independent over it."""
    p1 = M.check_ids(part1)
    p2 = M.check_ids(part2)
    b = M.check_ids(base)
    if (p1 & p2) != b:
        return False
    elems = lambda ids: [M.element(i) for i in sorted(ids)]
    return _dim_indep(elems(p1), elems(p2), elems(b), M.backend)


def _greedy_basis(S: ColoredStructure, ids, start=None):
    """Deterministic basis ids (sorted-id greedy) extending `start` ids."""
    red = S.reducer_for(()) if start is None else start[0].clone()
    chosen = [] if start is None else list(start[1])
    for eid in sorted(ids):
        if red.add(S.introw(eid)):
            chosen.append(eid)
    return red, chosen


def _coords(S: ColoredStructure, basis_ids, eid):
    vecs = [S.element(b).vec for b in basis_ids]
    coeffs = _solve_fraction_coeffs(vecs, S.element(eid).vec)
    if coeffs is None:
        raise InvariantError(f"element {eid!r} escaped the span of its basis")
    return coeffs


def _uncollide(base_ids, left_ids, right_ids):
    """Deterministic id renaming: base wins, complements get L./R. prefixes."""
    names = {}
    used = set(base_ids)
    for eid in left_ids:
        new = eid
        while new in used:
            new = "L." + new
        names[("L", eid)] = new
        used.add(new)
    for eid in right_ids:
        new = eid
        while new in used:
            new = "R." + new
        names[("R", eid)] = new
        used.add(new)
    return names


def free_amalgam(
    M1: ColoredStructure,
    M2: ColoredStructure,
    base1_ids,
    base2_ids,
    match: EmbeddingMap,
) -> AmalgamResult:
    """M1 and M2 glued over their matched common base, complements free.

    Preconditions: the match is a color-and-structure bijection between the
    two base copies, the base is closed on both sides, and coefficients and
    backend kinds agree.
    """
    if M1.backend.kind != M2.backend.kind:
        raise BackendMismatch(f"{M1.backend.kind} vs {M2.backend.kind}")
    if M1.alpha != M2.alpha:
        raise AlphaMismatch("the two sides fix different coefficients")
    b1 = M1.check_ids(base1_ids)
    b2 = M2.check_ids(base2_ids)
    ensure_k_plus(M1)
    ensure_k_plus(M2)
    if match.domain != b1 or match.image != b2:
        raise MatchInvalid("match must be a bijection between the two base copies")
    fwd = match.mapping
    for a, b in match.pairs:
        if M1.is_colored(a) != M2.is_colored(b):
            raise MatchInvalid(f"color clash on base pair {a!r} -> {b!r}")
    if len(b1) and M1.backend.kind == LINEAR:
        base_sub1 = M1.restrict(b1)
        base_sub2 = M2.restrict(b2)
        if not is_lp_embedding(match, base_sub1, base_sub2):
            raise MatchInvalid("match does not preserve quantifier-free structure")
    if not is_closed(b1, M1):
        raise NotClosed("base is not closed in the first structure")
    if not is_closed(b2, M2):
        raise NotClosed("base is not closed in the second structure")

    names = _uncollide(b1, sorted(M1.id_set - b1), sorted(M2.id_set - b2))
    left_name = {eid: (eid if eid in b1 else names[("L", eid)]) for eid in M1.id_set}
    inv = {v: k for k, v in fwd.items()}
    right_name = {
        eid: (inv[eid] if eid in b2 else names[("R", eid)]) for eid in M2.id_set
    }

    if M1.backend.kind == FREE:
        elements = [GroundElement(left_name[e.id]) for e in M1.elements]
        elements += [GroundElement(right_name[e.id]) for e in M2.elements if e.id not in b2]
        colored = {left_name[i] for i in M1.colored}
        colored |= {right_name[i] for i in M2.colored}
        M = ColoredStructure(Backend(FREE), tuple(elements), frozenset(colored), M1.alpha)
    else:
        red0, basis0 = _greedy_basis(M1, b1)
        _, basis1 = _greedy_basis(M1, M1.id_set, start=(red0, basis0))
        basis0_img = [fwd[i] for i in basis0]
        red0b = M2.reducer_for(())
        for eid in basis0_img:
            if not red0b.add(M2.introw(eid)):
                raise MatchInvalid("matched base basis is dependent on the second side")
        _, basis2 = _greedy_basis(M2, M2.id_set, start=(red0b, basis0_img))
        r0, r1, r2 = len(basis0), len(basis1), len(basis2)
        ambient = r1 + r2 - r0
        zero = Fraction(0)

        def place(coeffs, offsets):
            vec = [zero] * ambient
            for c, off in zip(coeffs, offsets):
                vec[off] = c
            return tuple(vec)

        off1 = list(range(r1))
        off2 = list(range(r0)) + list(range(r1, ambient))
        elements = []
        for e in M1.elements:
            coeffs = _coords(M1, basis1, e.id)
            elements.append(GroundElement(left_name[e.id], place(coeffs, off1)))
        for e in M2.elements:
            if e.id in b2:
                continue
            coeffs = _coords(M2, basis2, e.id)
            elements.append(GroundElement(right_name[e.id], place(coeffs, off2)))
        colored = {left_name[i] for i in M1.colored}
        colored |= {right_name[i] for i in M2.colored}
        M = ColoredStructure(Backend(LINEAR, ambient), tuple(elements), frozenset(colored), M1.alpha)

    inj1 = EmbeddingMap(tuple((eid, left_name[eid]) for eid in M1.id_set))
    inj2 = EmbeddingMap(tuple((eid, right_name[eid]) for eid in M2.id_set))
    part1 = frozenset(left_name.values())
    part2 = frozenset(right_name.values())
    base = frozenset(b1)

    if not in_k_plus(M):
        raise InvariantError("amalgam broke hereditary positivity")
    checks = [
        Check("in_k_plus", True),
        Check("left_injection_strong", verify_strong(inj1, M1, M)),
        Check("right_injection_strong", verify_strong(inj2, M2, M)),
        Check("parts_free_over_base", verify_free(M, part1, part2, base)),
    ]
    if M.backend.kind == LINEAR:
        from .pregeom import rank as _rank

        rk = lambda T, ids: _rank([T.element(i) for i in ids], T.backend)
        identity = rk(M, M.id_set) == rk(M1, M1.id_set) + rk(M2, M2.id_set) - rk(M1, b1)
        checks.append(Check("rank_identity", identity))
    bad = [c.name for c in checks if not c.passed]
    if bad:
        raise InvariantError(f"amalgam verification failed: {bad}")
    return AmalgamResult(structure=M, left=inj1, right=inj2, checks=checks)
