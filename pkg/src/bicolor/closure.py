"""Closedness, closure operators, minimal pairs, and the D-dimension.

A set X is closed in S when delta(A/X) >= 0 for every A within S; the closure
of A is the least closed superset, computed as a fixpoint that repeatedly
adjoins the minimal violating witness (smallest size, ties broken
lexicographically on sorted ids), so fixpoints are deterministic.  All
notions are relative to the finite ambient structure.

D(A) is the minimum of delta over supersets of A inside the ambient; for a
rational coefficient it provably equals delta(closure(A)) and that identity
is asserted on every call.
"""

from __future__ import annotations

import itertools

from .colored import (
    ColoredStructure,
    delta,
    ensure_k_plus,
    in_k_plus,
    k_plus_violation,
    min_relative_delta,
    min_violating_witness,
)
from .errors import InputError, InvariantError, NotInKPlus
from .exactnum import PreDimValue, compare
from .pregeom import dim_independent as _dim_indep_elements


def _require_subset(small, big, what: str):
    if not small <= big:
        raise InputError(f"{what}: {sorted(small - big)} outside the larger set")


def closed_with_witness(x_ids, S: ColoredStructure, node_budget=None):
    """(closed?, minimal violating witness or None)."""
    x = S.check_ids(x_ids)
    kwargs = {} if node_budget is None else {"node_budget": node_budget}
    if not in_k_plus(S, **kwargs):
        raise NotInKPlus(
            f"structure has a negative subset {sorted(k_plus_violation(S))}"
        )
    w = min_violating_witness(S, x, **kwargs)
    return (w is None), w


def is_closed(x_ids, S: ColoredStructure, node_budget=None) -> bool:
    return closed_with_witness(x_ids, S, node_budget)[0]


def closure_with_steps(a_ids, S: ColoredStructure):
    """Least closed superset via the deterministic witness fixpoint."""
    cur = frozenset(S.check_ids(a_ids))
    ensure_k_plus(S)
    steps = 0
    while True:
        w = min_violating_witness(S, cur)
        if w is None:
            return cur, steps
        cur = cur | w
        steps += 1


def closure(a_ids, S: ColoredStructure) -> frozenset:
    return closure_with_steps(a_ids, S)[0]


def is_intrinsic(a_ids, b_ids, S: ColoredStructure) -> bool:
    """True iff delta(B) < delta(A') for every A <= A' strictly inside B."""
    a = S.check_ids(a_ids)
    b = S.check_ids(b_ids)
    _require_subset(a, b, "is_intrinsic")
    extra = sorted(b - a)
    if not extra:
        return True
    db = delta(S, b)
    for size in range(len(extra)):
        for combo in itertools.combinations(extra, size):
            if compare(db, delta(S, a | set(combo)), S.alpha) >= 0:
                return False
    return True


def intrinsic_tower(a_ids, b_ids, S: ColoredStructure) -> list[frozenset]:
    """Tower A = B_0 c B_1 c ... c B_n = B with every (B_i, B_{i+1}) minimal.

    Requires B to be an intrinsic extension of A; each step adjoins the
    smallest violating set over the current level.
    """
    a = S.check_ids(a_ids)
    b = S.check_ids(b_ids)
    if not is_intrinsic(a, b, S):
        raise InputError("not an intrinsic extension; no tower exists")
    tower = [frozenset(a)]
    cur = frozenset(a)
    sub = S.restrict(b)
    while cur != b:
        w = min_violating_witness(sub, cur)
        if w is None:
            raise InvariantError("intrinsic extension with no violating step")
        cur = cur | w
        tower.append(cur)
    return tower


def is_minimal_pair(a_ids, b_ids, S: ColoredStructure) -> bool:
    """delta(B/A) < 0 while every proper intermediate stays nonnegative."""
    a = S.check_ids(a_ids)
    b = S.check_ids(b_ids)
    _require_subset(a, b, "is_minimal_pair")
    extra = sorted(b - a)
    if not extra:
        return False
    if delta(S, b, a).sign(S.alpha) >= 0:
        return False
    # Exhaustive sweep of proper subsets of B minus A with an incremental
    # reducer stack; early exit on any negative intermediate.  The free
    # backend never reaches this point: its delta is never negative.
    base = S.reducer_for(a)
    alpha = S.alpha
    n = len(extra)

    def visit(i, red, dimc, ncol, taken):
        if taken and taken < n:
            if PreDimValue(dimc, ncol).sign(alpha) < 0:
                return False
        if i == n:
            return True
        branch = red.clone()
        grew = branch.add(S.introw(extra[i]))
        if not visit(
            i + 1,
            branch,
            dimc + (1 if grew else 0),
            ncol + (1 if S.is_colored(extra[i]) else 0),
            taken + 1,
        ):
            return False
        return visit(i + 1, red, dimc, ncol, taken)

    return visit(0, base, 0, 0, 0)


def closure_n(a_ids, S: ColoredStructure, n: int):
    """Union of intrinsic extensions of A adding fewer than n points."""
    a = S.check_ids(a_ids)
    ensure_k_plus(S)
    if n < 0:
        raise InputError("n must be a natural number")
    out = set(a)
    rest = sorted(S.id_set - a)
    for size in range(1, n):
        for combo in itertools.combinations(rest, size):
            if set(combo) <= out:
                continue
            if is_intrinsic(a, a | set(combo), S):
                out |= set(combo)
    return frozenset(out)


def d_value_with_witness(a_ids, S: ColoredStructure):
    """D(A): exact minimum of delta(C) over supersets of A inside S."""
    a = S.check_ids(a_ids)
    ensure_k_plus(S)
    base = delta(S, a)
    rel_min, extra = min_relative_delta(S, a)
    val = base + rel_min
    if S.alpha.is_rational:
        cl = closure(a, S)
        if compare(val, delta(S, cl), S.alpha) != 0:
            raise InvariantError("D(A) disagrees with delta(closure(A)) at rational alpha")
    return val, frozenset(a | extra)


def d_value(a_ids, S: ColoredStructure) -> PreDimValue:
    return d_value_with_witness(a_ids, S)[0]


def big_cl(a_ids, S: ColoredStructure) -> frozenset:
    """CL(A): points whose adjunction leaves D unchanged."""
    a = S.check_ids(a_ids)
    da = d_value(a, S)
    out = set(a)
    for eid in S.ids_sorted:
        if eid in out:
            continue
        if compare(d_value(a | {eid}, S), da, S.alpha) == 0:
            out.add(eid)
    return frozenset(out)


def _relative_d(a, z, S):
    return d_value(a | z, S) - d_value(z, S)


def d_independent_report(a_ids, b_ids, z_ids, S: ColoredStructure) -> dict:
    """Both-route D-independence evaluation with the closed-base cross-check.

    Route one is the definition: D(A/Z) = D(A/ZB) plus cl(AZ) n cl(BZ) =
    cl(Z).  When Z is closed the three-condition characterization must agree;
    a mismatch is an internal error, not a result.
    """
    a = S.check_ids(a_ids)
    b = S.check_ids(b_ids)
    z = S.check_ids(z_ids)
    ensure_k_plus(S)
    d_a_z = _relative_d(a, z, S)
    d_a_zb = _relative_d(a, z | b, S)
    cl_az = closure(a | z, S)
    cl_bz = closure(b | z, S)
    cl_z = closure(z, S)
    cond_d = compare(d_a_z, d_a_zb, S.alpha) == 0
    cond_cl = (cl_az & cl_bz) == cl_z
    result = cond_d and cond_cl
    z_closed = cl_z == z
    report = {
        "independent": result,
        "zClosed": z_closed,
        "dCondition": cond_d,
        "closureCondition": cond_cl,
    }
    if z_closed:
        cl_abz = closure(a | b | z, S)
        elems = lambda ids: [S.element(i) for i in sorted(ids)]
        three_way = (
            (cl_az & cl_bz) == z
            and cl_abz == (cl_az | cl_bz)
            and _dim_indep_elements(elems(cl_az), elems(cl_bz), elems(z), S.backend)
        )
        if three_way != result:
            raise InvariantError(
                "D-independence characterizations disagree over a closed base"
            )
        report["threeConditionForm"] = three_way
    return report


def d_independent(a_ids, b_ids, z_ids, S: ColoredStructure) -> bool:
    return d_independent_report(a_ids, b_ids, z_ids, S)["independent"]
