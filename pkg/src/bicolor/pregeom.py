"""Finite pregeometry backends: exact rational-linear rank and the free closure.

The linear backend realizes dimension as matrix rank over the rationals,
computed by fraction-free (Bareiss) elimination on integer rows obtained by
clearing denominators.  Pivoting is first-nonzero by row then column, so every
computation is deterministic.  The free backend is the degenerate control:
acl(A) = A and dim(A) = |A|.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DimensionMismatch, InputError, SchemaError

LINEAR = "linear"
FREE = "free"


@dataclass(frozen=True)
class Backend:
    kind: str
    ambient_dim: int = 0

    def __post_init__(self):
        if self.kind not in (LINEAR, FREE):
            raise SchemaError(f"unknown backend kind {self.kind!r}")
        if self.kind == LINEAR and self.ambient_dim < 0:
            raise SchemaError("ambient dimension must be >= 0")


@dataclass(frozen=True)
class GroundElement:
    """A named point; the linear backend attaches an exact rational vector."""

    id: str
    vec: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if not self.id or not self.id.isascii():
            raise SchemaError(f"element id must be a nonempty ASCII string, got {self.id!r}")


def int_row(vec: tuple[Fraction, ...]) -> list[int]:
    """Clear denominators of one vector; row scaling preserves rank."""
    mult = 1
    for x in vec:
        mult = mult * x.denominator // gcd(mult, x.denominator)
    return [int(x * mult) for x in vec]


def _row_gcd_normalize(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        g = gcd(g, abs(x))
        if g == 1:
            return row
    if g > 1:
        return [x // g for x in row]
    return row


class SpanReducer:
    """Incremental fraction-free row reduction tracking a rational span.

    Rows are integer vectors kept in echelon form (increasing leading column),
    gcd-normalized to bound growth.  residual() reduces a vector against the
    basis without mutating it; add() grows the basis when the residual is
    nonzero.
    """

    __slots__ = ("ncols", "rows")

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[tuple[int, list[int]]] = []

    def clone(self) -> "SpanReducer":
        c = SpanReducer(self.ncols)
        c.rows = list(self.rows)
        return c

    @property
    def rank(self) -> int:
        return len(self.rows)

    def residual(self, row: list[int]) -> list[int]:
        if len(row) != self.ncols:
            raise DimensionMismatch(f"vector length {len(row)} != ambient {self.ncols}")
        cur = list(row)
        for lead, base in self.rows:
            piv = cur[lead]
            if piv:
                scale = base[lead]
                cur = [x * scale - y * piv for x, y in zip(cur, base)]
        return _row_gcd_normalize(cur)

    def contains(self, row: list[int]) -> bool:
        return not any(self.residual(row))

    def add(self, row: list[int]) -> bool:
        res = self.residual(row)
        lead = next((i for i, x in enumerate(res) if x), None)
        if lead is None:
            return False
        if res[lead] < 0:
            res = [-x for x in res]
        self.rows.append((lead, res))
        self.rows.sort(key=lambda t: t[0])
        return True


def rank_int_matrix(rows: list[list[int]], ncols: int) -> int:
    """Bareiss fraction-free rank; first-nonzero pivot by row then column."""
    if not rows:
        return 0
    m = [list(r) for r in rows]
    nrows = len(m)
    rank = 0
    prev = 1
    pr = 0
    for pc in range(ncols):
        piv_row = None
        for r in range(pr, nrows):
            if m[r][pc] != 0:
                piv_row = r
                break
        if piv_row is None:
            continue
        if piv_row != pr:
            m[pr], m[piv_row] = m[piv_row], m[pr]
        p = m[pr][pc]
        for r in range(pr + 1, nrows):
            factor = m[r][pc]
            for c in range(pc + 1, ncols):
                m[r][c] = (m[r][c] * p - factor * m[pr][c]) // prev
            m[r][pc] = 0
        prev = p
        pr += 1
        rank += 1
        if pr == nrows:
            break
    return rank


def _payload_rows(elements, backend: Backend) -> list[list[int]]:
    rows = []
    for e in elements:
        if e.vec is None:
            raise DimensionMismatch(f"element {e.id!r} has no vector payload")
        if len(e.vec) != backend.ambient_dim:
            raise DimensionMismatch(
                f"element {e.id!r} payload length {len(e.vec)} != ambient {backend.ambient_dim}"
            )
        rows.append(int_row(e.vec))
    return rows


def rank(elements, backend: Backend) -> int:
    """dim of a finite set: matrix rank (linear) or cardinality (free)."""
    elements = list(elements)
    if backend.kind == FREE:
        return len({e.id for e in elements})
    return rank_int_matrix(_payload_rows(elements, backend), backend.ambient_dim)


def rel_rank(a_elements, x_elements, backend: Backend) -> int:
    """dim(A/X) = rank(A u X) - rank(X)."""
    a_elements = list(a_elements)
    x_elements = list(x_elements)
    if backend.kind == FREE:
        xids = {e.id for e in x_elements}
        return len({e.id for e in a_elements} - xids)
    red = SpanReducer(backend.ambient_dim)
    for row in _payload_rows(x_elements, backend):
        red.add(row)
    grow = 0
    for row in _payload_rows(a_elements, backend):
        if red.add(row):
            grow += 1
    return grow


def acl_in(a_elements, m_elements, backend: Backend):
    """Trace of the algebraic closure of A inside the finite ambient M."""
    a_elements = list(a_elements)
    m_elements = list(m_elements)
    a_ids = {e.id for e in a_elements}
    m_ids = {e.id for e in m_elements}
    if not a_ids <= m_ids:
        raise InputError(f"acl_in needs A within the ambient, extra ids {sorted(a_ids - m_ids)}")
    if backend.kind == FREE:
        return [e for e in m_elements if e.id in a_ids]
    red = SpanReducer(backend.ambient_dim)
    for row in _payload_rows(a_elements, backend):
        red.add(row)
    return [e for e in m_elements if red.contains(int_row(e.vec))]


def dim_independent(y_elements, z_elements, x_elements, backend: Backend) -> bool:
    """True iff dim(Y/X) = dim(Y/XZ)."""
    y_elements = list(y_elements)
    z_elements = list(z_elements)
    x_elements = list(x_elements)
    return rel_rank(y_elements, x_elements, backend) == rel_rank(
        y_elements, x_elements + z_elements, backend
    )
