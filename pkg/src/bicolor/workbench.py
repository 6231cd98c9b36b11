"""File formats, the extension-task catalog, richness audits, and the builder.

The structure file is canonical JSON (sorted keys, no whitespace, trailing
newline): saving what was loaded reproduces the bytes.  Audits are the finite
stand-in for richness: for every catalog task A <= B and every strong
embedding of A into the structure (capped, deterministically enumerated) they
search for a strong extension of B and report per-task outcomes.  The builder
round-robins over audit failures and repairs each one by a free amalgamation
over the (closed) embedded image.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass
from fractions import Fraction

from .amalgam import free_amalgam, verify_free
from .closure import closure_n, is_closed
from .colored import (
    ColoredStructure,
    EmbeddingMap,
    empty_structure,
    ensure_k_plus,
    in_k_plus,
    is_lp_embedding,
)
from .construct import _grow_patch
from .errors import (
    BudgetExceeded,
    InputError,
    InvariantError,
    NotClosed,
    NotTranscendental,
    SchemaError,
)
from .exactnum import Alpha, dirichlet_window, rational_pair
from .pregeom import FREE, LINEAR, Backend, GroundElement
from .report import canonical_dumps

CATALOG_VERSION = "catalog-v1"
EMBEDDING_CAP = 200


# -- canonical structure files ------------------------------------------------


_RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")


def _parse_fraction(text, where: str) -> Fraction:
    if not isinstance(text, str):
        raise SchemaError(f"{where}: rational must be a string, got {type(text).__name__}")
    if not _RATIONAL_RE.match(text):
        raise SchemaError(f"{where}: cannot parse rational {text!r}")
    return Fraction(text)


def structure_to_obj(S: ColoredStructure) -> dict:
    backend: dict = {"kind": S.backend.kind}
    if S.backend.kind == LINEAR:
        backend["ambientDim"] = S.backend.ambient_dim
    elements = []
    for e in S.elements:
        item: dict = {"id": e.id, "colored": e.id in S.colored}
        if S.backend.kind == LINEAR:
            item["vec"] = [str(x) for x in e.vec]
        elements.append(item)
    return {"alpha": S.alpha.to_json(), "backend": backend, "elements": elements}


def structure_from_obj(obj) -> ColoredStructure:
    if not isinstance(obj, dict):
        raise SchemaError("structure file must be a JSON object")
    for key in ("alpha", "backend", "elements"):
        if key not in obj:
            raise SchemaError(f"missing field {key!r}")
    alpha = Alpha.from_json(obj["alpha"])
    backend_obj = obj["backend"]
    if not isinstance(backend_obj, dict) or "kind" not in backend_obj:
        raise SchemaError("backend: must be an object with a 'kind'")
    kind = backend_obj["kind"]
    if kind == LINEAR:
        dim = backend_obj.get("ambientDim")
        if not isinstance(dim, int) or dim < 0:
            raise SchemaError("backend.ambientDim: must be a natural number")
        backend = Backend(LINEAR, dim)
    elif kind == FREE:
        backend = Backend(FREE)
    else:
        raise SchemaError(f"backend.kind: unknown {kind!r}")
    if not isinstance(obj["elements"], list):
        raise SchemaError("elements: must be a list")
    elements = []
    colored = set()
    for i, item in enumerate(obj["elements"]):
        where = f"elements[{i}]"
        if not isinstance(item, dict) or "id" not in item:
            raise SchemaError(f"{where}: must be an object with an 'id'")
        eid = item["id"]
        if not isinstance(eid, str):
            raise SchemaError(f"{where}.id: must be a string")
        if kind == LINEAR:
            vec = item.get("vec")
            if not isinstance(vec, list):
                raise SchemaError(f"{where}.vec: required for the linear backend")
            payload = tuple(
                _parse_fraction(x, f"{where}.vec[{j}]") for j, x in enumerate(vec)
            )
        else:
            if "vec" in item:
                raise SchemaError(f"{where}.vec: forbidden for the free backend")
            payload = None
        if item.get("colored"):
            colored.add(eid)
        elements.append(GroundElement(eid, payload))
    return ColoredStructure(backend, tuple(elements), frozenset(colored), alpha)


def dumps(S: ColoredStructure) -> str:
    return canonical_dumps(structure_to_obj(S))


def loads(text: str) -> ColoredStructure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return structure_from_obj(obj)


def save(S: ColoredStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(S))


def load(path) -> ColoredStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# -- extension tasks ------------------------------------------------------------


@dataclass
class ExtensionTask:
    """A closed pair small <= big: the unit of every richness question."""

    task_id: str
    small: ColoredStructure
    big: ColoredStructure
    kind: str
    algebraic_split: frozenset[str]
    catalog: str = CATALOG_VERSION


def _classify(big: ColoredStructure, small_ids) -> tuple[str, frozenset]:
    red = big.reducer_for(small_ids)
    algebraic = set()
    transcendental = set()
    for eid in big.id_set - set(small_ids):
        if any(red.residual(big.introw(eid))):
            transcendental.add(eid)
        else:
            algebraic.add(eid)
    split = frozenset(set(small_ids) | algebraic)
    if not algebraic and transcendental:
        return "transcendental", split
    if not transcendental and algebraic:
        return "algebraic", split
    if not transcendental and not algebraic:
        return "algebraic", split
    return "mixed", split


def make_task(task_id: str, big: ColoredStructure, small_ids, catalog=CATALOG_VERSION) -> ExtensionTask:
    small_ids = big.check_ids(small_ids)
    ensure_k_plus(big)
    if not is_closed(small_ids, big):
        raise InvariantError(f"task {task_id!r}: small side is not closed in the big side")
    kind, split = _classify(big, small_ids)
    return ExtensionTask(
        task_id=task_id,
        small=big.restrict(small_ids),
        big=big,
        kind=kind,
        algebraic_split=split,
        catalog=catalog,
    )


def _point_structure(alpha: Alpha, colored: bool) -> ColoredStructure:
    S = empty_structure(alpha, ambient=1)
    return S.extended(
        [GroundElement("x1", (Fraction(1),))], new_colored=("x1",) if colored else ()
    )


def _parallel_structure(alpha: Alpha, colors: tuple[bool, bool], scale=2) -> ColoredStructure:
    S = empty_structure(alpha, ambient=1)
    names = ("x1", "x2")
    vecs = ((Fraction(1),), (Fraction(scale),))
    colored = tuple(n for n, c in zip(names, colors) if c)
    return S.extended(
        [GroundElement(n, v) for n, v in zip(names, vecs)], new_colored=colored
    )


def task_catalog(alpha: Alpha, size_budget: int) -> list[ExtensionTask]:
    """Deterministic catalog of extension tasks within the size budget.

    Point additions, parallel pairs, and one patch task: the rational-pair
    patch at t = 0 for rational alpha, the Dirichlet patch at epsilon = 1/4
    for irrational alpha.  Budget caps both |B| and the ambient dimension.
    """
    if size_budget < 0:
        raise InputError("size budget must be a natural number")
    if size_budget > 5:
        raise BudgetExceeded("task catalog is capped at size budget 5")
    tasks: list[ExtensionTask] = []
    if size_budget >= 1:
        tasks.append(make_task("plain-point", _point_structure(alpha, False), ()))
        tasks.append(make_task("colored-point", _point_structure(alpha, True), ()))
    if size_budget >= 2:
        tasks.append(
            make_task("parallel-plain-plain", _parallel_structure(alpha, (False, False)), ())
        )
        tasks.append(
            make_task("parallel-plain-colored", _parallel_structure(alpha, (False, True)), ())
        )
        two_colored = _parallel_structure(alpha, (True, True))
        if in_k_plus(two_colored):
            tasks.append(make_task("parallel-colored-colored", two_colored, ()))
        # The algebraic extension task duplicates the payload exactly: a
        # scaled partner would demand an unbounded doubling chain from the
        # builder, whereas each duplicate is its own partner's witness.
        tasks.append(
            make_task(
                "parallel-ext-plain",
                _parallel_structure(alpha, (False, False), scale=1),
                ("x1",),
            )
        )
    pair = None
    patch_name = None
    if alpha.is_rational:
        if alpha.num < alpha.den:
            pair = rational_pair(alpha, 0)
            patch_name = "patch-ratmin-t0"
    else:
        pair = dirichlet_window(alpha, Fraction(1, 4))
        patch_name = "patch-dirichlet-q4"
    if pair is not None and 1 + pair.k <= size_budget and 1 + pair.s <= size_budget:
        anchor = empty_structure(alpha, ambient=1).extended(
            [GroundElement("a1", (Fraction(1),))]
        )
        big, _ = _grow_patch(anchor, {"a1"}, pair.s, pair.k, colored=True)
        tasks.append(make_task(patch_name, big, ()))
    return tasks


# -- audits ----------------------------------------------------------------------


@dataclass
class EmbeddingOutcome:
    image: tuple[str, ...]
    extended: bool
    extension: dict | None

    def to_json(self) -> dict:
        return {
            "image": list(self.image),
            "extended": self.extended,
            "extension": self.extension,
        }


@dataclass
class TaskAudit:
    task_id: str
    tried: int
    outcomes: list[EmbeddingOutcome]

    @property
    def all_extended(self) -> bool:
        return all(o.extended for o in self.outcomes)

    def to_json(self) -> dict:
        return {
            "task": self.task_id,
            "tried": self.tried,
            "outcomes": [o.to_json() for o in self.outcomes],
            "extended": self.all_extended,
        }


@dataclass
class AuditReport:
    passed: bool
    tasks: list[TaskAudit]
    catalog: str = CATALOG_VERSION
    cap: int = EMBEDDING_CAP
    alpha_kind: str = "rational"

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "catalog": self.catalog,
            "cap": self.cap,
            "alphaKind": self.alpha_kind,
            "tasks": [t.to_json() for t in self.tasks],
        }


def _strong_embeddings(small: ColoredStructure, S: ColoredStructure, cap: int):
    """Strong embeddings of `small` into S, by sorted image-id tuples."""
    domain = small.ids_sorted
    found = []
    for image in itertools.permutations(S.ids_sorted, len(domain)):
        f = EmbeddingMap(tuple(zip(domain, image)))
        if not is_lp_embedding(f, small, S):
            continue
        if not is_closed(f.image, S):
            continue
        found.append(f)
        if len(found) >= cap:
            break
    return found


def _extend_embedding(task: ExtensionTask, f: EmbeddingMap, S: ColoredStructure, strong=True):
    """Least (lex over assignment tuples) extension of f to the big side,
    strong when `strong`; None when none exists."""
    fresh = [i for i in task.big.ids_sorted if i not in task.small.id_set]
    base_pairs = f.pairs

    def compatible(assigned):
        pairs = base_pairs + tuple(zip(fresh[: len(assigned)], assigned))
        dom = [a for a, _ in pairs]
        sub = task.big.restrict(dom)
        return is_lp_embedding(EmbeddingMap(pairs), sub, S)

    def dfs(assigned, used):
        if len(assigned) == len(fresh):
            g = EmbeddingMap(base_pairs + tuple(zip(fresh, assigned)))
            if strong and not is_closed(g.image, S):
                return None
            return g
        for cand in S.ids_sorted:
            if cand in used:
                continue
            trial = assigned + [cand]
            if compatible(trial):
                got = dfs(trial, used | {cand})
                if got is not None:
                    return got
        return None

    return dfs([], set(f.image))


def audit_richness(S: ColoredStructure, size_budget: int, cap: int = EMBEDDING_CAP) -> AuditReport:
    """For every catalog task and strong embedding of its small side, search
    for a strong extension of the big side; pass iff every one extends."""
    ensure_k_plus(S)
    audits = []
    for task in task_catalog(S.alpha, size_budget):
        outcomes = []
        embeddings = _strong_embeddings(task.small, S, cap)
        for f in embeddings:
            g = _extend_embedding(task, f, S)
            outcomes.append(
                EmbeddingOutcome(
                    image=tuple(b for _, b in f.pairs),
                    extended=g is not None,
                    extension=g.to_json() if g is not None else None,
                )
            )
        audits.append(TaskAudit(task_id=task.task_id, tried=len(embeddings), outcomes=outcomes))
    passed = all(t.all_extended for t in audits)
    return AuditReport(
        passed=passed, tasks=audits, cap=cap, alpha_kind=S.alpha.kind
    )


@dataclass
class SemiGenericReport:
    passed: bool
    tried: int
    witness: dict | None

    def to_json(self) -> dict:
        return {"pass": self.passed, "tried": self.tried, "witness": self.witness}


def audit_semi_generic(
    S: ColoredStructure, f: EmbeddingMap, B: ColoredStructure, n: int, cap: int = EMBEDDING_CAP
) -> SemiGenericReport:
    """Search for an extension fhat of f with
    cl^n(fhat(B)) = fhat(B) u cl^n(f(A)), free over f(A)."""
    a_ids = B.check_ids(f.domain)
    ensure_k_plus(B)
    ensure_k_plus(S)
    if not is_closed(a_ids, B):
        raise NotClosed("the embedded side is not closed in its extension")
    red = B.reducer_for(a_ids)
    if not all(any(red.residual(B.introw(i))) for i in B.id_set - a_ids):
        raise NotTranscendental("extension must be transcendental over the base")
    small = B.restrict(a_ids)
    if not (is_lp_embedding(f, small, S) and is_closed(f.image, S)):
        raise NotClosed("the given embedding is not strong into the structure")
    task = ExtensionTask(
        task_id="semi-generic",
        small=small,
        big=B,
        kind="transcendental",
        algebraic_split=frozenset(a_ids),
    )
    cl_a = closure_n(f.image, S, n)
    tried = 0
    fresh = [i for i in B.ids_sorted if i not in a_ids]
    base_pairs = f.pairs

    def candidates(assigned, used):
        for cand in S.ids_sorted:
            if cand in used:
                continue
            pairs = base_pairs + tuple(zip(fresh[: len(assigned) + 1], assigned + [cand]))
            dom = [x for x, _ in pairs]
            if is_lp_embedding(EmbeddingMap(pairs), B.restrict(dom), S):
                yield cand

    def dfs(assigned, used):
        nonlocal tried
        if len(assigned) == len(fresh):
            tried += 1
            if tried > cap:
                return "cap"
            g = EmbeddingMap(base_pairs + tuple(zip(fresh, assigned)))
            image = set(g.image)
            cl_b = closure_n(image, S, n)
            if cl_b == image | cl_a and verify_free(S, image, cl_a, f.image):
                return g
            return None
        for cand in candidates(assigned, used):
            got = dfs(assigned + [cand], used | {cand})
            if got == "cap":
                return "cap"
            if got is not None:
                return got
        return None

    got = dfs([], set(f.image))
    if got in (None, "cap"):
        return SemiGenericReport(passed=False, tried=min(tried, cap), witness=None)
    return SemiGenericReport(passed=True, tried=tried, witness=got.to_json())


# -- the bounded generic builder ---------------------------------------------------


def _rename_structure(S: ColoredStructure, mapping: dict) -> ColoredStructure:
    elements = tuple(
        GroundElement(mapping.get(e.id, e.id), e.vec) for e in S.elements
    )
    colored = frozenset(mapping.get(i, i) for i in S.colored)
    return ColoredStructure(S.backend, elements, colored, S.alpha)


def build_generic(
    seed: ColoredStructure,
    steps: int,
    size_budget: int,
    rng_seed: int,
    max_ambient: int = 256,
) -> ColoredStructure:
    """Iterated free amalgamation repairing audit failures round-robin.

    Fully deterministic given rng_seed (used only to shuffle the repair
    order); stops early if the audit comes back clean.
    """
    ensure_k_plus(seed)
    S = seed
    rng = random.Random(rng_seed)
    tasks = {t.task_id: t for t in task_catalog(seed.alpha, size_budget)}
    queue: list[tuple[str, tuple[str, ...]]] = []
    performed = 0
    while performed < steps:
        if not queue:
            report = audit_richness(S, size_budget)
            queue = [
                (t.task_id, o.image)
                for t in report.tasks
                for o in t.outcomes
                if not o.extended
            ]
            if not queue:
                break
            rng.shuffle(queue)
        task_id, image = queue.pop(0)
        task = tasks[task_id]
        f = EmbeddingMap(tuple(zip(task.small.ids_sorted, image)))
        if _extend_embedding(task, f, S) is not None:
            continue  # repaired incidentally by an earlier amalgam
        complement = [i for i in task.big.ids_sorted if i not in task.small.id_set]
        renamed = _rename_structure(
            task.big, {i: f"s{performed}_{i}" for i in complement}
        )
        match = EmbeddingMap(tuple(zip(image, task.small.ids_sorted)))
        result = free_amalgam(S, renamed, frozenset(image), task.small.id_set, match)
        S = result.structure
        performed += 1
        if S.backend.kind == LINEAR and S.backend.ambient_dim > max_ambient:
            raise BudgetExceeded(
                f"ambient dimension {S.backend.ambient_dim} exceeds budget {max_ambient}"
            )
    return S
