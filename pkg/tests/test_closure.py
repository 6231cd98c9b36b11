import itertools
from fractions import Fraction as F

import pytest

from bicolor.closure import (
    big_cl,
    closed_with_witness,
    closure,
    closure_n,
    closure_with_steps,
    d_independent,
    d_independent_report,
    d_value,
    intrinsic_tower,
    is_closed,
    is_intrinsic,
    is_minimal_pair,
)
from bicolor.colored import ColoredStructure, delta, in_k_plus
from bicolor.errors import NotInKPlus
from bicolor.exactnum import PreDimValue, compare
from bicolor.pregeom import Backend, GroundElement, LINEAR

from conftest import (
    ALL_ALPHAS,
    ALPHA_HALF,
    ALPHA_ONE,
    ALPHA_TWO_THIRDS,
    brute_closure,
    brute_d_value,
    brute_is_closed,
    random_k_plus_structure,
)
from test_colored import ge, witness_structure


class TestIsClosed:
    def test_whole_set(self):
        S = witness_structure()
        assert is_closed(S.id_set, S)

    def test_empty_closed_in_k_plus(self):
        assert is_closed([], witness_structure())

    def test_witness(self):
        S = witness_structure()
        ok, w = closed_with_witness(["a"], S)
        assert not ok
        assert w == {"b1", "b2"}
        assert delta(S, w, ["a"]).sign(S.alpha) < 0

    def test_requires_k_plus(self):
        bad = ColoredStructure(
            Backend(LINEAR, 2),
            (ge("x", 0, 1), ge("y", 0, 2)),
            frozenset({"x", "y"}),
            ALPHA_TWO_THIRDS,
        )
        with pytest.raises(NotInKPlus):
            is_closed(["x"], bad)

    def test_oracle(self, rng):
        for i in range(80):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            x = rng.sample(ids, rng.randint(0, len(ids)))
            assert is_closed(x, S) == brute_is_closed(S, x)


class TestClosure:
    def test_empty(self):
        assert closure([], witness_structure()) == frozenset()

    def test_one_step(self):
        got, steps = closure_with_steps(["a"], witness_structure())
        assert got == {"a", "b1", "b2"}
        assert steps == 1

    def test_idempotent(self):
        S = witness_structure()
        c = closure(["a"], S)
        assert closure(c, S) == c

    def test_monotone(self, rng):
        for i in range(40):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            a = set(rng.sample(ids, rng.randint(0, len(ids))))
            b = a | set(rng.sample(ids, rng.randint(0, len(ids))))
            assert closure(a, S) <= closure(b, S)

    def test_oracle_least_closed_superset(self, rng):
        for i in range(60):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=7, max_dim=4)
            ids = list(S.ids_sorted)
            a = rng.sample(ids, rng.randint(0, len(ids)))
            assert closure(a, S) == brute_closure(S, a)

    def test_union_of_finite_subsets(self, rng):
        # closure(A) = union of closures of subsets of A of size <= |A|
        for i in range(20):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=3)
            ids = list(S.ids_sorted)
            a = rng.sample(ids, rng.randint(0, len(ids)))
            whole = closure(a, S)
            parts = set()
            for r in range(len(a) + 1):
                for sub in itertools.combinations(a, r):
                    parts |= closure(sub, S)
            assert parts == whole

    def test_closed_intersection(self, rng):
        for i in range(40):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            x = closure(rng.sample(ids, rng.randint(0, len(ids))), S)
            y = closure(rng.sample(ids, rng.randint(0, len(ids))), S)
            assert is_closed(x & y, S)

    def test_colored_exclusion(self, rng):
        # no colored point of acl(X) minus X for closed X
        from bicolor.pregeom import acl_in

        for i in range(40):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=3)
            ids = list(S.ids_sorted)
            x = closure(rng.sample(ids, rng.randint(0, len(ids))), S)
            trace = {
                e.id
                for e in acl_in(
                    [S.element(i) for i in x], list(S.elements), S.backend
                )
            }
            assert not ((trace - x) & S.colored)


class TestClosureN:
    def test_n_one_is_identity(self):
        S = witness_structure()
        assert closure_n(["a"], S, 1) == {"a"}

    def test_witness_at_three(self):
        S = witness_structure()
        assert closure_n(["a"], S, 3) == {"a", "b1", "b2"}

    def test_all_plain_fixed(self):
        S = ColoredStructure(
            Backend(LINEAR, 2),
            (ge("a", 1, 0), ge("b", 2, 0), ge("c", 0, 1)),
            frozenset(),
            ALPHA_HALF,
        )
        for n in range(4):
            assert closure_n(["a"], S, n) == {"a"}

    def test_union_of_intrinsic_oracle(self, rng):
        # cl(A) equals the union of intrinsic extensions (big enough n)
        for i in range(30):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=3)
            ids = list(S.ids_sorted)
            a = frozenset(rng.sample(ids, rng.randint(0, len(ids))))
            assert closure_n(a, S, len(S) + 1) == closure(a, S)


class TestMinimalPairsIntrinsic:
    def test_witness_pair(self):
        S = witness_structure()
        assert is_minimal_pair(["a"], ["a", "b1", "b2"], S)

    def test_reflexive_not_minimal(self):
        S = witness_structure()
        assert not is_minimal_pair(["a"], ["a"], S)

    def test_intermediate_not_minimal(self):
        S = witness_structure()
        assert not is_minimal_pair(["a"], ["a", "b1"], S)

    def test_intrinsic_examples(self):
        S = witness_structure()
        assert is_intrinsic(["a"], ["a"], S)
        assert is_intrinsic(["a"], ["a", "b1", "b2"], S)
        assert not is_intrinsic(["a"], ["a", "b1"], S)

    def test_tower(self):
        S = witness_structure()
        tower = intrinsic_tower(["a"], ["a", "b1", "b2"], S)
        assert tower[0] == {"a"} and tower[-1] == {"a", "b1", "b2"}
        for lo, hi in zip(tower, tower[1:]):
            assert is_minimal_pair(lo, hi, S)

    def test_minimal_pair_implies_intrinsic(self, rng):
        for i in range(30):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=3, color_p=0.6)
            ids = list(S.ids_sorted)
            a = set(rng.sample(ids, rng.randint(0, max(0, len(ids) - 1))))
            extra = set(rng.sample(sorted(set(ids) - a), rng.randint(0, len(ids) - len(a))))
            b = a | extra
            if is_minimal_pair(a, b, S):
                assert is_intrinsic(a, b, S)


class TestSmoothClassAxioms:
    def test_axioms_on_random_nests(self, rng):
        for i in range(120):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            # (1) empty and whole set closed
            assert is_closed([], S) and is_closed(ids, S)
            z = closure(rng.sample(ids, rng.randint(0, len(ids))), S)
            sub = S.restrict(z)
            y = closure(rng.sample(sorted(z), rng.randint(0, len(z))), sub)
            # (2) transitivity: y closed in z, z closed in S => y closed in S
            assert is_closed(y, S)
            # (3) restriction: y closed in S => y closed in any intermediate
            mid = set(y) | set(rng.sample(ids, rng.randint(0, len(ids))))
            assert is_closed(y, S.restrict(mid))
            # (4) intersecting a closed set with anything is closed there
            w = set(rng.sample(ids, rng.randint(0, len(ids))))
            assert is_closed(set(y) & w, S.restrict(w))


class TestDValue:
    def test_whole_set(self):
        S = witness_structure()
        assert d_value(S.id_set, S) == delta(S, S.id_set)

    def test_witness_example(self):
        S = witness_structure()
        v = d_value(["a"], S)
        assert v.value(S.alpha).render() == "2/3"

    def test_all_plain(self, rng):
        S = ColoredStructure(
            Backend(LINEAR, 2),
            (ge("a", 1, 0), ge("b", 0, 1)),
            frozenset(),
            ALPHA_HALF,
        )
        assert d_value(["a"], S) == PreDimValue(1, 0)

    def test_oracle(self, rng):
        for i in range(60):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            a = rng.sample(ids, rng.randint(0, len(ids)))
            got = d_value(a, S)
            want = brute_d_value(S, a)
            assert compare(got, PreDimValue(*want), S.alpha) == 0

    def test_rational_closure_identity(self, rng):
        # Internally asserted too; re-check the equality explicitly.
        for i in range(40):
            alpha = [ALPHA_ONE, ALPHA_HALF, ALPHA_TWO_THIRDS][i % 3]
            S = random_k_plus_structure(rng, alpha, max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            a = rng.sample(ids, rng.randint(0, len(ids)))
            assert compare(d_value(a, S), delta(S, closure(a, S)), alpha) == 0

    def test_monotone_under_ambient_growth(self, rng):
        for i in range(30):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=5, max_dim=3)
            ids = list(S.ids_sorted)
            a = rng.sample(ids, rng.randint(0, len(ids)))
            before = d_value(a, S)
            grown = S.extended(
                [GroundElement("zz", tuple([F(1)] + [F(0)] * (S.backend.ambient_dim - 1)))]
            )
            if in_k_plus(grown):
                assert compare(d_value(a, grown), before, S.alpha) <= 0


class TestBigCL:
    def test_whole(self):
        S = witness_structure()
        assert big_cl(S.id_set, S) == S.id_set

    def test_witness(self):
        S = witness_structure()
        assert {"b1", "b2"} <= big_cl(["a"], S)

    def test_plain_independent_not_in_cl_empty(self):
        S = ColoredStructure(
            Backend(LINEAR, 1), (ge("x", 1),), frozenset(), ALPHA_HALF
        )
        assert "x" not in big_cl([], S)


class TestDIndependence:
    def test_b_in_z_trivial(self):
        S = witness_structure()
        assert d_independent(["b1"], ["a"], ["a"], S)

    def test_plain_singletons_independent(self):
        S = ColoredStructure(
            Backend(LINEAR, 2),
            (ge("x", 1, 0), ge("y", 0, 1)),
            frozenset(),
            ALPHA_HALF,
        )
        assert d_independent(["x"], ["y"], [], S)

    def test_witness_structure_follows_definition(self):
        # cl({a}) already swallows b1 and b2, so the defining conditions hold
        # over the non-closed base {a}.
        S = witness_structure()
        rep = d_independent_report(["b1"], ["b2"], ["a"], S)
        assert not rep["zClosed"]
        assert rep["independent"]

    def test_parallel_points_dependent(self):
        S = ColoredStructure(
            Backend(LINEAR, 2),
            (ge("x", 0, 1), ge("y", 0, 2)),
            frozenset(),
            ALPHA_HALF,
        )
        assert not d_independent(["x"], ["y"], [], S)

    def test_three_condition_cross_check_runs_clean(self, rng):
        # closed bases exercise the three-condition characterization; any
        # disagreement raises InvariantError and would fail this test.
        for i in range(60):
            S = random_k_plus_structure(rng, ALL_ALPHAS[i % 4], max_n=6, max_dim=4)
            ids = list(S.ids_sorted)
            z = closure(rng.sample(ids, rng.randint(0, len(ids))), S)
            a = rng.sample(ids, rng.randint(0, min(3, len(ids))))
            b = rng.sample(ids, rng.randint(0, min(3, len(ids))))
            rep = d_independent_report(a, b, z, S)
            assert rep["zClosed"]
            assert "threeConditionForm" in rep


class TestFreeBackendClosure:
    def _free(self, colored):
        from bicolor.pregeom import Backend, FREE, GroundElement

        return ColoredStructure(
            Backend(FREE),
            tuple(GroundElement(c) for c in "wxyz"),
            frozenset(colored),
            ALPHA_HALF,
        )

    def test_everything_closed(self):
        S = self._free({"x", "y"})
        assert in_k_plus(S)
        for ids in ([], ["w"], ["x"], ["w", "x", "y", "z"]):
            assert is_closed(ids, S)
            assert closure(ids, S) == frozenset(ids)

    def test_d_value_is_delta(self):
        S = self._free({"x"})
        assert compare(d_value(["x"], S), delta(S, ["x"]), S.alpha) == 0

    def test_no_minimal_pairs(self):
        S = self._free({"x", "y"})
        assert not is_minimal_pair(["w"], ["w", "x", "y"], S)
