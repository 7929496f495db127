import json
import random

import pytest

from tfglab.errors import (
    CertificateError,
    InternalConsistencyError,
    PreconditionError,
)
from tfglab.tfg import (
    Ball,
    GeneratorSet,
    GeneratorWord,
    TfgElement,
    commutator_fW,
    compose,
    compose_all,
    conjugate,
    cylinder_index,
    element_from_json,
    element_from_table,
    evaluate,
    evaluate_word,
    identity,
    inverse,
    is_valid,
    make_fU,
    make_hU,
    make_tau,
    self_overlap,
    shifted_cylinders_disjoint,
    shifted_cylinders_intersect,
    support,
    word_length_ball,
)
from tfglab.words import cylinders, fibonacci_source


def f_cylinders(src, m):
    """Cylinder words admitting f_U (sigma^{-1}U, U, sigma U pairwise disjoint)."""
    return [u for u in cylinders(src, m)
            if shifted_cylinders_disjoint(src, u, (-1, 0, 1))]


def tau_cylinders(src, m):
    return [u for u in cylinders(src, m)
            if shifted_cylinders_disjoint(src, u, (-2, -1, 0, 1, 2))]


def orbit_position_in(src, u, lo=0, hi=4000):
    """Some n with sigma^n x in the cylinder of u."""
    m = len(u) // 2
    text = src.window(lo - m, hi + m)
    k = text.find(u)
    assert k >= 0
    return lo + k + m - m  # start index lo - m maps to k = 0; center at lo + k


class TestOverlapTests:
    def test_fib_one_cylinders(self, fib):
        # by hand: "aba" self-overlaps at 2 via "ababa"; "aab", "baa", "bab" do not
        assert sorted(f_cylinders(fib, 1)) == ["aab", "baa", "bab"]
        assert self_overlap(fib, "aba", 2)
        assert not self_overlap(fib, "bab", 2)  # "babab" is not a factor

    def test_periodic_overlap(self):
        from tfglab.words import PeriodicSource
        src = PeriodicSource("ab")
        assert self_overlap(src, "aba", 2)
        assert not shifted_cylinders_disjoint(src, "aba", (-1, 0, 1))

    def test_intersection_of_shifted_cylinders(self, fib):
        # sigma^0("aab") vs sigma^0("aab") trivially intersect
        assert shifted_cylinders_intersect(fib, "aab", 0, "aab", 0)
        # "aab" and "bab" cylinders are disjoint at shift 0 (different centers)
        assert not shifted_cylinders_intersect(fib, "aab", 0, "bab", 0)


class TestEvaluate:
    def test_identity(self, fib):
        assert evaluate(identity(fib), 17) == 17

    def test_fU_moves_by_one_on_U(self, fib):
        u = "aab"
        f = make_fU(fib, u)
        n = orbit_position_in(fib, u)
        assert fib.window(n - 1, n + 1) == u
        assert evaluate(f, n) == n + 1

    def test_fU_fixes_outside_support(self, fib):
        u = "aab"
        f = make_fU(fib, u)
        sup = support(f)
        for n in range(0, 60):
            w = fib.window(n - sup.precision, n + sup.precision)
            if w not in sup.cylinders:
                assert evaluate(f, n) == n

    def test_inverse_roundtrip(self, fib):
        f = make_fU(fib, "aab")
        g = inverse(f)
        rng = random.Random(1)
        for _ in range(100):
            n = rng.randrange(-50, 2000)
            assert evaluate(g, evaluate(f, n)) == n

    def test_respects_composition(self, fib):
        f = make_fU(fib, "aab")
        h = make_hU(fib, "baa")
        fh = compose(f, h)
        for n in range(-20, 120):
            assert evaluate(fh, n) == evaluate(f, evaluate(h, n))


class TestGroupLaws:
    def test_compose_identity(self, fib):
        f = make_fU(fib, "bab")
        assert compose(f, identity(fib)) == f
        assert compose(identity(fib), f) == f

    def test_inverse_laws(self, fib):
        f = make_fU(fib, "aab")
        assert compose(f, inverse(f)) == identity(fib)
        assert compose(inverse(f), f) == identity(fib)
        assert inverse(identity(fib)) == identity(fib)

    def test_inverse_preserves_bound(self, fib):
        for u in f_cylinders(fib, 2):
            f = make_fU(fib, u)
            assert inverse(f).bound == f.bound

    def test_bound_subadditive(self, fib):
        f = make_fU(fib, "aab")
        h = make_hU(fib, "baa")
        assert compose(f, h).bound <= f.bound + h.bound

    def test_fU_order_three(self, fib):
        for u in f_cylinders(fib, 2):
            f = make_fU(fib, u)
            assert compose_all([f, f, f]) == identity(fib)
            assert compose(f, f) == inverse(f)

    def test_associativity_random_triples(self, fib):
        gens = [make_fU(fib, u) for u in f_cylinders(fib, 2)]
        gens += [make_hU(fib, u) for u in cylinders(fib, 2)
                 if not self_overlap(fib, u, 1)]
        rng = random.Random(7)
        for _ in range(100):
            a, b, c = (rng.choice(gens) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))


class TestSpecialElements:
    def test_h_involution(self, fib):
        for u in cylinders(fib, 2):
            if self_overlap(fib, u, 1):
                continue
            h = make_hU(fib, u)
            assert compose(h, h) == identity(fib)

    def test_h_support(self, fib):
        u = "aab"   # radius 1
        h = make_hU(fib, u)
        big = 3     # refine: canonical support can be coarser than the defining window
        sup = support(h).refine(fib, big)
        for w in cylinder_index(fib, big)[0]:
            # w's cylinder lies in sigma^s(U) iff the shifted central slice is u
            member = any(w[big - 1 - s: big + 1 - s + 1] == u for s in (-1, 0))
            assert (w in sup.cylinders) == member

    def test_f_equals_commutator_with_h(self, fib):
        # f_U = f_U^{-1} h_U^{-1} f_U h_U on 20 sampled cylinders
        rng = random.Random(3)
        pool = [u for m in (2, 3, 4) for u in f_cylinders(fib, m)]
        for _ in range(20):
            u = rng.choice(pool)
            f = make_fU(fib, u)
            h = make_hU(fib, u)
            rhs = compose_all([inverse(f), inverse(h), f, h])
            assert rhs == f

    def test_fU_support(self, fib):
        u = "aab"
        f = make_fU(fib, u)
        big = 3
        sup = support(f).refine(fib, big)
        for w in cylinder_index(fib, big)[0]:
            member = any(w[big - 1 - s: big + 1 - s + 1] == u for s in (-1, 0, 1))
            assert (w in sup.cylinders) == member

    def test_tau_conjugation(self, fib):
        # tau_V f_U tau_V^{-1} = f_{sigma(U)} and inverse conjugation for U inside V
        count = 0
        for mv in (2, 3):
            for v in tau_cylinders(fib, mv):
                for mu in (mv + 1, mv + 2):
                    for u in f_cylinders(fib, mu):
                        if u[mu - mv: mu + mv + 1] != v:
                            continue
                        tau = make_tau(fib, v)
                        f = make_fU(fib, u)
                        assert conjugate(tau, f) == make_fU(fib, u, +1)
                        assert conjugate(inverse(tau), f) == make_fU(fib, u, -1)
                        count += 1
        assert count >= 4

    def test_tau_rejects_bad_disjointness(self, fib):
        with pytest.raises(PreconditionError):
            make_tau(fib, "aba")   # "ababa" overlap breaks |i| <= 2 disjointness

    def test_commutator_fW(self, fib):
        hits = 0
        for m in (2, 3):
            for u in f_cylinders(fib, m):
                for v in f_cylinders(fib, m):
                    try:
                        elem, w = commutator_fW(fib, u, v)
                    except PreconditionError:
                        continue
                    if w is not None:
                        assert elem == make_fU(fib, w)
                        hits += 1
                    else:
                        assert elem.is_identity()
        assert hits >= 1


class TestValidity:
    def test_identity_table(self, fib):
        words, _ = cylinder_index(fib, 1)
        ok, cert = is_valid(fib, 1, {w: 0 for w in words})
        assert ok and cert.valid

    def test_fU_table(self, fib):
        f = make_fU(fib, "aab")
        ok, _ = is_valid(fib, f.precision, f.table())
        assert ok

    def test_non_injective_table_rejected(self, fib):
        # shift a single cylinder forward: its image collides with a fixed point
        m = 2
        words, _ = cylinder_index(fib, m)
        u = f_cylinders(fib, m)[0]
        table = {w: (1 if w == u else 0) for w in words}
        ok, cert = is_valid(fib, m, table)
        assert not ok
        assert cert.witness

    def test_element_from_table_checks(self, fib):
        m = 2
        words, _ = cylinder_index(fib, m)
        u = f_cylinders(fib, m)[0]
        table = {w: (1 if w == u else 0) for w in words}
        with pytest.raises(CertificateError):
            element_from_table(fib, m, table)

    def test_incomplete_domain_rejected(self, fib):
        with pytest.raises(PreconditionError):
            element_from_table(fib, 1, {"aab": 0})


class TestSerialization:
    def test_roundtrip(self, fib):
        f = make_fU(fib, "aab")
        g = element_from_json(fib, f.to_json())
        assert g == f

    def test_json_shape(self, fib):
        data = json.loads(make_hU(fib, "baa").to_json())
        assert set(data) == {"precision", "entries"}
        assert all(set(e) == {"word", "shift"} for e in data["entries"])


class TestBall:
    def make_gens(self, fib):
        named = [(f"f({u})", make_fU(fib, u)) for u in f_cylinders(fib, 1)]
        named += [(f"h({u})", make_hU(fib, u)) for u in cylinders(fib, 1)
                  if not self_overlap(fib, u, 1)]
        return GeneratorSet(fib, named)

    def test_ball_zero(self, fib):
        gens = self.make_gens(fib)
        ball = word_length_ball(gens, 0)
        assert len(ball) == 1
        assert ball.entries[0][0] == identity(fib)

    def test_ball_one_count(self, fib):
        gens = self.make_gens(fib)
        ball = word_length_ball(gens, 1)
        assert len(ball) <= 2 * len(gens) + 1

    def test_word_evaluation_matches(self, fib):
        gens = self.make_gens(fib)
        ball = word_length_ball(gens, 2)
        for elem, length, word in ball.entries:
            assert len(word) == length
            assert evaluate_word(gens, word) == elem

    def test_growth_consistent_with_exponential(self, fib):
        gens = self.make_gens(fib)
        sizes = [len(word_length_ball(gens, n)) for n in range(4)]
        for a, b in zip(sizes, sizes[1:]):
            assert b >= 2 * a

    def test_budget(self, fib):
        from tfglab.errors import BudgetError
        gens = self.make_gens(fib)
        with pytest.raises(BudgetError) as exc:
            word_length_ball(gens, 3, ball_limit=10)
        assert isinstance(exc.value.partial, Ball)
        assert not exc.value.partial.complete


class TestGeneratorWord:
    def test_inverse(self):
        w = GeneratorWord((("a", 1), ("b", -1)))
        assert w.inverse().letters == (("b", 1), ("a", -1))
        assert (w * w.inverse()).letters[0] == ("a", 1)

    def test_strings(self):
        w = GeneratorWord((("a", 1), ("b", -1)))
        assert w.as_strings() == ["a", "b^-1"]
