import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cantorspec.measure import MeasureParams
from cantorspec.tree import (FiniteTrie, NotRegular, RuleTreeMapping, TreeMappingError,
                             enumerate_lambda, format_word, make_kappa, make_symbol_mapping,
                             make_tau24, make_trie, nonzero_ending, parse_word, pi_inf, pi_n,
                             strip_zeros, trie_from_json, trie_to_json, validate_tree_mapping,
                             words, words_upto)


def kappa_labels_oracle(q, b, stem):
    """Labels at levels 1..2n+2b-1 of stem 0^inf, built straight from the rule."""
    n = len(stem)
    prefix = []
    for i in range(1, n + 1):
        s = strip_zeros(stem[:i])
        if not s:
            prefix.append(0)
        elif len(s) == i:
            prefix.append(stem[i - 1])
        else:
            prefix.append(kappa_labels_oracle(q, b, s)[i - 1])
    if stem[-1] == 0:
        return prefix
    before = sum(prefix[:-1])
    K = next(k for k in range(b - 1) if (before + q * (k + 1) + stem[-1]) % (b - 1) == 0)
    far = 2 * n + 2 * b - 1
    tail = [q if (m <= n + K or m == far) else 0 for m in range(n + 1, far + 1)]
    return prefix + tail


class TestWords:
    def test_parse(self):
        assert parse_word("0110", 2) == (0, 1, 1, 0)
        assert parse_word("", 2) == ()
        with pytest.raises(ValueError):
            parse_word("2", 2)
        with pytest.raises(ValueError):
            parse_word("1a", 3)

    def test_format_roundtrip(self):
        assert format_word(parse_word("2101", 3)) == "2101"

    def test_counts(self):
        assert len(list(words(3, 4))) == 81
        assert len(list(words_upto(2, 3))) == 14
        assert all(w[-1] != 0 for w in nonzero_ending(3, 3))
        assert len(list(nonzero_ending(3, 3))) == 18

    def test_strip(self):
        assert strip_zeros((1, 0, 1, 0, 0)) == (1, 0, 1)
        assert strip_zeros((0, 0)) == ()


class TestValidation:
    def test_tau24_valid(self, tau24):
        r = validate_tree_mapping(tau24, 10)
        assert r.valid and r.maximal_at_depth

    def test_label_on_zero_word(self, p24):
        bad = RuleTreeMapping(p24, lambda w: 1 if w == (0,) else w[-1])
        r = validate_tree_mapping(bad, 4)
        assert not r.valid and r.violation[:2] == ("0", "i")

    def test_label_on_double_zero(self, p24):
        bad = RuleTreeMapping(p24, lambda w: 2 if w == (0, 0) else w[-1])
        r = validate_tree_mapping(bad, 4)
        assert not r.valid and r.violation[:2] == ("00", "i")

    def test_congruence_clause(self, p24):
        bad = RuleTreeMapping(p24, lambda w: 2 if w == (1, 1) else w[-1])
        r = validate_tree_mapping(bad, 4)
        assert r.violation[:2] == ("11", "ii")

    def test_range_clause(self, p24):
        bad = RuleTreeMapping(p24, lambda w: 3 if w == (1,) else w[-1])
        assert validate_tree_mapping(bad, 3).violation[:2] == ("1", "range")

    def test_rejects_depth(self, tau24):
        with pytest.raises(ValueError):
            validate_tree_mapping(tau24, 0)

    def test_kappa_valid(self, kappa26):
        r = validate_tree_mapping(kappa26, 12)
        assert r.valid and r.maximal_at_depth


class TestBranchSums:
    def test_examples(self, tau24, kappa26):
        assert pi_n(tau24, (1, 0, 1), 3) == 17
        assert pi_n(tau24, (0, 0, 0), 3) == 0
        assert pi_n(kappa26, (1,), 2) == 13
        assert pi_inf(tau24, (1, 1)) == 5
        assert pi_inf(kappa26, (1,)) == 4353564685
        assert 4353564685 % 5 == 0

    def test_not_regular(self, p24):
        endless = RuleTreeMapping(p24, lambda w: w[-1] if w[-1] else 2)
        r = pi_inf(endless, (1,), depth=20)
        assert isinstance(r, NotRegular) and not r
        assert r.deepest_nonzero == 20

    def test_pi_n_rejects(self, tau24):
        with pytest.raises(ValueError):
            pi_n(tau24, (1,), 0)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_injective(self, tau24, kappa26, n):
        for t in (tau24, kappa26):
            vals = {pi_n(t, w, n) for w in words(2, n)}
            assert len(vals) == 2 ** n

    @pytest.mark.parametrize("make", [make_tau24, lambda: make_kappa(MeasureParams(2, 6))])
    def test_range_and_congruence(self, make):
        t = make()
        b, q = t.params.b, t.params.q
        for n in range(1, 8):
            lo, hi = -(b ** n - 1) // (b - 1), (b - 2) * (b ** n - 1) // (b - 1)
            for w in words(q, n):
                v = pi_n(t, w, n)
                assert lo <= v <= hi
                # base-b digits of v read back the labels, which match symbols mod q
                for k in range(1, n + 1):
                    assert (t.label(w[:k]) - w[k - 1]) % q == 0


class TestKappa:
    def test_k_example(self, kappa26):
        assert kappa26.k_of((1,)) == 1
        with pytest.raises(ValueError):
            kappa26.k_of((1, 0))

    @pytest.mark.parametrize("q,b", [(2, 6), (2, 8), (3, 6)])
    def test_matches_oracle(self, q, b):
        t = make_kappa(MeasureParams(q, b))
        for n in range(1, 5):
            for stem in nonzero_ending(q, n):
                want = kappa_labels_oracle(q, b, stem)
                got = [t.label(stem + (0,) * (lvl - n)) if lvl > n else t.label(stem[:lvl])
                       for lvl in range(1, len(want) + 1)]
                assert got == want, stem
                assert t.label(stem + (0,) * (len(want) + 3 - n)) == 0

    @pytest.mark.parametrize("q,b", [(2, 6), (2, 8), (3, 6)])
    def test_sum_rule(self, q, b):
        t = make_kappa(MeasureParams(q, b))
        for n in range(1, 6):
            for stem in nonzero_ending(q, n):
                v = pi_inf(t, stem)
                assert v % (b - 1) == 0
                labels = kappa_labels_oracle(q, b, stem)
                assert sum(labels) % (b - 1) == 0

    def test_rejects_small_base(self, p24):
        # with b >= 2q, b > 4 already forces q <= b - 3
        with pytest.raises(ValueError):
            make_kappa(p24)

    def test_hooks(self, kappa26):
        assert kappa26.analytic_gap_sup() == 5
        assert kappa26.zero_from((1,)) == 13


class TestEnumerate:
    def test_tau24(self, tau24):
        assert list(enumerate_lambda(tau24, 2)) == [0, 1, 4, 5]
        assert list(enumerate_lambda(tau24, 1)) == [0, 1]
        assert list(enumerate_lambda(tau24, 0)) == [0]

    def test_kappa_level_one(self, kappa26):
        assert list(enumerate_lambda(kappa26, 1)) == [0, 4353564685]

    def test_tau24_is_lambda4(self, tau24):
        want = sorted(sum(d * 4 ** k for k, d in enumerate(w)) for w in words(2, 8))
        assert list(enumerate_lambda(tau24, 8)) == want

    def test_nested(self, kappa26):
        small = set(enumerate_lambda(kappa26, 3))
        assert small <= set(enumerate_lambda(kappa26, 4))

    def test_unknown_words_reported(self, p24):
        endless = RuleTreeMapping(p24, lambda w: w[-1] if w[-1] else 2)
        lam = enumerate_lambda(endless, 2, depth=16)
        assert not lam.complete and (1, 0) in lam.unknown

    def test_rejects(self, tau24):
        with pytest.raises(ValueError):
            enumerate_lambda(tau24, -1)
        with pytest.raises(ValueError):
            enumerate_lambda(tau24, 5, depth=3)


class TestTrie:
    def test_empty_table_is_symbol_mapping(self, p24):
        t = make_trie(p24, {})
        assert t.label((0, 1, 1, 0)) == 0
        assert t.label((0, 1, 1)) == 1
        assert list(enumerate_lambda(t, 2)) == [0, 1, 4, 5]

    def test_clause_violations(self, p24):
        with pytest.raises(TreeMappingError) as e:
            make_trie(p24, {"00": 2})
        assert e.value.clause == "i"
        with pytest.raises(TreeMappingError) as e:
            make_trie(p24, {"1": 2})
        assert e.value.clause == "ii"
        with pytest.raises(TreeMappingError):
            make_trie(p24, {"1": 3})
        with pytest.raises(ValueError):
            make_trie(p24, {"2": 0})

    def test_json_roundtrip(self, p24):
        t = make_trie(p24, {"1": -1, "11": 1, "10": 2})
        text = trie_to_json(t)
        data = json.loads(text)
        assert data["labels"] == [["1", -1], ["10", 2], ["11", 1]]
        back = trie_from_json(text)
        assert back.labels == t.labels
        assert trie_to_json(back) == text

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10 ** 6))
    def test_random_valid_tries_validate(self, seed):
        rng = random.Random(seed)
        p = MeasureParams(2, 6)
        labels = {}
        for w in words_upto(2, 4):
            if any(w):
                labels[w] = rng.choice([v for v in p.digits if (v - w[-1]) % 2 == 0])
        t = make_trie(p, labels)
        assert validate_tree_mapping(t, 5, check_maximal=False).valid

    def test_unknown_default(self, p24):
        t = FiniteTrie(p24, {(1,): 1}, default=None, main_words=[(1,)])
        assert t.label((1, 0, 0)) == 0
        assert t.label((1, 1)) is None
        assert t.zero_from((1,)) == 1
        assert t.zero_from((1, 1)) is None


def test_symbol_mapping_hooks():
    t = make_symbol_mapping(MeasureParams(3, 6))
    assert t.analytic_gap_sup() == 0
    assert sorted(t.label_language()) == [0, 1, 2]
    assert t.zero_from((1, 2)) == 2
