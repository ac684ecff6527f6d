"""Window verifier vs brute force, guard words, and expurgation."""

import numpy as np
import pytest

from winavc.core import Alphabet, ConstraintSet, Distribution, empirical_type
from winavc.windows import (
    INCLUSIVE_RANGE,
    OPEN_RANGE,
    expurgate,
    guard_word,
    verify_windows,
    windows_valid,
    windows_valid_rows,
)


def brute_force_report(seq, w, cset, mode=INCLUSIVE_RANGE, tol=1e-9):
    """Independent re-count oracle: recompute every window type from scratch."""
    seq = np.asarray(seq)
    n = seq.size
    n_starts = n - w + 1 if mode == INCLUSIVE_RANGE else n - w
    violations = []
    for start in range(max(n_starts, 0)):
        window = seq[start : start + w]
        t = np.bincount(window, minlength=cset.dim) / w
        if cset.num_inequalities and np.any(
            cset.coeffs @ t > cset.bounds + tol
        ):
            violations.append(start)
    return violations, max(n_starts, 0)


class TestVerifyWindows:
    def test_valid_example(self):
        rep = verify_windows([1, 0, 0, 0, 1, 0, 0, 0], 4, ConstraintSet.weight_cap(0.25))
        assert rep.valid and rep.windows_checked == 5

    def test_invalid_example(self):
        rep = verify_windows([1, 1, 0, 0, 0, 0, 0, 0], 4, ConstraintSet.weight_cap(0.25))
        assert not rep.valid
        # first violating window is the one containing both ones
        assert rep.first_violation() == 0
        assert rep.violations[0][1].probs.tolist() == [0.5, 0.5]

    def test_windowless_reduction(self):
        seq = [1, 0, 1, 0, 0, 0, 0, 0]
        g = ConstraintSet.weight_cap(0.25)
        rep = verify_windows(seq, len(seq), g)
        overall = empirical_type(seq, Alphabet(2)).distribution
        assert rep.valid == g.contains(overall)
        assert rep.windows_checked == 1

    def test_open_range_skips_last_window(self):
        # only the final window violates; the literal index set misses it
        seq = [0, 0, 0, 0, 1, 1]
        g = ConstraintSet.weight_cap(0.3)
        assert verify_windows(seq, 3, g, OPEN_RANGE).valid is False
        seq2 = [0, 0, 0, 0, 0, 1]  # violation only at the very last start
        assert verify_windows(seq2, 1, g, OPEN_RANGE).valid is True
        assert verify_windows(seq2, 1, g, INCLUSIVE_RANGE).valid is False

    def test_window_too_long(self):
        with pytest.raises(ValueError):
            verify_windows([0, 1], 3, ConstraintSet.weight_cap(0.5))

    @pytest.mark.parametrize("dim", [2, 3])
    def test_matches_brute_force(self, dim):
        rng = np.random.default_rng(100 + dim)
        for _ in range(400):
            n = int(rng.integers(2, 65))
            w = int(rng.integers(1, n + 1))
            seq = rng.integers(0, dim, size=n)
            coeffs = rng.uniform(-1, 1, size=dim)
            bound = float(rng.uniform(coeffs.min(), coeffs.max()))
            try:
                cset = ConstraintSet(dim, [(coeffs, bound)])
            except ValueError:
                continue
            mode = INCLUSIVE_RANGE if rng.random() < 0.5 else OPEN_RANGE
            rep = verify_windows(seq, w, cset, mode)
            want_viol, want_count = brute_force_report(seq, w, cset, mode)
            assert rep.windows_checked == want_count
            assert [s for s, _ in rep.violations] == want_viol
            if mode == INCLUSIVE_RANGE:
                assert windows_valid(seq, w, cset) == rep.valid


class TestGuardWord:
    def test_exact_example(self):
        gw = guard_word(Distribution([0.75, 0.25]), 8)
        assert gw.symbols.tolist() == [0, 0, 0, 1, 0, 0, 0, 1]
        assert gw.base_block_length == 4

    def test_point_mass(self):
        gw = guard_word(Distribution([1.0, 0.0]), 12)
        assert gw.symbols.tolist() == [0] * 12

    def test_truncated_type(self):
        gw = guard_word(Distribution([0.75, 0.25]), 5)
        assert gw.symbols.tolist() == [0, 0, 0, 1, 0]
        t = empirical_type(gw.symbols, Alphabet(2)).distribution
        assert t.probs.tolist() == [0.8, 0.2]
        tv = 0.5 * np.abs(t.probs - np.array([0.75, 0.25])).sum()
        assert tv == pytest.approx(0.05)
        assert tv <= gw.deviation_bound(5)

    def test_irrational_target_rejected(self):
        with pytest.raises(ValueError):
            guard_word(Distribution([1 / np.pi, 1 - 1 / np.pi]), 16, max_denominator=64)

    def test_block_longer_than_word_rejected(self):
        with pytest.raises(ValueError):
            guard_word(Distribution([0.9, 0.1]), 5)  # needs b = 10 > 5

    @pytest.mark.parametrize(
        "target,w_x",
        [
            ([0.75, 0.25], 64),
            ([0.5, 0.5], 37),
            ([2 / 3, 1 / 6, 1 / 6], 48),
            ([0.875, 0.125], 256),
        ],
    )
    def test_tv_bound_exhaustive(self, target, w_x):
        # every contiguous window of length L >= b stays within b/L in TV
        t = Distribution(target)
        gw = guard_word(t, w_x)
        b = gw.base_block_length
        sym = gw.symbols
        for L in range(b, w_x + 1):
            bound = gw.deviation_bound(L)
            for start in range(w_x - L + 1):
                win = sym[start : start + L]
                emp = np.bincount(win, minlength=t.size) / L
                tv = 0.5 * np.abs(emp - t.probs).sum()
                assert tv <= bound + 1e-12


class TestExpurgate:
    def test_all_zero_retained(self):
        g = ConstraintSet.weight_cap(0.5)
        kept, stats = expurgate(np.zeros((3, 16), dtype=np.int8), 4, g)
        assert kept.shape == (3, 16)
        assert stats.removed == 0

    def test_all_ones_removed(self):
        g = ConstraintSet.weight_cap(0.5)
        kept, stats = expurgate(np.ones((1, 16), dtype=np.int8), 4, g)
        assert kept.shape[0] == 0
        assert stats.removed_fraction == 1.0

    def test_removed_fraction_small_for_interior_law(self):
        # Removal vanishes with the margin.  At Bern(0.2) vs cap 0.4 the
        # union bound 193 * P(Bin(64, 0.2) >= 26) ~ 0.025 certifies < 0.05;
        # at Bern(0.25) direct Monte Carlo puts the truth near 0.08.
        rng = np.random.default_rng(9)
        g = ConstraintSet.weight_cap(0.4)
        words = (rng.random((2000, 256)) < 0.2).astype(np.int8)
        _, stats = expurgate(words, 64, g)
        assert stats.removed_fraction < 0.05
        words = (rng.random((2000, 256)) < 0.25).astype(np.int8)
        _, stats = expurgate(words, 64, g)
        assert stats.removed_fraction < 0.15

    def test_survivors_pass_verifier(self):
        rng = np.random.default_rng(10)
        words = (rng.random((300, 64)) < 0.3).astype(np.int8)
        g = ConstraintSet.weight_cap(0.4)
        kept, _ = expurgate(words, 16, g)
        for row in kept:
            assert verify_windows(row, 16, g).valid

    def test_suffix_straddle_detected(self):
        # codeword is fine alone; the straddle with the context violates
        g = ConstraintSet.weight_cap(0.25)
        word = np.zeros((1, 12), dtype=np.int8)
        word[0, -1] = 1
        assert expurgate(word, 4, g)[1].removed == 0
        suffix = np.array([1, 0, 0], dtype=np.int8)
        _, stats = expurgate(word, 4, g, suffix_context=suffix)
        assert stats.removed == 1

    def test_prefix_straddle_detected(self):
        g = ConstraintSet.weight_cap(0.25)
        word = np.zeros((1, 12), dtype=np.int8)
        word[0, 0] = 1
        prefix = np.array([0, 0, 1], dtype=np.int8)
        _, stats = expurgate(word, 4, g, prefix_context=prefix)
        assert stats.removed == 1
        _, stats2 = expurgate(word, 4, g)
        assert stats2.removed == 0

    def test_matches_single_sequence_verifier(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(8, 40))
            w = int(rng.integers(2, n + 1))
            words = rng.integers(0, 2, size=(20, n)).astype(np.int8)
            g = ConstraintSet.weight_cap(float(rng.uniform(0.2, 0.8)))
            ok_rows = windows_valid_rows(words, w, g)
            for row, ok in zip(words, ok_rows):
                assert verify_windows(row, w, g).valid == ok


class TestConvexityGlue:
    def test_window_type_mixture_stays_inside(self):
        # If both segment types lie in a half-space set, any window covering
        # parts of both has a type that is a convex mix of sub-window types.
        rng = np.random.default_rng(12)
        g = ConstraintSet.weight_cap(0.4)
        for _ in range(100):
            a = (rng.random(24) < 0.3).astype(int)
            b = (rng.random(24) < 0.35).astype(int)
            seq = np.concatenate([a, b])
            w = 12
            for start in range(24 - w + 1, 24):
                win = seq[start : start + w]
                left = win[: 24 - start]
                right = win[24 - start :]
                tl = np.bincount(left, minlength=2) / left.size
                tr = np.bincount(right, minlength=2) / right.size
                if g.contains(Distribution(tl)) and g.contains(Distribution(tr)):
                    mix = (left.size * tl + right.size * tr) / w
                    assert g.contains(Distribution(mix))
                    full = np.bincount(win, minlength=2) / w
                    assert np.allclose(full, mix)
