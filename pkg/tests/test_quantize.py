import math

import numpy as np
import pytest

from diana.quantize import (
    BlockLayout,
    QuantizedVector,
    block_norm,
    comm_cost_bound,
    decode,
    expected_sparsity,
    norm_ratio_floor,
    quantization_variance,
    quantize,
)

import oracle
from conftest import assert_close


class TestWorkedExample:
    """delta = (3, 4), one block, p = 2: scale 5, keep probs (0.6, 0.8)."""

    DELTA = np.array([3.0, 4.0])
    LAYOUT = BlockLayout.full(2)

    def test_outcome_distribution(self):
        want = {
            (0.0, 0.0): 0.08,
            (5.0, 0.0): 0.12,
            (0.0, 5.0): 0.32,
            (5.0, 5.0): 0.48,
        }
        got = {}
        for pr, out in oracle.enumerate_block(self.DELTA, 2.0):
            got[tuple(out)] = got.get(tuple(out), 0.0) + pr
        assert set(got) == set(want)
        for key in want:
            assert abs(got[key] - want[key]) < 1e-15

    def test_closed_forms(self):
        assert quantization_variance(self.DELTA, self.LAYOUT, 2.0) == pytest.approx(
            10.0, abs=1e-12
        )
        assert expected_sparsity(self.DELTA, self.LAYOUT, 2.0) == pytest.approx(
            1.4, abs=1e-15
        )

    def test_sampled_outcomes_match_support_model(self):
        rng = np.random.default_rng(0)
        counts = {}
        n = 40_000
        for _ in range(n):
            out = tuple(decode(quantize(self.DELTA, self.LAYOUT, 2.0, rng)))
            counts[out] = counts.get(out, 0) + 1
        for key, p_true in [
            ((0.0, 0.0), 0.08),
            ((5.0, 0.0), 0.12),
            ((0.0, 5.0), 0.32),
            ((5.0, 5.0), 0.48),
        ]:
            freq = counts.get(key, 0) / n
            sd = math.sqrt(p_true * (1 - p_true) / n)
            assert abs(freq - p_true) < 4 * sd, f"outcome {key}: {freq} vs {p_true}"


class TestAgainstEnumeration:
    """Closed-form moments vs brute-force enumeration on random vectors."""

    def test_moments_match(self):
        rng = np.random.default_rng(11)
        for delta, sizes, p in oracle.random_cases(60, 10, rng):
            layout = BlockLayout(sizes)
            mean, second, nnz = oracle.vector_moments(delta, sizes, p)
            assert_close(mean, delta, 1e-10, f"bias p={p} sizes={sizes}")
            got_var = quantization_variance(delta, layout, p)
            assert abs(got_var - second) < 1e-9 * max(1.0, second), (
                f"variance p={p}: {got_var} vs {second}"
            )
            got_nnz = expected_sparsity(delta, layout, p)
            assert abs(got_nnz - nnz) < 1e-10

    def test_sample_frequencies(self):
        # Support of each coordinate is Bernoulli(|v_j| / scale) and the
        # sample mean of decodes approaches delta.
        rng = np.random.default_rng(5)
        delta = np.array([1.0, -2.0, 0.0, 0.5, 4.0])
        layout = BlockLayout((3, 2))
        n = 30_000
        acc = np.zeros_like(delta)
        kept = np.zeros_like(delta)
        for _ in range(n):
            q = quantize(delta, layout, math.inf, rng)
            acc += decode(q)
            kept += q.support
        probs = np.array([1 / 2, 1.0, 0.0, 1 / 8, 1.0])
        for j in range(delta.size):
            sd = math.sqrt(max(probs[j] * (1 - probs[j]), 1e-12) / n)
            assert abs(kept[j] / n - probs[j]) <= 4 * sd + 1e-12
        scale_sq = np.array([4.0, 4.0, 4.0, 16.0, 16.0])
        sd_mean = np.sqrt(probs * (1 - probs) * scale_sq / n)
        assert np.all(np.abs(acc / n - delta) <= 4 * sd_mean + 1e-12)


class TestQuantizeMechanics:
    def test_zero_vector_still_burns_draws(self):
        # Draw consumption must not depend on the data, so a replayed
        # stream stays aligned whatever values pass through.
        layout = BlockLayout((3, 2))
        rng_a = np.random.default_rng(42)
        rng_b = np.random.default_rng(42)
        q = quantize(np.zeros(5), layout, 2.0, rng_a)
        assert q.nnz == 0 and np.all(q.scales == 0.0)
        rng_b.random(5)
        assert rng_a.random() == rng_b.random()

    def test_draw_count_matches_dim_when_partially_zero(self):
        layout = BlockLayout((2, 3, 1))
        delta = np.array([0.0, 0.0, 1.0, -4.0, 0.0, 2.0])
        rng_a = np.random.default_rng(9)
        rng_b = np.random.default_rng(9)
        quantize(delta, layout, 1.0, rng_a)
        rng_b.random(6)
        assert rng_a.random() == rng_b.random()

    def test_max_coordinate_always_kept_at_p_inf(self):
        rng = np.random.default_rng(3)
        delta = np.array([0.25, -0.5, 3.0, 1.0])
        layout = BlockLayout.full(4)
        for _ in range(200):
            q = quantize(delta, layout, math.inf, rng)
            assert q.support[2], "max-|v| coordinate has keep probability 1"
            assert q.signs[2] == 1

    def test_decode_uses_scale_sign_support(self):
        q = QuantizedVector(
            layout=BlockLayout.full(2),
            scales=np.array([5.0]),
            signs=np.array([1, 1], dtype=np.int8),
            support=np.array([True, False]),
        )
        assert_close(decode(q), [5.0, 0.0])

    def test_rejects_bad_inputs(self):
        layout = BlockLayout.full(3)
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            quantize(np.zeros(4), layout, 2.0, rng)
        with pytest.raises(ValueError):
            quantize(np.array([1.0, np.nan, 0.0]), layout, 2.0, rng)
        with pytest.raises(ValueError):
            quantize(np.zeros(3), layout, 0.5, rng)


class TestVarianceProperties:
    def test_nonnegative_and_zero_iff_single_spike(self):
        rng = np.random.default_rng(17)
        for delta, sizes, p in oracle.random_cases(80, 8, rng):
            layout = BlockLayout(sizes)
            var = quantization_variance(delta, layout, p)
            assert var >= 0.0
            at_most_one = all(
                np.count_nonzero(delta[sl]) <= 1 for sl in layout.slices()
            )
            if at_most_one:
                assert var < 1e-12
            elif p < math.inf:
                assert var > 0.0

    def test_bounded_by_norm_ratio_floor(self):
        # variance <= (1/a - 1) ||delta||^2 with a the floor at the
        # largest block size.
        rng = np.random.default_rng(23)
        for p in (1.0, 2.0, math.inf):
            for _ in range(40):
                dim = int(rng.integers(2, 12))
                layout = BlockLayout.uniform(dim, int(rng.integers(1, dim + 1)))
                delta = rng.normal(size=dim)
                a = norm_ratio_floor(layout.max_block, p)
                cap = (1.0 / a - 1.0) * float(delta @ delta)
                assert quantization_variance(delta, layout, p) <= cap * (1 + 1e-12)

    def test_sparsity_bound_per_block(self):
        rng = np.random.default_rng(29)
        for delta, sizes, p in oracle.random_cases(60, 10, rng):
            for sl, size in zip(BlockLayout(sizes).slices(), sizes):
                v = delta[sl]
                s = oracle.pnorm(v, p)
                if s == 0.0:
                    continue
                cap = size ** (1.0 - 1.0 / p) if p < math.inf else float(size)
                assert oracle.pnorm(v, 1) / s <= cap * (1 + 1e-12)


class TestNormRatioFloor:
    def test_closed_forms(self):
        assert norm_ratio_floor(4, 1.0) == pytest.approx(0.25, abs=1e-15)
        assert norm_ratio_floor(4, 2.0) == pytest.approx(0.5, abs=1e-15)
        assert norm_ratio_floor(4, math.inf) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert norm_ratio_floor(20, math.inf) == pytest.approx(
            2.0 / (1.0 + math.sqrt(20.0)), abs=1e-15
        )

    def test_dim_one_is_exact(self):
        for p in (1.0, 1.7, 2.0, 5.0, math.inf):
            assert norm_ratio_floor(1, p) == 1.0

    def test_monotone_in_dim_and_order(self):
        for p in (1.0, 2.0, math.inf):
            vals = [norm_ratio_floor(d, p) for d in (2, 4, 9, 25)]
            assert all(a > b for a, b in zip(vals, vals[1:]))
        for d in (2, 4, 9):
            assert norm_ratio_floor(d, 1.0) < norm_ratio_floor(d, 2.0)
            assert norm_ratio_floor(d, 2.0) < norm_ratio_floor(d, math.inf)

    def test_search_lands_between_neighbours(self):
        # General orders have no closed form; the search result should sit
        # between the flanking closed forms (within its safety margin).
        lo, hi = norm_ratio_floor(4, 1.0), norm_ratio_floor(4, 2.0)
        mid = norm_ratio_floor(4, 1.5)
        assert lo - 1e-4 <= mid <= hi + 1e-4
        lo, hi = norm_ratio_floor(4, 2.0), norm_ratio_floor(4, math.inf)
        mid = norm_ratio_floor(4, 4.0)
        assert lo - 1e-4 <= mid <= hi + 1e-4

    def test_certifies_no_more_than_truth(self):
        # Search value must lower-bound the ratio at random points.
        rng = np.random.default_rng(31)
        for p in (1.5, 3.0, 6.0):
            a = norm_ratio_floor(5, p)
            for _ in range(200):
                x = np.abs(rng.normal(size=5)) + 1e-9
                ratio = float(x @ x) / (x.sum() * oracle.pnorm(x, p))
                assert ratio >= a - 1e-9

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError):
            norm_ratio_floor(0, 2.0)


class TestCommCostBound:
    def test_frozen_example(self):
        want = math.sqrt(1.4) * (math.log(2) + math.log(2) + 1.0) + 32.0
        got = comm_cost_bound(np.array([3.0, 4.0]), BlockLayout.full(2), 2.0)
        assert got == pytest.approx(want, abs=1e-12)
        assert got == pytest.approx(34.8234, abs=1e-3)

    def test_zero_block_costs_header_only(self):
        layout = BlockLayout((2, 2))
        delta = np.array([3.0, 4.0, 0.0, 0.0])
        lone = comm_cost_bound(np.array([3.0, 4.0]), BlockLayout.full(2), 2.0)
        got = comm_cost_bound(delta, layout, 2.0)
        assert got == pytest.approx(lone + 32.0, abs=1e-12)
        assert comm_cost_bound(np.zeros(4), layout, 2.0, float_bits=64) == 128.0


class TestLayoutAndVector:
    def test_layout_basics(self):
        layout = BlockLayout((2, 3, 1))
        assert layout.total_dim == 6
        assert layout.max_block == 3
        assert layout.n_blocks == 3
        assert layout.slices() == [slice(0, 2), slice(2, 5), slice(5, 6)]

    def test_uniform_absorbs_remainder(self):
        assert BlockLayout.uniform(10, 4).block_sizes == (4, 4, 2)
        assert BlockLayout.uniform(8, 4).block_sizes == (4, 4)
        assert BlockLayout.uniform(3, 5).block_sizes == (3,)
        assert BlockLayout.full(7).block_sizes == (7,)

    def test_layout_validation(self):
        with pytest.raises(ValueError):
            BlockLayout(())
        with pytest.raises(ValueError):
            BlockLayout((2, 0))
        with pytest.raises(ValueError):
            BlockLayout.uniform(0, 2)
        with pytest.raises(ValueError):
            BlockLayout.uniform(5, 0)

    def test_vector_validation(self):
        layout = BlockLayout.full(2)
        good = dict(
            layout=layout,
            scales=np.array([1.0]),
            signs=np.array([1, 0], dtype=np.int8),
            support=np.array([True, False]),
        )
        QuantizedVector(**good)
        with pytest.raises(ValueError):
            QuantizedVector(**{**good, "scales": np.array([1.0, 2.0])})
        with pytest.raises(ValueError):
            QuantizedVector(**{**good, "scales": np.array([-1.0])})
        with pytest.raises(ValueError):
            QuantizedVector(**{**good, "scales": np.array([np.inf])})
        with pytest.raises(ValueError):
            QuantizedVector(**{**good, "signs": np.array([2, 0], dtype=np.int8)})
        with pytest.raises(ValueError):
            QuantizedVector(
                **{**good, "support": np.array([False, True])}
            )  # sign 0 on support

    def test_equality_ignores_offsupport_signs(self):
        layout = BlockLayout.full(3)
        base = dict(
            layout=layout,
            scales=np.array([2.0]),
            support=np.array([True, False, True]),
        )
        a = QuantizedVector(signs=np.array([1, 0, -1], dtype=np.int8), **base)
        b = QuantizedVector(signs=np.array([1, 1, -1], dtype=np.int8), **base)
        c = QuantizedVector(signs=np.array([-1, 0, -1], dtype=np.int8), **base)
        assert a == b
        assert hash(a) == hash(b)
        assert a != c
        assert a != QuantizedVector(
            layout=layout,
            scales=np.array([3.0]),
            signs=np.array([1, 0, -1], dtype=np.int8),
            support=np.array([True, False, True]),
        )

    def test_block_norm_inf_exact(self):
        assert block_norm(np.array([-3.0, 2.0]), math.inf) == 3.0
        assert block_norm(np.array([]), math.inf) == 0.0
