"""Distribution canonicalization, top-p truncation, inverse CDF, caching."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcstego import (
    CachedModel,
    Distribution,
    FixedTableModel,
    MarkovModel,
    UniformModel,
    cached,
    inv_cdf,
    next_token_dist,
    truncate_top_p,
)
from dcstego.errors import ContextError, ParameterError


def dist(*pairs) -> Distribution:
    return Distribution.from_pairs(pairs)


@st.composite
def distributions(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    weights = draw(
        st.lists(
            st.floats(min_value=0.01, max_value=1.0),
            min_size=n, max_size=n,
        )
    )
    total = sum(weights)
    return Distribution.from_pairs((i, w / total) for i, w in enumerate(weights))


class CountingModel(UniformModel):
    """Uniform model that counts distribution queries."""

    def __init__(self, alphabet_size):
        super().__init__(alphabet_size)
        self.calls = 0

    def distribution(self, context):
        self.calls += 1
        return super().distribution(context)


def test_canonical_order_and_zero_dropping():
    d = dist((3, 0.2), (0, 0.7), (9, 0.0), (1, 0.1))
    assert d.tokens == (0, 3, 1)
    assert d.probs == pytest.approx((0.7, 0.2, 0.1))


def test_tie_break_ascending_id():
    d = dist((5, 0.25), (2, 0.5), (7, 0.25))
    assert d.tokens == (2, 5, 7)


def test_sum_validation():
    with pytest.raises(ParameterError):
        dist((0, 0.5), (1, 0.4))


def test_uniform_model_table(uniform4):
    d = next_token_dist(uniform4, (1, 2, 3))
    assert d.entries() == [(0, 0.25), (1, 0.25), (2, 0.25), (3, 0.25)]


def test_markov_row_read(markov4):
    # State 2's configured row is uniform; state 0 drops its zero entry.
    d0 = next_token_dist(markov4, (1, 0))
    assert d0.tokens == (0, 1, 2)
    assert d0.probs == pytest.approx((0.7, 0.2, 0.1))
    d2 = next_token_dist(markov4, (2,))
    assert d2.tokens == (0, 1, 2, 3)


def test_markov_empty_context_uses_initial(markov4):
    d = next_token_dist(markov4, ())
    assert d.probs == pytest.approx((0.4, 0.3, 0.2, 0.1))


def test_fixed_table_default_fallback():
    model = FixedTableModel(
        {(0,): [0.9, 0.1]},
        default=[0.5, 0.5],
        alphabet_size=2,
    )
    assert next_token_dist(model, (0,)).probs == pytest.approx((0.9, 0.1))
    assert next_token_dist(model, (1, 1)).probs == pytest.approx((0.5, 0.5))


def test_context_validation(uniform4):
    with pytest.raises(ContextError):
        next_token_dist(uniform4, (0, 4))


def test_determinism(markov4):
    a = next_token_dist(markov4, (3, 1))
    b = next_token_dist(markov4, (3, 1))
    assert a == b and a.cum == b.cum


@given(distributions())
def test_canonicalization_idempotent(d):
    # Re-sorting canonical entries is a no-op; re-building preserves the
    # table up to one renormalization ulp.
    assert sorted(d.entries(), key=lambda e: (-e[1], e[0])) == d.entries()
    again = Distribution.from_pairs(d.entries())
    assert again.tokens == d.tokens
    assert again.probs == pytest.approx(d.probs, rel=1e-15)


def test_top_p_identity():
    d = dist((0, 0.5), (1, 0.3), (2, 0.2))
    assert truncate_top_p(d, 1.0) is d


def test_top_p_uniform_example(uniform4):
    d = truncate_top_p(uniform4.distribution(()), 0.6)
    assert d.tokens == (0, 1, 2)
    assert d.probs == pytest.approx((1 / 3, 1 / 3, 1 / 3))


def test_top_p_renormalization():
    d = truncate_top_p(dist((0, 0.7), (1, 0.2), (2, 0.1)), 0.8)
    assert d.tokens == (0, 1)
    assert d.probs == pytest.approx((7 / 9, 2 / 9), abs=1e-12)


def test_top_p_domain():
    d = dist((0, 1.0))
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ParameterError):
            truncate_top_p(d, bad)


@given(distributions(), st.floats(min_value=0.05, max_value=1.0))
def test_top_p_shrinks_and_stays_canonical(d, p):
    out = truncate_top_p(d, p)
    assert len(out) <= len(d)
    assert out.tokens == tuple(
        t for t, _ in sorted(zip(out.tokens, out.probs), key=lambda e: (-e[1], e[0]))
    )
    assert sum(out.probs) == pytest.approx(1.0, abs=1e-9)


def test_inv_cdf_boundaries():
    d = dist((0, 0.5), (1, 0.5))
    assert inv_cdf(d, 0.25) == 0
    assert inv_cdf(d, 0.5) == 1  # boundary belongs to the next interval
    assert inv_cdf(d, 0.0) == 0


def test_inv_cdf_exhaustive_interval_enumeration():
    # Independent oracle: scan cumulative intervals directly.
    d = dist((0, 0.7), (1, 0.2), (2, 0.1))
    cumulative = [0.7, 0.9, 1.0]
    for r in [x / 997 for x in range(997)]:
        expected = next(
            tok for tok, hi in zip(d.tokens, cumulative) if r < hi
        )
        assert inv_cdf(d, r) == expected
    assert inv_cdf(d, 0.95) == 2


def test_inv_cdf_domain():
    d = dist((0, 1.0))
    for bad in (-0.01, 1.0, 1.5):
        with pytest.raises(ParameterError):
            inv_cdf(d, bad)


def test_inv_cdf_reproduces_distribution():
    # 1e6 uniform draws: empirical frequencies within 3 standard errors.
    d = dist((0, 0.6), (1, 0.3), (2, 0.1))
    rng = random.Random(1234)
    n = 1_000_000
    counts = [0, 0, 0]
    for _ in range(n):
        counts[inv_cdf(d, rng.random())] += 1
    for tok, p in d.entries():
        se = (p * (1 - p) / n) ** 0.5
        assert abs(counts[tok] / n - p) < 3 * se + 1e-9


def test_cache_hit_counting(markov4):
    model = cached(markov4)
    a = model.distribution((1, 2))
    b = model.distribution((1, 2))
    assert a == b
    assert model.hits == 1 and model.misses == 1


def test_cache_distinct_contexts(markov4):
    model = cached(markov4)
    model.distribution((1,))
    model.distribution((2,))
    assert model.misses == 2 and model.hits == 0


def test_cache_single_inner_call():
    inner = CountingModel(4)
    model = CachedModel(inner)
    for _ in range(1000):
        model.distribution((0, 1))
    assert inner.calls == 1
    assert model.hits == 999


def test_cache_concurrent_queries():
    from concurrent.futures import ThreadPoolExecutor

    inner = CountingModel(6)
    model = CachedModel(inner)
    contexts = [(i % 4, (i * 7) % 6) for i in range(4000)]
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(model.distribution, contexts))
    for ctx, dist in zip(contexts, results):
        assert dist == inner.distribution(ctx)
    assert model.hits + model.misses == 4000
    assert model.misses == len(set(contexts))


@settings(max_examples=25)
@given(st.lists(st.lists(st.integers(min_value=0, max_value=3), max_size=5), max_size=8))
def test_cache_observational_equivalence(contexts):
    base = MarkovModel(
        [[0.4, 0.3, 0.2, 0.1]] * 4,
        [0.25, 0.25, 0.25, 0.25],
    )
    wrapped = cached(base)
    for ctx in contexts:
        assert wrapped.distribution(tuple(ctx)) == base.distribution(tuple(ctx))
