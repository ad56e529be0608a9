import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stoplab import DomainError, poisson
from stoplab.discrete import (
    discrete_values, evaluate_cutoff_rule, finite_cutoff_rule, positive_part_sum, shifted_value, value_matrix,
)
from stoplab.moser import moser_values


def exact_values(n_max, N):
    """V_{n,N} = E min(K, V_{n-1,N}) summed term by term in rationals."""
    vals = [Fraction(N - 1, 2)]
    for _ in range(n_max - 1):
        prev = vals[-1]
        vals.append(sum(min(Fraction(k), prev) for k in range(N)) / N)
    return vals


def brute_force_value(n, N):
    """Best expected loss over all memoryless acceptance sets, by enumerating draws."""
    subsets = [frozenset(c) for r in range(N + 1) for c in itertools.combinations(range(N), r)]
    seqs = list(itertools.product(range(N), repeat=n))
    best = None
    for sets in itertools.product(subsets, repeat=n - 1):
        total = 0
        for ks in seqs:
            for j, k in enumerate(ks):
                if j == n - 1 or k in sets[j]:
                    total += k
                    break
        val = Fraction(total, len(seqs))
        best = val if best is None else min(best, val)
    return best


@pytest.mark.parametrize("n, N, expected", [(1, 2, 0.5), (2, 2, 0.25), (2, 3, 2 / 3), (5, 1, 0.0), (1, 7, 3.0)])
def test_examples(n, N, expected):
    assert discrete_values(n, N)[n] == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("N", [1, 2, 3, 7, 25])
def test_closed_form_matches_rational_oracle(N):
    got = discrete_values(40, N).values[1:]
    want = [float(x) for x in exact_values(40, N)]
    np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("n, N", [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)])
def test_matches_exhaustive_search(n, N):
    assert discrete_values(n, N)[n] == pytest.approx(float(brute_force_value(n, N)), abs=1e-14)


@given(st.floats(-3, 50), st.integers(1, 40))
def test_positive_part_sum(v, N):
    direct = sum(max(v - k, 0.0) for k in range(N))
    assert positive_part_sum(v, N) == pytest.approx(direct, abs=1e-9)


def test_zero_arguments_rejected():
    with pytest.raises(DomainError):
        discrete_values(0, 3)
    with pytest.raises(DomainError):
        discrete_values(3, 0)


def test_monotone_in_both_directions():
    mat = value_matrix(range(1, 201), range(1, 201))
    assert np.all(np.diff(mat, axis=1) <= 0)
    assert np.all(np.diff(mat, axis=0) >= 0)
    assert np.all(mat[0] == 0)
    assert np.all(mat >= 0)
    assert np.all(mat <= (np.arange(1, 201)[:, None] - 1) / 2)


def test_coupling_sandwich():
    cont = moser_values(200).values[1:]
    mat = value_matrix(range(1, 201), range(1, 201))
    scaled = np.arange(1, 201)[:, None] * cont[None, :]
    assert np.all(mat < scaled)
    assert np.all(scaled < mat + 1)


def test_shifted_value(table):
    assert shifted_value(1, 2) == 1.5
    assert shifted_value(2, 2) == 1.25
    target = poisson.u(1.0, table) + 1
    gaps = [abs(shifted_value(n, n) - target) for n in (10**3, 10**4, 10**5)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert shifted_value(10**5, 10**5) == pytest.approx(2.513, abs=1e-3)


def test_limit_agreement(table):
    N = 10**4
    vals = discrete_values(2 * N, N)
    for T in (0.5, 1.0, 2.0):
        assert abs(vals[int(T * N)] - poisson.u(T, table)) <= 0.01


def test_small_horizon_offset(table):
    # the discrete value sits half a unit below 2/T for small T, not at 2/T
    gaps = [abs(poisson.u(T, table) - (2 / T - 0.5)) for T in (0.5, 0.2, 0.1, 0.05)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    N = 10**6
    vals = discrete_values(N // 2, N)
    dev = [abs(vals[int(T * N)] - (2 / T - 0.5)) for T in (0.5, 0.2, 0.1)]
    assert all(a > b for a, b in zip(dev, dev[1:]))
    assert all(abs(vals[int(T * N)] - 2 / T) > 0.45 for T in (0.5, 0.2, 0.1))


def test_cutoff_rule_examples():
    assert finite_cutoff_rule(2, 2).accept_from == (1, 2)
    assert finite_cutoff_rule(1, 5).accept_from == (1,) * 5
    # V_{1,3} = 1 so value 1 ties with the continuation value at step 2 and is accepted
    assert finite_cutoff_rule(3, 3).accept_from == (1, 2, 3)
    assert finite_cutoff_rule(3, 3, strict=True).accept_from == (1, 3, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(1, 25))
def test_cutoff_rule_properties(n, N):
    rule = finite_cutoff_rule(n, N)
    assert list(rule.accept_from) == sorted(rule.accept_from)
    assert rule.accept_from[0] == 1
    assert all(rule.accepts(n, k) for k in range(N))
    value = discrete_values(n, N)[n]
    assert evaluate_cutoff_rule(rule) == pytest.approx(value, abs=1e-12)
    # breaking ties the other way is equally good
    assert evaluate_cutoff_rule(finite_cutoff_rule(n, N, strict=True)) == pytest.approx(value, abs=1e-12)
