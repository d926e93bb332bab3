import itertools

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mawc.gf2 import BitVector
from mawc.source import (
    JointPMF,
    binary_entropy,
    condition_check,
    doubly_symmetric,
    entropy,
    function_pmf,
    independence_gap,
    is_doubly_symmetric,
    marginal,
    mod2_sum,
    sample_block,
    theorem2_scan,
)
from mawc.streams import stream

probs = st.floats(0.0, 1.0, allow_nan=False, allow_subnormal=False)


def test_mod2_sum():
    assert mod2_sum((0, 0)) == 0
    assert mod2_sum((1, 1)) == 0
    assert mod2_sum((1, 0, 1, 1)) == 1
    with pytest.raises(ValueError):
        mod2_sum(())


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    with mpmath.workdps(40):
        p = mpmath.mpf("0.11")
        ref = -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)
    assert abs(binary_entropy(0.11) - float(ref)) < 1e-12
    with pytest.raises(ValueError):
        binary_entropy(1.5)


@given(probs)
def test_binary_entropy_symmetric(p):
    assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)


def test_entropy_values():
    assert entropy((1, 0, 0)) == 0.0
    assert entropy((0.25,) * 4) == pytest.approx(2.0, abs=1e-15)
    assert entropy((0.42, 0.58)) == pytest.approx(binary_entropy(0.42), abs=1e-15)
    with pytest.raises(ValueError):
        entropy((0.5, 0.6))


@given(st.lists(st.floats(0.0, 10.0, allow_nan=False), min_size=1, max_size=16).filter(lambda v: sum(v) > 1e-3))
def test_entropy_bounds(raw):
    p = np.asarray(raw) / sum(raw)
    p = p / p.sum()
    h = entropy(p)
    assert -1e-12 <= h <= np.log2(len(p)) + 1e-12


def test_function_pmf():
    for theta in (0.0, 0.2, 0.3, 0.7, 1.0):
        assert function_pmf(doubly_symmetric(theta))[1] == theta
    np.testing.assert_allclose(function_pmf(JointPMF.independent([0.5] * 3)), [0.5, 0.5])
    assert function_pmf(JointPMF.independent([0.3, 0.3]))[1] == pytest.approx(0.42, abs=1e-15)


def test_marginals():
    for theta in np.linspace(0, 1, 11):
        j = doubly_symmetric(theta)
        for m in (1, 2):
            assert abs(marginal(j, m)[1] - 0.5) <= 1e-12
    j = JointPMF.independent([0.2, 0.7])
    np.testing.assert_allclose(marginal(j, 1), [0.8, 0.2])
    np.testing.assert_allclose(marginal(j, 2), [0.3, 0.7])
    np.testing.assert_allclose(marginal(JointPMF(2, (0.5, 0, 0, 0.5)), 2), [0.5, 0.5])
    with pytest.raises(IndexError):
        marginal(j, 3)


def _enumerated_gap(joint):
    """Independent oracle: dictionaries over explicit outcome tuples."""
    M = joint.M
    outcomes = list(itertools.product((0, 1), repeat=M))
    P = dict(zip(outcomes, joint.probs))
    PU = {u: sum(P[s] for s in outcomes if sum(s) % 2 == u) for u in (0, 1)}
    gap = 0.0
    for m in range(M):
        Pm = {a: sum(P[s] for s in outcomes if s[m] == a) for a in (0, 1)}
        for a, u in itertools.product((0, 1), repeat=2):
            joint_au = sum(P[s] for s in outcomes if s[m] == a and sum(s) % 2 == u)
            gap = max(gap, abs(joint_au - Pm[a] * PU[u]))
    return gap


def test_condition_check_examples():
    for M in (2, 3, 4):
        assert condition_check(JointPMF.independent([0.5] * M), 1e-12)
    # a single source is its own sum
    assert not condition_check(JointPMF.independent([0.5]), 1e-12)
    assert condition_check(doubly_symmetric(0.3), 1e-9)
    bad = JointPMF.independent([0.3, 0.3])
    assert not condition_check(bad, 1e-9)
    # |P(S1=1,U=1) - P(S1=1)P(U=1)| = |0.21 - 0.126|
    assert independence_gap(bad) == pytest.approx(0.084, abs=1e-12)
    assert _enumerated_gap(bad) == pytest.approx(0.084, abs=1e-12)


def test_gap_matches_enumeration_oracle(rng):
    for M in (2, 3, 4):
        for _ in range(50):
            e = rng.exponential(size=1 << M)
            j = JointPMF(M, tuple(e / e.sum()))
            assert independence_gap(j) == pytest.approx(_enumerated_gap(j), abs=1e-14)


def test_doubly_symmetric_values():
    assert doubly_symmetric(0.5).probs == (0.25,) * 4
    assert doubly_symmetric(0.0).probs == (0.5, 0.0, 0.0, 0.5)
    np.testing.assert_allclose(doubly_symmetric(0.2).probs, (0.4, 0.1, 0.1, 0.4), atol=1e-15)
    with pytest.raises(ValueError):
        doubly_symmetric(-0.1)


def test_is_doubly_symmetric():
    assert is_doubly_symmetric(doubly_symmetric(0.77))
    assert not is_doubly_symmetric(JointPMF(2, (0.4, 0.2, 0.1, 0.3)))
    assert is_doubly_symmetric(JointPMF(2, (0.35, 0.15, 0.15, 0.35)))
    with pytest.raises(ValueError):
        is_doubly_symmetric(JointPMF.independent([0.5] * 3))


@settings(max_examples=200)
@given(probs)
def test_doubly_symmetric_satisfies_condition(theta):
    j = doubly_symmetric(theta)
    assert condition_check(j, 1e-9)
    assert function_pmf(j)[1] == theta


def test_equivalence_scan_small():
    report = theorem2_scan(500, master_seed=7)
    assert report.ok
    assert report.num_passing == 101
    assert report.max_marginal_deviation <= 1e-12


def test_scan_pair_examples():
    j = doubly_symmetric(1.0)
    assert condition_check(j) and is_doubly_symmetric(j)
    j = JointPMF.independent([0.5, 0.7])
    np.testing.assert_allclose(j.probs, (0.15, 0.35, 0.15, 0.35), atol=1e-15)
    assert not condition_check(j) and not is_doubly_symmetric(j)


def test_degenerate_function_value_breaks_the_equivalence():
    # U = 0 almost surely: every source is trivially independent of U
    # although the diagonal masses differ.
    j = JointPMF(2, (0.7, 0.0, 0.0, 0.3))
    assert condition_check(j)
    assert not is_doubly_symmetric(j)


def test_scan_reports_faulty_checker():
    report = theorem2_scan(50, master_seed=1, checker=lambda j, tol: True)
    assert not report.ok
    assert len(report.disagreements) == 50


def test_scan_gap_statistics():
    report = theorem2_scan(200, master_seed=3)
    assert 0 < report.min_rejected_gap <= report.max_rejected_gap <= 0.25


def test_sample_block():
    ones = JointPMF(3, (0,) * 7 + (1,))
    block = sample_block(ones, 5, stream(1, 4, 0, 0))
    assert all(s == BitVector(5, 31) for s in block.sequences)
    a = sample_block(doubly_symmetric(0.3), 20, stream(9, 4, 0, 0))
    b = sample_block(doubly_symmetric(0.3), 20, stream(9, 4, 0, 0))
    assert a == b


def test_sample_block_frequencies():
    j = JointPMF(2, (0.1, 0.2, 0.3, 0.4))
    block = sample_block(j, 100_000, stream(2, 4, 0, 0))
    s1 = np.array(block.sequences[0].bits())
    s2 = np.array(block.sequences[1].bits())
    freq = np.bincount(2 * s1 + s2, minlength=4) / 100_000
    assert np.abs(freq - j.table()).max() < 0.01


def test_pmf_json_roundtrip():
    j = doubly_symmetric(0.3)
    assert JointPMF.from_json(j.to_json()) == j
    with pytest.raises(ValueError):
        JointPMF(2, (0.5, 0.5, 0.1, 0.0))
