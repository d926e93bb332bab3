import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mawc.channel import (
    MawcParams,
    compose_bsc,
    degradedness_gap,
    noise_pmf,
    transmit,
    xor_all,
)
from mawc.errors import BudgetExceededError
from mawc.gf2 import BitVector, random_vector
from mawc.streams import stream

half = st.floats(0.0, 0.5, allow_nan=False)
unit = st.floats(0.0, 1.0, allow_nan=False)


def bv(*bits):
    return BitVector.from_bits(bits)


def test_noiseless_transmit():
    y, z = transmit([bv(1, 0), bv(1, 1)], MawcParams(2, 0.0, 0.0), stream(1, 4, 0, 0))
    assert y == z == bv(0, 1)
    for M in (1, 3, 5):
        y, z = transmit([BitVector(6, 0)] * M, MawcParams(M, 0.0, 0.0), stream(2, 4, 0, 0))
        assert y.value == z.value == 0


def test_transmit_length_mismatch():
    with pytest.raises(ValueError):
        transmit([bv(1, 0), bv(1)], MawcParams(2, 0.1, 0.1), stream(1, 4, 0, 0))
    with pytest.raises(ValueError):
        transmit([bv(1, 0)], MawcParams(2, 0.1, 0.1), stream(1, 4, 0, 0))


def test_full_noise_flip_rate():
    n = 100_000
    x = [BitVector(n, 0), BitVector(n, 0)]
    y, z = transmit(x, MawcParams(2, 0.5, 0.0), stream(3, 4, 0, 0))
    assert abs(y.weight / n - 0.5) < 0.01
    assert z.weight == 0


def test_noise_streams_are_independent():
    n = 100_000
    y, z = transmit([BitVector(n, 0)], MawcParams(1, 0.3, 0.3), stream(4, 4, 0, 0))
    a = y.to_array().astype(float)
    b = z.to_array().astype(float)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02
    assert abs(a.mean() - 0.3) < 0.01 and abs(b.mean() - 0.3) < 0.01


def test_transmit_symmetric_in_inputs():
    g = stream(5, 4, 0, 0)
    xs = [random_vector(16, g) for _ in range(4)]
    params = MawcParams(4, 0.2, 0.35)
    ref = transmit(xs, params, stream(6, 4, 0, 0))
    for perm in itertools.permutations(xs):
        assert transmit(list(perm), params, stream(6, 4, 0, 0)) == ref


def test_noise_pmf_values():
    t = noise_pmf(0.0, 3)
    assert t[0] == 1.0 and t[1:].sum() == 0.0
    np.testing.assert_allclose(noise_pmf(0.5, 2), [0.25] * 4)
    assert noise_pmf(0.1, 2)[0b10] == pytest.approx(0.09, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(unit, st.integers(0, 20))
def test_noise_pmf_sums_to_one(c, n):
    assert abs(noise_pmf(c, n).sum() - 1.0) <= 1e-12


def test_noise_pmf_budget():
    with pytest.raises(BudgetExceededError):
        noise_pmf(0.1, 12, cap=1000)


def test_compose_bsc_values():
    assert compose_bsc(0.1, 0.25) == pytest.approx(0.3, abs=1e-15)
    assert compose_bsc(0.1, 0.25) == pytest.approx(0.25 * (1 - 0.2) + 0.1, abs=1e-15)
    assert compose_bsc(0.17, 0.0) == 0.17
    for qp in (0.0, 0.1, 0.4, 1.0):
        assert compose_bsc(0.5, qp) == 0.5


@given(half, half)
def test_cascade_never_improves(p, qp):
    assert compose_bsc(p, qp) >= max(p, qp) - 1e-15


@given(unit, unit, unit)
def test_cascade_associative(p, a, b):
    assert compose_bsc(compose_bsc(p, a), b) == pytest.approx(compose_bsc(p, compose_bsc(a, b)), abs=1e-12)


def test_degradedness_gap_examples():
    assert degradedness_gap(0.1, 0.3) == pytest.approx(0.25, abs=1e-15)
    assert degradedness_gap(0.2, 0.2) is None
    assert degradedness_gap(0.0, 0.5) == 0.5
    assert degradedness_gap(0.5, 0.5) is None
    assert degradedness_gap(0.3, 0.1) is None


@settings(max_examples=500)
@given(st.floats(0.0, 0.49), st.floats(1e-9, 0.5))
def test_degradedness_roundtrip(p, qp):
    got = degradedness_gap(p, compose_bsc(p, qp))
    assert got is not None
    assert abs(got - qp) <= 1e-12


def test_params_validation():
    assert MawcParams(2, 0.1, 0.7).exploratory
    assert not MawcParams(2, 0.1, 0.3).exploratory
    with pytest.raises(ValueError):
        MawcParams(2, -0.1, 0.3)
    assert MawcParams.from_json(MawcParams(3, 0.1, 0.2).to_json()) == MawcParams(3, 0.1, 0.2)


def test_xor_all():
    assert xor_all([bv(1, 0, 1), bv(0, 1, 1), bv(1, 1, 1)]) == bv(0, 0, 1)
