import math

import numpy as np
import pytest

from ageleak import (
    FinitePmf,
    deterministic_pmf,
    geometric_pmf,
    is_smp,
    make_pmf,
    pmf_moments,
    uniform_pmf,
)
from ageleak.errors import (
    DuplicateDuration,
    NegativeProbability,
    NonPositiveDuration,
    TailTooHeavy,
    UnnormalizedMass,
)


def test_make_pmf_point_mass():
    pmf = make_pmf([(1, 1.0)])
    assert pmf.entries == ((1, 1.0),)
    assert pmf.s_min == 1
    assert pmf.d_max == 1


def test_make_pmf_greedy_structure():
    pmf = make_pmf([(1, 0.4), (2, 0.4), (3, 0.2)])
    assert pmf.s_min == 1
    assert is_smp(pmf) == (True, 1)


def test_make_pmf_sorts_and_drops_zero_mass():
    pmf = make_pmf([(3, 0.5), (1, 0.5), (2, 0.0)])
    assert pmf.durations == (1, 3)


def test_make_pmf_idempotent():
    pmf = make_pmf([(2, 0.25), (5, 0.75)])
    assert make_pmf(pmf.entries) == pmf


def test_make_pmf_errors():
    with pytest.raises(UnnormalizedMass):
        make_pmf([(1, 0.6), (2, 0.6)])
    with pytest.raises(UnnormalizedMass):
        make_pmf([])
    with pytest.raises(NegativeProbability):
        make_pmf([(1, -0.1), (2, 1.1)])
    with pytest.raises(NegativeProbability):
        make_pmf([(1, 0.5), (2, math.nan)])
    with pytest.raises(NonPositiveDuration):
        make_pmf([(0, 1.0)])
    with pytest.raises(NonPositiveDuration):
        make_pmf([(1.5, 1.0)])
    with pytest.raises(DuplicateDuration):
        make_pmf([(2, 0.5), (2, 0.5)])


def test_moments_deterministic():
    m = pmf_moments(deterministic_pmf(5))
    assert (m.mean, m.second_moment, m.variance) == (5.0, 25.0, 0.0)


def test_moments_uniform():
    m = pmf_moments(uniform_pmf(3))
    assert m.mean == pytest.approx(2.0, abs=1e-12)
    assert m.second_moment == pytest.approx(14.0 / 3.0, abs=1e-12)
    assert m.variance == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_moments_two_point_dither():
    # Two-point dump schedule achieving leakage rate 0.4 (see optimizer).
    z0 = 2.0 ** 0.4
    p_i = (0.5 - z0 ** -3) / (z0 ** -2 - z0 ** -3)
    m = pmf_moments(make_pmf([(2, p_i), (3, 1.0 - p_i)]))
    assert m.mean == pytest.approx(2.5346019613807638, abs=1e-12)


def test_deterministic_variance_zero_everywhere():
    for tau in range(1, 1001, 7):
        assert pmf_moments(deterministic_pmf(tau)).variance == 0.0


def test_is_smp():
    assert is_smp(geometric_pmf(0.5)) == (True, 1)
    assert is_smp(make_pmf([(1, 0.2), (2, 0.8)])) == (False, 1)
    assert is_smp(make_pmf([(3, 0.5), (4, 0.3), (7, 0.2)])) == (True, 3)


def test_smp_preserved_under_shift():
    rng = np.random.default_rng(11)
    for _ in range(100):
        width = int(rng.integers(1, 8))
        raw = rng.random(width)
        raw = np.sort(raw)[::-1]  # decreasing masses: SMP by construction
        probs = raw / raw.sum()
        base = make_pmf([(d + 1, p) for d, p in enumerate(probs)])
        assert is_smp(base)[0]
        offset = int(rng.integers(1, 50))
        shifted = make_pmf([(d + offset, p) for d, p in base.entries])
        smp, s_min = is_smp(shifted)
        assert smp and s_min == 1 + offset


def test_geometric_mu_one_is_deterministic():
    assert geometric_pmf(1.0) == deterministic_pmf(1)


def test_geometric_truncation_folds_tail():
    pmf = geometric_pmf(0.5, d_max=50)
    assert pmf.prob(1) == 0.5
    assert pmf.prob(2) == 0.25
    assert pmf.d_max == 50
    assert abs(math.fsum(pmf.probabilities) - 1.0) <= 1e-15
    # folded tail: mass at 50 is the plain tail P(D >= 50)
    assert pmf.prob(50) == pytest.approx(0.5 ** 49, rel=1e-12)


def test_geometric_tail_too_heavy():
    with pytest.raises(TailTooHeavy):
        geometric_pmf(0.01, d_max=50)
    pmf = geometric_pmf(0.01, d_max=50, allow_heavy_tail=True)
    assert pmf.d_max == 50


def test_geometric_auto_dmax_meets_tail_budget():
    for mu in (0.1, 0.25, 0.5, 0.9):
        pmf = geometric_pmf(mu)
        assert (1.0 - mu) ** pmf.d_max <= 1e-12


def test_uniform_and_deterministic():
    pmf = uniform_pmf(3)
    assert pmf.probabilities == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    assert pmf_moments(pmf).mean == pytest.approx(2.0)
    assert deterministic_pmf(5).entries == ((5, 1.0),)
    assert uniform_pmf(1) == deterministic_pmf(1)


def test_tail():
    pmf = make_pmf([(2, 0.5), (4, 0.5)])
    assert pmf.tail(0) == 1.0
    assert pmf.tail(2) == 0.5
    assert pmf.tail(4) == 0.0


def test_json_round_trip_is_bit_stable():
    rng = np.random.default_rng(3)
    for _ in range(50):
        width = int(rng.integers(1, 9))
        raw = rng.random(width)
        probs = raw / raw.sum()
        durations = np.cumsum(rng.integers(1, 9, size=width))
        pmf = make_pmf([(int(d), float(p)) for d, p in zip(durations, probs)])
        text = pmf.to_json()
        again = FinitePmf.from_json(text)
        assert again == pmf
        assert again.to_json() == text
