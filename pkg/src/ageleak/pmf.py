"""Finite probability mass functions on positive integer slot counts.

These pmfs describe service times of coupled (queueing) policies and
inter-dump times of decoupled (accumulate-and-dump) policies.  Support is
stored sparsely: only durations with positive mass are kept, so a
deterministic pmf at a huge duration costs O(1).
"""

import json
import math
from dataclasses import dataclass

from .errors import (
    DuplicateDuration,
    NegativeProbability,
    NonPositiveDuration,
    TailTooHeavy,
    UnnormalizedMass,
)

#: Tolerance on |sum of probabilities - 1|.  Stricter would reject folded
#: geometric tails; looser would mask construction bugs.
MASS_TOL = 1e-9

#: Tail mass beyond which a geometric truncation is refused by default.
GEOMETRIC_TAIL_TOL = 1e-12

#: Cap on supports built by the construction helpers.  Large inter-dump
#: times are age-suboptimal anyway, so nothing of interest lives out here.
DEFAULT_D_MAX = 10_000


@dataclass(frozen=True)
class FinitePmf:
    """Probability mass function with finite support on {1, 2, 3, ...}.

    ``entries`` is a tuple of (duration, probability) pairs with strictly
    increasing durations and strictly positive probabilities summing to 1
    within :data:`MASS_TOL`.  Instances are immutable and safe to share.
    """

    entries: tuple

    @property
    def durations(self):
        return tuple(d for d, _ in self.entries)

    @property
    def probabilities(self):
        return tuple(p for _, p in self.entries)

    @property
    def s_min(self):
        """Minimum supported duration."""
        return self.entries[0][0]

    @property
    def d_max(self):
        """Maximum supported duration."""
        return self.entries[-1][0]

    def prob(self, duration):
        """Mass at ``duration`` (0.0 off support)."""
        for d, p in self.entries:
            if d == duration:
                return p
            if d > duration:
                break
        return 0.0

    def tail(self, r):
        """P(D > r), exact for the finite support."""
        return math.fsum(p for d, p in self.entries if d > r)

    def to_json(self):
        """Serialize as ``{"entries": [[duration, probability], ...]}``.

        The emitted decimal representation round-trips bit-stably through
        :meth:`from_json`.
        """
        return json.dumps({"entries": [[d, p] for d, p in self.entries]})

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        return make_pmf([(d, p) for d, p in payload["entries"]])


@dataclass(frozen=True)
class Moments:
    """First two moments of a duration distribution, in slots / slots^2."""

    mean: float
    second_moment: float
    variance: float


def make_pmf(entries) -> FinitePmf:
    """Validate and normalize (duration, probability) pairs into a pmf.

    Entries are sorted by duration; zero-mass entries are dropped so the
    stored support is exactly the positive-mass durations.

    Raises
    ------
    NonPositiveDuration, DuplicateDuration, NegativeProbability,
    UnnormalizedMass
    """
    items = list(entries)
    if not items:
        raise UnnormalizedMass("pmf needs at least one entry")
    cleaned = []
    for d, p in items:
        di = int(d)
        if di != d or di < 1:
            raise NonPositiveDuration(f"duration {d!r} is not a positive integer")
        pf = float(p)
        if not math.isfinite(pf) or pf < 0.0:
            raise NegativeProbability(f"probability {p!r} at duration {di} is not in [0, 1]")
        cleaned.append((di, pf))
    cleaned.sort(key=lambda e: e[0])
    for (d0, _), (d1, _) in zip(cleaned, cleaned[1:]):
        if d0 == d1:
            raise DuplicateDuration(f"duration {d0} listed twice")
    total = math.fsum(p for _, p in cleaned)
    if abs(total - 1.0) > MASS_TOL:
        raise UnnormalizedMass(f"probabilities sum to {total!r}, not 1")
    support = tuple((d, p) for d, p in cleaned if p > 0.0)
    if not support:
        raise UnnormalizedMass("pmf has no positive-mass duration")
    return FinitePmf(support)


def pmf_moments(pmf: FinitePmf) -> Moments:
    """Exact mean, second moment and variance of a finite pmf."""
    mean = math.fsum(d * p for d, p in pmf.entries)
    second = math.fsum(d * d * p for d, p in pmf.entries)
    return Moments(mean=mean, second_moment=second, variance=second - mean * mean)


def is_smp(pmf: FinitePmf):
    """Shortest-most-probable predicate.

    Returns ``(smp, s_min)`` where ``smp`` is true iff the mass at the
    minimum supported duration is >= the mass at every supported duration.
    """
    s_min, p_min = pmf.entries[0]
    smp = all(p <= p_min for _, p in pmf.entries)
    return smp, s_min


def geometric_pmf(mu, d_max=None, allow_heavy_tail=False) -> FinitePmf:
    """Truncated geometric pmf with success probability ``mu``.

    Mass is (1-mu)^(d-1) * mu for d < d_max; the remaining tail is folded
    onto d_max so the total is exactly 1 while the mass at duration 1 (which
    drives the leakage rate) is preserved exactly.  When ``d_max`` is omitted
    the smallest truncation point with tail mass <= 1e-12 is chosen.

    Raises :class:`TailTooHeavy` if the requested truncation would fold more
    than 1e-12 of mass and ``allow_heavy_tail`` is not set.
    """
    if not 0.0 < mu <= 1.0:
        raise NegativeProbability(f"geometric parameter {mu!r} outside (0, 1]")
    if mu == 1.0:
        return FinitePmf(((1, 1.0),))
    if d_max is None:
        d_max = max(1, math.ceil(math.log(GEOMETRIC_TAIL_TOL) / math.log(1.0 - mu)))
        d_max = min(d_max, DEFAULT_D_MAX)
    d_max = int(d_max)
    if d_max < 1:
        raise NonPositiveDuration(f"d_max {d_max} is not a positive integer")
    tail = (1.0 - mu) ** d_max
    if tail > GEOMETRIC_TAIL_TOL and not allow_heavy_tail:
        raise TailTooHeavy(
            f"tail mass {tail:.3e} beyond d_max={d_max} exceeds {GEOMETRIC_TAIL_TOL}"
        )
    entries = [(d, (1.0 - mu) ** (d - 1) * mu) for d in range(1, d_max)]
    entries.append((d_max, (1.0 - mu) ** (d_max - 1)))  # folded tail
    return make_pmf(entries)


def uniform_pmf(k) -> FinitePmf:
    """Uniform pmf on {1, ..., k}; mean (k+1)/2."""
    k = int(k)
    if k < 1:
        raise NonPositiveDuration(f"uniform width {k} is not a positive integer")
    return make_pmf([(d, 1.0 / k) for d in range(1, k + 1)])


def deterministic_pmf(tau) -> FinitePmf:
    """Point mass at duration ``tau``."""
    taui = int(tau)
    if taui != tau or taui < 1:
        raise NonPositiveDuration(f"duration {tau!r} is not a positive integer")
    return FinitePmf(((taui, 1.0),))
