"""Update-generation models: Bernoulli and two-state Markov sources.

Both produce a binary arrival sequence with full support, which is all the
leakage analysis needs; the age analysis additionally uses their statistics.
"""

from dataclasses import dataclass

from .errors import InvalidConfig, InvalidLambda


@dataclass(frozen=True)
class BernoulliSource:
    """I.i.d. arrivals: an update is generated each slot with probability lam."""

    lam: float

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise InvalidLambda(f"arrival rate {self.lam!r} outside (0, 1]")

    @property
    def effective_rate(self):
        return self.lam


@dataclass(frozen=True)
class MarkovSource:
    """Two-state source; the active state generates one update per slot.

    ``p01`` is the inactive-to-active transition probability, ``p10`` the
    active-to-inactive one.  The stationary probability of the active state
    is the effective arrival rate p01 / (p01 + p10).
    """

    p01: float
    p10: float

    def __post_init__(self):
        for name, p in (("p01", self.p01), ("p10", self.p10)):
            if not 0.0 < p <= 1.0:
                raise InvalidConfig(f"transition probability {name}={p!r} outside (0, 1]")

    @property
    def effective_rate(self):
        return self.p01 / (self.p01 + self.p10)
