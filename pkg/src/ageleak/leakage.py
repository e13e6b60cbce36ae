"""Closed-form and recursive maximal-leakage computations.

Two families are covered:

* Coupled (FCFS / preemptive LCFS) servers with shortest-most-probable
  service pmfs: the finite-horizon leakage is a binomial sum over the count
  of achievable output sequences weighted by the top service probability.
  The sum is evaluated through log-gamma binomials and a log-sum-exp so it
  stays finite at horizons of 10^4 and beyond, where raw binomial
  coefficients overflow any fixed-width float.

* Decoupled accumulate-and-dump servers: the finite-horizon leakage follows
  a renewal recursion over the expected number of achievable outputs, and
  the asymptotic rate is log2 of the unique positive real root z0 of
  E[z^-D] = 1/2.  The recursion keeps a sliding window of the last d_max
  values with block rescaling, so horizon 10^6 runs in linear time and
  constant memory.
"""

import math
from dataclasses import dataclass

from .errors import ConvergenceFailure, InvalidBeta, InvalidTau, NonHalfIntegerTau, ZeroRate
from .pmf import FinitePmf, uniform_pmf

_LN2 = math.log(2.0)

#: Bisection budget and target residual on |E[z0^-D] - 1/2|.
ROOT_MAX_ITER = 200
ROOT_RESIDUAL = 1e-12

#: Block-rescaling threshold for the renewal recursion.
_RESCALE = 2.0 ** 512


@dataclass(frozen=True)
class LeakageResult:
    """Maximal leakage over an n-slot horizon, in bits.

    At most one bit leaks per slot (outputs are binary), so bits <= n.
    """

    bits: float
    n: int

    def __post_init__(self):
        if self.bits < -1e-9 or self.bits > self.n + 1e-6:
            raise ValueError(f"leakage {self.bits!r} bits outside [0, n={self.n}]")


@dataclass(frozen=True)
class RateBounds:
    """Lower/upper bounds on an asymptotic leakage rate, bits per slot."""

    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0 + 1e-12:
            raise ValueError(f"bounds ({self.lower!r}, {self.upper!r}) are not ordered in [0, 1]")


def _check_beta(beta):
    if not 0.0 < beta <= 1.0:
        raise InvalidBeta(f"top service probability {beta!r} outside (0, 1]")


def _log2sumexp(log_terms):
    m = max(log_terms)
    if m == -math.inf:
        return -math.inf
    return (m + math.log(math.fsum(math.exp(t - m) for t in log_terms))) / _LN2


def smp_leakage_bits(n, s1, beta) -> LeakageResult:
    """Finite-horizon leakage of a coupled server with an SMP service pmf.

    ``s1`` is the minimum service time and ``beta`` the mass it carries.
    Computes  log2( sum_{k=0}^{floor(n/s1)} C(n - k(s1-1), k) beta^k ),
    the weighted count of output sequences whose transmissions are at least
    s1 slots apart.  For s1 = 1 this collapses to n*log2(1 + beta).
    """
    _check_beta(beta)
    n = int(n)
    s1 = int(s1)
    if n < 0:
        raise ValueError(f"horizon {n} is negative")
    if s1 < 1:
        raise ValueError(f"minimum service time {s1} is not positive")
    if n == 0:
        return LeakageResult(0.0, 0)
    log_beta = math.log(beta)
    terms = []
    for k in range(n // s1 + 1):
        total = n - k * (s1 - 1)
        log_binom = (
            math.lgamma(total + 1) - math.lgamma(k + 1) - math.lgamma(total - k + 1)
        )
        terms.append(log_binom + k * log_beta)
    return LeakageResult(_log2sumexp(terms), n)


def smp_rate_bounds(s1, beta) -> RateBounds:
    """Asymptotic-rate bounds (1/s1) log2(1+beta) <= rate <= log2(1+beta).

    The bounds coincide exactly when s1 = 1.
    """
    _check_beta(beta)
    s1 = int(s1)
    if s1 < 1:
        raise ValueError(f"minimum service time {s1} is not positive")
    upper = math.log2(1.0 + beta)
    return RateBounds(lower=upper / s1, upper=upper)


def dad_leakage_bits(n, tau) -> LeakageResult:
    """Exact finite-horizon leakage of the deterministic dump policy.

    Each dump slot contributes one fully revealed bit: floor(n / tau).
    """
    n = int(n)
    tau = int(tau)
    if tau < 1:
        raise InvalidTau(f"dump period {tau} is not a positive integer")
    if n < 0:
        raise ValueError(f"horizon {n} is negative")
    return LeakageResult(float(n // tau), n)


def rad_leakage_bits(n, dump_pmf: FinitePmf) -> LeakageResult:
    """Finite-horizon leakage of a random accumulate-and-dump policy.

    Evaluates log2 m(n) where m(n) counts, in expectation over the dump
    timer, the weighted achievable outputs:

        m(n) = 2 * sum_{d=1}^{n} g(d) m(n-d) + P(D > n),   m(0) = 1.

    The window of the last d_max values is kept in a ring buffer that is
    rescaled by 2^-512 whenever values grow past 2^512; the shed exponent
    is re-added at the end, so horizons of 10^6 slots neither overflow nor
    lose the leading digits.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"horizon {n} is negative")
    if n == 0:
        return LeakageResult(0.0, 0)
    entries = dump_pmf.entries
    d_max = dump_pmf.d_max
    # P(D > r) for r = 0..d_max, exact from the cumulative tail.
    tail = [0.0] * (d_max + 1)
    acc = 1.0
    probs = dict(entries)
    for r in range(d_max + 1):
        tail[r] = acc
        acc -= probs.get(r + 1, 0.0)
    size = d_max + 1
    window = [0.0] * size
    window[0] = 1.0  # m(0)
    shed = 0  # base-2 exponent removed from the window so far
    value = 1.0
    for t in range(1, n + 1):
        s = 0.0
        for d, p in entries:
            if d > t:
                break
            s += 2.0 * p * window[(t - d) % size]
        if t <= d_max:
            s += tail[t] * 2.0 ** (-shed)
        if s > _RESCALE:
            inv = 1.0 / _RESCALE
            for i in range(size):
                window[i] *= inv
            s *= inv
            shed += 512
        window[t % size] = s
        value = s
    return LeakageResult(math.log2(value) + shed, n)


def _dump_transform(pmf: FinitePmf, w):
    """E[exp(-D * w)] = E[z^-D] evaluated at z = e^w."""
    return math.fsum(p * math.exp(-d * w) for d, p in pmf.entries)


def rad_rate(dump_pmf: FinitePmf) -> float:
    """Asymptotic leakage rate log2(z0) with E[z0^-D] = 1/2.

    E[z^-D] is strictly decreasing with E[1^-D] = 1 and E[2^-D] <= 1/2
    (durations are >= 1), so the root is bracketed by (1, 2].  Bisection
    runs on w = ln z, where the bracket is (0, ln 2] and double precision
    near small w comfortably supports the 1e-12 residual target.
    """
    lo, hi = 0.0, _LN2
    f_hi = _dump_transform(dump_pmf, hi)
    if abs(f_hi - 0.5) <= ROOT_RESIDUAL:
        return 1.0  # zero-delay pmf: every duration is one slot
    for _ in range(ROOT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f_mid = _dump_transform(dump_pmf, mid)
        if abs(f_mid - 0.5) <= ROOT_RESIDUAL:
            return mid / _LN2
        if f_mid > 0.5:
            lo = mid
        else:
            hi = mid
    raise ConvergenceFailure(
        f"root of E[z^-D]=1/2 not located to {ROOT_RESIDUAL} in {ROOT_MAX_ITER} bisections"
    )


def geometric_rad_rate(tau) -> float:
    """Rate of geometric dumps with mean ``tau``: log2(1 + 1/tau)."""
    if tau < 1.0:
        raise InvalidTau(f"mean inter-dump time {tau!r} is below one slot")
    return math.log2(1.0 + 1.0 / tau)


def uniform_rad_rate(tau) -> float:
    """Rate of uniform dumps on {1..2*tau-1} with mean ``tau``.

    Solves (1 - z0^-(2 tau - 1)) / ((2 tau - 1)(z0 - 1)) = 1/2; ``tau`` must
    be an integer or half-integer >= 1 so the support width is an integer.
    """
    if tau < 1.0:
        raise InvalidTau(f"mean inter-dump time {tau!r} is below one slot")
    k = 2.0 * tau - 1.0
    k_int = round(k)
    if abs(k - k_int) > 1e-9 or k_int < 1:
        raise NonHalfIntegerTau(f"2*tau-1 = {k!r} is not a positive integer")
    return rad_rate(uniform_pmf(k_int))


def leakage_time(rate) -> float:
    """Average slots per leaked bit: the reciprocal rate."""
    if rate <= 0.0:
        raise ZeroRate(f"leakage rate {rate!r} is not positive")
    return 1.0 / rate


def dad_rate(tau) -> float:
    """Rate of the deterministic dump policy: 1/tau."""
    tau = int(tau)
    if tau < 1:
        raise InvalidTau(f"dump period {tau} is not a positive integer")
    return 1.0 / tau


__all__ = [
    "LeakageResult",
    "RateBounds",
    "smp_leakage_bits",
    "smp_rate_bounds",
    "dad_leakage_bits",
    "rad_leakage_bits",
    "rad_rate",
    "dad_rate",
    "geometric_rad_rate",
    "uniform_rad_rate",
    "leakage_time",
    "ROOT_RESIDUAL",
]
