"""Assembly of (age, leakage-time) trade-off curves across policy families.

Each sweep point pairs a policy's average age with its leakage time (the
reciprocal leakage rate) and the server efficiency eta, the slope from the
zero-delay baseline (age 1 + 1/lambda, leakage time 1).  Curves from
different families sample different age grids, so dominance comparisons
interpolate piecewise-linearly.
"""

import csv
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .age import ddad_age, fcfs_age, lcfs_age, mbt_age
from .errors import BaselinePoint, InvalidConfig, NoOverlap, TooFewPoints
from .leakage import dad_rate, geometric_rad_rate, leakage_time, uniform_rad_rate
from .optimize import ddad_policy, greedy_smp_pmf, optimal_alpha_for_fcfs
from .pmf import geometric_pmf, uniform_pmf
from .policy import Policy
from .sim import DEFAULT_WARMUP, SimConfig, simulate
from .sources import BernoulliSource

FAMILIES = (
    "lcfs-greedy",
    "lcfs-geo",
    "rad-geo",
    "fcfs-greedy",
    "fcfs-greedy-thinned",
    "mbt",
    "dad",
    "rad-uniform",
    "ddad",
)

CSV_COLUMNS = (
    "policy_tag",
    "param",
    "lambda",
    "source",
    "delta",
    "rate_bits",
    "leak_time",
    "eta",
    "sim_delta",
    "sim_ci",
)


@dataclass(frozen=True)
class TradeoffPoint:
    """One policy configuration on the age/leakage-time plane."""

    policy_tag: str
    param: float
    lam: float
    delta: float
    rate_bits: float
    leak_time: float
    eta: Optional[float]
    source: str = ""
    sim_delta: Optional[float] = None
    sim_ci: Optional[float] = None


@dataclass(frozen=True)
class SweepSpec:
    """A parameter sweep over one policy family.

    ``grid`` holds the family's parameter values (beta for greedy families,
    mean period tau for geometric/uniform/deterministic dumps, target rate
    for the dithering schedule).  With ``simulate`` set, every point also
    carries an empirical age from a seeded run.
    """

    family: str
    grid: tuple
    lam: float = 0.5
    simulate: bool = False
    slots: int = 1_000_000
    warmup: int = DEFAULT_WARMUP
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfig(f"unknown sweep family {self.family!r}")
        if len(self.grid) == 0:
            raise InvalidConfig("sweep grid is empty")


def efficiency(point: TradeoffPoint, lam) -> float:
    """Server efficiency eta = (T - 1) / (delta - delta_1), delta_1 = 1 + 1/lam."""
    baseline = 1.0 + 1.0 / lam
    if point.delta <= baseline + 1e-12:
        raise BaselinePoint(f"age {point.delta!r} is at the zero-delay baseline")
    return (point.leak_time - 1.0) / (point.delta - baseline)


def _analytic_point(family, param, lam):
    """(rate, delta, policy) for one grid value of one family."""
    if family == "lcfs-greedy":
        pmf = greedy_smp_pmf(param)
        return math.log2(1.0 + param), lcfs_age(lam, pmf).delta, Policy.lcfs(pmf)
    if family == "fcfs-greedy":
        pmf = greedy_smp_pmf(param)
        return math.log2(1.0 + param), fcfs_age(lam, pmf).delta, Policy.fcfs(pmf)
    if family == "fcfs-greedy-thinned":
        # thinned FCFS is assigned the unthinned coupled leakage rate; the
        # admission lottery is presumed invisible to the timing adversary
        pmf = greedy_smp_pmf(param)
        alpha, age = optimal_alpha_for_fcfs(lam, pmf)
        return math.log2(1.0 + param), age.delta, Policy.fcfs(pmf, alpha)
    if family == "mbt":
        pmf = geometric_pmf(param)
        alpha, _ = optimal_alpha_for_fcfs(lam, pmf)
        return math.log2(1.0 + param), mbt_age(alpha, param, lam).delta, Policy.fcfs(pmf, alpha)
    if family == "lcfs-geo":
        return geometric_rad_rate(param), 1.0 / lam + param, Policy.lcfs(geometric_pmf(1.0 / param))
    if family == "rad-geo":
        return geometric_rad_rate(param), 1.0 / lam + param, Policy.rad(geometric_pmf(1.0 / param))
    if family == "dad":
        tau = int(param)
        return dad_rate(tau), 1.0 / lam + (tau + 1.0) / 2.0, Policy.dad(tau)
    if family == "rad-uniform":
        rate = uniform_rad_rate(param)
        k = round(2.0 * param - 1.0)
        return rate, 1.0 / lam + (2.0 * param + 1.0) / 3.0, Policy.rad(uniform_pmf(k))
    if family == "ddad":
        dither = ddad_policy(param)
        return param, ddad_age(lam, dither.mean).delta, Policy.rad(dither.to_pmf())
    raise InvalidConfig(f"unknown sweep family {family!r}")


def sweep(spec: SweepSpec):
    """Evaluate a SweepSpec into trade-off points, in grid order.

    Analytic errors from infeasible grid values (for example an unstable
    unthinned FCFS load) propagate to the caller.  Simulation seeds are
    split per point from the sweep seed, so sweeps are reproducible
    regardless of evaluation order.
    """
    source = BernoulliSource(spec.lam)
    source_tag = f"bernoulli({spec.lam!r})"
    points = []
    for index, param in enumerate(spec.grid):
        rate, delta, policy = _analytic_point(spec.family, param, spec.lam)
        point = TradeoffPoint(
            policy_tag=spec.family,
            param=float(param),
            lam=spec.lam,
            delta=float(delta),
            rate_bits=float(rate),
            leak_time=leakage_time(rate),
            eta=None,
            source=source_tag,
        )
        try:
            point = replace(point, eta=efficiency(point, spec.lam))
        except BaselinePoint:
            pass
        if spec.simulate:
            child_seed = int(np.random.SeedSequence([spec.seed, index]).generate_state(1)[0])
            stats = simulate(
                SimConfig(policy, source, horizon=spec.slots, warmup=spec.warmup, seed=child_seed)
            )
            point = replace(point, sim_delta=stats.mean_age, sim_ci=stats.ci_half_width)
        points.append(point)
    return points


def dominance_check(series_a, series_b) -> bool:
    """True iff curve a lies on or above curve b over their common age range.

    Both series are interpolated piecewise-linearly onto the union of their
    age grids restricted to the overlap (the families sample different age
    grids); the comparison allows 1e-9 of slack.
    """
    if not series_a or not series_b:
        raise NoOverlap("empty series")
    a = sorted(series_a, key=lambda p: p.delta)
    b = sorted(series_b, key=lambda p: p.delta)
    lo = max(a[0].delta, b[0].delta)
    hi = min(a[-1].delta, b[-1].delta)
    if lo > hi:
        raise NoOverlap(f"age ranges [{a[0].delta}, {a[-1].delta}] and [{b[0].delta}, {b[-1].delta}] are disjoint")
    grid = np.unique(
        np.concatenate(
            [
                [p.delta for p in a if lo <= p.delta <= hi],
                [p.delta for p in b if lo <= p.delta <= hi],
                [lo, hi],
            ]
        )
    )
    ta = np.interp(grid, [p.delta for p in a], [p.leak_time for p in a])
    tb = np.interp(grid, [p.delta for p in b], [p.leak_time for p in b])
    return bool(np.all(ta >= tb - 1e-9))


def asymptotic_slope(series, tail_fraction) -> float:
    """Least-squares slope of leakage time vs. age over the high-age tail."""
    if len(series) < 10:
        raise TooFewPoints(f"need at least 10 points, got {len(series)}")
    if not 0.0 < tail_fraction <= 1.0:
        raise InvalidConfig(f"tail fraction {tail_fraction!r} outside (0, 1]")
    ordered = sorted(series, key=lambda p: p.delta)
    count = max(2, math.ceil(tail_fraction * len(ordered)))
    tail = ordered[-count:]
    slope, _ = np.polyfit([p.delta for p in tail], [p.leak_time for p in tail], 1)
    return float(slope)


def _cell(value):
    return "" if value is None else repr(float(value))


def write_csv(points, path_or_file):
    """Emit points as CSV with the fixed column order.

    Floats are written in shortest round-trip decimal form, '.' decimal
    separator; undefined eta is an empty field, never NaN text.
    """
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for p in points:
            writer.writerow(
                [
                    p.policy_tag,
                    repr(float(p.param)),
                    repr(float(p.lam)),
                    p.source,
                    repr(float(p.delta)),
                    repr(float(p.rate_bits)),
                    repr(float(p.leak_time)),
                    _cell(p.eta),
                    _cell(p.sim_delta),
                    _cell(p.sim_ci),
                ]
            )
    finally:
        if own:
            fh.close()


def read_csv(path) -> list:
    """Reconstruct trade-off points from an emitted CSV file."""
    points = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise InvalidConfig(f"unexpected CSV header {header!r}")
        for row in reader:
            (tag, param, lam, source, delta, rate, leak, eta, sim_delta, sim_ci) = row
            points.append(
                TradeoffPoint(
                    policy_tag=tag,
                    param=float(param),
                    lam=float(lam),
                    delta=float(delta),
                    rate_bits=float(rate),
                    leak_time=float(leak),
                    eta=float(eta) if eta else None,
                    source=source,
                    sim_delta=float(sim_delta) if sim_delta else None,
                    sim_ci=float(sim_ci) if sim_ci else None,
                )
            )
    return points
