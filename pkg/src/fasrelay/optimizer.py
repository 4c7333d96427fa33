"""Energy-efficiency model and the hierarchical search over
(blocklength, altitude, port count, transmit power).

The inner problem (minimum power meeting the reliability target) is solved
by bisection after an explicit monotonicity precheck; the outer levels are
exhaustive over their discrete grids, so no unimodality assumption is ever
exploited. Infeasible points carry a zero-EE sentinel plus an explicit
flag so that "zero goodput" and "constraint violating" stay distinguishable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .blercore import (DEFAULT_TRAJECTORY_NODES, FblParams, TrajectoryEvaluator,
                       linearize)
from .chanmodel import DEFAULT_RANK_TOLERANCE, fas_spectrum
from .errors import CausalityError, MonotonicityError
from .geometry import ScenarioConfig


@dataclass(frozen=True)
class EeConfig:
    """Constraint set and search grids for the energy-efficiency problem."""

    payload_bits: float = 80.0
    bandwidth: float = 1e7
    circuit_power: float = 10.0 ** -2.5   # 5 dBm
    switch_power: float = 1e-3            # 0 dBm
    port_time: float = 2e-6
    bler_threshold: float = 1e-3
    p_max: float = 10.0
    z_range: tuple[float, float] = (100.0, 800.0)
    l_set: tuple[int, ...] = (300, 400, 500, 600)
    n_range: tuple[int, int] = (1, 12)
    z_step: float = 10.0
    bisect_tol: float = 1e-4
    max_bisect_iters: int = 60

    def __post_init__(self):
        if self.payload_bits <= 0 or self.bandwidth <= 0:
            raise ValueError("payload_bits and bandwidth must be positive")
        if self.circuit_power < 0 or self.switch_power < 0:
            raise ValueError("static powers must be nonnegative")
        if self.port_time <= 0:
            raise ValueError("port_time must be positive")
        if not 0.0 < self.bler_threshold < 1.0:
            raise ValueError("bler_threshold must lie in (0, 1)")
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")
        if not self.z_range[0] < self.z_range[1]:
            raise ValueError("z_range must satisfy z_min < z_max")
        if not self.l_set:
            raise ValueError("l_set must be non-empty")
        if any(int(l) != l or l < 1 for l in self.l_set):
            raise ValueError("l_set entries must be positive integers")
        if self.n_range[0] < 1 or self.n_range[1] < self.n_range[0]:
            raise ValueError("n_range must satisfy 1 <= n_min <= n_max")
        if self.z_step <= 0:
            raise ValueError("z_step must be positive")
        if not 0.0 < self.bisect_tol < 1.0:
            raise ValueError("bisect_tol must lie in (0, 1)")
        if self.max_bisect_iters < 1:
            raise ValueError("max_bisect_iters must be positive")

    def altitude_grid(self) -> np.ndarray:
        z_min, z_max = self.z_range
        count = int(math.floor((z_max - z_min) / self.z_step + 1e-9)) + 1
        return z_min + self.z_step * np.arange(count)


def violates_causality(n_ports: int, port_time: float, blocklength: int,
                       bandwidth: float) -> bool:
    """True when port scanning cannot finish strictly inside the block.

    The comparison N * port_time < blocklength / bandwidth is evaluated in
    the scale-free form N * port_time * bandwidth < blocklength with a tiny
    relative guard, so exact boundary cases (scan time equal to the block)
    count as violations regardless of rounding in the float products.
    """
    return n_ports * port_time * bandwidth >= blocklength * (1.0 - 1e-12)


def energy_efficiency(payload_bits: float, eps_o: float, p2: float,
                      blocklength: int, bandwidth: float, n_ports: int,
                      port_time: float, circuit_power: float,
                      switch_power: float) -> float:
    """Successfully delivered bits per joule for one block.

    Energy = transmit power over the data portion of the block, static
    circuit power over the whole block, and switching power while the ports
    are scanned. Scanning must finish strictly before the block ends.
    """
    if not 0.0 <= eps_o <= 1.0:
        raise ValueError("eps_o must lie in [0, 1]")
    if p2 < 0:
        raise ValueError("p2 must be nonnegative")
    t_block = blocklength / bandwidth
    t_switch = n_ports * port_time
    if violates_causality(n_ports, port_time, blocklength, bandwidth):
        raise CausalityError(
            f"port scan time {t_switch:.3e}s must be below the block duration "
            f"{t_block:.3e}s (N={n_ports}, L={blocklength})")
    energy = p2 * (t_block - t_switch) + circuit_power * t_block + switch_power * t_switch
    return payload_bits * (1.0 - eps_o) / energy


_PRECHECK_POINTS = 10
_PRECHECK_SLACK = 1e-12


def _min_power_on(ev: TrajectoryEvaluator, ee: EeConfig):
    """Bisection for the smallest feasible transmit power on a prepared
    evaluator; returns (power, bler at power) or None when infeasible."""
    grid = ee.p_max * np.logspace(-8.0, 0.0, _PRECHECK_POINTS)
    eps = [ev.e2e_avg(p) for p in grid]
    for i in range(len(eps) - 1):
        if eps[i + 1] > eps[i] + _PRECHECK_SLACK:
            raise MonotonicityError(
                "end-to-end BLER failed to decrease with transmit power: "
                f"eps({grid[i]:.3e} W)={eps[i]:.6e} -> "
                f"eps({grid[i + 1]:.3e} W)={eps[i + 1]:.6e}")
    if eps[-1] > ee.bler_threshold:
        return None
    if eps[0] <= ee.bler_threshold:
        return float(grid[0]), eps[0]
    idx = max(i for i in range(len(eps)) if eps[i] > ee.bler_threshold)
    lo, hi = float(grid[idx]), float(grid[idx + 1])
    eps_hi = eps[idx + 1]
    for _ in range(ee.max_bisect_iters):
        if hi - lo <= ee.bisect_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        e_mid = ev.e2e_avg(mid)
        if e_mid <= ee.bler_threshold:
            hi, eps_hi = mid, e_mid
        else:
            lo = mid
    return hi, eps_hi


def min_power(cfg: ScenarioConfig, fas, fbl: FblParams, ee: EeConfig,
              z_u: float, nodes: int = DEFAULT_TRAJECTORY_NODES):
    """Smallest transmit power in (0, p_max] meeting the reliability target
    at altitude z_u, or None when even p_max misses it."""
    scenario = replace(cfg, uav_altitude=float(z_u))
    ev = TrajectoryEvaluator(scenario, fbl, fas, nodes)
    found = _min_power_on(ev, ee)
    return None if found is None else found[0]


@dataclass(frozen=True)
class PortEntry:
    n_ports: int
    feasible: bool
    p2: float | None
    eps_o: float | None
    ee: float


@dataclass(frozen=True)
class PortSearchResult:
    n_star: int | None
    p2_star: float | None
    ee_star: float
    feasible: bool
    entries: tuple[PortEntry, ...]


def best_port_count(cfg: ScenarioConfig, fbl: FblParams, ee: EeConfig,
                    z_u: float, aperture: float,
                    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
                    nodes: int = DEFAULT_TRAJECTORY_NODES) -> PortSearchResult:
    """Evaluate every admissible port count at fixed altitude and pick the
    EE maximizer. The correlation spectrum is rebuilt per N at the fixed
    aperture, so port spacing shrinks as ports are added."""
    scenario = replace(cfg, uav_altitude=float(z_u))
    entries = []
    best = None
    base_ev = None
    for n in range(ee.n_range[0], ee.n_range[1] + 1):
        if violates_causality(n, ee.port_time, fbl.blocklength, ee.bandwidth):
            entries.append(PortEntry(n_ports=n, feasible=False, p2=None,
                                     eps_o=None, ee=0.0))
            continue
        fas = fas_spectrum(n, aperture, rank_tolerance)
        if base_ev is None:
            base_ev = TrajectoryEvaluator(scenario, fbl, fas, nodes)
            ev = base_ev
        else:
            ev = base_ev.with_spectrum(fas)
        found = _min_power_on(ev, ee)
        if found is None:
            entries.append(PortEntry(n_ports=n, feasible=False, p2=None,
                                     eps_o=None, ee=0.0))
            continue
        p2, eps_o = found
        val = energy_efficiency(ee.payload_bits, eps_o, p2, fbl.blocklength,
                                ee.bandwidth, n, ee.port_time,
                                ee.circuit_power, ee.switch_power)
        entry = PortEntry(n_ports=n, feasible=True, p2=p2, eps_o=eps_o, ee=val)
        entries.append(entry)
        if best is None or entry.ee > best.ee:
            best = entry
    if best is None:
        return PortSearchResult(n_star=None, p2_star=None, ee_star=0.0,
                                feasible=False, entries=tuple(entries))
    return PortSearchResult(n_star=best.n_ports, p2_star=best.p2,
                            ee_star=best.ee, feasible=True,
                            entries=tuple(entries))


@dataclass(frozen=True)
class AltitudeEntry:
    z_u: float
    feasible: bool
    n_ports: int | None
    p2: float | None
    ee: float


@dataclass(frozen=True)
class AltitudeSearchResult:
    z_star: float | None
    n_star: int | None
    p2_star: float | None
    ee_star: float
    feasible: bool
    entries: tuple[AltitudeEntry, ...]


def best_altitude(cfg: ScenarioConfig, fbl: FblParams, ee: EeConfig,
                  aperture: float,
                  rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
                  nodes: int = DEFAULT_TRAJECTORY_NODES) -> AltitudeSearchResult:
    """Plain grid search over altitude; every point solves the port-count
    subproblem. Grid search is kept deliberately assumption-free since
    EE versus altitude is not known to be unimodal."""
    entries = []
    best = None
    for z in ee.altitude_grid():
        sub = best_port_count(cfg, fbl, ee, float(z), aperture,
                              rank_tolerance, nodes)
        entry = AltitudeEntry(z_u=float(z), feasible=sub.feasible,
                              n_ports=sub.n_star, p2=sub.p2_star, ee=sub.ee_star)
        entries.append(entry)
        if sub.feasible and (best is None or entry.ee > best.ee):
            best = entry
    if best is None:
        return AltitudeSearchResult(z_star=None, n_star=None, p2_star=None,
                                    ee_star=0.0, feasible=False,
                                    entries=tuple(entries))
    return AltitudeSearchResult(z_star=best.z_u, n_star=best.n_ports,
                                p2_star=best.p2, ee_star=best.ee,
                                feasible=True, entries=tuple(entries))


@dataclass(frozen=True)
class TracePoint:
    blocklength: int
    z_u: float
    n_ports: int | None
    p2: float | None
    ee: float
    feasible: bool


@dataclass(frozen=True)
class EeSolution:
    """Outcome of the full hierarchical search, with the per-(L, Z) trace."""

    l_star: int | None
    z_star: float | None
    n_star: int | None
    p2_star: float | None
    ee_star: float
    eps_star: float | None
    feasible: bool
    trace: tuple[TracePoint, ...]


def global_optimize(cfg: ScenarioConfig, ee: EeConfig, aperture: float,
                    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
                    nodes: int = DEFAULT_TRAJECTORY_NODES,
                    chi_variant: str = "2^R-1") -> EeSolution:
    """Exhaustive sweep over the blocklength set, solving the altitude
    problem at each length. Ties break toward smaller (L, Z, N), which
    keeps the result invariant to the ordering of l_set."""
    trace = []
    best = None           # (ee, l, z, n, p2)
    for l in ee.l_set:
        l = int(l)
        fbl = linearize(ee.payload_bits / l, l, chi_variant)
        alt = best_altitude(cfg, fbl, ee, aperture, rank_tolerance, nodes)
        for entry in alt.entries:
            trace.append(TracePoint(blocklength=l, z_u=entry.z_u,
                                    n_ports=entry.n_ports, p2=entry.p2,
                                    ee=entry.ee, feasible=entry.feasible))
            if not entry.feasible:
                continue
            key = (entry.ee, -l, -entry.z_u, -entry.n_ports)
            if best is None or key > (best[0], -best[1], -best[2], -best[3]):
                best = (entry.ee, l, entry.z_u, entry.n_ports, entry.p2)
    if best is None:
        return EeSolution(l_star=None, z_star=None, n_star=None, p2_star=None,
                          ee_star=0.0, eps_star=None, feasible=False,
                          trace=tuple(trace))
    ee_star, l_star, z_star, n_star, p2_star = best
    fbl = linearize(ee.payload_bits / l_star, l_star, chi_variant)
    scenario = replace(cfg, uav_altitude=z_star)
    fas = fas_spectrum(n_star, aperture, rank_tolerance)
    ev = TrajectoryEvaluator(scenario, fbl, fas, nodes)
    eps_star = ev.e2e_avg(p2_star)
    return EeSolution(l_star=l_star, z_star=z_star, n_star=n_star,
                      p2_star=p2_star, ee_star=ee_star, eps_star=eps_star,
                      feasible=True, trace=tuple(trace))
