"""Event-aligned fixed-step integration of the coupled leader/observer system.

The step grid is built so that every stage-window boundary, every topology
switch time, and t_end land exactly on accepted step boundaries: the nominal
dt is shortened locally just before each event.  No step straddles a switch,
and within a step the topology frozen at the step's start time is used
(switching is right-continuous).  Everything is deterministic: identical
inputs produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, Diverged, NonFinite
from .gain import CascadeSchedule, varsigma_clamped
from .graph import GraphAnalysis, TopologySequence
from .observer import LeaderModel, ObserverGains, dpto_rhs, leader_rhs, local_errors

_EVENT_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step integration settings.

    guard clamps the time-varying gain denominator and must cover at least
    one step (guard >= dt).  record_stride keeps every m-th accepted step;
    events are always recorded.
    """

    t0: float
    t_end: float
    dt: float
    method: str = "rk4"
    guard: float | None = None
    sign_smoothing: float | None = None
    record_stride: int = 10
    convergence_tolerance: float = 0.01
    divergence_threshold: float = 1e9

    def __post_init__(self):
        if self.dt <= 0.0:
            raise DimensionMismatch(f"dt must be positive, got {self.dt}")
        if self.t_end <= self.t0:
            raise DimensionMismatch("t_end must exceed t0")
        if self.method not in ("euler", "rk4"):
            raise DimensionMismatch(f"unknown method '{self.method}'")
        guard = 10.0 * self.dt if self.guard is None else float(self.guard)
        if guard < self.dt:
            raise DimensionMismatch(
                f"guard ({guard:g}) must be at least dt ({self.dt:g})"
            )
        object.__setattr__(self, "guard", guard)
        if self.record_stride < 1:
            raise DimensionMismatch("record_stride must be a positive integer")
        if self.convergence_tolerance <= 0.0:
            raise DimensionMismatch("convergence tolerance must be positive")


@dataclass(frozen=True)
class SimResult:
    """Recorded trajectory and diagnostics of one run.

    estimate_errors[s, i, k-1] is follower i's stage-k global error at
    times[s]; local_errors holds the matching psi vectors under the topology
    active at the sample instant.  decay_bound is the theoretical envelope of
    the currently active stage.  convergence_times[k-1] is the earliest
    recorded time after which stage k's worst-follower error stays inside the
    tolerance band until t_end (None if that never happens).
    """

    times: np.ndarray
    leader_states: np.ndarray
    estimate_errors: np.ndarray
    local_errors: np.ndarray
    lyapunov: np.ndarray
    decay_bound: np.ndarray
    convergence_times: tuple[float | None, ...]
    event_log: tuple[tuple[float, str], ...]


def decay_budget(
    analysis: GraphAnalysis,
    gains: ObserverGains,
    sched: CascadeSchedule,
    stage_k: int,
    V_at_window_start: float,
    t: float,
    guard: float,
) -> float:
    """Theoretical Lyapunov envelope for stage k from its window start.

    varsigma(t)^-2 * exp(-c (t - window_start)) * V_at_window_start with
    c = 2 alpha lambda_min / max(weights), using the same guard-clamped
    scaling function as the dynamics.
    """
    w = sched.window(stage_k)
    c = 2.0 * gains.alpha * analysis.lambda_min / analysis.max_weight
    vs = varsigma_clamped(w, t, guard)
    return vs ** (-2.0) * np.exp(-c * (t - w.start)) * V_at_window_start


def detect_convergence(
    times: np.ndarray, estimate_errors: np.ndarray, tol: float
) -> list[float | None]:
    """Earliest recorded time per stage after which the error band holds to the end.

    For stage k that is the first tau with max_i |error[s, i, k-1]| <= tol for
    every recorded s in [tau, t_end]; None if even the final sample violates.
    """
    if tol <= 0.0:
        raise DimensionMismatch("tolerance must be positive")
    n = estimate_errors.shape[2]
    worst = np.max(np.abs(estimate_errors), axis=1)  # (S, n)
    out: list[float | None] = []
    for k in range(n):
        bad = np.flatnonzero(worst[:, k] > tol)
        if bad.size == 0:
            out.append(float(times[0]))
        elif bad[-1] == len(times) - 1:
            out.append(None)
        else:
            out.append(float(times[bad[-1] + 1]))
    return out


def _event_grid(cfg: SimConfig, sched: CascadeSchedule, topos: TopologySequence) -> list[float]:
    # Stage boundaries first so their exact float values win over near-duplicates.
    events: list[float] = []

    def add(t: float):
        if cfg.t0 <= t <= cfg.t_end and all(abs(t - e) > _EVENT_MERGE_TOL for e in events):
            events.append(t)

    for b in sched.boundaries():
        add(b)
    add(cfg.t0)
    add(cfg.t_end)
    for t, _ in topos.schedule:
        add(t)
    return sorted(events)


def _segment_steps(e1: float, e2: float, dt: float) -> int:
    span = e2 - e1
    m = int(round(span / dt))
    if m >= 1 and abs(e1 + m * dt - e2) <= 1e-9 * dt:
        return m
    return int(np.floor(span / dt)) + 1


def run(
    topos: TopologySequence,
    leader: LeaderModel,
    gains: ObserverGains,
    sched: CascadeSchedule,
    initial_estimates: np.ndarray,
    cfg: SimConfig,
) -> SimResult:
    """Integrate the coupled leader and observer over [t0, t_end].

    Raises Diverged when any state magnitude exceeds the divergence threshold
    or turns non-finite, and propagates InputBoundViolated from the leader.
    Under switching (p > 1) the sequence must carry common_H so the Lyapunov
    weights are well defined across switches.
    """
    n = leader.order
    if sched.order != n:
        raise DimensionMismatch(
            f"schedule order {sched.order} does not match leader order {n}"
        )
    if sched.t0 != cfg.t0 or topos.schedule[0][0] != cfg.t0:
        raise DimensionMismatch(
            "cascade schedule and switching schedule must start at the sim t0"
        )
    if topos.topology_count > 1 and topos.common_H is None:
        raise DimensionMismatch(
            "switching over several topologies requires common_H weights"
        )
    N = topos.topologies[0].follower_count
    E = np.array(initial_estimates, dtype=float)
    if E.shape != (N, n):
        raise DimensionMismatch(f"initial estimates must be ({N}, {n}), got {E.shape}")
    if not np.all(np.isfinite(E)):
        raise DimensionMismatch("initial estimates must be finite")

    analyses = topos.analyses()
    worst = min(analyses, key=lambda a: a.lambda_min)  # envelope uses the worst topology
    guard = cfg.guard
    smoothing = cfg.sign_smoothing

    stage_starts = {k: sched.stage_start(k) for k in range(1, n + 1)}
    stage_ends = {k: sched.window(k).end for k in range(1, n + 1)}
    baselines: dict[int, float] = {}

    def active_stage(t: float) -> int:
        for k in range(1, n + 1):  # stage 1 starts last; pick the latest opened window
            if stage_starts[k] <= t:
                return k
        return n

    x0 = leader.initial_state.copy()

    times: list[float] = []
    rec_leader: list[np.ndarray] = []
    rec_err: list[np.ndarray] = []
    rec_psi: list[np.ndarray] = []
    rec_V: list[np.ndarray] = []
    rec_budget: list[float] = []
    event_log: list[tuple[float, str]] = []

    def rhs(t: float, x0_s: np.ndarray, E_s: np.ndarray, analysis: GraphAnalysis):
        return (
            leader_rhs(leader, x0_s, t),
            dpto_rhs(analysis, gains, sched, guard, E_s, x0_s, t, smoothing),
        )

    def record(t: float):
        analysis = analyses[topos.active_index(t) - 1]
        err = E - x0[None, :]
        psi = local_errors(analysis, E, x0)
        V = 0.5 * (analysis.rho[:, None] * psi * psi).sum(axis=0)
        for k in range(1, n + 1):
            if t == stage_starts[k] and k not in baselines:
                baselines[k] = float(V[k - 1])
        k = active_stage(t)
        budget = (
            decay_budget(worst, gains, sched, k, baselines[k], t, guard)
            if k in baselines
            else np.inf
        )
        times.append(t)
        rec_leader.append(x0.copy())
        rec_err.append(err)
        rec_psi.append(psi)
        rec_V.append(V)
        rec_budget.append(float(budget))

    events = _event_grid(cfg, sched, topos)
    for k in range(1, n + 1):
        if cfg.t0 <= stage_starts[k] <= cfg.t_end:
            event_log.append((stage_starts[k], f"stage {k} window opens"))
        if cfg.t0 <= stage_ends[k] <= cfg.t_end:
            event_log.append((stage_ends[k], f"stage {k} window closes"))
    for t, j in topos.schedule:
        if cfg.t0 < t <= cfg.t_end:
            event_log.append((t, f"switch to topology {j}"))
    event_log.sort(key=lambda item: item[0])

    record(cfg.t0)
    step_count = 0
    for e1, e2 in zip(events[:-1], events[1:]):
        analysis = analyses[topos.active_index(e1) - 1]
        m = _segment_steps(e1, e2, cfg.dt)
        t = e1
        for j in range(1, m + 1):
            tn = e2 if j == m else e1 + j * cfg.dt
            h = tn - t
            try:
                if cfg.method == "rk4":
                    k1 = rhs(t, x0, E, analysis)
                    k2 = rhs(t + 0.5 * h, x0 + 0.5 * h * k1[0], E + 0.5 * h * k1[1], analysis)
                    k3 = rhs(t + 0.5 * h, x0 + 0.5 * h * k2[0], E + 0.5 * h * k2[1], analysis)
                    k4 = rhs(tn, x0 + h * k3[0], E + h * k3[1], analysis)
                    x0 = x0 + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
                    E = E + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
                else:
                    k1 = rhs(t, x0, E, analysis)
                    x0 = x0 + h * k1[0]
                    E = E + h * k1[1]
            except NonFinite:
                raise Diverged(t) from None
            t = tn
            step_count += 1
            peak = max(np.max(np.abs(x0)), np.max(np.abs(E)))
            if not np.isfinite(peak) or peak > cfg.divergence_threshold:
                raise Diverged(t)
            if step_count % cfg.record_stride == 0 or j == m:
                if times[-1] != t:
                    record(t)

    arr_times = np.array(times)
    arr_err = np.array(rec_err)
    return SimResult(
        times=arr_times,
        leader_states=np.array(rec_leader),
        estimate_errors=arr_err,
        local_errors=np.array(rec_psi),
        lyapunov=np.array(rec_V),
        decay_bound=np.array(rec_budget),
        convergence_times=tuple(
            detect_convergence(arr_times, arr_err, cfg.convergence_tolerance)
        ),
        event_log=tuple(event_log),
    )
