"""Leader dynamics, the cascade observer right-hand side, and gain synthesis.

The leader is an order-n integrator chain driven by a bounded scalar input at
the top:

    x0_1' = x0_2,  ...,  x0_{n-1}' = x0_n,  x0_n' = f0(x0, t),  |f0| <= f0_bar.

Each follower i keeps an estimate row (xhat_i1, ..., xhat_in) and measures only
the local disagreement

    psi_k[i] = b_i (xhat_ik - x0_k) + sum_j a_ij (xhat_ik - xhat_jk),

which equals row i of L0 (xhat_k - x0_k 1).  The estimate dynamics are

    xhat_ik' = xhat_i,k+1 - (alpha + beta r_k(t)) psi_k[i],       k < n,
    xhat_in' = -sigma sign(psi_n[i]) - (alpha + beta r_n(t)) psi_n[i],

where r_k is the stage-k rate ratio from the cascade schedule.  The constant
gain alpha acts from the start; the time-varying part switches on only inside
each stage's window.  Sufficient gains: alpha > 0, sigma at least the leader
input bound, and beta at least max(weights) / min(lambda_min) over the
topologies in play (the single-topology case reduces to the same formula with
the rho weights).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleTopology,
    InputBoundViolated,
    NonFinite,
)
from .gain import CascadeSchedule, stage_gain
from .graph import GraphAnalysis

InputFn = Callable[[np.ndarray, float], float]

_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class LeaderModel:
    """Order-n integrator-chain leader with a bounded top-stage input."""

    order: int
    input_fn: InputFn
    input_bound: float
    initial_state: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise DimensionMismatch(f"leader order must be >= 1, got {self.order}")
        if self.input_bound < 0.0:
            raise DimensionMismatch("input bound must be nonnegative")
        x0 = np.atleast_1d(np.asarray(self.initial_state, dtype=float))
        if x0.shape != (self.order,):
            raise DimensionMismatch(
                f"initial state length {x0.shape[0]} does not match order {self.order}"
            )
        x0.flags.writeable = False
        object.__setattr__(self, "initial_state", x0)


@dataclass(frozen=True)
class ObserverGains:
    """Constant gain alpha, time-varying weight beta, sliding gain sigma."""

    alpha: float
    beta: float
    sigma: float
    provenance: str = "user"

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise DimensionMismatch(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0.0 or self.sigma < 0.0:
            raise DimensionMismatch("beta and sigma must be nonnegative")


@dataclass(frozen=True)
class GainMargins:
    """Multipliers applied on top of the theoretical bounds during synthesis."""

    alpha: float
    beta_factor: float = 1.0
    sigma_factor: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise DimensionMismatch("alpha margin must be positive")
        if self.beta_factor < 1.0 or self.sigma_factor < 1.0:
            raise DimensionMismatch("beta_factor and sigma_factor must be >= 1")


# ---------------------------------------------------------------------------
# Leader inputs selectable by name (see also the experiment config format).
# Additional inputs can be registered by adding a factory here.

def _make_zero() -> InputFn:
    return lambda x0, t: 0.0


def _make_constant(c: float) -> InputFn:
    return lambda x0, t: c


def _make_sine(amplitude: float, angular_frequency: float) -> InputFn:
    return lambda x0, t: amplitude * np.sin(angular_frequency * t)


LEADER_INPUTS: dict[str, Callable[..., InputFn]] = {
    "zero": _make_zero,
    "constant": _make_constant,
    "sine": _make_sine,
}


def input_by_name(name: str, *params: float) -> InputFn:
    """Look up a leader input factory by name and instantiate it."""
    try:
        factory = LEADER_INPUTS[name]
    except KeyError:
        raise DimensionMismatch(
            f"unknown leader input '{name}' (known: {sorted(LEADER_INPUTS)})"
        ) from None
    try:
        return factory(*params)
    except TypeError as exc:
        raise DimensionMismatch(f"bad parameters for leader input '{name}': {exc}") from None


# ---------------------------------------------------------------------------


def leader_rhs(model: LeaderModel, x0: np.ndarray, t: float) -> np.ndarray:
    """Integrator-chain derivative of the leader state.

    Monitors the input bound at every evaluation and raises
    InputBoundViolated when |f0| exceeds it beyond slack.
    """
    n = model.order
    f0 = float(model.input_fn(x0, t))
    if abs(f0) > model.input_bound + _BOUND_SLACK:
        raise InputBoundViolated(
            f"|f0| = {abs(f0):.6g} exceeds declared bound {model.input_bound:.6g} at t={t:.6g}"
        )
    dx = np.empty(n)
    dx[: n - 1] = x0[1:]
    dx[n - 1] = f0
    return dx


def local_errors(analysis: GraphAnalysis, estimates: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """Per-stage local disagreement vectors as an (N, n) matrix.

    Column k-1 holds psi_k = L0 (estimates[:, k-1] - x0[k-1]).
    """
    estimates = np.asarray(estimates, dtype=float)
    N = analysis.follower_count
    if estimates.ndim != 2 or estimates.shape[0] != N:
        raise DimensionMismatch(
            f"estimates must be ({N}, n), got {estimates.shape}"
        )
    if estimates.shape[1] != np.atleast_1d(x0).shape[0]:
        raise DimensionMismatch("estimate columns do not match leader order")
    return analysis.sub_laplacian @ (estimates - np.asarray(x0, dtype=float)[None, :])


def _sign(x: np.ndarray, smoothing: float | None) -> np.ndarray:
    # Hard sign with sign(0) = 0 by default; optional boundary-layer smoothing
    # x / (|x| + eps) for chattering studies.
    if smoothing is None:
        return np.sign(x)
    return x / (np.abs(x) + smoothing)


def dpto_rhs(
    analysis_at_t: GraphAnalysis,
    gains: ObserverGains,
    sched: CascadeSchedule,
    guard: float,
    estimates: np.ndarray,
    x0: np.ndarray,
    t: float,
    sign_smoothing: float | None = None,
) -> np.ndarray:
    """Estimate derivative matrix (N, n) of the cascade observer.

    analysis_at_t must belong to the topology active at time t; under
    switching the caller swaps it at switch instants.
    """
    n = sched.order
    psi = local_errors(analysis_at_t, estimates, x0)
    out = np.empty_like(psi)
    for k in range(1, n + 1):
        g = gains.alpha + gains.beta * stage_gain(sched, k, t, guard)
        col = k - 1
        if k < n:
            out[:, col] = estimates[:, col + 1] - g * psi[:, col]
        else:
            out[:, col] = -gains.sigma * _sign(psi[:, col], sign_smoothing) - g * psi[:, col]
    if not np.all(np.isfinite(out)):
        raise NonFinite(f"observer derivative is non-finite at t={t:.6g}")
    return out


def synthesize_gains(
    analyses: Sequence[GraphAnalysis],
    f0_bound: float,
    margins: GainMargins,
) -> ObserverGains:
    """Gains satisfying the sufficient conditions over all given topologies.

    alpha = margins.alpha,
    beta  = beta_factor * max(weights over analyses) / min(lambda_min over analyses),
    sigma = sigma_factor * f0_bound.

    A single analysis reduces the beta formula to the time-invariant bound.
    Raises InfeasibleTopology when some lambda_min is not positive.
    """
    if not analyses:
        raise DimensionMismatch("at least one graph analysis is required")
    if f0_bound < 0.0:
        raise DimensionMismatch("f0 bound must be nonnegative")
    lam_min = min(a.lambda_min for a in analyses)
    if lam_min <= 0.0:
        raise InfeasibleTopology(
            f"cannot synthesize gains: min lambda_min = {lam_min:.6g} <= 0"
        )
    max_weight = max(a.max_weight for a in analyses)
    return ObserverGains(
        alpha=margins.alpha,
        beta=margins.beta_factor * max_weight / lam_min,
        sigma=margins.sigma_factor * f0_bound,
        provenance="synthesized",
    )


def beta_lower_bound(analyses: Sequence[GraphAnalysis]) -> float:
    """The topology-dependent lower bound on beta (unit-factor synthesis)."""
    lam_min = min(a.lambda_min for a in analyses)
    if lam_min <= 0.0:
        raise InfeasibleTopology(
            f"beta bound undefined: min lambda_min = {lam_min:.6g} <= 0"
        )
    return max(a.max_weight for a in analyses) / lam_min


def gain_condition_warnings(
    gains: ObserverGains,
    analyses: Sequence[GraphAnalysis],
    f0_bound: float,
) -> list[str]:
    """Human-readable violations of the sufficient gain conditions.

    Empty when the gains satisfy them.  Violations do not forbid running a
    simulation (the conditions are sufficient, not necessary), so callers
    treat these as warnings.
    """
    warnings = []
    bound = beta_lower_bound(analyses)
    if gains.beta < bound:
        warnings.append(
            f"beta = {gains.beta:.6g} is below the topology bound {bound:.6g}; "
            f"prescribed-time convergence is not guaranteed"
        )
    if gains.sigma < f0_bound:
        warnings.append(
            f"sigma = {gains.sigma:.6g} is below the leader input bound {f0_bound:.6g}; "
            f"the sliding term cannot dominate the input"
        )
    return warnings


def lyapunov_trace(analysis: GraphAnalysis, psi_k: np.ndarray) -> float:
    """Weighted energy of one stage's local error: 0.5 * sum_i w_i psi_k[i]^2."""
    psi_k = np.asarray(psi_k, dtype=float)
    return 0.5 * float(np.sum(analysis.rho * psi_k * psi_k))
