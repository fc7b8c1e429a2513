"""Directed interaction graphs and the spectral quantities the gain bounds need.

A topology is one leader plus N followers.  Edge weight a[i, j] > 0 means
information flows from follower j to follower i; pinning weight b[i] > 0 means
follower i receives the leader state directly.  The follower block of the
graph Laplacian, with pinning weights added on the diagonal, is

    L0[i, i] = b[i] + sum_j a[i, j],    L0[i, j] = -a[i, j]  (i != j),

so each row of L0 sums to b[i].  When every follower is reachable from the
leader, L0 is invertible, the weight vector rho solving L0^T rho = 1 is
positive, and the symmetrized weighted form

    M = (diag(rho) L0 + L0^T diag(rho)) / 2

is positive definite.  Those facts are what the observer gain bounds consume,
and they are validated (not assumed) here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleTopology,
    NoConvergence,
    NoSpanningTree,
    NotSymmetric,
    SingularLaplacian,
)

# Weights at or below this are treated as absent edges, so float dust cannot
# create phantom reachability.
EDGE_EPS = 1e-15

_SYMMETRY_TOL = 1e-10
_JACOBI_MAX_SWEEPS = 50


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class DirectedTopology:
    """Weighted digraph of one leader and N followers.

    adjacency: (N, N) nonnegative weights, a[i, j] = weight of edge j -> i,
        zero diagonal.
    pinning: length-N nonnegative weights of the leader -> follower links.
    """

    adjacency: np.ndarray
    pinning: np.ndarray

    def __post_init__(self):
        a = _as_readonly(np.atleast_2d(self.adjacency))
        b = _as_readonly(np.atleast_1d(self.pinning))
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"adjacency must be square, got {a.shape}")
        if b.shape != (a.shape[0],):
            raise DimensionMismatch(
                f"pinning length {b.shape[0]} does not match {a.shape[0]} followers"
            )
        if np.any(np.diag(a) != 0.0):
            raise DimensionMismatch("adjacency diagonal must be zero (no self-loops)")
        if np.any(a < 0.0) or np.any(b < 0.0):
            raise DimensionMismatch("edge and pinning weights must be nonnegative")
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "pinning", b)

    @property
    def follower_count(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True)
class GraphAnalysis:
    """Follower Laplacian L0 with its weight vector, mirror matrix and lambda_min.

    weight_source is "rho_from_L0" when rho solves L0^T rho = 1, or "user_H"
    when rho carries user-supplied diagonal weights eta.
    """

    sub_laplacian: np.ndarray
    rho: np.ndarray
    mirror: np.ndarray
    lambda_min: float
    weight_source: str
    max_weight: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "sub_laplacian", _as_readonly(self.sub_laplacian))
        object.__setattr__(self, "rho", _as_readonly(self.rho))
        object.__setattr__(self, "mirror", _as_readonly(self.mirror))
        object.__setattr__(self, "max_weight", float(np.max(self.rho)))

    @property
    def follower_count(self) -> int:
        return self.sub_laplacian.shape[0]


def sub_laplacian(topo: DirectedTopology) -> np.ndarray:
    """Follower block of the Laplacian with pinning weights on the diagonal."""
    a = topo.adjacency
    L0 = -a.copy()
    np.fill_diagonal(L0, topo.pinning + a.sum(axis=1))
    return L0


def has_spanning_tree(topo: DirectedTopology) -> bool:
    """True iff every follower is reachable from the leader.

    Breadth-first search over the directed edges leader -> i (pinning) and
    j -> i (adjacency), counting weights above EDGE_EPS as edges.
    """
    n = topo.follower_count
    seen = topo.pinning > EDGE_EPS
    queue = deque(np.flatnonzero(seen))
    while queue:
        j = queue.popleft()
        for i in np.flatnonzero(topo.adjacency[:, j] > EDGE_EPS):
            if not seen[i]:
                seen[i] = True
                queue.append(i)
    return bool(seen.all())


def _solve_partial_pivot(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting and explicit rank check.

    Raises SingularLaplacian when a pivot falls below 1e-12 * ||A||_inf.
    Robustness over speed: the systems here are tiny.
    """
    n = A.shape[0]
    aug = np.hstack([A.astype(float), b.reshape(n, 1).astype(float)])
    scale = np.abs(A).sum(axis=1).max()  # ||A||_inf
    tol = 1e-12 * max(scale, 1e-300)
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot_row, col]) <= tol:
            raise SingularLaplacian(
                f"pivot {abs(aug[pivot_row, col]):.3e} below tolerance {tol:.3e} "
                f"at elimination step {col}"
            )
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        factors = aug[col + 1 :, col] / aug[col, col]
        aug[col + 1 :, col:] -= np.outer(factors, aug[col, col:])
    x = np.empty(n)
    for row in range(n - 1, -1, -1):
        x[row] = (aug[row, -1] - aug[row, row + 1 : n] @ x[row + 1 :]) / aug[row, row]
    return x


def min_eig_symmetric(M: np.ndarray, tol: float = 1e-12) -> float:
    """Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.

    The sweep stops once the off-diagonal Frobenius norm is at most tol, which
    bounds the eigenvalue error by tol (Weyl).  Deterministic for fixed input.

    Raises NotSymmetric if max|M - M^T| > 1e-10, NoConvergence after the
    sweep budget.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {M.shape}")
    if tol <= 0.0:
        raise DimensionMismatch("tol must be positive")
    if M.shape[0] > 1 and np.max(np.abs(M - M.T)) > _SYMMETRY_TOL:
        raise NotSymmetric(
            f"asymmetry {np.max(np.abs(M - M.T)):.3e} exceeds {_SYMMETRY_TOL:.0e}"
        )
    A = 0.5 * (M + M.T)
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0])
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2) * 2.0)
        if off <= tol:
            return float(np.min(np.diag(A)))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                A[[p, q], :] = rot.T @ A[[p, q], :]
                A[:, [p, q]] = A[:, [p, q]] @ rot
                A[p, q] = A[q, p] = 0.0  # annihilated exactly by construction
    raise NoConvergence(
        f"Jacobi sweep budget {_JACOBI_MAX_SWEEPS} exhausted (off-diagonal {off:.3e})"
    )


def _mirror_of(L0: np.ndarray, weights: np.ndarray) -> np.ndarray:
    P = np.diag(weights)
    M = 0.5 * (P @ L0 + L0.T @ P)
    return 0.5 * (M + M.T)  # kill rounding asymmetry; eigensolver wants exact symmetry


def build_analysis(topo: DirectedTopology) -> GraphAnalysis:
    """Laplacian partition, rho weights, mirror matrix and its lambda_min.

    rho solves L0^T rho = 1_N.  Raises NoSpanningTree when some follower is
    unreachable from the leader; SingularLaplacian when the solve detects rank
    deficiency even though reachability passed (both facts are reported).
    """
    if not has_spanning_tree(topo):
        raise NoSpanningTree(
            "no leader-rooted spanning tree: some follower is unreachable"
        )
    L0 = sub_laplacian(topo)
    try:
        rho = _solve_partial_pivot(L0.T, np.ones(topo.follower_count))
    except SingularLaplacian as exc:
        raise SingularLaplacian(
            f"follower Laplacian is numerically singular although the "
            f"reachability check passed ({exc})"
        ) from exc
    mirror = _mirror_of(L0, rho)
    lam = min_eig_symmetric(mirror)
    return GraphAnalysis(
        sub_laplacian=L0,
        rho=rho,
        mirror=mirror,
        lambda_min=lam,
        weight_source="rho_from_L0",
    )


def mirror_with_H(topo: DirectedTopology, eta: np.ndarray) -> GraphAnalysis:
    """Mirror matrix for user-chosen diagonal weights H = diag(eta).

    The rho field of the result carries eta and weight_source is "user_H".
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if eta.shape != (topo.follower_count,):
        raise DimensionMismatch(
            f"eta length {eta.shape[0]} does not match {topo.follower_count} followers"
        )
    if np.any(eta <= 0.0):
        raise DimensionMismatch("all entries of eta must be positive")
    L0 = sub_laplacian(topo)
    mirror = _mirror_of(L0, eta)
    lam = min_eig_symmetric(mirror)
    return GraphAnalysis(
        sub_laplacian=L0,
        rho=eta,
        mirror=mirror,
        lambda_min=lam,
        weight_source="user_H",
    )


@dataclass(frozen=True)
class TopologySequence:
    """Piecewise-constant, right-continuous switching signal over p topologies.

    schedule holds (switch_time, topology_index) pairs with 1-based indices
    and strictly increasing times; entries that do not change the active index
    are dropped, so a p = 1 sequence behaves exactly like a static topology.
    common_H, when given, supplies the diagonal weights eta shared by every
    topology; each mirror matrix is then checked for positive definiteness.
    """

    topologies: tuple[DirectedTopology, ...]
    schedule: tuple[tuple[float, int], ...]
    common_H: np.ndarray | None = None

    def __post_init__(self):
        topos = tuple(self.topologies)
        if not topos:
            raise DimensionMismatch("at least one topology is required")
        counts = {t.follower_count for t in topos}
        if len(counts) != 1:
            raise DimensionMismatch(f"follower counts differ across topologies: {counts}")
        sched = [(float(t), int(j)) for t, j in self.schedule]
        if not sched:
            raise DimensionMismatch("schedule must contain at least one entry")
        times = [t for t, _ in sched]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise DimensionMismatch("switch times must be strictly increasing")
        for t, j in sched:
            if not 1 <= j <= len(topos):
                raise DimensionMismatch(f"topology index {j} out of range [1, {len(topos)}]")
        deduped = [sched[0]]
        for entry in sched[1:]:
            if entry[1] != deduped[-1][1]:
                deduped.append(entry)
        object.__setattr__(self, "topologies", topos)
        object.__setattr__(self, "schedule", tuple(deduped))
        if self.common_H is not None:
            eta = _as_readonly(np.atleast_1d(self.common_H))
            if eta.shape != (topos[0].follower_count,):
                raise DimensionMismatch("common_H length does not match follower count")
            if np.any(eta <= 0.0):
                raise DimensionMismatch("common_H entries must be positive")
            object.__setattr__(self, "common_H", eta)
            for j, topo in enumerate(topos, start=1):
                lam = mirror_with_H(topo, eta).lambda_min
                if lam <= 0.0:
                    raise InfeasibleTopology(
                        f"mirror of topology {j} is not positive definite with the "
                        f"given H (lambda_min = {lam:.6g})"
                    )

    @classmethod
    def static(cls, topo: DirectedTopology, t0: float) -> "TopologySequence":
        return cls(topologies=(topo,), schedule=((t0, 1),))

    @property
    def topology_count(self) -> int:
        return len(self.topologies)

    def active_index(self, t: float) -> int:
        """1-based index of the topology active at time t (right-continuous)."""
        idx = self.schedule[0][1]
        for time, j in self.schedule:
            if time <= t:
                idx = j
            else:
                break
        return idx

    def analyses(self) -> tuple[GraphAnalysis, ...]:
        """One GraphAnalysis per topology.

        Uses the shared eta weights when common_H is set, otherwise the
        per-topology rho solve.
        """
        if self.common_H is not None:
            return tuple(mirror_with_H(t, self.common_H) for t in self.topologies)
        return tuple(build_analysis(t) for t in self.topologies)
