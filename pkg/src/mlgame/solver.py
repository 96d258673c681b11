"""Smoothing Newton solver for the game complementarity problem.

The complementarity system ``y >= 0, s = F(y) >= 0, <y, s> = 0`` is
embedded into the smooth root-finding problem ``H(mu, y, s) = 0`` with

    H(mu, y, s) = ( mu,
                    s - F(y),
                    Phi(mu, y, s) + mu * y )

where ``Phi`` applies ``phi(mu, a, b) = a + b - sqrt((a - b)^2 + 4 mu)``
componentwise to the pairs ``(y_i, s_i)``.  For ``mu > 0`` the map is
continuously differentiable and ``phi`` approximates ``2 min(a, b)``,
exactly so at ``mu = 0``.

One iteration solves the perturbed Newton system

    H(z) + H'(z) dz = (1/beta) ||H(z)|| e0,       e0 = (1, 0, .., 0),

by dense LU with partial pivoting, then backtracks over the step grid
``1, delta, delta^2, ..`` until

    ||H(z + lam dz)|| <= (1 - sigma (1 - 1/beta) lam) ||H(z)||.

The first equation row is decoupled, giving the closed form
``dmu = (1/beta)||H|| - mu`` and hence ``mu > 0`` along the whole
trajectory; the accepted step strictly decreases ``||H||``.

Each solve attempt starts from ``z0 = (mu0, y0, F(y0))`` with
``beta = ||H(z0)|| / mu0`` (floored just above 1).  When an attempt
fails, the driver retries from scratch with the next fallback ``mu0``
from the configured schedule.  An iterate only counts as converged when
``||H|| <= tol`` *and* the unsmoothed complementarity residual is also
within ``tol``; the smoothed norm alone bounds the residual only up to
a factor, and the extra check rejects runaway iterates that drive
``||H||`` down along an unbounded ray where ``mu * y`` masks an
infeasible block.  Since the local convergence is superlinear, the
certificate typically costs at most one additional iteration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .tcp import TcpInstance, eval_F, jacobian_F, residual

__all__ = [
    "STATUS_CONVERGED",
    "STATUS_MAX_ITER",
    "STATUS_LINESEARCH",
    "STATUS_SINGULAR",
    "SingularSystemError",
    "LineSearchError",
    "SolverConfig",
    "SolverState",
    "TraceRecord",
    "SolveReport",
    "phi",
    "eval_H",
    "jacobian_H",
    "newton_direction",
    "line_search",
    "solve",
]

STATUS_CONVERGED = "converged"
STATUS_MAX_ITER = "max_iter"
STATUS_LINESEARCH = "linesearch_failure"
STATUS_SINGULAR = "singular_system"

_PIVOT_TOL = 1e-14
_BETA_FLOOR = 1.0 + 1e-8
# Iterations allowed to tighten the residual certificate once ||H|| <= tol.
_CERTIFICATE_GRACE = 10


class SingularSystemError(RuntimeError):
    """Newton system is numerically singular; the caller should restart."""


class LineSearchError(RuntimeError):
    """No step on the backtracking grid satisfied the decrease condition."""


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the smoothing Newton method.

    ``restart_mus`` lists the fallback initial smoothing values tried in
    order after ``mu0`` fails.  ``divergence_limit`` bounds the iterate
    magnitude; beyond it the attempt is abandoned as diverging.
    """

    delta: float = 0.75
    sigma: float = 1e-4
    mu0: float = 0.1
    tol: float = 1e-6
    max_iter: int = 200
    max_linesearch: int = 60
    restart_mus: tuple[float, ...] = (0.01, 6.1, 9.1, 12.1, 15.1, 18.1)
    divergence_limit: float = 1e8

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie in (0, 1)")
        if self.mu0 <= 0.0:
            raise ValueError("mu0 must be positive")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.max_linesearch < 1:
            raise ValueError("iteration caps must be positive")
        if any(v <= 0.0 for v in self.restart_mus):
            raise ValueError("restart_mus must be positive")


@dataclass
class SolverState:
    """One iterate ``z = (mu, y, s)`` plus the attempt's fixed ``beta``."""

    mu: float
    y: np.ndarray
    s: np.ndarray
    beta: float
    k: int = 0


@dataclass(frozen=True)
class TraceRecord:
    """Per-iteration log row; ``step_length`` is None on the initial row."""

    iteration: int
    mu: float
    h_norm: float
    step_length: float | None


@dataclass
class SolveReport:
    """Outcome of a solve, including the iterate that was reached."""

    status: str
    y: np.ndarray
    s: np.ndarray
    h_norm: float
    iterations: int
    restarts_used: int
    wall_time: float
    mu0_used: float
    mu_final: float
    beta: float
    status_detail: str = ""
    trace: list[TraceRecord] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == STATUS_CONVERGED


def phi(mu, a, b):
    """Smoothed pairwise minimum: ``a + b - sqrt((a - b)^2 + 4 mu)``.

    Accepts scalars or arrays; requires ``mu >= 0``.  At ``mu = 0`` this
    is exactly ``2 min(a, b)``.
    """
    mu_arr = np.asarray(mu, dtype=np.float64)
    if np.any(mu_arr < 0):
        raise ValueError("phi requires mu >= 0")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    val = a + b - np.sqrt((a - b) ** 2 + 4.0 * mu_arr)
    return float(val) if val.ndim == 0 else val


def eval_H(t: TcpInstance, mu: float, y, s) -> np.ndarray:
    """The smoothed system value, a vector of length ``1 + 2 m``."""
    m = t.m
    y = np.asarray(y, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if y.shape != (m,) or s.shape != (m,):
        raise ValueError(f"y and s must have shape ({m},)")
    out = np.empty(1 + 2 * m)
    out[0] = mu
    out[1 : m + 1] = s - eval_F(t, y)
    out[m + 1 :] = phi(mu, y, s) + mu * y
    return out


def jacobian_H(t: TcpInstance, mu: float, y, s) -> np.ndarray:
    """Jacobian of :func:`eval_H` with respect to ``(mu, y, s)``; needs ``mu > 0``.

    Row 0 is ``e0``.  The middle block rows are ``(0, -F'(y), I)``.  The
    bottom rows combine the partials of ``phi`` -- with
    ``r = sqrt((y - s)^2 + 4 mu)`` they are ``d phi/d y = 1 - (y - s)/r``,
    ``d phi/d s = 1 + (y - s)/r``, ``d phi/d mu = -2/r`` -- plus the
    ``mu y`` coupling (``y`` in the mu column, ``mu I`` in the y block).
    """
    if mu <= 0.0:
        raise ValueError("jacobian_H requires mu > 0")
    m = t.m
    y = np.asarray(y, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if y.shape != (m,) or s.shape != (m,):
        raise ValueError(f"y and s must have shape ({m},)")
    r = np.sqrt((y - s) ** 2 + 4.0 * mu)
    J = np.zeros((1 + 2 * m, 1 + 2 * m))
    J[0, 0] = 1.0
    J[1 : m + 1, 1 : m + 1] = -jacobian_F(t, y)
    J[1 : m + 1, m + 1 :] = np.eye(m)
    J[m + 1 :, 0] = -2.0 / r + y
    J[m + 1 :, 1 : m + 1] = np.diag(1.0 - (y - s) / r) + mu * np.eye(m)
    J[m + 1 :, m + 1 :] = np.diag(1.0 + (y - s) / r)
    return J


def newton_direction(
    t: TcpInstance, state: SolverState, H: np.ndarray | None = None
) -> tuple[float, np.ndarray, np.ndarray]:
    """Solve the perturbed Newton system at ``state`` by LU factorization.

    Returns ``(dmu, dy, ds)``.  ``H`` may pass in the already-evaluated
    system value.  Raises :class:`SingularSystemError` when a pivot
    falls below 1e-14 or the decoupled first row is not reproduced, both
    of which signal a restart.
    """
    m = t.m
    if H is None:
        H = eval_H(t, state.mu, state.y, state.s)
    h_norm = float(np.linalg.norm(H))
    J = jacobian_H(t, state.mu, state.y, state.s)
    rhs = -H
    rhs[0] += h_norm / state.beta
    lu, piv = scipy.linalg.lu_factor(J, check_finite=False)
    if np.abs(np.diag(lu)).min() < _PIVOT_TOL:
        raise SingularSystemError("pivot below 1e-14 in the Newton system")
    dz = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    dmu_closed = h_norm / state.beta - state.mu
    scale = 1.0 + abs(dmu_closed) + float(np.abs(dz).max())
    if abs(dz[0] - dmu_closed) > 1e-8 * scale:
        raise SingularSystemError("LU solution violates the decoupled mu row")
    return dmu_closed, dz[1 : m + 1], dz[m + 1 :]


def line_search(
    t: TcpInstance,
    state: SolverState,
    direction: tuple[float, np.ndarray, np.ndarray],
    config: SolverConfig,
    h_norm: float | None = None,
) -> float:
    """Largest ``delta^j`` satisfying the sufficient-decrease condition.

    Raises :class:`LineSearchError` after ``max_linesearch`` shrinkages.
    """
    dmu, dy, ds = direction
    if h_norm is None:
        h_norm = float(np.linalg.norm(eval_H(t, state.mu, state.y, state.s)))
    slope = config.sigma * (1.0 - 1.0 / state.beta)
    lam = 1.0
    for _ in range(config.max_linesearch + 1):
        trial = float(
            np.linalg.norm(
                eval_H(t, state.mu + lam * dmu, state.y + lam * dy, state.s + lam * ds)
            )
        )
        if trial <= (1.0 - slope * lam) * h_norm:
            return lam
        lam *= config.delta
    raise LineSearchError(f"no acceptable step above delta^{config.max_linesearch}")


def _certified(t: TcpInstance, y: np.ndarray, tol: float) -> bool:
    return residual(t, y) <= tol and float(y.min()) >= -tol


def _attempt(
    t: TcpInstance,
    y0: np.ndarray,
    mu0: float,
    config: SolverConfig,
    collect_trace: bool,
):
    """Run the iteration once from scratch for a single ``mu0``.

    Returns ``(detail, state, h_norm, trace)`` where ``detail`` is
    'converged', 'max_iter', 'linesearch_failure', 'singular_system',
    'diverged', or 'stalled'.
    """
    y = y0.copy()
    s = eval_F(t, y)
    mu = mu0
    H = eval_H(t, mu, y, s)
    h_norm = float(np.linalg.norm(H))
    beta = max(h_norm / mu0, _BETA_FLOOR)
    state = SolverState(mu=mu, y=y, s=s, beta=beta, k=0)
    trace = [TraceRecord(0, mu, h_norm, None)] if collect_trace else []
    history = [h_norm]
    grace = 0

    for k in range(config.max_iter):
        state.k = k
        if h_norm <= config.tol:
            if _certified(t, state.y, config.tol):
                return STATUS_CONVERGED, state, h_norm, trace
            grace += 1
            if grace > _CERTIFICATE_GRACE:
                return "stalled", state, h_norm, trace
        if float(np.abs(state.y).max()) > config.divergence_limit:
            return "diverged", state, h_norm, trace
        # Hopeless-creep cut: if the average contraction over the last 30
        # accepted steps cannot reach the certificate level within the
        # remaining budget, abandon the attempt early.
        if k >= 40 and k % 10 == 0:
            ratio = (h_norm / history[k - 30]) ** (1.0 / 30.0)
            if ratio > 0.9 and h_norm * ratio ** (config.max_iter - k) > 10.0 * config.tol:
                return "stalled", state, h_norm, trace

        try:
            direction = newton_direction(t, state, H=H)
        except SingularSystemError:
            return STATUS_SINGULAR, state, h_norm, trace
        try:
            lam = line_search(t, state, direction, config, h_norm=h_norm)
        except LineSearchError:
            return STATUS_LINESEARCH, state, h_norm, trace

        dmu, dy, ds = direction
        state.mu += lam * dmu
        state.y = state.y + lam * dy
        state.s = state.s + lam * ds
        if state.mu <= 0.0:
            # Impossible by the closed-form mu update; guard regardless.
            return STATUS_SINGULAR, state, h_norm, trace
        H = eval_H(t, state.mu, state.y, state.s)
        h_norm = float(np.linalg.norm(H))
        history.append(h_norm)
        if collect_trace:
            trace.append(TraceRecord(k + 1, state.mu, h_norm, lam))

    state.k = config.max_iter
    return STATUS_MAX_ITER, state, h_norm, trace


_DETAIL_TO_STATUS = {
    STATUS_CONVERGED: STATUS_CONVERGED,
    STATUS_MAX_ITER: STATUS_MAX_ITER,
    STATUS_LINESEARCH: STATUS_LINESEARCH,
    STATUS_SINGULAR: STATUS_SINGULAR,
    "diverged": STATUS_MAX_ITER,
    "stalled": STATUS_MAX_ITER,
}


def solve(
    t: TcpInstance,
    y0=None,
    config: SolverConfig | None = None,
    collect_trace: bool = False,
) -> SolveReport:
    """Solve the complementarity problem, restarting over the mu0 schedule.

    ``y0`` defaults to ``0.01 * ones(m)``.  Every attempt restarts from
    scratch: ``s0 = F(y0)`` and ``beta = ||H(z0)|| / mu0`` are
    recomputed per attempt.  On success the reported iterate satisfies
    ``||H|| <= tol``, complementarity residual ``<= tol`` and
    ``y >= -tol`` entrywise.  After exhausting the schedule the report
    carries the best iterate seen (smallest ``||H||``) and its failure
    detail.  Identical inputs produce identical reports apart from
    ``wall_time``.
    """
    cfg = config or SolverConfig()
    if y0 is None:
        y0 = np.full(t.m, 0.01)
    else:
        y0 = np.asarray(y0, dtype=np.float64)
        if y0.shape != (t.m,):
            raise ValueError(f"y0 has shape {y0.shape}, expected ({t.m},)")

    start = time.perf_counter()
    schedule = (cfg.mu0,) + tuple(cfg.restart_mus)
    best = None
    for idx, mu0 in enumerate(schedule):
        detail, state, h_norm, trace = _attempt(t, y0, mu0, cfg, collect_trace)
        if detail == STATUS_CONVERGED:
            return SolveReport(
                status=STATUS_CONVERGED,
                y=state.y,
                s=state.s,
                h_norm=h_norm,
                iterations=state.k,
                restarts_used=idx,
                wall_time=time.perf_counter() - start,
                mu0_used=mu0,
                mu_final=state.mu,
                beta=state.beta,
                status_detail=STATUS_CONVERGED,
                trace=trace,
            )
        if best is None or h_norm < best[2]:
            best = (detail, state, h_norm, trace, mu0)

    detail, state, h_norm, trace, mu0 = best
    return SolveReport(
        status=_DETAIL_TO_STATUS[detail],
        y=state.y,
        s=state.s,
        h_norm=h_norm,
        iterations=state.k,
        restarts_used=len(schedule) - 1,
        wall_time=time.perf_counter() - start,
        mu0_used=mu0,
        mu_final=state.mu,
        beta=state.beta,
        status_detail=detail,
        trace=trace,
    )
