"""Forward solvers used to check reconstructions independently.

:func:`forward_modal` evolves the direct problem exactly in the eigenbasis.
:func:`forward_fd_heat` and :func:`forward_l1_subdiffusion` work in physical
space on ``(0, pi)`` with finite differences and share nothing with the
spectral code: the involution term ``epsilon u''(pi - x)`` is discretised by
reading the second-difference stencil at the mirrored node ``N + 1 - j``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import lu_factor, lu_solve

from .inverse import InverseSolution, ProblemData, evaluate_f
from .mittag_leffler import _check_alpha, decay_factor
from .operators import EigenSystem, analyze, check_field, synthesize

log = logging.getLogger(__name__)

MIN_STEPS = 10
MAX_DENSE_N = 1024
DEFAULT_N = 401
DEFAULT_M = 4000
DEFAULT_TOLERANCE = 5e-3


@dataclass(frozen=True)
class TimeGrid:
    steps: int
    T: float

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < MIN_STEPS:
            raise ValueError(f"need at least {MIN_STEPS} time steps, got {self.steps!r}")
        if not self.T > 0:
            raise ValueError(f"horizon must be positive, got {self.T!r}")

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.steps + 1)


@dataclass(frozen=True)
class SpaceGrid:
    """``N`` interior nodes ``x_j = j h`` on ``(0, pi)`` with ``h = pi/(N + 1)``."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"need at least 3 interior nodes, got {self.N!r}")
        if self.N > MAX_DENSE_N:
            raise ValueError(f"dense solver limited to N <= {MAX_DENSE_N}")

    @property
    def h(self) -> float:
        return math.pi / (self.N + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.N + 1)

    def l2_norm(self, values) -> float:
        values = np.asarray(values, dtype=float)
        return math.sqrt(self.h * float(values @ values))


def _space(space) -> SpaceGrid:
    return space if isinstance(space, SpaceGrid) else SpaceGrid(int(space))


def _time(time, T: float) -> TimeGrid:
    if isinstance(time, TimeGrid):
        if not math.isclose(time.T, T):
            raise ValueError(f"time grid horizon {time.T} differs from T={T}")
        return time
    return TimeGrid(int(time), float(T))


def _sampled(values, grid: SpaceGrid, what: str) -> np.ndarray:
    if callable(values):
        values = values(grid.nodes)
    values = np.asarray(values, dtype=float)
    if values.shape == ():
        values = np.full(grid.N, float(values))
    if values.shape != (grid.N,):
        raise ValueError(f"{what} must have {grid.N} interior samples, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite values")
    return values


def involution_matrix(epsilon: float, space: SpaceGrid) -> np.ndarray:
    """Finite-difference matrix of ``-u''(x) + epsilon u''(pi - x)`` with Dirichlet ends.

    Row ``j`` of the coupling term is the second-difference row of node
    ``N + 1 - j``, i.e. the row-reversed difference matrix.
    """
    epsilon = float(epsilon)
    if abs(epsilon) >= 1.0:
        raise ValueError(f"need |epsilon| < 1, got {epsilon!r}")
    n, h = space.N, space.h
    A = (
        np.diag(np.full(n, 2.0))
        - np.diag(np.ones(n - 1), 1)
        - np.diag(np.ones(n - 1), -1)
    ) / (h * h)
    return A - epsilon * A[::-1, :]


def forward_modal(
    sys: EigenSystem,
    phi,
    f,
    alpha: float,
    T: float,
    l: int,
    times: Sequence[float],
) -> list[np.ndarray]:
    """Exact per-mode evolution ``u_k(t) = f_k/lambda_k + (phi_k - f_k/lambda_k) E(-lambda_k t**alpha)``."""
    alpha = _check_alpha(alpha)
    lam = sys.eigenvalues(l)
    phi_k = analyze(sys, check_field(sys, phi), l)
    f_k = analyze(sys, check_field(sys, f), l)
    steady = f_k / lam
    out = []
    for t in times:
        t = float(t)
        if not 0.0 <= t:
            raise ValueError(f"time must be nonnegative, got {t}")
        decay = np.asarray(decay_factor(alpha, lam, t), dtype=float)
        out.append(synthesize(sys, steady + (phi_k - steady) * decay))
    return out


def forward_fd_heat(
    epsilon: float,
    phi: np.ndarray | Callable,
    f: np.ndarray | Callable,
    T: float,
    space: SpaceGrid | int = DEFAULT_N,
    time: TimeGrid | int = DEFAULT_M,
) -> np.ndarray:
    """Crank-Nicolson solution ``u(., T)`` at the interior nodes.

    Each step solves ``(I + dt/2 L_h) u^{m+1} = (I - dt/2 L_h) u^m + dt f``
    with one LU factorisation reused for all steps.
    """
    space = _space(space)
    time = _time(time, T)
    u = _sampled(phi, space, "phi")
    src = _sampled(f, space, "f")
    L = involution_matrix(epsilon, space)
    dt = time.dt
    eye = np.eye(space.N)
    lhs = eye + 0.5 * dt * L
    if np.linalg.cond(lhs) > 1e12:  # pragma: no cover - impossible for |epsilon| < 1
        raise np.linalg.LinAlgError("Crank-Nicolson matrix is numerically singular")
    lu = lu_factor(lhs)
    rhs_op = eye - 0.5 * dt * L
    forcing = dt * src
    for _ in range(time.steps):
        u = lu_solve(lu, rhs_op @ u + forcing)
    return u


def l1_weights(alpha: float, steps: int, dt: float) -> np.ndarray:
    """``b_j = ((j+1)**(1-alpha) - j**(1-alpha)) / (Gamma(2-alpha) dt**alpha)``, ``j = 0..steps-1``."""
    j = np.arange(steps, dtype=float)
    return ((j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)) / (
        math.gamma(2.0 - alpha) * dt**alpha
    )


def forward_l1_subdiffusion(
    epsilon: float,
    phi: np.ndarray | Callable,
    f: np.ndarray | Callable,
    alpha: float,
    T: float,
    space: SpaceGrid | int = DEFAULT_N,
    time: TimeGrid | int = DEFAULT_M,
    corrected: bool = True,
) -> np.ndarray:
    """Implicit L1 scheme for ``D^alpha u + L u = f``; returns ``u(., T)``.

    The Caputo derivative at ``t_n`` is ``sum_j b_j (u^{n-j} - u^{n-j-1})``.
    With ``corrected=True`` the first step carries the extra source
    ``(f - L phi)/2``; without it the weak ``t**alpha`` singularity of the
    solution caps the observed order at one, with it the order is ``2 - alpha``.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"L1 scheme needs 0 < alpha < 1, got {alpha!r} (use forward_fd_heat for 1)")
    space = _space(space)
    time = _time(time, T)
    u0 = _sampled(phi, space, "phi")
    src = _sampled(f, space, "f")
    L = involution_matrix(epsilon, space)
    M = time.steps
    b = l1_weights(alpha, M, time.dt)
    lu = lu_factor(b[0] * np.eye(space.N) + L)
    # diffs[i] = u^{i+1} - u^i
    diffs = np.zeros((M, space.N))
    u = u0.copy()
    for n in range(1, M + 1):
        rhs = b[0] * u + src
        if n > 1:
            # sum_{j=1}^{n-1} b_j (u^{n-j} - u^{n-j-1})
            rhs -= b[n - 1 : 0 : -1] @ diffs[: n - 1]
        if corrected and n == 1:
            rhs += 0.5 * (src - L @ u0)
        new = lu_solve(lu, rhs)
        diffs[n - 1] = new - u
        u = new
    return u


@dataclass(frozen=True)
class VerificationReport:
    epsilon: float
    alpha: float
    l: int
    oracle: str
    terminal_error: float
    tolerance: float
    passed: bool
    space_N: int
    time_M: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _epsilon_of(target) -> float:
    if isinstance(target, EigenSystem):
        if target.name == "involution":
            return float(target.params["epsilon"])
        if target.name == "dirichlet_laplacian" and np.allclose(target.domain, (0.0, math.pi)):
            return 0.0
        raise ValueError(f"no finite-difference oracle for operator {target.name!r}")
    return float(target)


def resample(sys: EigenSystem, values, x) -> np.ndarray:
    """Cubic-spline interpolation of a field from the quadrature nodes to ``x``."""
    return CubicSpline(sys.nodes, check_field(sys, values))(x)


def verify_reconstruction(
    target: EigenSystem | float,
    data: ProblemData,
    sol: InverseSolution,
    space: SpaceGrid | int = DEFAULT_N,
    time: TimeGrid | int = DEFAULT_M,
    tolerance: float = DEFAULT_TOLERANCE,
    f=None,
) -> VerificationReport:
    """Drive the physical-space oracle with the recovered source and compare with ``psi``.

    The error is ``||u_oracle(., T) - psi|| / max(||phi||, 1)`` on the oracle
    grid.  ``f`` overrides the source field (samples on the quadrature nodes);
    by default ``evaluate_f(sol)`` is used.
    """
    sys = sol.operator
    epsilon = _epsilon_of(target)
    space = _space(space)
    time = _time(time, data.T)
    x = space.nodes
    source = evaluate_f(sol) if f is None else f
    phi_h = resample(sys, data.phi, x)
    psi_h = resample(sys, data.psi, x)
    f_h = resample(sys, source, x)
    if sol.alpha == 1.0:
        oracle = "crank-nicolson"
        u_T = forward_fd_heat(epsilon, phi_h, f_h, data.T, space, time)
    else:
        oracle = "l1"
        u_T = forward_l1_subdiffusion(epsilon, phi_h, f_h, sol.alpha, data.T, space, time)
    err = space.l2_norm(u_T - psi_h) / max(space.l2_norm(phi_h), 1.0)
    report = VerificationReport(
        epsilon=epsilon,
        alpha=sol.alpha,
        l=sol.l,
        oracle=oracle,
        terminal_error=float(err),
        tolerance=float(tolerance),
        passed=bool(err <= tolerance),
        space_N=space.N,
        time_M=time.steps,
    )
    log.info("verification eps=%g l=%d: error %.3e (%s)", epsilon, sol.l, err, oracle)
    return report
