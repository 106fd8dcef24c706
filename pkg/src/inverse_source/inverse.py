"""Recovery of ``(u, f)`` from the initial state and a terminal observation.

Per mode the direct problem reads ``D^alpha u_k + lambda_k u_k = f_k`` with
solution ``u_k(t) = f_k/lambda_k + C_k E_{alpha,1}(-lambda_k t**alpha)``.  The two
time conditions ``u_k(0) = phi_k`` and ``u_k(T) = psi_k`` fix

    C_k = (phi_k - psi_k) / (1 - E_{alpha,1}(-lambda_k T**alpha)),
    f_k = lambda_k (phi_k - C_k).

For ``alpha = 1`` the decay factor is ``exp(-lambda_k t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mittag_leffler import _check_alpha, decay_factor
from .operators import (
    DEFAULT_MODES,
    EigenSystem,
    FieldSample,
    analyze,
    check_field,
    synthesize,
)

DENOMINATOR_FLOOR = 1e-12


class DegenerateDenominator(ArithmeticError):
    """``1 - E(-lambda_k T**alpha)`` is too small for a stable reconstruction."""


@dataclass(frozen=True, eq=False)
class ProblemData:
    phi: np.ndarray
    psi: np.ndarray
    T: float
    alpha: float = 1.0

    def __post_init__(self):
        T = float(self.T)
        if not math.isfinite(T) or T <= 0:
            raise ValueError(f"horizon T must be positive, got {self.T!r}")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=float))
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=float))


@dataclass(frozen=True, eq=False)
class InverseSolution:
    operator: EigenSystem
    l: int
    phi_coeffs: np.ndarray
    psi_coeffs: np.ndarray
    C_coeffs: np.ndarray
    f_coeffs: np.ndarray
    T: float
    alpha: float
    phi_field: FieldSample

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.operator.eigenvalues(self.l)

    def u(self, t: float) -> FieldSample:
        return evaluate_u(self, t)

    def f(self, lphi=None) -> FieldSample:
        return evaluate_f(self, lphi)


def _coefficients(sys: EigenSystem, data: ProblemData, l: int):
    phi = check_field(sys, data.phi)
    psi = check_field(sys, data.psi)
    return phi, analyze(sys, phi, l), analyze(sys, psi, l)


def _assemble(sys, data, l, phi, phi_k, psi_k, decay) -> InverseSolution:
    denom = 1.0 - decay
    bad = np.flatnonzero(denom < DENOMINATOR_FLOOR)
    if bad.size:
        k = int(bad[0]) + 1
        raise DegenerateDenominator(
            f"mode {k}: 1 - E(-lambda T^alpha) = {denom[bad[0]]:.3e} below {DENOMINATOR_FLOOR:g}"
        )
    lam = sys.eigenvalues(l)
    C = (phi_k - psi_k) / denom
    f = lam * (phi_k - C)
    return InverseSolution(
        operator=sys,
        l=l,
        phi_coeffs=phi_k,
        psi_coeffs=psi_k,
        C_coeffs=C,
        f_coeffs=f,
        T=data.T,
        alpha=data.alpha,
        phi_field=phi,
    )


def solve(sys: EigenSystem, data: ProblemData, l: int = DEFAULT_MODES) -> InverseSolution:
    """Reconstruct the truncated solution pair from ``data`` using ``l`` modes."""
    phi, phi_k, psi_k = _coefficients(sys, data, l)
    decay = np.asarray(decay_factor(data.alpha, sys.eigenvalues(l), data.T), dtype=float)
    return _assemble(sys, data, l, phi, phi_k, psi_k, decay)


def solve_heat(sys: EigenSystem, data: ProblemData, l: int = DEFAULT_MODES) -> InverseSolution:
    """Classical diffusion case computed directly with ``exp(-lambda_k T)``."""
    if data.alpha != 1.0:
        raise ValueError("solve_heat handles alpha = 1 only")
    phi, phi_k, psi_k = _coefficients(sys, data, l)
    decay = np.exp(-sys.eigenvalues(l) * data.T)
    return _assemble(sys, data, l, phi, phi_k, psi_k, decay)


def evaluate_u(sol: InverseSolution, t: float) -> FieldSample:
    """``u(., t) = phi + sum_k C_k (E(-lambda_k t**alpha) - 1) e_k``."""
    t = float(t)
    if not 0.0 <= t <= sol.T:
        raise ValueError(f"time {t} outside [0, {sol.T}]")
    decay = np.asarray(decay_factor(sol.alpha, sol.eigenvalues, t), dtype=float)
    return sol.phi_field + synthesize(sol.operator, sol.C_coeffs * (decay - 1.0))


def evaluate_f(sol: InverseSolution, lphi=None) -> FieldSample:
    """The recovered source.

    By default this is ``sum_k f_k e_k``.  Passing the exact image ``L phi``
    sampled on the nodes gives ``L phi - sum_k lambda_k C_k e_k`` instead, which
    keeps the part of ``L phi`` beyond the truncation.
    """
    if lphi is None:
        return synthesize(sol.operator, sol.f_coeffs)
    lphi = check_field(sol.operator, lphi)
    return lphi - synthesize(sol.operator, sol.eigenvalues * sol.C_coeffs)


@dataclass(frozen=True)
class SobolevDiagnostic:
    partial_sums: np.ndarray
    stabilized: bool

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1])


def hypothesis_check(
    sys: EigenSystem, field, l: int, rtol: float = 1e-3
) -> SobolevDiagnostic:
    """Partial sums of ``sum_k (1 + lambda_k)**2 <field, e_k>**2``.

    The sums are called stabilised when the growth over the last quarter of the
    modes is below ``rtol`` relative to the total -- a practical stand-in for
    the field having finite ``H^1`` norm ``||(I + L) v||``.
    """
    if l < 2:
        raise ValueError("need at least 2 modes")
    coeffs = analyze(sys, field, l)
    sums = np.cumsum((1.0 + sys.eigenvalues(l)) ** 2 * coeffs**2)
    total = sums[-1]
    ref = sums[(3 * l) // 4 - 1]
    stabilized = bool(total == 0.0 or (total - ref) < rtol * total)
    return SobolevDiagnostic(partial_sums=sums, stabilized=stabilized)
