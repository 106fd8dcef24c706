"""Quadrature rules realising the L^2 inner product on sampled fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

SIMPSON = "composite-simpson"
HERMITE_WINDOW = "gauss-hermite-windowed"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        weights = _frozen(self.weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if nodes.size < 3:
            raise ValueError("a quadrature rule needs at least 3 nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.nodes.size:
            raise ValueError(
                f"field has {values.shape[-1]} samples, rule has {self.nodes.size} nodes"
            )
        return values @ self.weights


def simpson_rule(a: float, b: float, n: int = 2049) -> QuadratureRule:
    """Composite Simpson rule on ``[a, b]`` with ``n`` (odd) equispaced nodes, endpoints included."""
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    if n < 3 or n % 2 == 0:
        raise ValueError(f"composite Simpson needs an odd node count >= 3, got {n}")
    x = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return QuadratureRule(x, w * h / 3.0, SIMPSON)


def hermite_functions(n: int, x) -> np.ndarray:
    """First ``n`` normalised Hermite functions at ``x``, shape ``(n, len(x))``.

    Uses the three-term recurrence
    ``psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}``, which never
    forms the factorially large Hermite polynomials themselves.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n, x.size))
    if n == 0:
        return out
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def gauss_hermite_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes of the ``n``-point Gauss-Hermite rule and weights with ``exp(x**2)`` folded in.

    The returned weights integrate plain functions, ``sum W_i g(x_i) ~ int g dx``,
    and are computed as ``1 / (n psi_{n-1}(x_i)**2)`` so nothing overflows.
    """
    if n < 2:
        raise ValueError("Gauss-Hermite rule needs n >= 2")
    x = eigh_tridiagonal(np.zeros(n), np.sqrt(np.arange(1, n) / 2.0), eigvals_only=True)
    # polish the eigenvalues with Newton on psi_n
    for _ in range(2):
        psi = hermite_functions(n + 1, x)
        x = x - psi[n] / (math.sqrt(2.0 * n) * psi[n - 1] - x * psi[n])
    psi_last = hermite_functions(n, x)[n - 1]
    return x, 1.0 / (n * psi_last**2)


def hermite_window_rule(window: float = 12.0, n: int = 513) -> QuadratureRule:
    """Gauss-Hermite rule of order ``n`` restricted to the nodes with ``|x| <= window``.

    Hermite functions of moderate degree are negligible outside the window, so the
    trimmed rule keeps the exactness of the full rule up to their tail mass.
    """
    if window <= 0:
        raise ValueError("window half-width must be positive")
    x, w = gauss_hermite_nodes(n)
    keep = np.abs(x) <= window
    if keep.sum() < 3:
        raise ValueError("window contains fewer than 3 Gauss-Hermite nodes")
    return QuadratureRule(x[keep], w[keep], HERMITE_WINDOW)
