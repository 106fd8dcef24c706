"""Self-adjoint positive operators with closed-form eigensystems.

A field (an element of the Hilbert space) is represented by its samples on the
nodes of the operator's quadrature rule; plain ``numpy`` arrays are used for
this throughout the package.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .quadrature import (
    QuadratureRule,
    gauss_hermite_nodes,
    hermite_functions,
    hermite_window_rule,
    simpson_rule,
)

FieldSample = np.ndarray

DEFAULT_NODES = 2049
DEFAULT_MODES = 50
HERMITE_WINDOW = 12.0
HERMITE_NODES = 513
HERMITE_TAIL_TOL = 1e-9

UNSUPPORTED = {
    "sturm_liouville_robin": "general separated boundary conditions are not parametrised",
    "fractional_sturm_liouville": "no closed-form eigenpairs",
    "restricted_fractional_laplacian": "no closed-form eigenpairs on bounded domains",
    "landau_hamiltonian": "two-dimensional with infinitely degenerate levels",
    "anharmonic_oscillator": "no closed-form eigenpairs",
    "heisenberg_harmonic_oscillator": "defined on the Heisenberg group",
    "heisenberg_anharmonic_oscillator": "defined on the Heisenberg group",
}


class UnsupportedOperatorError(NotImplementedError):
    """Raised for catalogued operators that have no implementation here."""


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues, orthonormal eigenfunctions and a quadrature rule for one operator.

    Modes are indexed from 1.  ``eigenvalue_rule`` maps an integer array of mode
    indices to eigenvalues; ``basis_rule(l, x)`` returns the first ``l``
    eigenfunctions at ``x`` as an ``(l, len(x))`` array.
    """

    name: str
    domain: tuple[float, float]
    eigenvalue_rule: Callable[[np.ndarray], np.ndarray]
    basis_rule: Callable[[int, np.ndarray], np.ndarray]
    quadrature: QuadratureRule
    params: Mapping[str, float] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @property
    def nodes(self) -> np.ndarray:
        return self.quadrature.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.quadrature.weights

    def eigenvalues(self, l: int) -> np.ndarray:
        _check_modes(l)
        return np.asarray(self.eigenvalue_rule(np.arange(1, l + 1)), dtype=float)

    def basis(self, l: int, x=None) -> np.ndarray:
        _check_modes(l)
        if x is not None:
            return self.basis_rule(l, np.asarray(x, dtype=float))
        cached = self._cache.get("basis")
        if cached is None or cached.shape[0] < l:
            cached = self.basis_rule(max(l, DEFAULT_MODES), self.nodes)
            cached.flags.writeable = False
            self._cache["basis"] = cached
        return cached[:l]

    def eigenfunction(self, k: int, x=None) -> np.ndarray:
        return self.basis(k, x)[k - 1]

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> FieldSample:
        """Sample ``func`` on the quadrature nodes."""
        return check_field(self, func(self.nodes))


def _check_modes(l: int) -> None:
    if int(l) != l or l < 1:
        raise ValueError(f"mode count must be a positive integer, got {l!r}")


def check_field(sys: EigenSystem, values) -> FieldSample:
    values = np.asarray(values, dtype=float)
    if values.shape != sys.nodes.shape:
        raise ValueError(
            f"field of shape {values.shape} is not aligned with {sys.nodes.size} quadrature nodes"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("field contains non-finite samples")
    return values


def _sine_basis(a: float, b: float) -> Callable[[int, np.ndarray], np.ndarray]:
    length = b - a
    scale = math.sqrt(2.0 / length)

    def rule(l: int, x: np.ndarray) -> np.ndarray:
        s = (np.atleast_1d(x) - a) / length
        k = np.arange(1, l + 1)[:, None]
        vals = scale * np.sin(math.pi * k * s)
        # sin(k pi) is not exactly zero in floating point
        vals[:, (s == 0.0) | (s == 1.0)] = 0.0
        return vals

    return rule


def _check_sine_resolution(nodes: int, modes: int) -> None:
    if nodes - 1 < 4 * modes:
        raise ValueError(
            f"{nodes} nodes cannot resolve {modes} sine modes (need at least {4 * modes + 1})"
        )


def dirichlet_laplacian(
    a: float = 0.0, b: float = math.pi, nodes: int = DEFAULT_NODES, modes: int = DEFAULT_MODES
) -> EigenSystem:
    """``-u''`` on ``(a, b)`` with ``u(a) = u(b) = 0``."""
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    _check_sine_resolution(nodes, modes)
    length = b - a
    return EigenSystem(
        name="dirichlet_laplacian",
        domain=(a, b),
        eigenvalue_rule=lambda k: (np.asarray(k, dtype=float) * math.pi / length) ** 2,
        basis_rule=_sine_basis(a, b),
        quadrature=simpson_rule(a, b, nodes),
        params={"a": a, "b": b, "nodes": nodes, "modes": modes},
    )


def involution(
    epsilon: float, nodes: int = DEFAULT_NODES, modes: int = DEFAULT_MODES
) -> EigenSystem:
    """``-u''(x) + epsilon u''(pi - x)`` on ``(0, pi)`` with Dirichlet conditions.

    Mode ``k`` has eigenfunction ``sqrt(2/pi) sin(kx)`` and eigenvalue
    ``(1 + (-1)**k epsilon) k**2``; the ordering is not monotone for ``epsilon != 0``.
    """
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or abs(epsilon) >= 1.0:
        raise ValueError(f"involution operator requires |epsilon| < 1, got {epsilon!r}")
    _check_sine_resolution(nodes, modes)

    def eigenvalue_rule(k):
        k = np.asarray(k, dtype=float)
        return (1.0 + np.where(k % 2 == 0, epsilon, -epsilon)) * k * k

    return EigenSystem(
        name="involution",
        domain=(0.0, math.pi),
        eigenvalue_rule=eigenvalue_rule,
        basis_rule=_sine_basis(0.0, math.pi),
        quadrature=simpson_rule(0.0, math.pi, nodes),
        params={"epsilon": epsilon, "nodes": nodes, "modes": modes},
    )


def harmonic_oscillator_1d(
    window: float = HERMITE_WINDOW, nodes: int = HERMITE_NODES, modes: int = DEFAULT_MODES
) -> EigenSystem:
    """``-u'' + x**2 u`` on the real line; mode ``k`` has eigenvalue ``2k - 1``."""
    window = float(window)
    if nodes < 2 * modes:
        raise ValueError(f"{nodes} Gauss-Hermite nodes cannot resolve {modes} modes")
    rule = hermite_window_rule(window, nodes)
    # mass of the highest requested mode lost outside the window
    x_full, w_full = gauss_hermite_nodes(nodes)
    outside = np.abs(x_full) > window
    tail = float(np.sum(w_full[outside] * hermite_functions(modes, x_full[outside])[-1] ** 2))
    if tail > HERMITE_TAIL_TOL:
        raise ValueError(
            f"window [-{window}, {window}] too small for {modes} modes (tail mass {tail:.2e})"
        )

    return EigenSystem(
        name="harmonic_oscillator_1d",
        domain=(-math.inf, math.inf),
        eigenvalue_rule=lambda k: 2.0 * (np.asarray(k, dtype=float) - 1.0) + 1.0,
        basis_rule=lambda l, x: hermite_functions(l, x),
        quadrature=rule,
        params={"window": window, "nodes": nodes, "modes": modes},
    )


_CATALOG: dict[str, Callable[..., EigenSystem]] = {
    "dirichlet_laplacian": dirichlet_laplacian,
    "involution": involution,
    "harmonic_oscillator_1d": harmonic_oscillator_1d,
}


def make_operator(target: str | Mapping, **params) -> EigenSystem:
    """Build an :class:`EigenSystem` from a name plus numeric parameters.

    ``target`` is either the operator name or a mapping with a ``"name"`` key and
    parameter entries, e.g. ``{"name": "involution", "epsilon": 0.9}``.
    """
    if isinstance(target, Mapping):
        params = {**{k: v for k, v in target.items() if k != "name"}, **params}
        target = target["name"]
    name = str(target)
    if name in UNSUPPORTED:
        raise UnsupportedOperatorError(f"operator {name!r} is not implemented: {UNSUPPORTED[name]}")
    try:
        factory = _CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(_CATALOG))
        raise ValueError(f"unknown operator {name!r}; available: {known}") from None
    return factory(**params)


def inner_product(sys: EigenSystem, f, g) -> float:
    f = check_field(sys, f)
    g = check_field(sys, g)
    return float(sys.quadrature.integrate(f * g))


def l2_norm(sys: EigenSystem, f) -> float:
    return math.sqrt(max(inner_product(sys, f, f), 0.0))


def analyze(sys: EigenSystem, f, l: int) -> np.ndarray:
    """Coefficients ``(<f, e_1>, ..., <f, e_l>)``."""
    f = check_field(sys, f)
    return sys.basis(l) @ (sys.weights * f)


def synthesize(sys: EigenSystem, coeffs) -> FieldSample:
    """``sum_k c_k e_k`` sampled on the quadrature nodes."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ValueError("coefficients must be a non-empty 1-D vector")
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("coefficients must be finite")
    return coeffs @ sys.basis(coeffs.size)


def apply_operator(sys: EigenSystem, f, l: int) -> FieldSample:
    """Truncated spectral image ``sum_{k<=l} lambda_k <f, e_k> e_k``."""
    return synthesize(sys, sys.eigenvalues(l) * analyze(sys, f, l))
