"""One-parameter Mittag-Leffler function on the negative real axis.

Only ``E_{alpha,1}(-x)`` with ``0 < alpha <= 1`` and ``x >= 0`` is needed by the
reconstruction formulas, so that is all this module evaluates.  Three
regimes are used, selected through ``y = x**(1/alpha)``:

* ``y <= TAYLOR_LIMIT``: the defining power series, summed exactly with
  :func:`math.fsum` (the largest term is about ``exp(y)``, so cancellation
  stays harmless);
* large ``y``: the algebraic asymptotic expansion
  ``sum_k (-1)**(k+1) x**(-k) / Gamma(1 - alpha k)``, truncated at the
  smallest term of its envelope;
* otherwise: adaptive quadrature of the completely monotone representation

  .. math::

      E_{\\alpha,1}(-x) = \\frac{\\sin \\alpha\\pi}{\\alpha\\pi}
          \\int_0^\\infty \\frac{\\exp(-(s x)^{1/\\alpha})}{s^2 + 2 s\\cos\\alpha\\pi + 1}\\, ds,

  whose integrand is positive, so no cancellation occurs (evaluated after a
  change of variables that absorbs the kernel).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln, gammasgn

TAYLOR_LIMIT = 2.0
ASYMPTOTIC_RTOL = 1e-16
QUAD_RTOL = 1e-13

_MAX_ASYMPTOTIC_TERMS = 400


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or not 0.0 < alpha <= 1.0:
        raise ValueError(f"fractional order must lie in (0, 1], got {alpha!r}")
    return alpha


def _check_argument(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x!r}")
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x!r}")
    return x


def _scaled_argument(alpha: float, x: float) -> float:
    try:
        return x ** (1.0 / alpha)
    except OverflowError:
        return math.inf


def taylor_branch(alpha: float, x: float) -> float:
    """Sum ``sum_m (-x)**m / Gamma(alpha m + 1)`` until the tail is negligible."""
    if x == 0.0:
        return 1.0
    logx = math.log(x)
    terms: list[float] = []
    start = 0
    chunk = 256
    while True:
        m = np.arange(start, start + chunk, dtype=float)
        logmag = m * logx - gammaln(alpha * m + 1.0)
        mag = np.exp(logmag)
        sign = np.where(m % 2 == 0, 1.0, -1.0)
        terms.extend((sign * mag).tolist())
        # past the peak (log-magnitude decreasing) and below double resolution
        if logmag[-1] < logmag[-2] and mag[-1] < 1e-20:
            break
        start += chunk
        if start > 10_000_000:  # pragma: no cover - alpha absurdly small
            raise ArithmeticError("power series failed to converge")
    return math.fsum(terms)


def _asymptotic_cutoff(alpha: float, x: float) -> int | None:
    """Number of expansion terms to keep, or ``None`` if the expansion is not yet accurate.

    Uses the envelope ``|1/Gamma(1 - alpha k)| <= Gamma(alpha k)/pi`` to bound
    the first omitted term against the Simon lower bound of the result.
    """
    k = np.arange(1, _MAX_ASYMPTOTIC_TERMS + 1, dtype=float)
    log_envelope = gammaln(alpha * k) - k * math.log(x) - math.log(math.pi)
    kmin = int(np.argmin(log_envelope))
    lower = 1.0 / (1.0 + math.gamma(1.0 - alpha) * x)
    if log_envelope[kmin] > math.log(ASYMPTOTIC_RTOL * lower):
        return None
    # keep terms 1..kmin, omit term kmin + 1 whose envelope is the minimum
    return max(kmin, 1)


def asymptotic_branch(alpha: float, x: float, terms: int | None = None) -> float:
    """Algebraic expansion of ``E_{alpha,1}(-x)`` for large ``x`` (``alpha < 1``)."""
    if terms is None:
        terms = _asymptotic_cutoff(alpha, x)
        if terms is None:
            raise ValueError(f"asymptotic expansion inaccurate at x={x!r}, alpha={alpha!r}")
    k = np.arange(1, terms + 1, dtype=float)
    z = 1.0 - alpha * k
    # 1/Gamma vanishes at the poles z = 0, -1, -2, ...
    pole = (z <= 0) & (z == np.round(z))
    zs = np.where(pole, 0.5, z)
    sign = np.where(k % 2 == 1, 1.0, -1.0) * gammasgn(zs)
    vals = np.where(pole, 0.0, sign * np.exp(-k * math.log(x) - gammaln(zs)))
    return math.fsum(vals.tolist())


def quadrature_branch(alpha: float, x: float) -> float:
    """Integral representation, valid for every ``x > 0`` and ``alpha < 1``.

    With ``d = pi (1 - alpha)`` and ``s = sin(u) / sin(u + d)`` the kernel is
    absorbed exactly:

        E = 1/(alpha pi) * int_0^{alpha pi} exp(-(x s(u))**(1/alpha)) du.

    The integrand is smooth and bounded by one, but for ``alpha`` near one it
    has layers of width ``~ d`` at both ends.  The upper half is integrated in
    ``v = alpha pi - u`` (where ``s = sin(v + d) / sin(v)``) so both layers sit
    next to an exactly represented endpoint.  ``d`` itself is formed from
    ``1 - alpha``, which is exact, rather than from a rounded ``alpha pi``.
    """
    d = math.pi * (1.0 - alpha)
    sd = math.sin(d)
    omc = 2.0 * math.sin(0.5 * d) ** 2  # 1 - cos(d) without cancellation
    p = 1.0 / alpha
    half = 0.5 * alpha * math.pi

    def kernel(z: float) -> float:
        try:
            return math.exp(-(z**p))
        except OverflowError:  # z**p beyond double range, exp underflows anyway
            return 0.0

    def lower(u: float) -> float:
        return kernel(x * math.sin(u) / math.sin(u + d))

    def upper(v: float) -> float:
        sv = math.sin(v)
        return 0.0 if sv == 0.0 else kernel(x * math.sin(v + d) / sv)

    # s = m at u = atan2(m sd, (1 - m) + m omc) and at v = atan2(sd, (m - 1) + omc).
    # Break at a geometric ladder around the switch-off s = 1/x and at
    # s = 1 -+ 2**-j, which resolves the slow approach s ~ 1 - d/u.
    depth = max(1, math.ceil(math.log2(max(half / sd, 1.0))) + 1)
    marks = [2.0**j / x for j in range(-3, 4)]
    marks += [1.0 + sign * 2.0**-j for j in range(1, depth + 1) for sign in (-1.0, 1.0)]
    u_pts = {math.atan2(m * sd, (1.0 - m) + m * omc) for m in marks}
    v_pts = {math.atan2(sd, (m - 1.0) + omc) for m in marks}
    total = 0.0
    for fn, pts in ((lower, u_pts), (upper, v_pts)):
        pts = sorted(t for t in pts if 0.0 < t < half)
        val, _ = integrate.quad(
            fn, 0.0, half, points=pts or None, epsabs=0.0, epsrel=QUAD_RTOL, limit=400
        )
        total += val
    return total / (alpha * math.pi)


def _ml_scalar(alpha: float, x: float) -> float:
    if x == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(-x)
    y = _scaled_argument(alpha, x)
    if y <= TAYLOR_LIMIT:
        return taylor_branch(alpha, x)
    terms = _asymptotic_cutoff(alpha, x)
    if terms is not None:
        return asymptotic_branch(alpha, x, terms)
    return quadrature_branch(alpha, x)


def regime(alpha: float, x: float) -> str:
    """Name of the branch :func:`ml_neg` uses at ``(alpha, x)``."""
    alpha = _check_alpha(alpha)
    x = _check_argument(x)
    if x == 0.0:
        return "zero"
    if alpha == 1.0:
        return "exponential"
    if _scaled_argument(alpha, x) <= TAYLOR_LIMIT:
        return "taylor"
    if _asymptotic_cutoff(alpha, x) is not None:
        return "asymptotic"
    return "quadrature"


def ml_neg(alpha: float, x):
    """Evaluate ``E_{alpha,1}(-x)``.

    Parameters
    ----------
    alpha : float
        Fractional order in ``(0, 1]``.
    x : float or array_like
        Nonnegative, finite argument(s).

    Returns
    -------
    float or numpy.ndarray
        Same shape as ``x``; values lie in ``(0, 1]``.
    """
    alpha = _check_alpha(alpha)
    if np.ndim(x) == 0:
        return _ml_scalar(alpha, _check_argument(x))
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    if np.any(arr < 0):
        raise ValueError("argument must be nonnegative")
    if alpha == 1.0:
        return np.exp(-arr)
    out = np.empty_like(arr)
    for idx, val in np.ndenumerate(arr):
        out[idx] = _ml_scalar(alpha, float(val))
    return out


def decay_factor(alpha: float, lam, t):
    """``E_{alpha,1}(-lam * t**alpha)``, the fractional analogue of ``exp(-lam t)``."""
    alpha = _check_alpha(alpha)
    lam_arr = np.asarray(lam, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(lam_arr)) or np.any(lam_arr <= 0):
        raise ValueError("eigenvalue must be positive and finite")
    if not np.all(np.isfinite(t_arr)) or np.any(t_arr < 0):
        raise ValueError("time must be nonnegative and finite")
    return ml_neg(alpha, lam_arr * t_arr**alpha)
