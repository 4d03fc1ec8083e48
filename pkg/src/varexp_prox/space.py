r"""Primitives of the discrete variable-exponent space :math:`\ell^{p(\cdot)}`.

A signal is a real ``numpy`` array (1-D or 2-D) and an exponent map assigns
one exponent ``p_i`` in ``(1, oo)`` to each component.  The two modulars

.. math::

    \rho(x) = \sum_i |x_i|^{p_i}, \qquad
    \bar\rho(x) = \sum_i \frac{1}{p_i} |x_i|^{p_i}

generate the Luxemburg norm ``||x|| = inf{ lam > 0 : rho(x/lam) <= 1 }``,
which this module evaluates by bisection.  Gradients of both modulars and
the normalized duality map of the space are provided as well; they are the
building blocks of the proximal solvers.
"""

import warnings

import numpy as np

__all__ = [
    "ExponentMap",
    "modular_rho",
    "modular_rho_bar",
    "grad_modular_rho",
    "grad_modular_rho_bar",
    "pointwise_jmap",
    "luxemburg_norm",
    "luxemburg_norm_scalar",
    "duality_map",
]


class ExponentMap:
    """Componentwise exponent map ``p : {1..n} -> (1, oo)``.

    Parameters
    ----------
    values : array_like
        Exponent per component.  Must be finite and strictly greater
        than 1 everywhere; the shape must match the signals it will be
        paired with.

    Attributes
    ----------
    values : ndarray
        The exponents, stored as ``float64``.
    p_minus, p_plus : float
        Essential bounds ``min(values)`` and ``max(values)``.
    """

    def __init__(self, values):
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            raise ValueError("exponent map must not be empty")
        if not np.all(np.isfinite(v)):
            raise ValueError("exponents must be finite")
        if np.any(v <= 1.0):
            raise ValueError("exponents must be strictly greater than 1")
        self.values = v
        self.p_minus = float(v.min())
        self.p_plus = float(v.max())

    @classmethod
    def constant(cls, p, shape):
        """Constant map ``p_i = p`` on a signal of the given shape."""
        return cls(np.full(shape, float(p)))

    def conjugate(self):
        """Map of Hoelder conjugates ``p' = p / (p - 1)``.

        Satisfies ``1/p + 1/p' = 1`` componentwise; the conjugate of a
        map with values in ``(1, 2]`` has values in ``[2, oo)``.
        """
        return ExponentMap(self.values / (self.values - 1.0))

    @property
    def shape(self):
        return self.values.shape

    def __repr__(self):
        return "ExponentMap(shape=%r, p_minus=%.4g, p_plus=%.4g)" % (
            self.values.shape, self.p_minus, self.p_plus)


def _check_pair(x, p):
    x = np.asarray(x, dtype=float)
    if x.shape != p.values.shape:
        raise ValueError("signal shape %r does not match exponent map %r"
                         % (x.shape, p.values.shape))
    return x


def _cell_weights(weights, shape):
    if weights is None:
        return 1.0
    w = np.asarray(weights, dtype=float)
    if w.shape != shape:
        raise ValueError("weight shape %r does not match signal %r"
                         % (w.shape, shape))
    return w


def modular_rho(x, p, weights=None):
    r"""Modular ``rho(x) = sum_i w_i |x_i|^{p_i}``.

    Non-negative, zero only at ``x = 0``, and additive over any
    partition of the components.  The cell weights ``w_i`` default to
    the counting measure ``w_i = 1``.
    """
    x = _check_pair(x, p)
    w = _cell_weights(weights, x.shape)
    return float(np.sum(w * np.abs(x) ** p.values))


def modular_rho_bar(x, p, weights=None):
    r"""Inverse-exponent-weighted modular ``sum_i (w_i / p_i) |x_i|^{p_i}``."""
    x = _check_pair(x, p)
    w = _cell_weights(weights, x.shape)
    return float(np.sum(w * np.abs(x) ** p.values / p.values))


def grad_modular_rho(x, p, weights=None):
    r"""Gradient of :func:`modular_rho`.

    Componentwise ``w_i p_i sign(x_i) |x_i|^{p_i - 1}``, with the
    convention ``0^{p_i - 1} = 0`` so the result is finite everywhere.
    """
    x = _check_pair(x, p)
    w = _cell_weights(weights, x.shape)
    return w * p.values * np.sign(x) * np.abs(x) ** (p.values - 1.0)


def grad_modular_rho_bar(x, p, weights=None):
    r"""Gradient of :func:`modular_rho_bar`: ``w_i sign(x_i) |x_i|^{p_i - 1}``.

    Pairs with the original signal as ``<grad, x> = rho(x)``.
    """
    x = _check_pair(x, p)
    w = _cell_weights(weights, x.shape)
    return w * np.sign(x) * np.abs(x) ** (p.values - 1.0)


def pointwise_jmap(t, p):
    r"""Scalar duality map ``j_p(t) = sign(t) |t|^{p - 1}``.

    Acts componentwise on arrays.  For conjugate exponents the maps are
    mutually inverse: ``j_{p'}(j_p(t)) = t``.
    """
    t = np.asarray(t, dtype=float)
    out = np.sign(t) * np.abs(t) ** (p - 1.0)
    return float(out) if out.ndim == 0 else out


def luxemburg_norm(x, p, tol=1e-12):
    r"""Luxemburg norm ``inf{ lam > 0 : rho(x / lam) <= 1 }``.

    The map ``lam -> rho(x / lam)`` is continuous and strictly
    decreasing for ``x != 0``, so the norm is the unique root of
    ``rho(x / lam) = 1``.  It is found by bisection on a bracket grown
    geometrically from ``lam0 = max(rho(x), 1)^{1 / p_minus}``, which is
    always an upper bound.

    Parameters
    ----------
    x : array_like
        Signal, same shape as ``p``.
    p : ExponentMap
    tol : float, optional
        Accepts ``lam`` once ``|rho(x / lam) - 1| <= tol``; bisection
        stops regardless when the bracket collapses to floating-point
        resolution.

    Returns
    -------
    float
        The norm; ``0.0`` for the zero signal.
    """
    x = _check_pair(x, p)
    if not np.any(x):
        return 0.0
    absx = np.abs(x)
    pv = p.values

    def resid(lam):
        return float(np.sum((absx / lam) ** pv)) - 1.0

    hi = max(modular_rho(x, p), 1.0) ** (1.0 / p.p_minus)
    if abs(resid(hi)) <= tol:
        return hi
    lo = hi
    # rho(x / lam) -> oo as lam -> 0 for x != 0, so halving terminates.
    while resid(lo) < 0.0:
        lo *= 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = resid(mid)
        if abs(r) <= tol or (hi - lo) <= np.spacing(mid):
            return mid
        if r > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def luxemburg_norm_scalar(modular_fn, lo, hi, tol=1e-12):
    """Luxemburg norm of an abstract modular given as a function of ``lam``.

    ``modular_fn(lam)`` must be continuous and strictly decreasing on
    ``[lo, hi]`` with ``modular_fn(lo) >= 1 >= modular_fn(hi)``; the
    root of ``modular_fn(lam) = 1`` is returned.  Useful for norms that
    admit an analytic modular (integrals and the like) without a
    discrete signal behind them.
    """
    flo = modular_fn(lo) - 1.0
    fhi = modular_fn(hi) - 1.0
    if flo < 0.0 or fhi > 0.0:
        raise ValueError("bracket does not enclose modular_fn(lam) = 1")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = modular_fn(mid) - 1.0
        if abs(r) <= tol or (hi - lo) <= np.spacing(mid):
            return mid
        if r > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def duality_map(x, p, r=2.0):
    r"""Duality map of ``ell^{p(.)}`` with gauge ``r``.

    .. math::

        J_r(x)_i = \frac{p_i |x_i|^{p_i - 1} \mathrm{sign}(x_i)
                         \, \|x\|^{r - p_i}}
                        {\sum_j p_j |x_j|^{p_j} \, \|x\|^{-p_j}}

    normalized so that ``<J_r(x), x> = ||x||^r``.  For a constant map it
    reduces to ``||x||^{r-p} sign(x_i) |x_i|^{p-1}``.  The map couples
    all components through the norm, so unlike the modular gradients it
    is not additive over partitions of the domain.

    At ``x = 0`` the zero vector is returned and a ``RuntimeWarning`` is
    emitted, since the normalization is undefined there.
    """
    x = _check_pair(x, p)
    if not np.any(x):
        warnings.warn("duality map evaluated at the zero signal",
                      RuntimeWarning, stacklevel=2)
        return np.zeros_like(x)
    nrm = luxemburg_norm(x, p)
    pv = p.values
    denom = float(np.sum(pv * np.abs(x) ** pv * nrm ** (-pv)))
    return (pv * np.sign(x) * np.abs(x) ** (pv - 1.0)
            * nrm ** (r - pv) / denom)
