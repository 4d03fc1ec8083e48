r"""Closed-form scalar thresholding operators and a 1-D minimization oracle.

Both variable-exponent solvers reduce, one component at a time, to a
strictly convex scalar problem of the form "power term + linear term +
weighted absolute value".  This module provides the three closed-form
minimizers in use:

``t_ista``
    classical soft thresholding, the ``p = 2`` case of both families;

``t_primal``
    minimizer of ``(1/p)|u - x|^p + s u + t |u|``, the update of the
    primal scheme, which penalizes the increment;

``t_dual``
    minimizer of ``(1/p)|u|^p - j_p(x) u + s u + t |u|``, the update of
    the dual scheme, which takes the gradient step in duality-mapped
    coordinates.

Here ``x`` is the current component, ``s`` the scaled gradient
component, ``t >= 0`` the scaled penalty weight and ``p in (1, 2]`` the
local exponent.  All functions accept scalars or arrays and evaluate
componentwise; the vector ``prox_step_*`` wrappers feed them whole
signals.  ``oracle_argmin_1d`` is an independent golden-section
minimizer used to cross-check the closed forms.
"""

import numpy as np

__all__ = [
    "t_ista",
    "t_primal",
    "t_dual",
    "prox_step_primal",
    "prox_step_dual",
    "prox_objective_ista",
    "prox_objective_primal",
    "prox_objective_dual",
    "oracle_argmin_1d",
    "oracle_t_primal",
    "oracle_t_dual",
]


def _validate_t(t):
    if np.any(np.asarray(t) < 0.0):
        raise ValueError("penalty weight t must be non-negative")


def _validate_p(p):
    pa = np.asarray(p)
    if np.any(pa <= 1.0) or np.any(pa > 2.0):
        raise ValueError("exponent p must lie in (1, 2]")


def _maybe_scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def t_ista(x, s, t):
    """Soft thresholding of ``x - s`` at level ``t``.

    Returns ``x - s + t`` where that is negative, ``x - s - t`` where
    that is positive, and exactly 0 on the dead zone ``|x - s| <= t``.
    """
    _validate_t(t)
    x = np.asarray(x, dtype=float)
    lo = x - s + t
    hi = x - s - t
    return _maybe_scalar(np.where(lo < 0.0, lo, np.where(hi > 0.0, hi, 0.0)))


def t_primal(x, s, t, p):
    r"""Minimizer of ``(1/p)|u - x|^p + s u + t |u|`` for ``p in (1, 2]``.

    The closed form shifts ``x`` by the conjugate-power image of
    ``s + t`` (respectively ``s - t``) on the two active branches and
    returns exactly 0 between them:

    .. math::

        u^* = \begin{cases}
            x - \mathrm{sign}(s+t) |s+t|^{1/(p-1)}
                & x \ge \mathrm{sign}(s+t) |s+t|^{1/(p-1)}, \\
            x - \mathrm{sign}(s-t) |s-t|^{1/(p-1)}
                & x \le \mathrm{sign}(s-t) |s-t|^{1/(p-1)}, \\
            0   & \text{otherwise.}
        \end{cases}

    At ``p = 2`` this is :func:`t_ista`.  Unlike soft thresholding it is
    not odd around ``x = s`` when ``p < 2``: the shrinkage applied on
    the two sides differs through the ``1/(p-1)`` power.
    """
    _validate_t(t)
    _validate_p(p)
    x = np.asarray(x, dtype=float)
    expo = 1.0 / (np.asarray(p, dtype=float) - 1.0)
    up = np.asarray(s + t, dtype=float)
    dn = np.asarray(s - t, dtype=float)
    thr_up = np.sign(up) * np.abs(up) ** expo
    thr_dn = np.sign(dn) * np.abs(dn) ** expo
    return _maybe_scalar(np.where(x >= thr_up, x - thr_up,
                                  np.where(x <= thr_dn, x - thr_dn, 0.0)))


def t_dual(x, s, t, p):
    r"""Minimizer of ``(1/p)|u|^p - j_p(x) u + s u + t |u|``.

    With ``j_p(x) = sign(x)|x|^{p-1}``:

    .. math::

        u^* = \begin{cases}
            -(s - t - j_p(x))^{1/(p-1)} & s - t - j_p(x) > 0, \\
            \;(j_p(x) - s - t)^{1/(p-1)} & j_p(x) - s - t > 0, \\
            0 & \text{otherwise,}
        \end{cases}

    i.e. soft thresholding performed on ``j_p(x)`` and mapped back
    through the conjugate power.  At ``p = 2`` this is :func:`t_ista`.
    """
    _validate_t(t)
    _validate_p(p)
    x = np.asarray(x, dtype=float)
    pa = np.asarray(p, dtype=float)
    expo = 1.0 / (pa - 1.0)
    jx = np.sign(x) * np.abs(x) ** (pa - 1.0)
    neg = s - t - jx
    pos = jx - s - t
    # at most one side can be positive (they sum to -2t)
    return _maybe_scalar(
        np.where(neg > 0.0, -np.power(np.maximum(neg, 0.0), expo),
                 np.where(pos > 0.0, np.power(np.maximum(pos, 0.0), expo),
                          0.0)))


def prox_step_primal(x, grad, tau, lam, p):
    """Componentwise ``t_primal(x_i, tau grad_i, tau lam, p_i)``.

    The vector proximal update of the primal scheme; valid because the
    increment modular separates over components.
    """
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if x.shape != grad.shape or x.shape != p.values.shape:
        raise ValueError("signal, gradient and exponent shapes must match")
    if tau <= 0.0:
        raise ValueError("step size must be positive")
    return t_primal(x, tau * grad, tau * lam, p.values)


def prox_step_dual(x, grad, tau, lam, p, scale_by_p=False):
    """Componentwise ``t_dual`` update of the dual scheme.

    With ``scale_by_p`` off (the default) the inputs are
    ``(s, t) = (tau grad_i, tau lam)``.  Switching it on divides both by
    ``p_i``, which makes the update the exact stationary point of the
    unnormalized modular subproblem; the two settings coincide up to
    that reweighting and are identical in shape.  See the solver notes
    for when this matters.
    """
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if x.shape != grad.shape or x.shape != p.values.shape:
        raise ValueError("signal, gradient and exponent shapes must match")
    if tau <= 0.0:
        raise ValueError("step size must be positive")
    s = tau * grad
    t = tau * lam
    if scale_by_p:
        s = s / p.values
        t = t / p.values
    return t_dual(x, s, t, p.values)


def prox_objective_ista(u, x, s, t):
    """Scalar objective ``(1/2)(u - x)^2 + s u + t |u|`` behind t_ista."""
    u = np.asarray(u, dtype=float)
    return 0.5 * (u - x) ** 2 + s * u + t * np.abs(u)


def prox_objective_primal(u, x, s, t, p):
    """Scalar objective ``(1/p)|u - x|^p + s u + t |u|`` behind t_primal."""
    u = np.asarray(u, dtype=float)
    return np.abs(u - x) ** p / p + s * u + t * np.abs(u)


def prox_objective_dual(u, x, s, t, p):
    """Scalar objective ``(1/p)|u|^p - j_p(x) u + s u + t |u|`` behind t_dual."""
    u = np.asarray(u, dtype=float)
    jx = np.sign(x) * np.abs(x) ** (p - 1.0)
    return np.abs(u) ** p / p - jx * u + s * u + t * np.abs(u)


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def oracle_argmin_1d(psi, lo, hi, tol=1e-10):
    """Golden-section argmin of a convex scalar function on ``[lo, hi]``.

    Derivative-free and independent of any closed form, which is the
    point: it serves as the reference the thresholding functions are
    checked against.  ``psi`` must be convex (hence unimodal) on the
    bracket and is evaluated on scalars or elementwise on arrays;
    ``lo``/``hi`` may be arrays for a batch of independent problems.

    The bracket must contain the minimizer.  A common heuristic for the
    thresholding objectives is ``x +- 10 (1 + |x| + |s| + |t|)``, but
    for exponents near 1 the minimizer can sit at ``|s + t|^{1/(p-1)}``
    scale, far beyond it; callers should widen the bracket to the
    coercivity bound of their objective in that regime.

    Parameters
    ----------
    psi : callable
        Convex objective, vectorized over its argument.
    lo, hi : float or ndarray
        Bracket endpoints, ``lo < hi``.
    tol : float, optional
        Target bracket width.  Iteration also stops once the width
        reaches floating-point resolution.

    Returns
    -------
    float or ndarray
        Bracket midpoint after shrinking, within ``tol`` of the
        minimizer (or at floating-point resolution for very wide
        brackets).
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    if np.any(b <= a):
        raise ValueError("need lo < hi")
    if not (np.all(np.isfinite(psi(a))) and np.all(np.isfinite(psi(b)))):
        raise ValueError("psi evaluates non-finite on the bracket")
    width = float(np.max(b - a))
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    # the bracket shrinks by the inverse golden ratio per iteration
    n_iter = int(np.ceil(np.log(max(width / tol, 1.0))
                         / -np.log(_INVPHI))) + 1
    n_iter = min(n_iter, 300)
    for _ in range(n_iter):
        gap = _INVPHI * (b - a)
        c = b - gap
        d = a + gap
        left = psi(c) < psi(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    out = 0.5 * (a + b)
    return float(out) if np.ndim(out) == 0 else out


def _bisect_increasing(slope, lo, hi, n_iter=120):
    # sign bisection of a non-decreasing function; converges to the
    # sign change at floating-point resolution of the argument
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    for _ in range(n_iter):
        m = 0.5 * (a + b)
        neg = slope(m) < 0.0
        a = np.where(neg, m, a)
        b = np.where(neg, b, m)
    return 0.5 * (a + b)


def oracle_t_primal(x, s, t, p):
    """Independent reference value for :func:`t_primal`.

    Golden-section search localizes the minimizer of the primal scalar
    objective, then a sign bisection of its slope

    ``sign(u - x) |u - x|^{p-1} + s + t sign(u)``

    (non-decreasing in ``u``, set-valued at the kink) sharpens the
    location.  Value-only search cannot localize a smooth minimum
    beyond ``sqrt(eps)`` relative flatness, which for exponents near 1
    is far coarser than the closed form; the slope stage restores
    spacing-limited accuracy while still never touching the branch
    algebra under test.  The bracket comes from coercivity:
    ``|u - x| <= (|s| + t)^{1/(p-1)}`` at any minimizer.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    reach = (np.abs(s) + t) ** (1.0 / (p - 1.0)) + 1.0
    lo, hi = x - reach, x + reach
    mid = oracle_argmin_1d(
        lambda u: prox_objective_primal(u, x, s, t, p), lo, hi, tol=1e-8)

    def slope(u):
        return (np.sign(u - x) * np.abs(u - x) ** (p - 1.0)
                + s + t * np.sign(u))

    out = _bisect_increasing(slope, lo, hi)
    # the two stages disagree only by the flatness of the value search
    out = np.where(np.abs(out - mid) <= 1e-2 * (1.0 + np.abs(mid)), out, mid)
    return float(out) if np.ndim(out) == 0 else out


def oracle_t_dual(x, s, t, p):
    """Independent reference value for :func:`t_dual`.

    Same two-stage scheme as :func:`oracle_t_primal` applied to the
    dual scalar objective, whose slope is
    ``sign(u)|u|^{p-1} - sign(x)|x|^{p-1} + s + t sign(u)`` and whose
    minimizers satisfy ``|u|^{p-1} <= |x|^{p-1} + |s| + t``.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    jx = np.sign(x) * np.abs(x) ** (p - 1.0)
    reach = (np.abs(jx) + np.abs(s) + t) ** (1.0 / (p - 1.0)) + 1.0
    lo, hi = -reach, reach
    mid = oracle_argmin_1d(
        lambda u: prox_objective_dual(u, x, s, t, p), lo, hi, tol=1e-8)

    def slope(u):
        return np.sign(u) * np.abs(u) ** (p - 1.0) - jx + s + t * np.sign(u)

    out = _bisect_increasing(slope, lo, hi)
    out = np.where(np.abs(out - mid) <= 1e-2 * (1.0 + np.abs(mid)), out, mid)
    return float(out) if np.ndim(out) == 0 else out
