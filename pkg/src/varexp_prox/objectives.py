"""Data-fidelity terms, the l1 penalty, and composite objectives.

A reconstruction problem is posed as

    min_x  phi(x) = f(x) + lam * ||x||_1

where the smooth part measures the discrepancy of the residual
r = A x - y under one of two rules: a single-exponent power norm

    f(x) = (1/q) sum_i |r_i|^q ,    1 < q <= 2,

or the modular of a variable exponent map,

    f(x) = sum_i |r_i|^{p_i} .

Both are convex and differentiable, with gradients pulled back
through the adjoint of the forward operator.
"""

import numpy as np

from .operators import LinearOperator
from .space import ExponentMap, modular_rho, grad_modular_rho


class FidelitySpec:
    """Immutable description of a smooth fidelity term f(x) = D(Ax - y).

    Build instances through the `power_norm` or `modular` classmethods
    rather than calling the constructor directly.

    Attributes
    ----------
    kind : str
        Either ``"power_norm"`` or ``"modular"``.
    operator : LinearOperator
        Forward operator A.
    data : ndarray
        Observation y, shaped like the operator output.
    q : float or None
        Power-norm exponent (set only for ``kind="power_norm"``).
    p : ExponentMap or None
        Residual exponent map (set only for ``kind="modular"``).
    """

    def __init__(self, kind, operator, data, q=None, p=None):
        if not isinstance(operator, LinearOperator):
            raise TypeError("operator must be a LinearOperator")
        data = np.array(data, dtype=float)
        if data.shape != operator.output_shape:
            raise ValueError("data shape %s does not match operator output %s"
                             % (data.shape, operator.output_shape))
        if not np.all(np.isfinite(data)):
            raise ValueError("data must be finite")
        if kind == "power_norm":
            q = float(q)
            if not 1.0 < q <= 2.0:
                raise ValueError("power-norm exponent must lie in (1, 2], "
                                 "got %g" % q)
            p = None
        elif kind == "modular":
            if not isinstance(p, ExponentMap):
                raise TypeError("modular fidelity needs an ExponentMap")
            if p.shape != operator.output_shape:
                raise ValueError("exponent map shape %s does not match "
                                 "operator output %s"
                                 % (p.shape, operator.output_shape))
            q = None
        else:
            raise ValueError("unknown fidelity kind %r" % (kind,))
        self.kind = kind
        self.operator = operator
        self.data = data
        self.q = q
        self.p = p

    @classmethod
    def power_norm(cls, operator, data, q=2.0):
        """Fidelity (1/q)||Ax - y||_q^q with a single exponent q."""
        return cls("power_norm", operator, data, q=q)

    @classmethod
    def modular(cls, operator, data, p):
        """Fidelity rho_p(Ax - y) with a variable exponent map."""
        return cls("modular", operator, data, p=p)

    def residual(self, x):
        """Ax - y."""
        return self.operator.apply(x) - self.data

    def __repr__(self):
        tag = ("q=%g" % self.q if self.kind == "power_norm"
               else "p in [%g, %g]" % (self.p.p_minus, self.p.p_plus))
        return "FidelitySpec(%s, %s)" % (self.kind, tag)


class PenaltySpec:
    """Non-smooth penalty g(x) = lam * sum_i |x_i| with lam >= 0."""

    def __init__(self, lam):
        lam = float(lam)
        if not (np.isfinite(lam) and lam >= 0.0):
            raise ValueError("penalty weight must be finite and >= 0, "
                             "got %g" % lam)
        self.lam = lam

    def value(self, x):
        return self.lam * float(np.sum(np.abs(x)))

    def __repr__(self):
        return "PenaltySpec(lam=%g)" % self.lam


def fidelity_value(spec, x):
    """Evaluate the smooth fidelity term at x.

    Parameters
    ----------
    spec : FidelitySpec
    x : array_like
        Point shaped like the operator input.

    Returns
    -------
    float
    """
    r = spec.residual(x)
    if spec.kind == "power_norm":
        return float(np.sum(np.abs(r) ** spec.q)) / spec.q
    return modular_rho(r, spec.p)


def fidelity_gradient(spec, x):
    """Gradient of the smooth fidelity term at x.

    For the power norm the residual is mapped through
    sign(r)|r|^{q-1}; for the modular fidelity through
    p_i sign(r_i)|r_i|^{p_i-1}.  Either way the result is pulled
    back by the adjoint of the forward operator, so the output is
    shaped like the operator input.
    """
    r = spec.residual(x)
    if spec.kind == "power_norm":
        w = np.sign(r) * np.abs(r) ** (spec.q - 1.0)
    else:
        w = grad_modular_rho(r, spec.p)
    return spec.operator.adjoint(w)


def objective_value(spec, pen, x):
    """Composite objective phi(x) = fidelity + lam * ||x||_1."""
    return fidelity_value(spec, x) + pen.value(x)
