"""Proximal-gradient iteration engines.

Five solvers share one loop: evaluate the fidelity gradient, take a
componentwise thresholding step, record a trace row, and test the
stopping rule.  They differ only in the step map and its exponent
handling:

``solve_primal``
    Variable-exponent step that penalizes the increment modular
    rho_p(u - x^k); a backtracking inner loop shrinks the step until
    the accepted increment satisfies rho_p(x^k - x^{k+1}) < 1.
``solve_dual``
    Variable-exponent step built on the componentwise duality map
    j_p(x^k); runs with a fixed step size.
``solve_ista``
    Classical soft-thresholding iteration for the q = 2 fidelity.
``solve_primal_lp`` / ``solve_dual_lp``
    Constant-exponent specializations of the two steps above, with
    no inner loop.

Every run returns the final iterate together with an IterateTrace
holding per-iteration objective values, step sizes, increment
modulars, and timing, so convergence behaviour can be inspected or
serialized afterwards.
"""

import time

import numpy as np

from .space import ExponentMap, modular_rho
from .thresholding import (
    t_ista,
    t_primal,
    t_dual,
    prox_step_primal,
    prox_step_dual,
)
from .objectives import fidelity_value, fidelity_gradient, objective_value
from .operators import operator_norm


class StopRule:
    """Termination test applied after each outer iteration.

    Two rules are available, built through the classmethods:

    ``relative_change(eps)``
        stop when ||x^k - x^{k+1}||_2 / ||x^k||_2 < eps
        (absolute change when x^k = 0);
    ``objective_gap(eps, reference_value)``
        stop when |phi(x^{k+1}) - phi_ref| / |phi_ref| < eps.
    """

    def __init__(self, kind, eps, reference=None):
        if kind not in ("relative_change", "objective_gap"):
            raise ValueError("unknown stop rule %r" % (kind,))
        eps = float(eps)
        if not (np.isfinite(eps) and eps > 0.0):
            raise ValueError("stop tolerance must be positive")
        if kind == "objective_gap":
            reference = float(reference)
            if reference == 0.0 or not np.isfinite(reference):
                raise ValueError("objective_gap needs a nonzero finite "
                                 "reference value")
        self.kind = kind
        self.eps = eps
        self.reference = reference

    @classmethod
    def relative_change(cls, eps):
        return cls("relative_change", eps)

    @classmethod
    def objective_gap(cls, eps, reference_value):
        return cls("objective_gap", eps, reference=reference_value)

    def __repr__(self):
        if self.kind == "relative_change":
            return "StopRule(relative_change, eps=%g)" % self.eps
        return ("StopRule(objective_gap, eps=%g, ref=%.12g)"
                % (self.eps, self.reference))


def stop_check(rule, x_prev, x_next, phi_next, phi_ref=None):
    """Evaluate a stopping rule; None never stops.

    `phi_ref` overrides the reference stored in an objective_gap rule.
    """
    if rule is None:
        return False
    if rule.kind == "relative_change":
        den = float(np.linalg.norm(np.ravel(x_prev)))
        num = float(np.linalg.norm(np.ravel(x_prev) - np.ravel(x_next)))
        return (num / den if den > 0.0 else num) < rule.eps
    ref = rule.reference if phi_ref is None else float(phi_ref)
    if ref == 0.0:
        raise ValueError("objective_gap reference must be nonzero")
    return abs(phi_next - ref) / abs(ref) < rule.eps


class SolverConfig:
    """Step-size schedule, iteration limits, and stopping rule.

    Parameters
    ----------
    tau0 : float or None
        Initial (and, for the fixed-step solvers, permanent) step
        size. None defers to gauge / ||A||^2 with ||A|| estimated by
        power iteration at solve time; the gauge is 1 for the primal
        and classical solvers and p_minus - 1 for the duality-map
        solvers, whose update expands the forcing through the
        conjugate power 1 / (p - 1).
    tau_min : float
        Lower bound the accepted steps are expected to respect;
        validated against tau0.
    backtrack_rho : float
        Shrink factor in (0, 1) for the inner loop of solve_primal.
    max_iters : int
        Outer iteration cap.
    max_inner : int
        Cap on backtracking shrinkages per outer iteration; on hit
        the candidate is accepted and a trace warning recorded.
    stop_rule : StopRule or None
        None runs to max_iters.
    scale_by_p : bool
        Passed through to the dual-step prox (divides the forcing
        and threshold componentwise by p_i).
    """

    def __init__(self, tau0=None, tau_min=1e-12, backtrack_rho=0.5,
                 max_iters=1000, max_inner=60, stop_rule=None,
                 scale_by_p=False):
        if tau0 is not None:
            tau0 = float(tau0)
            if not (np.isfinite(tau0) and tau0 > 0.0):
                raise ValueError("tau0 must be positive")
        tau_min = float(tau_min)
        if not (np.isfinite(tau_min) and tau_min > 0.0):
            raise ValueError("tau_min must be positive")
        if tau0 is not None and tau_min > tau0:
            raise ValueError("tau_min must not exceed tau0")
        backtrack_rho = float(backtrack_rho)
        if not 0.0 < backtrack_rho < 1.0:
            raise ValueError("backtrack_rho must lie in (0, 1)")
        max_iters = int(max_iters)
        if max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        max_inner = int(max_inner)
        if max_inner < 0:
            raise ValueError("max_inner must be non-negative")
        if stop_rule is not None and not isinstance(stop_rule, StopRule):
            raise TypeError("stop_rule must be a StopRule or None")
        self.tau0 = tau0
        self.tau_min = tau_min
        self.backtrack_rho = backtrack_rho
        self.max_iters = max_iters
        self.max_inner = max_inner
        self.stop_rule = stop_rule
        self.scale_by_p = bool(scale_by_p)


class IterateTrace:
    """Per-iteration record of a solver run.

    Attributes
    ----------
    label : str
        Solver identifier ("ista", "primal_vexp", ...).
    objective : list of float
        phi(x^k) for k = 0..K (one more entry than steps taken).
    rel_change : list of float
        ||x^k - x^{k+1}||_2 / ||x^k||_2 per step (absolute when
        x^k = 0).
    tau : list of float
        Accepted step size per step.
    inner_count : list of int
        Backtracking shrinkages performed per step (0 for the
        fixed-step solvers).
    increment_modular : list of float
        Modular of the increment x^k - x^{k+1} in the solver's own
        exponent (sum of squares for ISTA).
    prox_gap : list of float
        g(x^k) - g(x^{k+1}) + <grad f(x^k), x^k - x^{k+1}>, the
        non-negative decrease certificate whose tau-multiple bounds
        the increment modular.
    wall_time : list of float
        Cumulative seconds since the run started, one entry per step.
    warnings : list of str
    aborted : bool
        True when sustained objective increase forced an early exit.
    phi_ref : float or None
        Optional reference objective for residual computation.
    """

    def __init__(self, label=""):
        self.label = label
        self.objective = []
        self.rel_change = []
        self.tau = []
        self.inner_count = []
        self.increment_modular = []
        self.prox_gap = []
        self.wall_time = []
        self.warnings = []
        self.aborted = False
        self.phi_ref = None

    @property
    def iterations(self):
        """Number of steps taken (trace rows)."""
        return len(self.tau)

    def residuals(self, phi_ref=None):
        """Objective gaps phi(x^k) - phi_ref, k = 0..K."""
        ref = self.phi_ref if phi_ref is None else phi_ref
        if ref is None:
            raise ValueError("no reference objective available")
        return np.asarray(self.objective) - float(ref)

    def record(self, phi, rel, tau, inner, inc, gap, elapsed):
        self.objective.append(phi)
        self.rel_change.append(rel)
        self.tau.append(tau)
        self.inner_count.append(inner)
        self.increment_modular.append(inc)
        self.prox_gap.append(gap)
        self.wall_time.append(elapsed)


def _resolve_tau0(cfg, fid, gauge=1.0):
    """Explicit tau0, or gauge / ||A||^2 when the config leaves it open.

    The duality-map solvers pass gauge = p_minus - 1: their update
    amplifies the forcing through the power 1 / (p - 1), so the
    classical Hilbert step must shrink with the smallest exponent to
    preserve monotone descent (gauge 1 at p = 2 recovers it exactly).
    """
    if cfg.tau0 is not None:
        return cfg.tau0
    nrm = operator_norm(fid.operator)
    if nrm <= 0.0:
        raise ValueError("cannot infer a step size for a null operator")
    tau0 = gauge / nrm ** 2
    if tau0 < cfg.tau_min:
        raise ValueError("inferred step %g is below tau_min" % tau0)
    return tau0


def _start_point(fid, x0):
    shape = fid.operator.input_shape
    if x0 is None:
        return np.zeros(shape)
    x = np.array(x0, dtype=float)
    if x.shape != shape:
        raise ValueError("x0 shape %s does not match operator input %s"
                         % (x.shape, shape))
    return x


def _run_loop(fid, pen, cfg, x0, label, step_fn, increment_fn):
    """Shared outer loop: step, record, guard descent, test stopping."""
    x = _start_point(fid, x0)
    phi = objective_value(fid, pen, x)
    if not np.isfinite(phi):
        raise RuntimeError("objective is non-finite at the start point")
    trace = IterateTrace(label)
    trace.objective.append(phi)
    bad_steps = 0
    t_start = time.perf_counter()
    for _ in range(cfg.max_iters):
        grad = fidelity_gradient(fid, x)
        x_next, tau_k, inner, capped = step_fn(x, grad)
        if capped:
            trace.warnings.append(
                "inner backtracking capped at step %d" % trace.iterations)
        phi_next = objective_value(fid, pen, x_next)
        if not np.isfinite(phi_next):
            raise RuntimeError("objective became non-finite at step %d"
                               % trace.iterations)
        diff = x - x_next
        gap = (pen.value(x) - pen.value(x_next)
               + float(np.sum(grad * diff)))
        den = float(np.linalg.norm(np.ravel(x)))
        num = float(np.linalg.norm(np.ravel(diff)))
        rel = num / den if den > 0.0 else num
        trace.record(phi_next, rel, tau_k, inner, increment_fn(diff), gap,
                     time.perf_counter() - t_start)
        # runtime descent guard: tolerate rounding, abort on a
        # sustained increase (bad step size or broken assumptions)
        if phi_next > phi + 1e-12 * max(1.0, abs(phi)):
            bad_steps += 1
        else:
            bad_steps = 0
        should_stop = stop_check(cfg.stop_rule, x, x_next, phi_next)
        x, phi = x_next, phi_next
        if bad_steps >= 10:
            trace.aborted = True
            trace.warnings.append(
                "objective increased on 10 consecutive steps; aborting")
            break
        if should_stop:
            break
    return x, trace


def _check_exponent(fid, p):
    if not isinstance(p, ExponentMap):
        raise TypeError("p must be an ExponentMap")
    if p.shape != fid.operator.input_shape:
        raise ValueError("exponent map shape %s does not match operator "
                         "input %s" % (p.shape, fid.operator.input_shape))
    if p.p_plus > 2.0:
        raise ValueError("solver requires p_plus <= 2, got %g" % p.p_plus)


def solve_primal(fid, pen, p, cfg, x0=None):
    """Variable-exponent proximal gradient with backtracked steps.

    Each outer iteration restarts the step size at tau0 and shrinks
    it by backtrack_rho until the candidate increment satisfies
    rho_p(x^k - candidate) < 1, accepting with a trace warning if
    max_inner shrinkages do not get there.

    Parameters
    ----------
    fid : FidelitySpec
    pen : PenaltySpec
    p : ExponentMap
        Solution-space exponents; requires p_plus <= 2.
    cfg : SolverConfig
    x0 : array_like, optional
        Start point (defaults to zero).

    Returns
    -------
    (ndarray, IterateTrace)
    """
    _check_exponent(fid, p)
    tau0 = _resolve_tau0(cfg, fid)

    def step(x, grad):
        inner = 0
        while True:
            tau_i = (cfg.backtrack_rho ** inner) * tau0
            cand = prox_step_primal(x, grad, tau_i, pen.lam, p)
            if modular_rho(x - cand, p) < 1.0:
                return cand, tau_i, inner, False
            if inner >= cfg.max_inner:
                return cand, tau_i, inner, True
            inner += 1

    return _run_loop(fid, pen, cfg, x0, "primal_vexp", step,
                     lambda d: modular_rho(d, p))


def solve_dual(fid, pen, p, cfg, x0=None):
    """Variable-exponent proximal gradient via the duality map.

    Fixed step size; the componentwise step solves the subproblem
    built on j_p(x^k) instead of the increment modular, so no inner
    loop is needed.  When cfg.tau0 is None the inferred default is
    (p_minus - 1) / ||A||^2, smaller than the classical Hilbert step
    because the update expands the forcing through the conjugate
    power.  Arguments and return as for solve_primal.
    """
    _check_exponent(fid, p)
    tau0 = _resolve_tau0(cfg, fid, gauge=p.p_minus - 1.0)

    def step(x, grad):
        cand = prox_step_dual(x, grad, tau0, pen.lam, p,
                              scale_by_p=cfg.scale_by_p)
        return cand, tau0, 0, False

    return _run_loop(fid, pen, cfg, x0, "dual_vexp", step,
                     lambda d: modular_rho(d, p))


def solve_ista(fid, pen, cfg, x0=None):
    """Soft-thresholding iteration for the squared-norm fidelity.

    Requires a power_norm fidelity with q = 2; other fidelities are
    rejected because the classical step assumes a Lipschitz gradient.
    """
    if fid.kind != "power_norm" or fid.q != 2.0:
        raise ValueError("solve_ista requires a power_norm fidelity "
                         "with q = 2")
    tau0 = _resolve_tau0(cfg, fid)

    def step(x, grad):
        return t_ista(x, tau0 * grad, tau0 * pen.lam), tau0, 0, False

    return _run_loop(fid, pen, cfg, x0, "ista", step,
                     lambda d: float(np.sum(d * d)))


def _check_p_const(p_const):
    p_const = float(p_const)
    if not 1.0 < p_const <= 2.0:
        raise ValueError("constant exponent must lie in (1, 2], got %g"
                         % p_const)
    return p_const


def solve_primal_lp(fid, pen, p_const, cfg, x0=None):
    """Constant-exponent specialization of the primal step.

    The increment penalty (1/p)|u - x|^p is separable for constant p,
    so the update is a single componentwise threshold with no
    backtracking.
    """
    p_const = _check_p_const(p_const)
    tau0 = _resolve_tau0(cfg, fid)

    def step(x, grad):
        cand = t_primal(x, tau0 * grad, tau0 * pen.lam, p_const)
        return cand, tau0, 0, False

    return _run_loop(fid, pen, cfg, x0, "primal_lp", step,
                     lambda d: float(np.sum(np.abs(d) ** p_const)))


def solve_dual_lp(fid, pen, p_const, cfg, x0=None):
    """Constant-exponent specialization of the duality-map step."""
    p_const = _check_p_const(p_const)
    tau0 = _resolve_tau0(cfg, fid, gauge=p_const - 1.0)

    def step(x, grad):
        cand = t_dual(x, tau0 * grad, tau0 * pen.lam, p_const)
        return cand, tau0, 0, False

    return _run_loop(fid, pen, cfg, x0, "dual_lp", step,
                     lambda d: float(np.sum(np.abs(d) ** p_const)))
