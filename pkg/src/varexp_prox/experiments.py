"""Synthetic experiment toolkit.

Ground-truth generators, noise models, exponent-map builders, quality
metrics, and the three reconstruction studies the command-line tool
exposes: 1-D deconvolution (sparse spikes or heterogeneous signals),
mixed-noise removal in 1-D/2-D, and a convergence-rate comparison of
all five solvers on a common deblurring instance.

Every routine takes an explicit seed (or Generator) so that a fixed
ExperimentSpec reproduces its outputs bit for bit.
"""

import collections

import numpy as np

from .space import ExponentMap
from .operators import (
    Convolution1D,
    Convolution2D,
    gaussian_kernel,
    gaussian_kernel2d,
)
from .objectives import FidelitySpec, PenaltySpec, objective_value
from .solvers import (
    SolverConfig,
    StopRule,
    solve_primal,
    solve_dual,
    solve_ista,
    solve_primal_lp,
    solve_dual_lp,
)


Metrics = collections.namedtuple(
    "Metrics", ["mse", "psnr", "support_f1", "iterations", "wall_time"])


# ---------------------------------------------------------------------
# ground-truth generators


def gen_spikes(n, k, amp_range=(0.5, 1.5), seed=0):
    """Sparse 1-D signal with k spikes at distinct positions.

    Amplitudes are sampled uniformly in amp_range; k = 0 yields the
    zero signal, k > n is an error.
    """
    n = int(n)
    k = int(k)
    if not 0 <= k <= n:
        raise ValueError("spike count must lie in [0, n]")
    lo, hi = float(amp_range[0]), float(amp_range[1])
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    if k > 0:
        pos = rng.choice(n, size=k, replace=False)
        x[pos] = rng.uniform(lo, hi, size=k)
    return x


def gen_spikes2d(shape, k, amp_range=(0.5, 1.5), seed=0):
    """Sparse image with k bright pixels at distinct positions."""
    rows, cols = int(shape[0]), int(shape[1])
    k = int(k)
    if not 0 <= k <= rows * cols:
        raise ValueError("spike count must lie in [0, rows*cols]")
    lo, hi = float(amp_range[0]), float(amp_range[1])
    rng = np.random.default_rng(seed)
    x = np.zeros(rows * cols)
    if k > 0:
        pos = rng.choice(rows * cols, size=k, replace=False)
        x[pos] = rng.uniform(lo, hi, size=k)
    return x.reshape(rows, cols)


def gen_heterogeneous(n, spikes_params=None, smooth_params=None, seed=0):
    """1-D signal with spikes on one sub-domain, smooth bumps on another.

    Parameters
    ----------
    n : int
        Signal length.
    spikes_params : dict, optional
        Keys: count (default 6), amp_range (default (0.5, 1.5)),
        region (index pair, default (0, n//2)).
    smooth_params : dict, optional
        Keys: count (default 2), amp_range (default (0.4, 1.0)),
        width (Gaussian std in samples, default n/40),
        region (default (n//2, n)).
    seed : int or Generator

    The two regions must not overlap; the smooth part is supported
    strictly inside its region, with bump centers kept three widths
    clear of the region ends.
    """
    n = int(n)
    sp = dict(spikes_params or {})
    sm = dict(smooth_params or {})
    s_reg = tuple(sp.get("region", (0, n // 2)))
    m_reg = tuple(sm.get("region", (n // 2, n)))
    for a, b in (s_reg, m_reg):
        if not 0 <= a < b <= n:
            raise ValueError("region %s is not a valid index range"
                             % ((a, b),))
    if max(s_reg[0], m_reg[0]) < min(s_reg[1], m_reg[1]):
        raise ValueError("spike and smooth regions overlap")
    rng = np.random.default_rng(seed)
    x = np.zeros(n)

    count = int(sp.get("count", 6))
    lo, hi = sp.get("amp_range", (0.5, 1.5))
    width_avail = s_reg[1] - s_reg[0]
    if count > width_avail:
        raise ValueError("too many spikes for the region")
    pos = s_reg[0] + rng.choice(width_avail, size=count, replace=False)
    x[pos] = rng.uniform(lo, hi, size=count)

    count = int(sm.get("count", 2))
    lo, hi = sm.get("amp_range", (0.4, 1.0))
    width = float(sm.get("width", n / 40.0))
    margin = 3.0 * width
    c_lo, c_hi = m_reg[0] + margin, m_reg[1] - 1 - margin
    if c_lo >= c_hi:
        raise ValueError("smooth region too narrow for the bump width")
    grid = np.arange(n, dtype=float)
    mask = np.zeros(n, dtype=bool)
    mask[m_reg[0]:m_reg[1]] = True
    for _ in range(count):
        c = rng.uniform(c_lo, c_hi)
        a = rng.uniform(lo, hi)
        x += np.where(mask, a * np.exp(-0.5 * ((grid - c) / width) ** 2),
                      0.0)
    return x


# ---------------------------------------------------------------------
# noise models


class GaussianNoise:
    """Additive i.i.d. N(0, sigma^2) noise."""

    def __init__(self, sigma):
        sigma = float(sigma)
        if not (np.isfinite(sigma) and sigma >= 0.0):
            raise ValueError("sigma must be finite and >= 0")
        self.sigma = sigma


class SaltPepperNoise:
    """Impulsive noise: a density fraction of entries is replaced by
    low or high, equiprobably."""

    def __init__(self, density, low=0.0, high=1.0):
        density = float(density)
        if not 0.0 <= density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        self.density = density
        self.low = float(low)
        self.high = float(high)


def add_noise(y, model, mask=None, seed=0):
    """Corrupt the masked entries of y under the given noise model.

    Parameters
    ----------
    y : ndarray
    model : GaussianNoise or SaltPepperNoise
    mask : boolean ndarray shaped like y, optional
        Entries where noise acts; default everywhere.
    seed : int or Generator

    Returns
    -------
    ndarray
        A new array; y is not modified.  Gaussian noise adds
        independent draws on the masked entries; salt-and-pepper
        replaces exactly round(density * mask_size) distinct masked
        entries.
    """
    y = np.asarray(y, dtype=float)
    if mask is None:
        mask = np.ones(y.shape, dtype=bool)
    else:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != y.shape:
            raise ValueError("mask shape %s does not match signal %s"
                             % (mask.shape, y.shape))
    rng = np.random.default_rng(seed)
    out = y.copy()
    if isinstance(model, GaussianNoise):
        idx = np.flatnonzero(mask.ravel())
        out.ravel()[idx] += model.sigma * rng.standard_normal(idx.size)
        return out
    if isinstance(model, SaltPepperNoise):
        idx = np.flatnonzero(mask.ravel())
        count = int(round(model.density * idx.size))
        if count > 0:
            hit = rng.choice(idx, size=count, replace=False)
            vals = np.where(rng.random(count) < 0.5, model.low, model.high)
            out.ravel()[hit] = vals
        return out
    raise TypeError("unknown noise model %r" % (model,))


def half_masks(shape, frac=0.5):
    """Partition a domain into (first, second) along the last axis.

    frac is the fraction of columns (indices) in the first mask.
    """
    frac = float(frac)
    if not 0.0 < frac < 1.0:
        raise ValueError("split fraction must lie in (0, 1)")
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    cut = int(round(frac * shape[-1]))
    first = np.zeros(shape, dtype=bool)
    first[..., :cut] = True
    return first, ~first


# ---------------------------------------------------------------------
# exponent-map builders


class TwoLevelBuilder:
    """Assigns p_hi on a mask, p_lo elsewhere."""

    def __init__(self, mask, p_lo, p_hi):
        _check_levels(p_lo, p_hi)
        self.mask = np.asarray(mask, dtype=bool)
        self.p_lo = float(p_lo)
        self.p_hi = float(p_hi)


class MagnitudeBuilder:
    """Assigns p_hi where the probe signal magnitude exceeds a
    threshold, p_lo elsewhere."""

    def __init__(self, threshold, p_lo, p_hi):
        _check_levels(p_lo, p_hi)
        threshold = float(threshold)
        if not threshold >= 0.0:
            raise ValueError("threshold must be >= 0")
        self.threshold = threshold
        self.p_lo = float(p_lo)
        self.p_hi = float(p_hi)


def _check_levels(p_lo, p_hi):
    p_lo, p_hi = float(p_lo), float(p_hi)
    if not (1.0 < p_lo < p_hi <= 2.0):
        raise ValueError("need 1 < p_lo < p_hi <= 2, got (%g, %g)"
                         % (p_lo, p_hi))


def build_exponent_map(signal, builder):
    """Construct an ExponentMap over the signal's domain.

    TwoLevelBuilder ignores the signal values and uses its mask;
    MagnitudeBuilder thresholds |signal| (pass the observed data or a
    short reconstruction probe, see ista_probe).
    """
    signal = np.asarray(signal, dtype=float)
    if signal.size == 0:
        raise ValueError("empty domain")
    if isinstance(builder, TwoLevelBuilder):
        if builder.mask.shape != signal.shape:
            raise ValueError("builder mask shape %s does not match "
                             "signal %s" % (builder.mask.shape,
                                            signal.shape))
        values = np.where(builder.mask, builder.p_hi, builder.p_lo)
    elif isinstance(builder, MagnitudeBuilder):
        values = np.where(np.abs(signal) > builder.threshold,
                          builder.p_hi, builder.p_lo)
    else:
        raise TypeError("unknown builder %r" % (builder,))
    return ExponentMap(values)


def ista_probe(fid, pen, n_iters=50, tau=None):
    """Coarse reconstruction after a few soft-thresholding steps.

    Intended as input to MagnitudeBuilder: the probe's structure
    marks where signal content is likely.
    """
    cfg = SolverConfig(tau0=tau, max_iters=int(n_iters))
    x, _ = solve_ista(fid, pen, cfg)
    return x


def dilate_support(x, radius, threshold=0.0):
    """Boolean mask of |x| > threshold, widened by `radius` samples
    along the last axis."""
    mask = np.abs(np.asarray(x)) > threshold
    out = mask.copy()
    for r in range(1, int(radius) + 1):
        shifted = np.zeros_like(mask)
        shifted[..., r:] = mask[..., :-r]
        out |= shifted
        shifted = np.zeros_like(mask)
        shifted[..., :-r] = mask[..., r:]
        out |= shifted
    return out


# ---------------------------------------------------------------------
# metrics


def support_f1(x_hat, x_true, threshold=1e-3):
    """F1 score of the recovered support.

    Both supports are taken at `threshold` relative to max|x_true|.
    Empty-vs-empty counts as a perfect match.
    """
    x_hat = np.asarray(x_hat)
    x_true = np.asarray(x_true)
    cut = threshold * np.max(np.abs(x_true)) if x_true.size else 0.0
    pred = np.abs(x_hat) > cut
    true = np.abs(x_true) > cut
    tp = int(np.sum(pred & true))
    fp = int(np.sum(pred & ~true))
    fn = int(np.sum(~pred & true))
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom else 0.0


def compute_metrics(x_hat, x_true, trace, support_threshold=1e-3):
    """Bundle reconstruction quality and run cost into a Metrics tuple.

    mse is the mean squared error, psnr = 10 log10(peak^2 / mse) with
    peak = max|x_true| (infinite when mse = 0), support_f1 as in
    support_f1().
    """
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    if x_hat.shape != x_true.shape:
        raise ValueError("shape mismatch %s vs %s"
                         % (x_hat.shape, x_true.shape))
    mse = float(np.mean((x_hat - x_true) ** 2))
    peak = float(np.max(np.abs(x_true)))
    if mse > 0.0 and peak > 0.0:
        psnr = 10.0 * np.log10(peak ** 2 / mse)
    else:
        psnr = np.inf if mse == 0.0 else -np.inf
    f1 = support_f1(x_hat, x_true, support_threshold)
    wall = trace.wall_time[-1] if trace.wall_time else 0.0
    return Metrics(mse=mse, psnr=psnr, support_f1=f1,
                   iterations=trace.iterations, wall_time=wall)


# ---------------------------------------------------------------------
# experiment spec


class ExperimentSpec:
    """Flat key-value description of an experiment run.

    Entries map dotted string keys to values (strings from a spec
    file, or native Python values when built in code).  Typed getters
    coerce on read so both sources behave identically.
    """

    def __init__(self, entries, name=None):
        self.entries = dict(entries)
        if name is not None:
            self.entries.setdefault("name", name)

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def get_str(self, key, default=None):
        v = self.entries.get(key, default)
        if v is None:
            raise KeyError("missing spec key %r" % key)
        return str(v)

    def get_float(self, key, default=None):
        v = self.entries.get(key, default)
        if v is None:
            raise KeyError("missing spec key %r" % key)
        return float(v)

    def get_int(self, key, default=None):
        v = self.entries.get(key, default)
        if v is None:
            raise KeyError("missing spec key %r" % key)
        return int(float(v)) if isinstance(v, str) else int(v)

    def get_bool(self, key, default=None):
        v = self.entries.get(key, default)
        if v is None:
            raise KeyError("missing spec key %r" % key)
        if isinstance(v, bool):
            return v
        s = str(v).strip().lower()
        if s in ("1", "true", "on", "yes"):
            return True
        if s in ("0", "false", "off", "no"):
            return False
        raise ValueError("cannot read %r as a boolean" % (v,))

    def get_floats(self, key, default=None):
        v = self.entries.get(key, default)
        if v is None:
            raise KeyError("missing spec key %r" % key)
        if isinstance(v, str):
            parts = [s for s in v.replace(",", " ").split() if s]
            return [float(s) for s in parts]
        return [float(t) for t in np.atleast_1d(v)]

    @property
    def name(self):
        return str(self.entries.get("name", "experiment"))

    @property
    def seed(self):
        return int(self.entries.get("seed", 0))


def _solver_config(spec, stop_rule):
    return SolverConfig(
        tau0=spec.get_float("solver.tau0", 0.5),
        backtrack_rho=spec.get_float("solver.backtrack_rho", 0.5),
        max_iters=spec.get_int("solver.max_iters", 10000),
        max_inner=spec.get_int("solver.max_inner", 60),
        stop_rule=stop_rule,
        scale_by_p=spec.get_bool("solver.scale_by_p", False),
    )


def _relative_stop(spec, default_eps):
    return StopRule.relative_change(spec.get_float("solver.eps",
                                                   default_eps))


def _kernel_1d(spec, n):
    size = spec.get_int("kernel.size", 15)
    sigma = spec.get_float("kernel.sigma", 2.0)
    boundary = spec.get_str("kernel.boundary", "zero")
    return Convolution1D(gaussian_kernel(size, sigma), n,
                         boundary=boundary)


def _exponent_map_for(spec, op, data, pen, truth):
    """Build the p map per the exponent.* spec keys.

    builder "magnitude" (default) thresholds a coarse reconstruction
    probe at exponent.threshold relative to the probe maximum;
    "two_level" uses the dilated ground-truth support.
    """
    p_lo = spec.get_float("exponent.p_lo", 1.6)
    p_hi = spec.get_float("exponent.p_hi", 2.0)
    builder_id = spec.get_str("exponent.builder", "magnitude")
    if builder_id == "magnitude":
        probe_fid = FidelitySpec.power_norm(op, data, q=2.0)
        probe = ista_probe(probe_fid, pen,
                           n_iters=spec.get_int("exponent.probe_iters",
                                                50))
        rel = spec.get_float("exponent.threshold", 0.1)
        cut = rel * float(np.max(np.abs(probe)))
        return build_exponent_map(probe,
                                  MagnitudeBuilder(cut, p_lo, p_hi))
    if builder_id == "two_level":
        mask = dilate_support(truth, spec.get_int("exponent.dilate", 3))
        return build_exponent_map(truth,
                                  TwoLevelBuilder(mask, p_lo, p_hi))
    raise ValueError("unknown exponent builder %r" % builder_id)


# ---------------------------------------------------------------------
# pipelines


def run_deconv1d(spec):
    """1-D deconvolution study: variable-exponent reconstruction
    against constant-exponent baselines on the same data.

    Spec keys (defaults in parentheses): n (256), seed, truth.generator
    (spikes | heterogeneous), truth.k (12), truth.amp_lo/hi (0.5/1.5),
    kernel.size/sigma/boundary (15/2.0/zero), noise.sigma (0.01),
    fidelity.kind (power_norm | modular), fidelity.q (2.0),
    penalty.lambda (1e-2), exponent.builder (magnitude | two_level),
    exponent.p_lo/p_hi (1.6/2.0), exponent.threshold (0.1, relative
    to the probe maximum), exponent.probe_iters (50), exponent.dilate
    (3), solver.variant (primal | dual), compare.p (1.7),
    solver.tau0/eps/max_iters.

    Returns a dict with the truth, data, exponent map, and one entry
    per model under "models" mapping label -> {x, trace, metrics}.
    """
    n = spec.get_int("n", 256)
    rng = np.random.default_rng(spec.seed)

    generator = spec.get_str("truth.generator", "spikes")
    if generator == "spikes":
        truth = gen_spikes(n, spec.get_int("truth.k", 12),
                           (spec.get_float("truth.amp_lo", 0.5),
                            spec.get_float("truth.amp_hi", 1.5)),
                           seed=rng)
    elif generator == "heterogeneous":
        truth = gen_heterogeneous(
            n,
            spikes_params={"count": spec.get_int("truth.spikes", 6)},
            smooth_params={"count": spec.get_int("truth.bumps", 2),
                           "width": spec.get_float("truth.width",
                                                   n / 40.0)},
            seed=rng)
    else:
        raise ValueError("unknown truth generator %r" % generator)

    op = _kernel_1d(spec, n)
    clean = op.apply(truth)
    data = add_noise(clean, GaussianNoise(spec.get_float("noise.sigma",
                                                         0.01)),
                     seed=rng)

    kind = spec.get_str("fidelity.kind", "power_norm")
    lam = spec.get_float("penalty.lambda", 1e-2)
    pen = PenaltySpec(lam)
    pmap = _exponent_map_for(spec, op, data, pen, truth)

    def make_fid(p_res):
        if kind == "power_norm":
            return FidelitySpec.power_norm(op, data,
                                           q=spec.get_float("fidelity.q",
                                                            2.0))
        return FidelitySpec.modular(op, data, p_res)

    variant = spec.get_str("solver.variant", "primal")
    stop = _relative_stop(spec, 1e-4)
    cfg = _solver_config(spec, stop)

    models = {}
    fid_var = make_fid(pmap)
    if variant == "primal":
        x, tr = solve_primal(fid_var, pen, pmap, cfg)
    elif variant == "dual":
        x, tr = solve_dual(fid_var, pen, pmap, cfg)
    else:
        raise ValueError("unknown solver variant %r" % variant)
    models["varexp"] = {"x": x, "trace": tr,
                        "metrics": compute_metrics(x, truth, tr)}

    for p_c in spec.get_floats("compare.p", [1.7]):
        fid_c = make_fid(ExponentMap.constant(p_c, (n,)))
        if variant == "primal":
            x, tr = solve_primal_lp(fid_c, pen, p_c, cfg)
        else:
            x, tr = solve_dual_lp(fid_c, pen, p_c, cfg)
        models["const_%g" % p_c] = {"x": x, "trace": tr,
                                    "metrics": compute_metrics(x, truth,
                                                               tr)}

    return {"name": spec.name, "truth": truth, "data": data,
            "pmap": pmap, "models": models,
            "aborted": any(m["trace"].aborted for m in models.values())}


def run_denoise_mixed(spec):
    """Mixed-noise removal: Gaussian noise on one side of the domain,
    impulsive noise on the other, modular fidelity throughout.

    Spec keys: n (1-D) or rows/cols (2-D), seed, truth.k, kernel.*,
    noise.split (0.5), noise.gaussian.side (left), noise.sigma (0.05),
    noise.density (0.1), noise.low/high (0/1.5), penalty.lambda,
    exponent.p_lo/p_hi (1.4/2.0), solver.tau0 (0.1), solver.eps,
    solver.max_iters.

    Runs the variable-exponent model (p_hi on the Gaussian side, p_lo
    on the impulsive side) and the two constant-exponent baselines,
    all with the duality-map solver and warm-started at the observed
    data (a start at zero can defeat the relative-change stop: the
    first duality-map step away from zero is tiny for p near 1).
    Returns truth, data, masks, exponent map, and per-model results.
    """
    two_d = "rows" in spec.entries or "cols" in spec.entries
    rng = np.random.default_rng(spec.seed)

    if two_d:
        shape = (spec.get_int("rows", 48), spec.get_int("cols", 48))
        truth = gen_spikes2d(shape, spec.get_int("truth.k", 25),
                             (spec.get_float("truth.amp_lo", 0.5),
                              spec.get_float("truth.amp_hi", 1.5)),
                             seed=rng)
        size = spec.get_int("kernel.size", 7)
        sigma = spec.get_float("kernel.sigma", 1.2)
        op = Convolution2D(gaussian_kernel2d(size, sigma), shape,
                           boundary=spec.get_str("kernel.boundary",
                                                 "zero"))
    else:
        n = spec.get_int("n", 256)
        shape = (n,)
        truth = gen_spikes(n, spec.get_int("truth.k", 12),
                           (spec.get_float("truth.amp_lo", 0.5),
                            spec.get_float("truth.amp_hi", 1.5)),
                           seed=rng)
        op = _kernel_1d(spec, n)

    clean = op.apply(truth)
    first, second = half_masks(shape, spec.get_float("noise.split", 0.5))
    side = spec.get_str("noise.gaussian.side", "left")
    if side == "left":
        g_mask, sp_mask = first, second
    elif side == "right":
        g_mask, sp_mask = second, first
    else:
        raise ValueError("noise.gaussian.side must be left or right")

    data = add_noise(clean,
                     GaussianNoise(spec.get_float("noise.sigma", 0.1)),
                     mask=g_mask, seed=rng)
    data = add_noise(data,
                     SaltPepperNoise(spec.get_float("noise.density", 0.1),
                                     spec.get_float("noise.low", 0.0),
                                     spec.get_float("noise.high", 1.5)),
                     mask=sp_mask, seed=rng)

    p_lo = spec.get_float("exponent.p_lo", 1.4)
    p_hi = spec.get_float("exponent.p_hi", 2.0)
    pmap = build_exponent_map(data, TwoLevelBuilder(g_mask, p_lo, p_hi))

    pen = PenaltySpec(spec.get_float("penalty.lambda", 2e-2))
    stop = _relative_stop(spec, 1e-4)
    cfg = SolverConfig(tau0=spec.get_float("solver.tau0", 0.1),
                       max_iters=spec.get_int("solver.max_iters", 20000),
                       stop_rule=stop,
                       scale_by_p=spec.get_bool("solver.scale_by_p",
                                                False))

    models = {}
    fid_var = FidelitySpec.modular(op, data, pmap)
    x, tr = solve_dual(fid_var, pen, pmap, cfg, x0=data)
    models["varexp"] = {"x": x, "trace": tr,
                        "metrics": compute_metrics(x, truth, tr)}
    for label, p_c in (("const_hi", p_hi), ("const_lo", p_lo)):
        fid_c = FidelitySpec.modular(op, data,
                                     ExponentMap.constant(p_c, shape))
        x, tr = solve_dual_lp(fid_c, pen, p_c, cfg, x0=data)
        models[label] = {"x": x, "trace": tr,
                         "metrics": compute_metrics(x, truth, tr)}

    return {"name": spec.name, "truth": truth, "data": data,
            "pmap": pmap, "gaussian_mask": g_mask,
            "impulsive_mask": sp_mask, "models": models,
            "aborted": any(m["trace"].aborted for m in models.values())}


def _tail_slope(residuals):
    """Log-log slope of r_k over the tail half of the iterations."""
    r = np.asarray(residuals[1:], dtype=float)
    k = np.arange(1, r.size + 1, dtype=float)
    half = r.size // 2
    r, k = r[half:], k[half:]
    keep = r > 0.0
    if np.sum(keep) < 2:
        return np.nan
    coeff = np.polyfit(np.log(k[keep]), np.log(r[keep]), 1)
    return float(coeff[0])


def run_rate_study(spec):
    """Convergence-rate comparison of all five solvers.

    A sparse-spike deblurring instance (squared-norm fidelity) is
    solved by the soft-thresholding baseline, the two constant-
    exponent methods, and the two variable-exponent methods.  A long
    soft-thresholding run provides the reference objective; each
    solver then stops when |phi(x^k) - phi_ref| / phi_ref < eps.

    Spec keys: n (256), seed, truth.k (12), kernel.*, noise.sigma
    (0.01), penalty.lambda (1e-2), exponent.* (as in run_deconv1d,
    threshold default 0.2), compare.p (1.7), solver.tau0 (0.5),
    rates.eps (1e-4), rates.ref_iters (20000), solver.max_iters
    (600000).

    Returns phi_ref and per-solver residual curves, iteration counts,
    wall times, and tail log-log slopes.
    """
    n = spec.get_int("n", 256)
    rng = np.random.default_rng(spec.seed)
    truth = gen_spikes(n, spec.get_int("truth.k", 12),
                       (spec.get_float("truth.amp_lo", 0.5),
                        spec.get_float("truth.amp_hi", 1.5)),
                       seed=rng)
    op = _kernel_1d(spec, n)
    data = add_noise(op.apply(truth),
                     GaussianNoise(spec.get_float("noise.sigma", 0.01)),
                     seed=rng)

    fid = FidelitySpec.power_norm(op, data, q=2.0)
    pen = PenaltySpec(spec.get_float("penalty.lambda", 1e-2))
    if "exponent.threshold" not in spec.entries:
        spec = ExperimentSpec(dict(spec.entries,
                                   **{"exponent.threshold": 0.2}))
    pmap = _exponent_map_for(spec, op, data, pen, truth)
    p_c = spec.get_floats("compare.p", [1.7])[0]

    tau0 = spec.get_float("solver.tau0", 0.5)
    ref_iters = spec.get_int("rates.ref_iters", 20000)
    x_ref, tr_ref = solve_ista(fid, pen,
                               SolverConfig(tau0=tau0,
                                            max_iters=ref_iters))
    if tr_ref.aborted:
        raise RuntimeError("reference run aborted; instance or step "
                           "size is bad")
    phi_ref = tr_ref.objective[-1]

    eps = spec.get_float("rates.eps", 1e-4)
    stop = StopRule.objective_gap(eps, reference_value=phi_ref)
    cfg = SolverConfig(tau0=tau0,
                       max_iters=spec.get_int("solver.max_iters",
                                              600000),
                       stop_rule=stop)

    runs = [
        ("ista", lambda: solve_ista(fid, pen, cfg)),
        ("primal_lp", lambda: solve_primal_lp(fid, pen, p_c, cfg)),
        ("dual_lp", lambda: solve_dual_lp(fid, pen, p_c, cfg)),
        ("primal_vexp", lambda: solve_primal(fid, pen, pmap, cfg)),
        ("dual_vexp", lambda: solve_dual(fid, pen, pmap, cfg)),
    ]
    models = {}
    for label, run in runs:
        x, tr = run()
        tr.phi_ref = phi_ref
        wall = tr.wall_time[-1] if tr.wall_time else 0.0
        converged = (not tr.aborted) and stop_met(tr, phi_ref, eps)
        models[label] = {
            "x": x,
            "trace": tr,
            "residuals": tr.residuals(phi_ref),
            "iterations": tr.iterations,
            "wall_time": wall,
            "slope": _tail_slope(tr.residuals(phi_ref)),
            "converged": converged,
        }
    return {"name": spec.name, "phi_ref": phi_ref,
            "reference_iterations": tr_ref.iterations,
            "truth": truth, "data": data, "pmap": pmap,
            "models": models,
            "aborted": any(m["trace"].aborted for m in models.values())}


def stop_met(trace, phi_ref, eps):
    """Whether the final objective satisfies the gap tolerance."""
    return abs(trace.objective[-1] - phi_ref) / abs(phi_ref) < eps
