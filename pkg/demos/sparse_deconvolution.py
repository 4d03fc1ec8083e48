"""
Sparse Deconvolution with a Spatially Varying Exponent
======================================================

A sparse spike train is blurred by a Gaussian kernel and observed
under additive noise.  Reconstruction solves

  min_x  (1/2) ||A x - y||^2 + lam ||x||_1

by proximal gradient, but the backward step is taken in a
variable-exponent sequence space: the quadratic increment penalty of
the classical method becomes sum_i (1/p_i)|u_i - x_i|^{p_i} with a
per-cell exponent p_i.  Every exponent choice minimizes the same
objective (the increment term vanishes to first order at the fixed
points); what changes is the geometry of the steps, and with it how
fast the iteration approaches the sparse structure.  Here the map
keeps p = 2 on the estimated spike support and lowers the exponent
to 1.6 on the background.  A constant-exponent run at the
intermediate value p = 1.7 provides the baseline.
"""

import os

import numpy as np

from varexp_prox import (
    Convolution1D, FidelitySpec, MagnitudeBuilder, PenaltySpec,
    SolverConfig, StopRule, add_noise, build_exponent_map,
    compute_metrics, gaussian_kernel, gen_spikes, GaussianNoise,
    ista_probe, solve_primal, solve_primal_lp, svg_line_plot,
)

out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                       "output")
os.makedirs(out_dir, exist_ok=True)


"""
Problem data: a length-256 signal with 12 spikes of random sign and
amplitude, blurred by a width-15 Gaussian kernel and corrupted with
additive Gaussian noise of standard deviation 0.01.  One generator
drives both the spikes and the noise so the instance is reproducible
end to end.
"""

n = 256
rng = np.random.default_rng(7)
truth = gen_spikes(n, 12, amp_range=(0.5, 1.5), seed=rng)
op = Convolution1D(gaussian_kernel(15, 2.0), n)
data = add_noise(op.apply(truth), GaussianNoise(0.01), seed=rng)


"""
The exponent map comes from the data alone.  A short soft-thresholding
run gives a coarse reconstruction; cells whose coarse magnitude
reaches 10 percent of the probe maximum keep p = 2, the rest drop to
p = 1.6.  Nothing here looks at the ground truth.
"""

lam = 1e-2
pen = PenaltySpec(lam)
fid = FidelitySpec.power_norm(op, data, q=2.0)

probe = ista_probe(fid, pen, n_iters=50)
cut = 0.1 * float(np.max(np.abs(probe)))
pmap = build_exponent_map(probe, MagnitudeBuilder(cut, 1.6, 2.0))
print("exponent map: %d cells at p=2.0, %d at p=1.6"
      % (int(np.sum(pmap.values == 2.0)), int(np.sum(pmap.values < 2.0))))


"""
Both models run the primal iteration: a gradient step on the fidelity
followed by the componentwise threshold that minimizes
(1/p_i)|u - x_i|^{p_i} + tau s_i u + tau lam |u|, with backtracking
until the increment modular drops below one.  The baseline uses the
same machinery with the constant map p = 1.7, and both stop when the
relative change of the iterates falls under 1e-4.
"""

cfg = SolverConfig(tau0=0.5, max_iters=10000,
                   stop_rule=StopRule("relative_change", 1e-4))

x_var, trace_var = solve_primal(fid, pen, pmap, cfg)
x_const, trace_const = solve_primal_lp(fid, pen, 1.7, cfg)


"""
Compare the reconstructions.  Support F1 counts a cell as recovered
when its magnitude clears 1e-3.  The constant-exponent step map
crawls, so its relative-change rule fires while the iterate is still
visibly blurred; the adapted map reaches the sparse structure within
the same stopping rule.
"""

for label, x, trace in (("varexp", x_var, trace_var),
                        ("const p=1.7", x_const, trace_const)):
    m = compute_metrics(x, truth, trace)
    print("%-12s mse %.3e  psnr %6.2f dB  support F1 %.3f  iters %d"
          % (label, m.mse, m.psnr, m.support_f1, m.iterations))


"""
Write the signals and the objective decay as standalone SVG plots.
"""

idx = np.arange(n, dtype=float)
svg_line_plot(
    os.path.join(out_dir, "deconv_signals.svg"),
    [("truth", idx, truth),
     ("data", idx, data),
     ("varexp", idx, x_var),
     ("const p=1.7", idx, x_const)],
    title="sparse deconvolution", xlabel="index", ylabel="value")

svg_line_plot(
    os.path.join(out_dir, "deconv_objective.svg"),
    [("varexp", np.arange(len(trace_var.objective), dtype=float),
      np.asarray(trace_var.objective)),
     ("const p=1.7", np.arange(len(trace_const.objective), dtype=float),
      np.asarray(trace_const.objective))],
    title="objective decay", xlabel="iteration k", ylabel="phi(x^k)",
    log_y=True)

print("plots written to %s" % out_dir)
