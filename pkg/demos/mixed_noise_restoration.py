"""
Mixed-Noise Image Restoration with a Two-Level Exponent
=======================================================

An image is corrupted by two different noise processes on two halves
of its domain: additive Gaussian noise on the left, salt-and-pepper
outliers on the right.  No single residual exponent fits both: a
squared fidelity (p = 2) is the right model for Gaussian errors but
chases outliers, while an exponent near 1 is robust to outliers but
underweights the Gaussian side.  A variable-exponent fidelity

  min_x  sum_i (1/p_i)|(A x - y)_i|^{p_i} + lam ||x||_1

assigns each cell the exponent its own noise calls for: p = 2.0 on
the Gaussian half, p = 1.4 on the impulsive half.  The two constant
maps p = 2.0 and p = 1.4 run on the same data as baselines.  All
three models use the duality-map iteration, whose step is an exact
componentwise minimization, and are warm-started at the observed
image (from a zero start the first step away is tiny for p near 1
and a relative-change rule can fire immediately).
"""

import os

import numpy as np

from varexp_prox import (
    Convolution2D, ExponentMap, FidelitySpec, GaussianNoise,
    PenaltySpec, SaltPepperNoise, SolverConfig, StopRule,
    TwoLevelBuilder, add_noise, build_exponent_map, compute_metrics,
    gaussian_kernel2d, gen_spikes2d, half_masks, solve_dual,
    solve_dual_lp, write_pgm,
)

out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                       "output")
os.makedirs(out_dir, exist_ok=True)


"""
Problem data: a 48 x 48 image with 25 bright spots, blurred by a
7 x 7 Gaussian kernel.  The domain is split into halves along the
columns; the left half receives Gaussian noise of standard deviation
0.1, the right half salt-and-pepper corruption at density 0.1 with
pepper value 0 and salt value 1.5.
"""

shape = (48, 48)
rng = np.random.default_rng(11)
truth = gen_spikes2d(shape, 25, amp_range=(0.5, 1.5), seed=rng)
op = Convolution2D(gaussian_kernel2d(7, 1.2), shape)
clean = op.apply(truth)

g_mask, sp_mask = half_masks(shape)
data = add_noise(clean, GaussianNoise(0.1), mask=g_mask, seed=rng)
data = add_noise(data, SaltPepperNoise(0.1, low=0.0, high=1.5),
                 mask=sp_mask, seed=rng)


"""
The exponent map follows the noise geometry: p = 2.0 wherever the
mask marks Gaussian noise, p = 1.4 on the impulsive half.
"""

p_lo, p_hi = 1.4, 2.0
pmap = build_exponent_map(data, TwoLevelBuilder(g_mask, p_lo, p_hi))


"""
Solve the variable-exponent model and the two constant-exponent
baselines.  The duality-map solver takes a fixed step tau = 0.02 and
stops when the relative change of the iterates falls under 1e-4.
"""

pen = PenaltySpec(0.1)
cfg = SolverConfig(tau0=0.02, max_iters=30000,
                   stop_rule=StopRule("relative_change", 1e-4))

models = {}
fid_var = FidelitySpec.modular(op, data, pmap)
models["varexp"] = solve_dual(fid_var, pen, pmap, cfg, x0=data)
for label, p_c in (("const p=2.0", p_hi), ("const p=1.4", p_lo)):
    fid_c = FidelitySpec.modular(op, data, ExponentMap.constant(p_c, shape))
    models[label] = solve_dual_lp(fid_c, pen, p_c, cfg, x0=data)


"""
Compare reconstruction quality.  The p = 2.0 baseline reproduces the
salt-and-pepper outliers; the p = 1.4 baseline is robust to them but
rougher on the Gaussian side; the adapted map beats both.
"""

for label, (x, trace) in models.items():
    m = compute_metrics(x, truth, trace)
    print("%-12s mse %.4e  psnr %6.2f dB  iters %d"
          % (label, m.mse, m.psnr, m.iterations))


"""
Write the truth, the corrupted observation, the exponent map, and the
three reconstructions as PGM images.
"""

write_pgm(os.path.join(out_dir, "mixed_truth.pgm"), truth)
write_pgm(os.path.join(out_dir, "mixed_data.pgm"), data)
write_pgm(os.path.join(out_dir, "mixed_exponent.pgm"), pmap.values)
for label, (x, _) in models.items():
    fname = "mixed_recon_%s.pgm" % label.replace(" ", "_").replace("=", "")
    write_pgm(os.path.join(out_dir, fname), x)

print("images written to %s" % out_dir)
