"""Command-line entry point.

Subcommands map onto the experiment pipelines (deconv1d,
denoise-mixed, rates) plus a selftest that exercises the library's
core identities.  Each run reads a flat key-value spec file, executes
the pipeline, and serializes results into an output directory as CSV
tables, PGM images, and SVG plots.

All CSV output is deterministic for a fixed spec and seed; measured
wall times are written only when the spec sets output.timing = on
(they are the one inherently non-reproducible quantity, so the
columns hold zeros unless explicitly requested).
"""

import argparse
import os
import sys

import numpy as np

from .space import (
    ExponentMap,
    duality_map,
    grad_modular_rho_bar,
    modular_rho,
    pointwise_jmap,
)
from .thresholding import t_primal, t_dual, oracle_t_primal, oracle_t_dual
from .operators import (
    Convolution1D,
    Convolution2D,
    MatrixOperator,
    adjoint_mismatch,
    gaussian_kernel,
    gaussian_kernel2d,
)
from .objectives import FidelitySpec, PenaltySpec
from .solvers import SolverConfig, solve_primal, solve_dual
from .experiments import (
    run_deconv1d,
    run_denoise_mixed,
    run_rate_study,
)
from .fileio import read_spec, svg_line_plot, write_csv, write_pgm


def _apply_env_seed(spec):
    env = os.environ.get("VAREXP_SEED")
    if env is not None:
        spec.entries["seed"] = int(env)
    return spec


def _emit_flags(args):
    chosen = {name for name in ("csv", "pgm", "svg")
              if getattr(args, name)}
    return chosen or {"csv", "pgm", "svg"}


def _prepare(args):
    spec = _apply_env_seed(read_spec(args.spec))
    os.makedirs(args.out, exist_ok=True)
    if not os.access(args.out, os.W_OK):
        raise OSError("output directory %r is not writable" % args.out)
    timing = spec.get_bool("output.timing", False)
    return spec, _emit_flags(args), timing


def _say(args, text):
    if args.verbose:
        print(text)


def _wall(trace, k, timing):
    if not timing or k == 0:
        return 0.0
    return trace.wall_time[k - 1]


def _trace_rows(models, timing):
    """One row per solver per iterate: k = 0 is the start point, the
    step-level fields there are zero by convention."""
    rows = []
    for label, model in models.items():
        tr = model["trace"]
        for k, phi in enumerate(tr.objective):
            rel = tr.rel_change[k - 1] if k > 0 else 0.0
            tau = tr.tau[k - 1] if k > 0 else 0.0
            inner = tr.inner_count[k - 1] if k > 0 else 0
            rows.append([label, k, phi, rel, tau, inner,
                         _wall(tr, k, timing)])
    return rows


def _metrics_rows(models, timing):
    rows = []
    for label, model in models.items():
        m = model["metrics"]
        rows.append([label, m.mse, m.psnr, m.support_f1, m.iterations,
                     m.wall_time if timing else 0.0])
    return rows


def _write_traces(out, models, timing):
    write_csv(os.path.join(out, "traces.csv"),
              ["solver", "k", "objective", "rel_change", "tau",
               "inner_count", "wall_time_s"],
              _trace_rows(models, timing))


def _write_metrics(out, models, timing):
    write_csv(os.path.join(out, "metrics.csv"),
              ["solver", "mse", "psnr", "support_f1", "iterations",
               "wall_time_s"],
              _metrics_rows(models, timing))


def _signals_table(result):
    truth, data = result["truth"], result["data"]
    header = ["index", "truth", "data", "exponent"]
    columns = [np.arange(truth.size), truth, data,
               result["pmap"].values]
    for label, model in result["models"].items():
        header.append(label)
        columns.append(model["x"])
    rows = [[col[i] for col in columns] for i in range(truth.size)]
    return header, rows


def _objective_curves(models):
    return [(label, np.arange(len(m["trace"].objective)),
             np.asarray(m["trace"].objective))
            for label, m in models.items()]


def cmd_deconv1d(args):
    spec, emit, timing = _prepare(args)
    result = run_deconv1d(spec)
    out = args.out
    if "csv" in emit:
        header, rows = _signals_table(result)
        write_csv(os.path.join(out, "signals.csv"), header, rows)
        _write_traces(out, result["models"], timing)
        _write_metrics(out, result["models"], timing)
    if "svg" in emit:
        n = result["truth"].size
        idx = np.arange(n)
        curves = [("truth", idx, result["truth"]),
                  ("data", idx, result["data"])]
        curves += [(label, idx, m["x"])
                   for label, m in result["models"].items()]
        svg_line_plot(os.path.join(out, "signals.svg"), curves,
                      title=result["name"], xlabel="index",
                      ylabel="value")
        svg_line_plot(os.path.join(out, "objectives.svg"),
                      _objective_curves(result["models"]),
                      title="objective decay", xlabel="iteration",
                      ylabel="objective", log_y=True)
    for label, model in result["models"].items():
        m = model["metrics"]
        _say(args, "%-12s mse=%.6g f1=%.3f iters=%d"
             % (label, m.mse, m.support_f1, m.iterations))
    if result["aborted"]:
        print("error: a solver aborted (sustained objective increase)",
              file=sys.stderr)
        return 1
    return 0


def cmd_denoise_mixed(args):
    spec, emit, timing = _prepare(args)
    result = run_denoise_mixed(spec)
    out = args.out
    two_d = result["truth"].ndim == 2
    if "csv" in emit:
        if not two_d:
            header, rows = _signals_table(result)
            write_csv(os.path.join(out, "signals.csv"), header, rows)
        _write_traces(out, result["models"], timing)
        _write_metrics(out, result["models"], timing)
    if "pgm" in emit and two_d:
        write_pgm(os.path.join(out, "truth.pgm"), result["truth"])
        write_pgm(os.path.join(out, "data.pgm"), result["data"])
        write_pgm(os.path.join(out, "exponent.pgm"),
                  result["pmap"].values)
        for label, model in result["models"].items():
            write_pgm(os.path.join(out, "recon_%s.pgm" % label),
                      model["x"])
    if "svg" in emit:
        if two_d:
            svg_line_plot(os.path.join(out, "objectives.svg"),
                          _objective_curves(result["models"]),
                          title="objective decay", xlabel="iteration",
                          ylabel="objective", log_y=True)
        else:
            n = result["truth"].size
            idx = np.arange(n)
            curves = [("truth", idx, result["truth"]),
                      ("data", idx, result["data"])]
            curves += [(label, idx, m["x"])
                       for label, m in result["models"].items()]
            svg_line_plot(os.path.join(out, "signals.svg"), curves,
                          title=result["name"], xlabel="index",
                          ylabel="value")
    for label, model in result["models"].items():
        m = model["metrics"]
        _say(args, "%-10s mse=%.6g iters=%d" % (label, m.mse,
                                                m.iterations))
    if result["aborted"]:
        print("error: a solver aborted (sustained objective increase)",
              file=sys.stderr)
        return 1
    return 0


def cmd_rates(args):
    spec, emit, timing = _prepare(args)
    result = run_rate_study(spec)
    out = args.out
    models = result["models"]
    if "csv" in emit:
        rows = []
        for label, model in models.items():
            tr = model["trace"]
            for k, r_k in enumerate(model["residuals"]):
                rows.append([label, k, float(r_k),
                             _wall(tr, k, timing)])
        write_csv(os.path.join(out, "rates.csv"),
                  ["solver", "k", "r_k", "wall_time_s"], rows)
        write_csv(os.path.join(out, "table.csv"),
                  ["solver", "iterations", "cpu_time_s"],
                  [[label, model["iterations"],
                    model["wall_time"] if timing else 0.0]
                   for label, model in models.items()])
    if "svg" in emit:
        curves = [(label,
                   np.arange(1, len(model["residuals"])),
                   np.asarray(model["residuals"][1:]))
                  for label, model in models.items()]
        svg_line_plot(os.path.join(out, "rates.svg"), curves,
                      title="objective gap decay", xlabel="iteration",
                      ylabel="gap", log_x=True, log_y=True)
    for label, model in models.items():
        _say(args, "%-12s iters=%-7d slope=%.2f converged=%s"
             % (label, model["iterations"], model["slope"],
                model["converged"]))
    if result["aborted"]:
        print("error: a solver aborted (sustained objective increase)",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------
# selftest


def _check_core_identities(rng):
    n = 64
    for _ in range(20):
        x = rng.standard_normal(n) * rng.uniform(0.2, 3.0)
        p = ExponentMap(rng.uniform(1.05, 2.0, n))
        left = np.dot(grad_modular_rho_bar(x, p), x)
        if abs(left - modular_rho(x, p)) > 1e-12 * max(1.0, abs(left)):
            return False
        rho_dual = modular_rho(pointwise_jmap(x, p.values),
                               p.conjugate())
        if abs(rho_dual - modular_rho(x, p)) > 1e-10 * max(1.0,
                                                           rho_dual):
            return False
        mask = rng.random(n) < 0.5
        split = modular_rho(x[mask], ExponentMap(p.values[mask])) \
            + modular_rho(x[~mask], ExponentMap(p.values[~mask]))
        if abs(split - modular_rho(x, p)) > 1e-12 * max(1.0, split):
            return False
        if not np.all(np.isfinite(duality_map(x, p))):
            return False
    return True


def _check_thresholding(rng):
    for _ in range(300):
        x = rng.uniform(-5, 5)
        s = rng.uniform(-2, 2)
        t = rng.uniform(0, 2)
        p = rng.uniform(1.05, 2)
        if abs(t_primal(x, s, t, p) - oracle_t_primal(x, s, t, p)) > 1e-6:
            return False
        if abs(t_dual(x, s, t, p) - oracle_t_dual(x, s, t, p)) > 1e-6:
            return False
    return True


def _check_adjoints(rng):
    ops = [
        MatrixOperator(rng.standard_normal((12, 8))),
        Convolution1D(gaussian_kernel(9, 1.5), 32),
        Convolution1D(gaussian_kernel(7, 1.0), 32, boundary="periodic"),
        Convolution2D(gaussian_kernel2d(5, 1.0), (12, 10)),
    ]
    return all(adjoint_mismatch(op, rng, trials=20) <= 1e-10
               for op in ops)


def _check_descent(rng):
    a = rng.standard_normal((30, 16))
    y = rng.standard_normal(30)
    fid = FidelitySpec.power_norm(MatrixOperator(a), y)
    pen = PenaltySpec(0.05)
    p = ExponentMap(rng.uniform(1.5, 2.0, 16))
    cfg = SolverConfig(tau0=0.01, max_iters=150)
    for solver in (solve_primal, solve_dual):
        _, tr = solver(fid, pen, p, cfg)
        diffs = np.diff(tr.objective)
        if tr.aborted or np.any(diffs > 1e-12):
            return False
    return True


def cmd_selftest(args):
    rng = np.random.default_rng(0)
    checks = [
        ("core identities (pairing, conjugate, separability)",
         _check_core_identities),
        ("thresholding closed forms vs search oracles",
         _check_thresholding),
        ("operator adjoints", _check_adjoints),
        ("solver monotone descent", _check_descent),
    ]
    failures = 0
    for label, check in checks:
        ok = check(rng)
        print("%-52s %s" % (label, "pass" if ok else "FAIL"))
        failures += 0 if ok else 1
    print("selftest: %d/%d checks passed"
          % (len(checks) - failures, len(checks)))
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varexp-prox",
        description="Variable-exponent proximal-gradient experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run(name, func, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--spec", required=True,
                         help="key-value experiment spec file")
        cmd.add_argument("--out", required=True,
                         help="output directory (created if missing)")
        cmd.add_argument("--csv", action="store_true",
                         help="emit CSV tables")
        cmd.add_argument("--pgm", action="store_true",
                         help="emit PGM images (2-D runs)")
        cmd.add_argument("--svg", action="store_true",
                         help="emit SVG plots")
        cmd.add_argument("-v", "--verbose", action="store_true")
        cmd.set_defaults(func=func)
        return cmd

    add_run("deconv1d", cmd_deconv1d,
            "sparse 1-D deconvolution comparison")
    add_run("denoise-mixed", cmd_denoise_mixed,
            "mixed Gaussian / impulsive noise removal")
    add_run("rates", cmd_rates, "solver convergence-rate study")

    st = sub.add_parser("selftest",
                        help="run built-in correctness checks")
    st.add_argument("-v", "--verbose", action="store_true")
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, TypeError,
            RuntimeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
