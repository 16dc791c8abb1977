"""Command-line interface.

Every subcommand reads the variance model from a JSON file; experiment
subcommands read a JSON config and emit a delimited report plus a JSON
verdict, with optional matplotlib figures rendered alongside.  The
convergence commands exit nonzero when the verdict is false, so they can
gate CI jobs directly.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click
import numpy as np

from . import entropy as entropy_mod
from . import plots
from .experiments import (ExperimentConfig, run_input_flt, run_modulus_diagnostic,
                          run_omega_gamma_decay, run_workload_flt)
from .queues import QueueConfig, stationary_workload
from .sampling import GridSpec, sample_path_with_report
from .scaling import delta_exponent_audit, solve_delta
from .variance import (VarianceModel, check_condition_C, estimate_rv_index,
                       potter_check)


def _load_model(path: str) -> VarianceModel:
    with open(path) as fh:
        return VarianceModel.from_dict(json.load(fh))


def _load_config(path: str, seed: int | None) -> ExperimentConfig:
    with open(path) as fh:
        doc = json.load(fh)
    if seed is not None:
        doc["master_seed"] = seed
    return ExperimentConfig.from_dict(doc)


def _parse_grid(spec: str) -> np.ndarray:
    """Parse 'lo:hi:n' (log-spaced) or a comma list of values."""
    if ":" in spec:
        lo, hi, n = spec.split(":")
        return np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(n))
    return np.array([float(v) for v in spec.split(",")])


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _emit_convergence(report, out: str | None, name: str, make_plots: bool):
    rows = [(f"{c:g}", f"{d:.12g}", t, f"{ks:.6g}", f"{thr:.6g}",
             str(ok).lower())
            for c, d, t, ks, thr, ok in report.csv_rows()]
    header = ["c", "delta", "t", "ks", "threshold", "pass"]
    if out:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, f"{name}.csv"), header, rows)
        with open(os.path.join(out, f"{name}.json"), "w") as fh:
            fh.write(report.to_json())
        if make_plots:
            plots.render_convergence_figure(report,
                                            os.path.join(out, f"{name}.png"))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    click.echo(f"verdict: {'pass' if report.verdict else 'fail'}", err=True)
    sys.exit(0 if report.verdict else 1)


@click.group()
def main():
    """Gaussian fluid-queue simulation and traffic-limit experiments."""


@main.command("model-info")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable verdict only.")
def model_info(model_path, as_json):
    """Validate a model file and report its regularity diagnostics."""
    model = _load_model(model_path)
    cond_c = check_condition_C(model)
    rv0 = estimate_rv_index(model, "zero")
    rvinf = estimate_rv_index(model, "infinity")
    eps = min(0.1, model.lambda0 / 2)
    potter = potter_check(model, epsilon=eps)
    verdict = {
        "model": model.to_dict(),
        "condition_C": {"passed": cond_c.passed,
                        "limit_estimate": cond_c.limit_estimate},
        "rv_index_zero": {"declared": model.lambda0, "estimated": rv0},
        "rv_index_infinity": {"declared": model.alpha_inf, "estimated": rvinf},
        "potter": {"passed": potter.passed, "C_fitted": potter.C_fitted,
                   "epsilon": eps},
    }
    if as_json:
        click.echo(json.dumps(verdict, indent=2))
        return
    click.echo(f"model: {model.kind} lambda0={model.lambda0} "
               f"alpha_inf={model.alpha_inf}")
    click.echo(f"condition C: {'pass' if cond_c.passed else 'FAIL'} "
               f"(limit estimate {cond_c.limit_estimate:.3g})")
    click.echo(f"RV index at zero: declared {model.lambda0}, "
               f"estimated {rv0:.4f}")
    click.echo(f"RV index at infinity: declared {model.alpha_inf}, "
               f"estimated {rvinf:.4f}")
    click.echo(f"ratio bound (eps={eps:g}): "
               f"{'pass' if potter.passed else 'FAIL'} "
               f"(C={potter.C_fitted:.3f})")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--c", "c", required=True, type=float)
@click.option("--tol", default=1e-10, show_default=True)
def delta(model_path, c, tol):
    """Solve the normalizing time scale for one drain rate."""
    sol = solve_delta(_load_model(model_path), c, tol=tol)
    click.echo(json.dumps(sol.to_dict(), indent=2))


@main.command("delta-audit")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--regime", required=True, type=click.Choice(["heavy", "light"]))
@click.option("--c-grid", "c_grid", required=True,
              help="Either 'lo:hi:n' (log-spaced) or comma-separated values.")
def delta_audit(model_path, regime, c_grid):
    """Regress the time-scale exponent toward a traffic limit."""
    rep = delta_exponent_audit(_load_model(model_path), regime,
                               _parse_grid(c_grid))
    click.echo(json.dumps(rep.to_dict(), indent=2))
    sys.exit(0 if rep.passed else 1)


@main.command("simulate-path")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--h", required=True, type=float)
@click.option("--n-left", default=0, show_default=True, type=int)
@click.option("--n-right", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", type=click.Path(), default=None,
              help="Directory for path.csv (default: CSV to stdout).")
@click.option("--report", "want_report", is_flag=True,
              help="Emit the embedding report as JSON on stderr.")
@click.option("--plots", "make_plots", is_flag=True)
def simulate_path(model_path, h, n_left, n_right, seed, out, want_report,
                  make_plots):
    """Sample one input path on a uniform grid and emit t,x rows."""
    model = _load_model(model_path)
    grid = GridSpec(h=h, n_left=n_left, n_right=n_right)
    path, emb = sample_path_with_report(model, grid, seed)
    rows = [(f"{t:.12g}", f"{x:.12g}") for t, x in zip(grid.times(), path.values)]
    if out:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, "path.csv"), ["t", "x"], rows)
        if make_plots:
            plots.render_path_figure(grid.times(), path.values,
                                     os.path.join(out, "path.png"))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["t", "x"])
        writer.writerows(rows)
    if want_report:
        click.echo(json.dumps(emb.to_dict()), err=True)


@main.command("simulate-queue")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--c", required=True, type=float)
@click.option("--s", "--S", "s_horizon", required=True, type=float,
              help="Lookback horizon for the initial workload.")
@click.option("--t", "--T", "t_end", required=True, type=float)
@click.option("--h", required=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", type=click.Path(), default=None)
@click.option("--plots", "make_plots", is_flag=True)
def simulate_queue(model_path, c, s_horizon, t_end, h, seed, out, make_plots):
    """Simulate one stationary workload trajectory; emit t,q plus a sidecar."""
    model = _load_model(model_path)
    wl = stationary_workload(model, QueueConfig(c=c, truncation_S=s_horizon),
                             t_end, h, seed)
    rows = [(f"{t:.12g}", f"{q:.12g}") for t, q in zip(wl.times, wl.q_values)]
    sidecar = {"q0": wl.q_zero, "argmax_location": wl.argmax_location,
               "truncation_flag": wl.truncation_flag}
    if out:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, "queue.csv"), ["t", "q"], rows)
        with open(os.path.join(out, "queue.json"), "w") as fh:
            json.dump(sidecar, fh, indent=2)
        if make_plots:
            plots.render_queue_figure(wl.times, wl.q_values,
                                      os.path.join(out, "queue.png"))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["t", "q"])
        writer.writerows(rows)
        click.echo(json.dumps(sidecar), err=True)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--l", "--L", "length", required=True, type=float)
@click.option("--zeta", default=None, type=float)
@click.option("--out", type=click.Path(), default=None)
@click.option("--plots", "make_plots", is_flag=True)
def entropy(model_path, length, zeta, out, make_plots):
    """Entropy profile of [0, L]; optionally the modulus bound at zeta."""
    model = _load_model(model_path)
    profile = entropy_mod.entropy_profile(model, length)
    doc = profile.to_dict()
    if zeta is not None:
        doc["modulus_bound"] = entropy_mod.modulus_bound(model, length, zeta)
    click.echo(json.dumps(doc, indent=2))
    if out and make_plots:
        os.makedirs(out, exist_ok=True)
        plots.render_entropy_figure(profile, os.path.join(out, "entropy.png"))


@main.command("flt-workload")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=None, type=int, help="Override the master seed.")
@click.option("--out", type=click.Path(), default=None)
@click.option("--plots", "make_plots", is_flag=True)
def flt_workload(config_path, seed, out, make_plots):
    """Workload convergence experiment; exit 0 iff the verdict passes."""
    report = run_workload_flt(_load_config(config_path, seed))
    _emit_convergence(report, out, "flt_workload", make_plots)


@main.command("flt-input")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=None, type=int)
@click.option("--out", type=click.Path(), default=None)
@click.option("--plots", "make_plots", is_flag=True)
def flt_input(config_path, seed, out, make_plots):
    """Input-process convergence experiment; exit 0 iff the verdict passes."""
    report = run_input_flt(_load_config(config_path, seed))
    _emit_convergence(report, out, "flt_input", make_plots)


@main.command("omega-decay")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--c", required=True, type=float)
@click.option("--t-grid", "t_grid", default="1,2,4,8", show_default=True)
@click.option("--eta", default=0.5, show_default=True, type=float)
@click.option("--seed", default=None, type=int)
@click.option("--out", type=click.Path(), default=None)
@click.option("--plots", "make_plots", is_flag=True)
def omega_decay(config_path, c, t_grid, eta, seed, out, make_plots):
    """Polynomial-envelope tail decay diagnostic for the rescaled input."""
    cfg = _load_config(config_path, seed)
    if cfg.gamma is None:
        raise click.UsageError("config must set 'gamma' for omega-decay")
    rep = run_omega_gamma_decay(cfg.model, cfg.regime, c, cfg.gamma,
                                _parse_grid(t_grid), cfg.replications,
                                cfg.master_seed, eta=eta,
                                points_per_unit=cfg.points_per_unit)
    click.echo(json.dumps(rep.to_dict(), indent=2))
    if out:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, "omega_decay.csv"), ["T", "p"],
                   [(f"{t:g}", f"{p:.6g}") for t, p in
                    zip(rep.T_grid, rep.p_values)])
        if make_plots:
            plots.render_decay_figure(rep, os.path.join(out, "omega_decay.png"))


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--c", required=True, type=float)
@click.option("--zeta-grid", "zeta_grid", default="0.2,0.1,0.05,0.02",
              show_default=True)
@click.option("--eta", default=1.0, show_default=True, type=float)
@click.option("--t-horizon", default=1.0, show_default=True, type=float)
@click.option("--seed", default=None, type=int)
@click.option("--out", type=click.Path(), default=None)
@click.option("--plots", "make_plots", is_flag=True)
def modulus(config_path, c, zeta_grid, eta, t_horizon, seed, out, make_plots):
    """Small-gap oscillation diagnostic with its entropy-bound companion."""
    cfg = _load_config(config_path, seed)
    rep = run_modulus_diagnostic(cfg.model, c,
                                 [float(z) for z in zeta_grid.split(",")],
                                 eta, cfg.replications, cfg.master_seed,
                                 T=t_horizon)
    click.echo(json.dumps(rep.to_dict(), indent=2))
    if out:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, "modulus.csv"),
                   ["zeta", "p", "entropy_bound"],
                   [(f"{z:g}", f"{p:.6g}", f"{b:.6g}") for z, p, b in
                    zip(rep.zeta_grid, rep.p_values, rep.entropy_bounds)])
        if make_plots:
            plots.render_modulus_figure(rep, os.path.join(out, "modulus.png"))


if __name__ == "__main__":
    main()
