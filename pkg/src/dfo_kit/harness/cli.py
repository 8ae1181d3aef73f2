"""``dfo-kit`` command line.

Exit codes: 0 success or pass, 1 verification failure, 2 usage or
configuration error.
"""
import json
import sys

import click

from ..problems import make_problem
from .config import ConfigError, load_config, load_params, warn_threshold
from .constants import compute_constants
from .experiments import constants_for, run_experiments
from .verify import SUITES, verify_suite

__all__ = ["main"]


def _fail_config(msg):
    click.echo(f"error: {msg}", err=True)
    sys.exit(2)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Derivative-free trust-region experiments and verification suites."""


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Experiment config file.")
@click.option("--seed", required=True, type=click.IntRange(0, 2**64 - 1), help="Base seed (unsigned 64-bit).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
def run_cmd(config_path, seed, out_dir):
    """Run the replicas of an experiment; write iterations.jsonl and summary.csv."""
    try:
        cfg = load_config(config_path)
        problem = make_problem(cfg.problem)
        tr = cfg.tr_config()
        consts = constants_for(problem, cfg.algorithm, tr, cfg.grad_tol, cfg.eps_f, cfg.tau)
    except (ConfigError, ValueError, TypeError) as exc:
        _fail_config(str(exc))
    warn_threshold(cfg, consts.eps_threshold)
    try:
        rows = run_experiments(cfg, seed, out_dir)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for row in rows:
        click.echo(
            f"replica {row['replica']}: K_eps={row['K_eps']} N_eps={row['N_eps']} "
            f"terminated={bool(row['terminated'])}"
        )


@main.command("verify")
@click.option("--suite", required=True, type=click.Choice(sorted(SUITES)), help="Suite to run.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Overrides for the suite parameters.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
def verify_cmd(suite, config_path, as_json):
    """Run a verification suite; exit 1 if any check fails."""
    overrides = {}
    if config_path:
        try:
            overrides = load_params(config_path)
        except ConfigError as exc:
            _fail_config(str(exc))
    try:
        report = verify_suite(suite, overrides)
    except (KeyError, TypeError, ValueError) as exc:
        _fail_config(str(exc))
    if as_json:
        click.echo(json.dumps(report.to_dict(), default=str, indent=2))
    else:
        click.echo("\n".join(report.lines()))
    sys.exit(0 if report.passed else 1)


@main.command("constants")
@click.option("--params", "params_path", required=True, type=click.Path(dir_okay=False), help="Parameter file.")
def constants_cmd(params_path):
    """Print the constants and complexity bounds for a parameter set as JSON."""
    try:
        params = load_params(params_path)
        consts = compute_constants(params)
    except (ConfigError, ValueError, TypeError) as exc:
        _fail_config(str(exc))
    click.echo(json.dumps(consts.as_dict(), indent=2))


if __name__ == "__main__":  # pragma: no cover
    main()
