"""Replicated experiment runs with JSONL traces and a CSV summary.

Files written to the output directory:

``iterations.jsonl``
    one object per iteration per replica: ``replica``, ``seed`` and every
    :class:`~dfo_kit.drivers.IterationRecord` field. Non-finite floats are
    written as ``null``.
``summary.csv``
    one row per replica with the columns in :data:`SUMMARY_COLUMNS`.

Replica ``r`` of a run with base seed ``s`` uses the seed
``derive_u64(s, "replica", r)`` for its Haar stream, oracle noise and
random start, so output is byte-identical on rerun.
"""
import csv
import json
import math
from pathlib import Path

import numpy as np

from ..drivers import run
from ..problems import make_problem
from ..streams import derive_u64, make_stream
from .constants import compute_constants

__all__ = [
    "SUMMARY_COLUMNS",
    "replica_seed",
    "start_point",
    "constants_for",
    "run_replica",
    "run_experiments",
]

SUMMARY_COLUMNS = (
    "replica",
    "seed",
    "algorithm",
    "problem",
    "n",
    "q",
    "eps",
    "eps_f",
    "K_eps",
    "N_eps",
    "theoretical_K_eps",
    "theoretical_N_eps",
    "eps_threshold",
    "terminated",
    "final_grad_norm",
)


def replica_seed(seed, r):
    return derive_u64(int(seed), "replica", int(r))


def start_point(problem, start="default", radius=1.0, seed=0):
    """Starting point: the problem default, or a uniform point on a sphere.

    The random sphere has radius ``radius`` and is centred at the known
    minimizer (or at the default start when no minimizer is known).
    """
    if start == "default":
        return np.array(problem.x_default, dtype=float)
    center = problem.minimizer if problem.minimizer is not None else problem.x_default
    u = make_stream(seed, "x0").standard_normal(problem.dim)
    return np.asarray(center, dtype=float) + radius * u / np.linalg.norm(u)


def constants_for(problem, algorithm, tr_cfg, grad_tol, eps_f=0.0, tau=0.5, phi0=None):
    """:class:`ConstantSet` for a run, using the problem's Lipschitz constant."""
    params = dict(
        algorithm=algorithm,
        n=problem.dim,
        q=tr_cfg.q,
        L=problem.lipschitz_L,
        eta1=tr_cfg.eta1,
        eta2=tr_cfg.eta2,
        gamma=tr_cfg.gamma,
        kappa_bhm=tr_cfg.kappa_bhm,
        lambda_threshold=tr_cfg.lambda_threshold,
        delta_choice=tr_cfg.delta_choice,
        delta0=tr_cfg.delta0,
        eps_f=eps_f,
        tau=tau,
        eps=grad_tol,
    )
    if phi0 is not None and math.isfinite(problem.lower_bound):
        params.update(phi0=phi0, phi_star=problem.lower_bound)
    return compute_constants(params)


def run_replica(cfg, seed, r):
    """Run replica ``r``; returns ``(RunResult, ConstantSet, summary row)``."""
    rs = replica_seed(seed, r)
    problem = make_problem(cfg.problem)
    tr = cfg.tr_config(rng_seed=rs)
    x0 = start_point(problem, cfg.start, cfg.start_radius, rs)
    phi0 = float(problem.eval(x0))
    consts = constants_for(problem, cfg.algorithm, tr, cfg.grad_tol, cfg.eps_f, cfg.tau, phi0)
    c1h = consts.C1_hat
    res = run(cfg.algorithm, problem, tr, cfg.grad_tol, x0=x0, eps_f=cfg.eps_f,
              noise_seed=derive_u64(rs, "noise"), big_delta_c1=c1h)
    row = dict(
        replica=r,
        seed=rs,
        algorithm=cfg.algorithm,
        problem=problem.name,
        n=problem.dim,
        q=res.q if res.q is not None else "",
        eps=cfg.grad_tol,
        eps_f=cfg.eps_f,
        K_eps=res.K,
        N_eps=res.N,
        theoretical_K_eps=consts.theoretical_K_eps,
        theoretical_N_eps=consts.theoretical_N_eps,
        eps_threshold=consts.eps_threshold,
        terminated=int(res.terminated),
        final_grad_norm=float(np.linalg.norm(problem.grad(res.x_final))),
    )
    return res, consts, row


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return _clean(value.item())
    return value


def record_line(record, replica, seed):
    obj = {"replica": replica, "seed": seed}
    obj.update({k: _clean(v) for k, v in record.to_dict().items()})
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def run_experiments(cfg, seed, out_dir):
    """Run every replica of ``cfg`` and write the JSONL trace and CSV summary.

    Returns the list of summary rows.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    with open(out / "iterations.jsonl", "w", encoding="utf-8", newline="\n") as jf:
        for r in range(cfg.replicas):
            res, _, row = run_replica(cfg, seed, r)
            for rec in res.records:
                jf.write(record_line(rec, r, row["seed"]) + "\n")
            rows.append(row)
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as cf:
        w = csv.DictWriter(cf, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if row[k] is None else row[k]) for k in SUMMARY_COLUMNS})
    return rows
