"""Verification suites for the lemmas, error bounds and complexity bounds.

Every suite takes an optional override mapping and returns a
:class:`SuiteReport`. Failed checks keep a counterexample dump holding the
offending :class:`~dfo_kit.drivers.IterationRecord` (or raw numbers) and
enough context to replay it.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import json
import math
import time
from typing import Callable, Dict, List

import numpy as np
from scipy import stats

from ..drivers import GEOMETRY_CLASSES, SHRINK, SUCCESS, TRConfig, init_state, run, step
from ..geometry import GOOD, REPLACE_BAD, GeometrySet, apply_action, geometry_action, lambda_poisedness, orthogonal_index_set
from ..models import fd_gradient, interp_linear_model, interpolation_gradient_bound
from ..problems import Oracle, adversarial_instance, make_problem
from ..streams import derive_u64, make_stream
from ..subspace import HAAR_THETA, alignment, haar_sample
from .constants import compute_constants, unsuccessful_log_term
from .experiments import constants_for, start_point

__all__ = ["SuiteReport", "SUITES", "verify_suite", "certified", "matrix_runs"]

_MAX_DUMPS = 5


@dataclass
class SuiteReport:
    name: str
    passed: bool
    summary: str
    checks: int = 0
    violations: int = 0
    stats: Dict = field(default_factory=dict)
    counterexamples: List[Dict] = field(default_factory=list)
    seconds: float = 0.0

    def lines(self):
        head = f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.summary}"
        out = [head]
        for k, v in self.stats.items():
            out.append(f"    {k}: {v}")
        for c in self.counterexamples:
            out.append("    counterexample: " + json.dumps(c, default=_jsonable, sort_keys=True))
        return out

    def to_dict(self):
        return dict(name=self.name, passed=self.passed, summary=self.summary, checks=self.checks,
                    violations=self.violations, stats=self.stats, counterexamples=self.counterexamples,
                    seconds=self.seconds)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    return str(o)


class _Tally:
    def __init__(self):
        self.checks = 0
        self.violations = 0
        self.dumps = []

    def check(self, ok, dump):
        self.checks += 1
        if not ok:
            self.violations += 1
            if len(self.dumps) < _MAX_DUMPS:
                self.dumps.append(dump() if callable(dump) else dump)
        return ok


def _report(name, tally, summary, t0, stats=None, passed=None):
    ok = tally.violations == 0 if passed is None else passed
    return SuiteReport(name, ok, summary, tally.checks, tally.violations, stats or {}, tally.dumps,
                       round(time.perf_counter() - t0, 3))


# ---------------------------------------------------------------------------
# shared run matrix

MATRIX_DEFAULTS = dict(
    seeds=20,
    quadratic_dims=[2, 4, 8],
    eigenvalues=[1, 10],
    quadratic_grad_tol=1e-3,
    rosenbrock_dims=[2],
    rosenbrock_grad_tol=1e-2,
    start_radius=1.0,
    algorithms=["alg1", "alg2"],
    budget=200_000,
)


@lru_cache(maxsize=None)
def _cached_run(algorithm, problem_json, seed, grad_tol, eps_f, start_radius, solver_json):
    problem = make_problem(json.loads(problem_json))
    solver = json.loads(solver_json)
    tr = TRConfig(rng_seed=seed, **solver)
    x0 = start_point(problem, "random", start_radius, seed)
    phi0 = float(problem.eval(x0))
    consts = constants_for(problem, algorithm, tr, grad_tol, eps_f, 0.5, phi0)
    res = run(algorithm, problem, tr, grad_tol, x0=x0, eps_f=eps_f,
              noise_seed=derive_u64(seed, "noise"), big_delta_c1=consts.C1_hat)
    return problem, tr, consts, res


@dataclass
class MatrixRun:
    algorithm: str
    problem: object
    tr: TRConfig
    consts: object
    result: object
    seed: int
    eps_f: float

    def context(self):
        return dict(algorithm=self.algorithm, problem=self.problem.name, n=self.problem.dim, seed=self.seed,
                    eps_f=self.eps_f, grad_tol=self.result.grad_tol, q=self.tr.q)


def _run(algorithm, problem_spec, seed, grad_tol, eps_f=0.0, start_radius=1.0, solver=None):
    solver = dict(solver or {})
    problem, tr, consts, res = _cached_run(algorithm, json.dumps(problem_spec, sort_keys=True), int(seed),
                                           float(grad_tol), float(eps_f), float(start_radius),
                                           json.dumps(solver, sort_keys=True))
    return MatrixRun(algorithm, problem, tr, consts, res, int(seed), float(eps_f))


def matrix_runs(overrides=None):
    """Exact-oracle runs over quadratics and Rosenbrock for each seed and algorithm."""
    c = dict(MATRIX_DEFAULTS)
    c.update(overrides or {})
    out = []
    for alg in c["algorithms"]:
        for seed in range(c["seeds"]):
            for n in c["quadratic_dims"]:
                spec = {"family": "quadratic", "n": n, "eigenvalues": c["eigenvalues"], "rotate_seed": seed}
                out.append(_run(alg, spec, seed, c["quadratic_grad_tol"], 0.0, c["start_radius"], {"budget": c["budget"]}))
            for n in c["rosenbrock_dims"]:
                spec = {"family": "rosenbrock", "n": n}
                out.append(_run(alg, spec, seed, c["rosenbrock_grad_tol"], 0.0, c["start_radius"], {"budget": c["budget"]}))
    return out


def certified(rec, mr):
    """Whether the model of ``rec`` carries the fully-linear certificate behind ``C1``.

    Finite-difference models are certified whenever the sampled ball lies in
    the region where ``L`` is valid (and the step clears the noise floor);
    interpolation models additionally need a complete set inside
    ``B(0, Delta_k)`` whose measured poisedness is within the threshold.
    """
    p, tr = mr.problem, mr.tr
    if math.isfinite(p.region_radius) and rec.x_inf_norm + rec.delta > p.region_radius:
        return False
    d = p.dim if mr.algorithm in ("alg1", "alg2") else tr.q
    if mr.algorithm in ("alg1", "alg3"):
        if mr.eps_f > 0 and tr.fd_step(rec.delta, d) < 2.0 * math.sqrt(mr.eps_f / p.lipschitz_L):
            return False
        return True
    lam = tr.lambda_for(d)
    if not (rec.model_built and rec.set_in_ball and rec.lambda_measured is not None):
        return False
    if rec.lambda_measured > lam * (1 + 1e-9):
        return False
    if mr.eps_f > 0 and rec.delta < 2.0 * math.sqrt(lam * mr.eps_f / p.lipschitz_L):
        return False
    return True


# ---------------------------------------------------------------------------
# suites


def suite_fd_bound(cfg=None):
    """Forward-difference gradient error on random convex quadratics."""
    c = dict(dims=[2, 4, 8, 16], centers=50, eps_f=1e-8, seed=1)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally, worst = _Tally(), {"exact": 0.0, "noisy": 0.0}
    for n in c["dims"]:
        rng = make_stream(c["seed"], "fd-bound", n)
        for i in range(c["centers"]):
            L = float(10 ** rng.uniform(0, 2))
            lo = float(rng.uniform(0, L))
            p = make_problem({"family": "quadratic", "n": n, "eigenvalues": [lo, L], "rotate_seed": int(rng.integers(2**31))})
            x = rng.standard_normal(n) * 3
            g_true = p.grad(x)
            delta = float(10 ** rng.uniform(-3, 0))
            err = np.linalg.norm(fd_gradient(Oracle(p), x, delta) - g_true)
            bound = math.sqrt(n) * L * delta / 2
            worst["exact"] = max(worst["exact"], err / bound)
            tally.check(err <= bound * (1 + 1e-8), lambda: dict(mode="exact", n=n, L=L, delta=delta, x=x, err=err, bound=bound))
            h = 2 * math.sqrt(c["eps_f"] / L)
            orc = Oracle(p, eps_f=c["eps_f"], noise_seed=derive_u64(c["seed"], n, i))
            err = np.linalg.norm(fd_gradient(orc, x, h) - g_true)
            bound = math.sqrt(n) * L * h
            worst["noisy"] = max(worst["noisy"], err / bound)
            tally.check(err <= bound, lambda: dict(mode="noisy", n=n, L=L, delta=h, x=x, err=err, bound=bound))
    stats = {"max error/bound (exact)": round(worst["exact"], 6), "max error/bound (noisy)": round(worst["noisy"], 6)}
    return _report("fd-bound", tally, f"{tally.violations} violations in {tally.checks} gradient builds", t0, stats)


def _probe_set(d, delta, rng, lam_max):
    """Random complete set in ``B(0, delta)`` with poisedness at most ``lam_max``."""
    while True:
        U = np.linalg.qr(rng.standard_normal((d, d)))[0]
        Y = U * rng.uniform(0.95, 1.0, d) + rng.uniform(0.0, 0.05) / math.sqrt(d) * rng.standard_normal((d, d))
        Y *= delta / max(1.0, np.linalg.norm(Y, axis=0).max())
        geom = GeometrySet(d, list(Y.T), np.zeros(d), 0.0)
        try:
            if lambda_poisedness(geom, delta).lam <= lam_max:
                return Y
        except np.linalg.LinAlgError:
            continue


def lemma_probe(mr, j):
    """One step from a fresh state forced into the regime ``Delta <= C1 ||grad phi(x)||``.

    The start is a random point near the run's minimizer; the radius is a
    random fraction of ``C1 ||grad phi(x)||``; for ``alg2`` the set is a
    random certified one. Returns the record, or ``None`` if the ball leaves
    the region where ``L`` is valid.
    """
    p, tr = mr.problem, mr.tr
    rng = make_stream(mr.seed, "lemma-probe", mr.algorithm, p.name, p.dim, j)
    x = start_point(p, "random", float(10 ** rng.uniform(-2, 0)), derive_u64(mr.seed, "probe", j))
    delta = float(rng.uniform(0.05, 1.0)) * mr.consts.C1 * float(np.linalg.norm(p.grad(x)))
    if not p.in_region(x, delta) or delta <= 0:
        return None
    cfg = TRConfig(**{**tr.__dict__, "delta0": delta})
    state = init_state(mr.algorithm, Oracle(p), x, cfg)
    if mr.algorithm == "alg2":
        Y = _probe_set(p.dim, delta, rng, cfg.lambda_for(p.dim))
        vals = [state.oracle(x + Y[:, i]) for i in range(p.dim)]
        state.geometry = GeometrySet(p.dim, list(Y.T), vals, state.geometry.center_value)
    _, rec = step(state, cfg)
    rec.true_grad_norm = float(np.linalg.norm(p.grad(x)))
    rec.x_inf_norm = float(np.max(np.abs(x)))
    return rec


def suite_lemma_success(cfg=None):
    """Certified iterations with ``Delta_k <= C1 ||grad phi(x_k)||`` must succeed.

    Trajectories rarely enter this regime on their own, so each run also
    contributes ``probes`` single steps started inside it.
    """
    c = dict(probes=5)
    c.update(cfg or {})
    mcfg = {k: v for k, v in c.items() if k in MATRIX_DEFAULTS}
    t0 = time.perf_counter()
    tally = _Tally()
    natural = probed = 0
    runs = matrix_runs(mcfg)
    for mr in runs:
        C1 = mr.consts.C1
        recs = [(r, "trajectory") for r in mr.result.records]
        recs += [(lemma_probe(mr, j), "probe") for j in range(c["probes"])]
        for rec, origin in recs:
            if rec is None:
                continue
            if rec.delta <= C1 * rec.true_grad_norm and certified(rec, mr):
                natural += origin == "trajectory"
                probed += origin == "probe"
                tally.check(rec.cls == SUCCESS, lambda: dict(context=mr.context(), origin=origin, C1=C1, record=rec.to_dict()))
    stats = {"runs": len(runs), "trajectory iterations in the regime": natural, "probe steps in the regime": probed}
    return _report("lemma-success", tally, f"{tally.violations} violations among {tally.checks} applicable iterations", t0, stats)


def _progress_runs(cfg):
    c = dict(seeds=10, n=6, q=3, eps_f=[0.0, 1e-6], grad_tol=1e-2)
    c.update(cfg or {})
    runs = []
    for eps_f in c["eps_f"]:
        for seed in range(c["seeds"]):
            for alg in ("alg1", "alg2", "alg3", "alg4"):
                solver = {"q": c["q"]} if alg in ("alg3", "alg4") else {}
                for spec in ({"family": "quadratic", "n": c["n"], "eigenvalues": [1, 10], "rotate_seed": seed},
                             {"family": "logsumexp", "n": c["n"], "seed": seed}):
                    tol = c["grad_tol"] if eps_f == 0 else 10 * c["grad_tol"]
                    runs.append(_run(alg, spec, seed, tol, eps_f, 1.0, dict(solver, budget=50_000)))
    return runs


def suite_progress(cfg=None):
    """Every successful iteration decreases ``phi`` by ``C2 Delta_k^2 - 2 eps_f``."""
    t0 = time.perf_counter()
    tally = _Tally()
    runs = list(_progress_runs(cfg)) + matrix_runs()
    worst = math.inf
    for mr in runs:
        C2 = mr.consts.C2
        for rec in mr.result.records:
            if rec.cls != SUCCESS:
                continue
            gain = rec.phi - rec.phi_next
            need = C2 * rec.delta**2 - 2 * mr.eps_f
            worst = min(worst, gain - need)
            tally.check(gain >= need - 1e-10, lambda: dict(context=mr.context(), C2=C2, gain=gain, need=need, record=rec.to_dict()))
    return _report("progress", tally, f"{tally.violations} violations among {tally.checks} successful iterations", t0,
                   {"runs": len(runs), "min slack": worst})


def suite_radius_floor(cfg=None):
    """Exact-oracle geometry-correcting runs keep ``Delta_k >= gamma C1 eps``."""
    t0 = time.perf_counter()
    tally = _Tally()
    c = dict(cfg or {})
    c["algorithms"] = ["alg2"]
    ratios = []
    for mr in matrix_runs(c):
        res = mr.result
        if not res.terminated or not res.records:
            continue
        floor = mr.tr.gamma * mr.consts.C1 * res.grad_tol
        dmin = min(r.delta for r in res.records)
        ratios.append(dmin / floor)
        tally.check(dmin >= floor, lambda: dict(context=mr.context(), min_delta=dmin, floor=floor))
    stats = {"runs checked": tally.checks, "min Delta_k / floor": min(ratios) if ratios else None}
    return _report("radius-floor", tally, f"{tally.violations} of {tally.checks} runs below the floor", t0, stats)


def _unit_dynamic(d, seed, delta=1.0, tol=1e-8):
    rng = make_stream(seed, "unit-dynamic", d)
    while True:
        pts = rng.standard_normal((d, d))
        pts *= (delta * rng.uniform(0.2, 1.0, d) / np.linalg.norm(pts, axis=0))
        geom = GeometrySet(d, list(pts.T), np.zeros(d), 0.0)
        try:
            if lambda_poisedness(geom, delta).lam > 1 + tol:
                break
        except np.linalg.LinAlgError:
            continue
    steps = 0
    sizes = [len(orthogonal_index_set(geom, delta))]
    while True:
        act = geometry_action(geom, delta, 1 + tol, np.zeros(d))
        if act.kind == GOOD:
            break
        if act.kind != REPLACE_BAD or steps > d:
            return steps, act.lam, sizes, False
        apply_action(geom, act, 0.0)
        steps += 1
        sizes.append(len(orthogonal_index_set(geom, delta)))
    lam = lambda_poisedness(geom, delta).lam
    growing = all(b > a for a, b in zip(sizes, sizes[1:]))
    return steps, lam, sizes, growing


def suite_geometry_runs(cfg=None):
    """Geometry-correcting blocks cost at most ``3d`` calls; ReplaceBad reaches 1-poisedness in ``d`` steps."""
    c = dict(unit_dims=list(range(2, 17)), unit_seeds=100)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()
    worst_block = 0.0
    mcfg = {k: v for k, v in c.items() if k in MATRIX_DEFAULTS}
    mcfg["algorithms"] = ["alg2"]
    for mr in matrix_runs(mcfg):
        d = mr.problem.dim
        block, start = 0, None
        for rec in mr.result.records + [None]:
            if rec is not None and rec.cls in GEOMETRY_CLASSES:
                block += rec.calls
                start = rec.k if start is None else start
                continue
            if start is not None:
                worst_block = max(worst_block, block / (3 * d))
                tally.check(block <= 3 * d, lambda: dict(context=mr.context(), block_start=start, calls=block, limit=3 * d))
            block, start = 0, None
    unit_fail = 0
    max_steps = 0
    for d in c["unit_dims"]:
        for s in range(c["unit_seeds"]):
            steps, lam, sizes, growing = _unit_dynamic(d, s)
            max_steps = max(max_steps, steps / d)
            ok = steps <= d and abs(lam - 1.0) <= 1e-8 and growing
            unit_fail += not ok
            tally.check(ok, lambda: dict(unit_dynamic=True, d=d, seed=s, steps=steps, lam=lam, index_set_sizes=sizes))
    stats = {"max block calls / 3d": round(worst_block, 4), "max ReplaceBad steps / d": round(max_steps, 4),
             "unit-dynamic failures": unit_fail}
    return _report("geometry-runs", tally, f"{tally.violations} violations in {tally.checks} checks", t0, stats)


def _poised_set(d, delta, rng, lam_max=2.0):
    while True:
        U = np.linalg.qr(rng.standard_normal((d, d)))[0]
        Y = U + rng.uniform(0.0, 0.6) / math.sqrt(d) * rng.standard_normal((d, d))
        Y *= delta * rng.uniform(0.6, 1.0, d) / np.linalg.norm(Y, axis=0)
        geom = GeometrySet(d, list(Y.T), np.zeros(d), 0.0)
        try:
            lam = lambda_poisedness(geom, delta).lam
        except np.linalg.LinAlgError:
            continue
        if lam <= lam_max:
            return Y, lam


def suite_kappa_eg(cfg=None):
    """Interpolation gradient error against ``sqrt(d) L Delta sqrt(d(Lambda^2-1)+2)``."""
    c = dict(dims=[2, 4, 8], sets=200, seed=2, lam_max=2.0)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()
    halved_viol, worst, worst_half = 0, 0.0, 0.0
    for d in c["dims"]:
        rng = make_stream(c["seed"], "kappa-eg", d)
        fams = [
            {"family": "quadratic", "n": d, "eigenvalues": [0.5, 5]},
            {"family": "logsumexp", "n": d, "mu": 0.5},
            {"family": "rosenbrock", "n": d},
        ]
        for i in range(c["sets"]):
            spec = dict(fams[i % 3])
            if spec["family"] == "quadratic":
                spec["rotate_seed"] = i
            elif spec["family"] == "logsumexp":
                spec["seed"] = i
            p = make_problem(spec)
            delta = float(10 ** rng.uniform(-3, -0.5))
            if spec["family"] == "rosenbrock":
                x = rng.uniform(-1.5, 1.5, d)
            else:
                x = rng.standard_normal(d)
            Y, lam = _poised_set(d, delta, rng, c["lam_max"])
            vals = [p.eval(x + Y[:, j]) for j in range(d)]
            g = interp_linear_model(p.eval(x), vals, Y).g
            err = float(np.linalg.norm(g - p.grad(x)))
            bound = interpolation_gradient_bound(d, p.lipschitz_L, lam, delta)
            worst = max(worst, err / bound)
            worst_half = max(worst_half, 2 * err / bound)
            halved_viol += err > 0.5 * bound
            tally.check(err <= bound, lambda: dict(d=d, problem=spec, x=x, Y=Y, lam=lam, delta=delta, err=err, bound=bound))
    stats = {"max error/bound": round(worst, 6), "max error/halved bound (not gating)": round(worst_half, 6),
             "halved-form violations (not gating)": halved_viol}
    return _report("kappa-eg", tally, f"{tally.violations} violations in {tally.checks} interpolation models", t0, stats)


def suite_lower_bound(cfg=None):
    """The adversarial set attains ``Lambda`` and an error of at least ``0.5 sqrt(n) sqrt(n(Lambda^2-1)+1)``."""
    c = dict(dims=[2, 4, 8], lambdas=[1.05, 1.5])
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()
    rows = {}

    def measure(inst):
        geom = GeometrySet(inst.dim, list(inst.Y.T), np.zeros(inst.dim), 0.0)
        lam = lambda_poisedness(geom, 1.0).lam
        vals = [inst.phi(inst.Y[:, j]) for j in range(inst.dim)]
        g = interp_linear_model(inst.phi(np.zeros(inst.dim)), vals, inst.Y).g
        return lam, float(np.linalg.norm(g - inst.grad(np.zeros(inst.dim))))

    for n in c["dims"]:
        for target in c["lambdas"]:
            inst = adversarial_instance(n, target)
            lam, err = measure(inst)
            lb = 0.5 * math.sqrt(n) * math.sqrt(n * (target**2 - 1) + 1)
            rows[f"n={n} Lambda={target}"] = f"measured Lambda={lam:.9f} error={err:.6f} bound={lb:.6f}"
            tally.check(abs(lam - target) <= 1e-6, lambda: dict(n=n, target=target, measured=lam))
            tally.check(err >= lb - 1e-8, lambda: dict(n=n, target=target, error=err, bound=lb))
    inst = adversarial_instance(2, eps=0.2)
    lam, err = measure(inst)
    rows["n=2 eps=0.2"] = f"measured Lambda={lam:.6f} error={err:.6f}"
    tally.check(abs(lam - 1.02062) <= 1e-5, lambda: dict(hand_value="Lambda", measured=lam, expected=1.02062))
    tally.check(abs(err - 0.79057) <= 1e-5, lambda: dict(hand_value="error", measured=err, expected=0.79057))
    return _report("lower-bound", tally, f"{tally.violations} violations in {tally.checks} checks", t0, rows)


def suite_haar(cfg=None):
    """Alignment probability and its Beta law for Haar embeddings."""
    c = dict(n=50, qs=[3, 5, 10], samples=10_000, seed=3, alpha=0.01)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()
    n, N = c["n"], c["samples"]
    rows = {}
    for q in c["qs"]:
        rng = make_stream(c["seed"], "haar-suite", q)
        v = rng.standard_normal(n)
        a = np.array([alignment(haar_sample(n, q, rng).Q, v) for _ in range(N)])
        p = float(np.mean(a >= q / (10.0 * n)))
        sigma = math.sqrt(max(p * (1 - p), 1e-300) / N)
        ks = stats.kstest(a, stats.beta(q / 2, (n - q) / 2).cdf)
        rows[f"q={q}"] = f"P={p:.4f} (need >= {HAAR_THETA - 3 * sigma:.4f}), KS p-value={ks.pvalue:.4f}"
        tally.check(p >= HAAR_THETA - 3 * sigma, lambda: dict(q=q, probability=p, sigma=sigma))
        tally.check(ks.pvalue >= c["alpha"], lambda: dict(q=q, ks_statistic=ks.statistic, pvalue=ks.pvalue))
    return _report("haar", tally, f"{tally.violations} violations in {tally.checks} checks", t0, rows)


def _loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def suite_scaling(cfg=None):
    """Growth of the mean oracle count in ``n`` (alg2) and in ``q`` (alg4)."""
    c = dict(grad_tol=1e-2, eigenvalues=[1, 10], alg2_dims=[4, 8, 16, 32], alg2_seeds=10,
             alg4_n=32, alg4_qs=[4, 8, 16], alg4_seeds=20, slope_alg2=[1.0, 2.6], slope_alg4_max=1.5)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()

    def mean_calls(alg, n, seeds, q=None):
        solver = {"budget": 2_000_000}
        if q is not None:
            solver["q"] = q
        Ns = []
        for s in range(seeds):
            spec = {"family": "quadratic", "n": n, "eigenvalues": c["eigenvalues"], "rotate_seed": s}
            mr = _run(alg, spec, s, c["grad_tol"], 0.0, 1.0, solver)
            tally.check(mr.result.terminated, lambda: dict(context=mr.context(), reason="did not terminate"))
            Ns.append(mr.result.N)
        return float(np.mean(Ns))

    n2 = [mean_calls("alg2", n, c["alg2_seeds"]) for n in c["alg2_dims"]]
    s2 = _loglog_slope(c["alg2_dims"], n2)
    lo, hi = c["slope_alg2"]
    tally.check(lo <= s2 <= hi, lambda: dict(probe="alg2 vs n", dims=c["alg2_dims"], mean_N=n2, slope=s2))
    n4 = [mean_calls("alg4", c["alg4_n"], c["alg4_seeds"], q) for q in c["alg4_qs"]]
    s4 = _loglog_slope(c["alg4_qs"], n4)
    increasing = all(b > a for a, b in zip(n4, n4[1:]))
    tally.check(increasing and s4 <= c["slope_alg4_max"], lambda: dict(probe="alg4 vs q", qs=c["alg4_qs"], mean_N=n4, slope=s4))
    stats_ = {
        "alg2 mean N_eps by n": dict(zip(c["alg2_dims"], [round(v, 1) for v in n2])),
        "alg2 log-log slope": round(s2, 4),
        "alg4 mean N_eps by q": dict(zip(c["alg4_qs"], [round(v, 1) for v in n4])),
        "alg4 log-log slope": round(s4, 4),
    }
    return _report("scaling", tally, f"alg2 slope {s2:.3f} in [{lo}, {hi}]; alg4 slope {s4:.3f}, increasing={increasing}", t0, stats_)


def suite_complexity(cfg=None):
    """Oracle counts against the theoretical bounds with measured constants."""
    c = dict(sub_seeds=20, sub_cases=[(8, 4), (16, 4)], sub_grad_tol=1e-2, safety=3.0)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()
    worst = 0.0
    mcfg = {k: v for k, v in c.items() if k in MATRIX_DEFAULTS}
    for mr in matrix_runs(mcfg):
        res = mr.result
        if not res.terminated:
            continue
        bound = mr.consts.theoretical_N_eps
        worst = max(worst, res.N / bound)
        tally.check(res.N <= bound, lambda: dict(context=mr.context(), N=res.N, bound=bound))
        # unsuccessful (shrink) iterations are bounded by successes plus the log term
        C1 = mr.consts.C1
        S = sum(r.cls == SUCCESS for r in res.records)
        U = sum(r.cls == SHRINK for r in res.records)
        lim = S + unsuccessful_log_term(mr.tr.gamma, C1, res.grad_tol, mr.tr.delta0)
        tally.check(U <= lim, lambda: dict(context=mr.context(), shrinks=U, successes=S, limit=lim))
    rows = {"deterministic max N/bound": f"{worst:.3e}"}
    for alg in ("alg3", "alg4"):
        for n, q in c["sub_cases"]:
            Ns, bounds = [], []
            for s in range(c["sub_seeds"]):
                spec = {"family": "quadratic", "n": n, "eigenvalues": [1, 10], "rotate_seed": s}
                mr = _run(alg, spec, s, c["sub_grad_tol"], 0.0, 1.0, {"q": q, "budget": 2_000_000})
                tally.check(mr.result.terminated, lambda: dict(context=mr.context(), reason="did not terminate"))
                Ns.append(mr.result.N)
                bounds.append(mr.consts.theoretical_N_eps)
            mean_N, mean_b = float(np.mean(Ns)), float(np.mean(bounds))
            rows[f"{alg} n={n} q={q}"] = f"mean N={mean_N:.1f}, bound={mean_b:.3e}"
            tally.check(mean_N <= c["safety"] * mean_b, lambda: dict(alg=alg, n=n, q=q, mean_N=mean_N, bound=mean_b))
    return _report("complexity", tally, f"{tally.violations} violations in {tally.checks} checks", t0, rows)


def suite_noisy(cfg=None):
    """With bounded noise, every tolerance above the threshold is reached."""
    c = dict(eps_f=1e-6, seeds=10, n=4, eigenvalues=[1, 10], start_radius=10.0,
             multiples=[1.01, 1.5, 3.0], absolute=[1e-3, 1e-2, 1e-1], budget=200_000)
    c.update(cfg or {})
    t0 = time.perf_counter()
    tally = _Tally()
    spec0 = {"family": "quadratic", "n": c["n"], "eigenvalues": c["eigenvalues"]}
    p = make_problem(spec0)
    thr = constants_for(p, "alg2", TRConfig(), 1.0, c["eps_f"], 0.5).eps_threshold
    tols = sorted(set([m * thr for m in c["multiples"]] + list(c["absolute"])))
    excluded = [t for t in tols if t <= thr]
    reached = {}
    for tol in tols:
        if tol <= thr:
            continue
        hits = 0
        for s in range(c["seeds"]):
            spec = dict(spec0, rotate_seed=s)
            mr = _run("alg2", spec, s, tol, c["eps_f"], c["start_radius"], {"budget": c["budget"]})
            hits += mr.result.terminated
            tally.check(mr.result.terminated, lambda: dict(context=mr.context(), threshold=thr, calls=mr.result.N))
        reached[f"{tol:.4g}"] = f"{hits}/{c['seeds']}"
    stats_ = {"eps threshold": round(thr, 6), "reached (eps: runs)": reached,
              "excluded tolerances": [f"{t:.4g}" for t in excluded]}
    return _report("noisy", tally, f"{tally.violations} of {tally.checks} runs above the threshold failed", t0, stats_)


SUITES: Dict[str, Callable] = {
    "fd-bound": suite_fd_bound,
    "lemma-success": suite_lemma_success,
    "progress": suite_progress,
    "radius-floor": suite_radius_floor,
    "geometry-runs": suite_geometry_runs,
    "kappa-eg": suite_kappa_eg,
    "lower-bound": suite_lower_bound,
    "haar": suite_haar,
    "complexity": suite_complexity,
    "scaling": suite_scaling,
    "noisy": suite_noisy,
}


def verify_suite(name, config=None):
    """Run the suite ``name`` (see :data:`SUITES`) with optional overrides."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    return SUITES[name](config)
