"""Trust-region drivers.

``alg1``  basic trust region on finite-difference models;
``alg2``  geometry-correcting trust region on linear interpolation models;
``alg3``  ``alg1`` restricted to a fresh Haar subspace each iteration;
``alg4``  ``alg2`` run in a Haar subspace that is redrawn only after
          successful and radius-shrinking iterations.

Each ``step_*`` function performs one iteration, mutating and returning the
:class:`TRState` together with an :class:`IterationRecord`. :func:`run` is
the harness-side loop: it stops on the true gradient norm, which the solver
itself never sees.
"""
from dataclasses import asdict, dataclass, field
import math
from typing import Callable, List, Optional

import numpy as np

from .geometry import (
    ADD,
    GOOD,
    REPLACE_BAD,
    REPLACE_FAR,
    GeometrySet,
    apply_action,
    geometry_action,
    lambda_poisedness,
    shift_on_success,
)
from .models import GeometryError, fd_gradient, fd_subspace_gradient, interp_linear_model
from .problems import BudgetExhausted, Oracle
from .streams import derive_u64, make_stream
from .subspace import alignment, haar_sample
from .trs import Model, clip_hessian, solve_trs

__all__ = [
    "ALGORITHMS",
    "SUCCESS",
    "SHRINK",
    "GEOM_ADD",
    "GEOM_FAR",
    "GEOM_BAD",
    "GEOMETRY_CLASSES",
    "TRConfig",
    "TRState",
    "IterationRecord",
    "RunResult",
    "rho",
    "init_state",
    "step_basic",
    "step_geometry",
    "step_subspace",
    "step",
    "run",
]

ALGORITHMS = ("alg1", "alg2", "alg3", "alg4")

SUCCESS = "success"
SHRINK = "shrink"
GEOM_ADD = "geom_add"
GEOM_FAR = "geom_far"
GEOM_BAD = "geom_bad"
GEOMETRY_CLASSES = (GEOM_ADD, GEOM_FAR, GEOM_BAD)
_ACTION_CLASS = {ADD: GEOM_ADD, REPLACE_FAR: GEOM_FAR, REPLACE_BAD: GEOM_BAD}

DELTA_CHOICES = ("delta_eq_Delta", "delta_eq_Delta_over_sqrt_d")
_PRED_FLOOR = 1e-15


@dataclass
class TRConfig:
    """Hyperparameters shared by all drivers.

    ``lambda_threshold=None`` means ``1 + 1/d`` for the model dimension
    ``d``. ``budget`` caps oracle calls per run. ``curvature`` is an optional
    ``x -> H`` hook; its output is symmetrized and spectrally clipped to
    ``kappa_bhm`` (the default model Hessian is zero).
    """

    eta1: float = 0.1
    eta2: float = 1.0
    gamma: float = 0.5
    delta0: float = 1.0
    lambda_threshold: Optional[float] = None
    delta_choice: str = "delta_eq_Delta"
    budget: Optional[int] = 100_000
    delta_max: Optional[float] = None
    q: Optional[int] = None
    rng_seed: int = 0
    kappa_bhm: float = 1.0
    refine: bool = True
    init_geometry: str = "empty"
    curvature: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not 0.0 < self.eta1 < 1.0:
            raise ValueError("eta1 must lie in (0, 1)")
        if not self.eta2 > 0.0:
            raise ValueError("eta2 must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not self.delta0 > 0.0:
            raise ValueError("delta0 must be positive")
        if self.lambda_threshold is not None and not self.lambda_threshold > 1.0:
            raise ValueError("lambda_threshold must exceed 1")
        if self.delta_choice not in DELTA_CHOICES:
            raise ValueError(f"delta_choice must be one of {DELTA_CHOICES}")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.delta_max is not None and not self.delta_max >= self.delta0:
            raise ValueError("delta_max must be >= delta0")
        if not self.kappa_bhm > 0.0:
            raise ValueError("kappa_bhm must be positive")
        if self.init_geometry not in ("empty", "basis"):
            raise ValueError("init_geometry must be 'empty' or 'basis'")

    def lambda_for(self, d):
        return 1.0 + 1.0 / d if self.lambda_threshold is None else self.lambda_threshold

    def fd_step(self, delta, d):
        return delta if self.delta_choice == "delta_eq_Delta" else delta / math.sqrt(d)


@dataclass
class TRState:
    x: np.ndarray
    delta: float
    oracle: Oracle
    algorithm: str
    k: int = 0
    model: Optional[Model] = None
    geometry: Optional[GeometrySet] = None
    Q: Optional[np.ndarray] = None
    rng: Optional[np.random.Generator] = None

    @property
    def n(self):
        return self.x.shape[0]


@dataclass
class IterationRecord:
    """One iteration of a driver.

    Solver-side fields are filled by the ``step_*`` functions; the fields
    from ``true_grad_norm`` on are ground truth filled in by :func:`run`.
    ``rho`` is ``None`` when the trial point was not evaluated (zero
    predicted decrease).
    """

    k: int
    delta: float
    delta_next: float
    g_norm: float
    rho: Optional[float]
    cls: str
    calls: int
    cumulative_calls: int
    step_norm: float = 0.0
    model_built: bool = True
    lambda_measured: Optional[float] = None
    set_in_ball: Optional[bool] = None
    true_grad_norm: Optional[float] = None
    phi: Optional[float] = None
    phi_next: Optional[float] = None
    x_inf_norm: Optional[float] = None
    alignment: Optional[float] = None
    aligned: Optional[bool] = None
    big_delta: Optional[bool] = None

    def to_dict(self):
        return asdict(self)


@dataclass
class RunResult:
    algorithm: str
    problem: str
    n: int
    q: Optional[int]
    records: List[IterationRecord]
    terminated: bool
    calls: int
    x_final: np.ndarray
    phi0: float
    grad_norm0: float
    grad_tol: float
    eps_f: float
    delta0: float

    @property
    def K(self):
        return len(self.records)

    @property
    def N(self):
        return self.calls


def rho(f_center, f_trial, m_center, m_trial):
    """Actual-to-predicted reduction ratio; ``-inf`` when the prediction is ~0."""
    return _ratio(f_center - f_trial, m_center - m_trial)


def _ratio(actual, predicted):
    if predicted <= _PRED_FLOOR:
        return -math.inf
    return actual / predicted


def _hessian(cfg, x, Q=None):
    d = x.shape[0] if Q is None else Q.shape[1]
    if cfg.curvature is None:
        return np.zeros((d, d))
    H = np.asarray(cfg.curvature(x), dtype=float)
    if Q is not None:
        H = Q.T @ H @ Q
    return clip_hessian(H, cfg.kappa_bhm)


def _next_radius(cfg, delta):
    up = delta / cfg.gamma
    return up if cfg.delta_max is None else min(up, cfg.delta_max)


def _haar(state, cfg):
    return haar_sample(state.n, cfg.q, state.rng, seed_tag=(cfg.rng_seed, state.k)).Q


def _reset_subspace_set(state, center_value):
    """Fresh ``delta``-scaled coordinate set in the current subspace (q oracle calls)."""
    q = state.Q.shape[1]
    vals = [state.oracle(state.x + state.delta * state.Q[:, i]) for i in range(q)]
    state.geometry = GeometrySet.coordinate(q, state.delta, vals, center_value)


def init_state(algorithm, oracle, x0, cfg):
    """Initial state; ``alg2``/``alg4`` spend oracle calls on ``f(x0)`` and the first set."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    x0 = np.asarray(x0, dtype=float).copy()
    n = x0.shape[0]
    state = TRState(x=x0, delta=float(cfg.delta0), oracle=oracle, algorithm=algorithm)
    if algorithm in ("alg3", "alg4"):
        if cfg.q is None or not 3 <= cfg.q <= n:
            raise ValueError(f"subspace drivers need 3 <= q <= n, got q={cfg.q}, n={n}")
        state.rng = make_stream(cfg.rng_seed, "haar")
        state.Q = _haar(state, cfg)
    if algorithm == "alg2":
        fx = oracle(x0)
        if cfg.init_geometry == "basis":
            vals = [oracle(x0 + state.delta * e) for e in np.eye(n)]
            state.geometry = GeometrySet.coordinate(n, state.delta, vals, fx)
        else:
            state.geometry = GeometrySet(n, center_value=fx)
    elif algorithm == "alg4":
        _reset_subspace_set(state, oracle(x0))
    return state


def _finish(state, cfg, delta, record_kwargs, success, s_full, calls0):
    """Apply a successful step and emit the record; ``delta`` is the radius the step used."""
    if success:
        state.x = state.x + s_full
        state.delta = _next_radius(cfg, delta)
    rec = IterationRecord(
        k=state.k,
        delta=delta,
        delta_next=state.delta,
        calls=state.oracle.call_count - calls0,
        cumulative_calls=state.oracle.call_count,
        **record_kwargs,
    )
    state.k += 1
    return state, rec


def step_basic(state, cfg):
    """One iteration of the basic trust-region method (``n + 2`` oracle calls)."""
    oracle, x, delta = state.oracle, state.x, state.delta
    n = state.n
    calls0 = oracle.call_count
    g, fx = fd_gradient(oracle, x, cfg.fd_step(delta, n), full_output=True)
    model = Model(fx, g, _hessian(cfg, x), cfg.kappa_bhm)
    st = solve_trs(model, delta, cfg.refine)
    f_trial = oracle(x + st.s)
    r = _ratio(fx - f_trial, st.predicted_decrease)
    success = r >= cfg.eta1 and model.g_norm >= cfg.eta2 * delta
    if not success:
        state.delta = cfg.gamma * delta
    state.model = model
    kw = dict(g_norm=model.g_norm, rho=None if r == -math.inf else r, cls=SUCCESS if success else SHRINK, step_norm=st.norm)
    return _finish(state, cfg, delta, kw, success, st.s, calls0)


def _geometry_iteration(state, cfg, Q):
    oracle, x, delta, geom = state.oracle, state.x, state.delta, state.geometry
    d = geom.dim
    to_full = (lambda v: v) if Q is None else (lambda v: Q @ v)
    calls0 = oracle.call_count
    H = _hessian(cfg, x, Q)

    model, lam = None, None
    if geom.complete:
        try:
            lam = lambda_poisedness(geom, delta).lam
        except GeometryError:
            lam = math.inf
        try:
            model = interp_linear_model(geom.center_value, geom.values, geom.matrix(), H, cfg.kappa_bhm)
        except GeometryError:
            model = None
    built = model is not None
    if model is None:
        model = Model(geom.center_value, np.zeros(d), H, cfg.kappa_bhm)
    in_ball = geom.within(delta) if len(geom) else True

    st = solve_trs(model, delta, cfg.refine)
    f_trial = None
    r = -math.inf
    if st.predicted_decrease > _PRED_FLOOR:
        f_trial = oracle(x + to_full(st.s))
        r = _ratio(geom.center_value - f_trial, st.predicted_decrease)
    success = built and r >= cfg.eta1 and model.g_norm >= cfg.eta2 * delta
    state.model = model
    kw = dict(
        g_norm=model.g_norm,
        rho=None if r == -math.inf else r,
        step_norm=st.norm,
        model_built=built,
        lambda_measured=lam,
        set_in_ball=in_ball,
    )

    if success:
        kw["cls"] = SUCCESS
        if Q is None:
            state.geometry = shift_on_success(geom, st.s, f_trial)
            return _finish(state, cfg, delta, kw, True, st.s, calls0)
        state, rec = _finish(state, cfg, delta, kw, True, Q @ st.s, calls0)
        state.Q = _haar(state, cfg)
        _reset_subspace_set(state, f_trial)
        rec.calls = oracle.call_count - calls0
        rec.cumulative_calls = oracle.call_count
        return state, rec

    act = geometry_action(geom, delta, cfg.lambda_for(d), st.s)
    if act.kind == GOOD:
        kw["cls"] = SHRINK
        state.delta = cfg.gamma * delta
        if Q is not None:
            state.Q = _haar(state, cfg)
            _reset_subspace_set(state, geom.center_value)
        return _finish(state, cfg, delta, kw, False, None, calls0)

    value = f_trial
    if act.needs_eval or value is None:
        value = oracle(x + to_full(act.point))
    apply_action(geom, act, value)
    kw["cls"] = _ACTION_CLASS[act.kind]
    return _finish(state, cfg, delta, kw, False, None, calls0)


def step_geometry(state, cfg):
    """One iteration of the geometry-correcting method in the full space."""
    return _geometry_iteration(state, cfg, None)


def step_subspace(state, cfg, variant="basic"):
    """One iteration of a subspace method (``variant`` is "basic" or "geometry")."""
    if variant == "geometry":
        return _geometry_iteration(state, cfg, state.Q)
    if variant != "basic":
        raise ValueError(f"unknown subspace variant {variant!r}")
    oracle, x, delta, Q = state.oracle, state.x, state.delta, state.Q
    q = Q.shape[1]
    calls0 = oracle.call_count
    g, fx = fd_subspace_gradient(oracle, x, Q, cfg.fd_step(delta, q), full_output=True)
    model = Model(fx, g, _hessian(cfg, x, Q), cfg.kappa_bhm)
    st = solve_trs(model, delta, cfg.refine)
    s_full = Q @ st.s
    f_trial = oracle(x + s_full)
    r = _ratio(fx - f_trial, st.predicted_decrease)
    success = r >= cfg.eta1 and model.g_norm >= cfg.eta2 * delta
    if not success:
        state.delta = cfg.gamma * delta
    state.model = model
    kw = dict(g_norm=model.g_norm, rho=None if r == -math.inf else r, cls=SUCCESS if success else SHRINK, step_norm=st.norm)
    state, rec = _finish(state, cfg, delta, kw, success, s_full, calls0)
    state.Q = _haar(state, cfg)
    return state, rec


def step(state, cfg):
    alg = state.algorithm
    if alg == "alg1":
        return step_basic(state, cfg)
    if alg == "alg2":
        return step_geometry(state, cfg)
    if alg == "alg3":
        return step_subspace(state, cfg, "basic")
    return step_subspace(state, cfg, "geometry")


def run(
    algorithm,
    problem,
    cfg,
    grad_tol,
    x0=None,
    eps_f=0.0,
    noise_seed=None,
    big_delta_c1=None,
    max_iterations=None,
):
    """Run ``algorithm`` on ``problem`` until ``||grad phi(x_k)|| <= grad_tol`` or the budget ends.

    ``big_delta_c1`` (the subspace constant ``C1_hat``) enables the
    ``Delta_k > C1_hat ||grad phi(x_k)||`` flag on each record; the alignment
    flag uses the level ``q / (10 n)``.
    """
    if x0 is None:
        if problem.x_default is None:
            raise ValueError("problem has no default starting point; pass x0")
        x0 = problem.x_default
    x0 = np.asarray(x0, dtype=float)
    if noise_seed is None:
        noise_seed = derive_u64(cfg.rng_seed, "noise")
    oracle = Oracle(problem, eps_f=eps_f, noise_seed=noise_seed, budget=cfg.budget)
    g0 = float(np.linalg.norm(problem.grad(x0)))
    phi0 = float(problem.eval(x0))
    q = cfg.q if algorithm in ("alg3", "alg4") else None

    def result(records, terminated, x):
        return RunResult(algorithm, problem.name, problem.dim, q, records, terminated, oracle.call_count,
                         np.asarray(x).copy(), phi0, g0, float(grad_tol), float(eps_f), float(cfg.delta0))

    if g0 <= grad_tol:
        return result([], True, x0)
    try:
        state = init_state(algorithm, oracle, x0, cfg)
    except BudgetExhausted:
        return result([], False, x0)

    records = []
    terminated = False
    level = None if q is None else q / (10.0 * problem.dim)
    phi_k = phi0
    while True:
        grad = problem.grad(state.x)
        gn = float(np.linalg.norm(grad))
        if gn <= grad_tol:
            terminated = True
            break
        if max_iterations is not None and len(records) >= max_iterations:
            break
        Qk = state.Q
        x_inf = float(np.max(np.abs(state.x)))
        try:
            state, rec = step(state, cfg)
        except BudgetExhausted:
            break
        rec.true_grad_norm = gn
        rec.phi = phi_k
        phi_k = float(problem.eval(state.x)) if rec.cls == SUCCESS else phi_k
        rec.phi_next = phi_k
        rec.x_inf_norm = x_inf
        if Qk is not None and gn > 0:
            a = alignment(Qk, grad)
            rec.alignment = a
            rec.aligned = a >= level
        if big_delta_c1 is not None:
            rec.big_delta = rec.delta > big_delta_c1 * gn
        records.append(rec)
    return result(records, terminated, state.x)
