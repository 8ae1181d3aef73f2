"""Experiment configuration files.

The format is INI-style key-value text. Values are parsed as JSON when
possible (numbers, lists, ``true``/``null``) and kept as strings otherwise.
Three sections are recognised::

    [experiment]
    algorithm = alg2
    grad_tol = 1e-2
    eps_f = 0
    replicas = 3
    start = random          # or "default"
    start_radius = 1.0
    tau = 0.5

    [problem]
    family = quadratic
    n = 8
    eigenvalues = [1, 10]

    [solver]
    eta1 = 0.1
    budget = 100000

Keys before any section header belong to ``[experiment]``; dotted keys such
as ``problem.n`` may be used there instead of separate sections.
"""
import configparser
from dataclasses import dataclass, field, fields
import json
from pathlib import Path
from typing import Optional
import warnings

from ..drivers import ALGORITHMS, TRConfig

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config_text", "load_params"]


class ConfigError(ValueError):
    """Unparseable or invalid configuration."""


_SOLVER_FIELDS = {f.name for f in fields(TRConfig)} - {"curvature"}
_EXPERIMENT_KEYS = ("algorithm", "grad_tol", "eps_f", "replicas", "start", "start_radius", "tau", "output")


@dataclass
class ExperimentConfig:
    problem: dict
    algorithm: str
    solver: dict = field(default_factory=dict)
    grad_tol: float = 1e-2
    eps_f: float = 0.0
    replicas: int = 1
    start: str = "default"
    start_radius: float = 1.0
    tau: float = 0.5
    output: Optional[str] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if "family" not in self.problem:
            raise ConfigError("problem.family is required")
        if not self.grad_tol > 0:
            raise ConfigError("grad_tol must be positive")
        if self.eps_f < 0:
            raise ConfigError("eps_f must be non-negative")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.start not in ("default", "random"):
            raise ConfigError("start must be 'default' or 'random'")
        if not 0 < self.tau < 1:
            raise ConfigError("tau must lie in (0, 1)")
        unknown = set(self.solver) - _SOLVER_FIELDS
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        try:
            self.tr_config()
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def tr_config(self, rng_seed=None):
        kw = dict(self.solver)
        if rng_seed is not None:
            kw["rng_seed"] = rng_seed
        return TRConfig(**kw)


def _value(raw):
    try:
        return json.loads(raw)
    except ValueError:
        return raw


def parse_config_text(text):
    """Parse key-value text into ``{"experiment": ..., "problem": ..., "solver": ...}``."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    first = next((ln.strip() for ln in text.splitlines() if ln.strip() and ln.strip()[0] not in "#;"), "")
    try:
        parser.read_string(text if first.startswith("[") else "[experiment]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc
    out = {"experiment": {}, "problem": {}, "solver": {}}
    for section in parser.sections():
        if section not in out:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            head, dot, tail = key.partition(".")
            if dot and head in out:
                out[head][tail] = _value(raw)
            else:
                out[section][key] = _value(raw)
    return out


def load_config(path):
    """Read and validate an :class:`ExperimentConfig` from ``path``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    sections = parse_config_text(text)
    exp = sections["experiment"]
    unknown = set(exp) - set(_EXPERIMENT_KEYS)
    if unknown:
        raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
    if "algorithm" not in exp:
        raise ConfigError("experiment.algorithm is required")
    try:
        cfg = ExperimentConfig(problem=sections["problem"], solver=sections["solver"], **exp)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_params(path):
    """Flat parameter mapping for ``dfo-kit constants`` (JSON or key-value text)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if str(path).endswith(".json"):
        try:
            params = json.loads(text)
        except ValueError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(params, dict):
            raise ConfigError("parameter file must hold a JSON object")
        return params
    sections = parse_config_text(text)
    flat = {}
    for sec in sections.values():
        flat.update(sec)
    return flat


def warn_threshold(cfg, eps_threshold):
    if cfg.eps_f > 0 and cfg.grad_tol <= eps_threshold:
        warnings.warn(
            f"grad_tol={cfg.grad_tol:g} is not above the noise threshold {eps_threshold:.4g}; "
            "the run may not reach it",
            stacklevel=2,
        )
