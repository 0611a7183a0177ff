"""Experiment configuration: strict JSON parsing with defaults.

Unknown keys are rejected (not ignored) and every invariant violation
names the offending field. Dotted-key overrides are applied to the raw
dict before validation so bad overrides fail loudly. Defaults live in
one place: the DEFAULTS table below.

All randomness of a run flows from the single master ``seed``; the
stream of run i is ``seed XOR i`` and the cross-validation fold stream
of that run is ``(seed XOR i) XOR (1 << 32)``.
"""

import json
from dataclasses import dataclass, field

from .baselines import METHOD_NAMES
from .errors import ConfigError
from .generator import GeneratorParams
from .objective import Penalties

DEFAULTS = {
    "n": 50,
    "r": 5,
    "T": 10,
    "sigma": 0.5,
    "density": 0.3,
    "noise_threshold": None,
    "factor_mode": "signed",
    "w0_spectral_norm": 0.9,
    "feature_rank": None,
    "methods": list(METHOD_NAMES),
    "tuning_policy": None,  # resolved: "fixed" when penalties given, else "theorem3"
    "alpha": 0.5,
    "confidence_x": 3.0,
    "penalties": None,
    "grid": None,
    "cv_folds": 10,
    "max_iter": 10000,
    "tol": 1e-6,
    "theta_scale": 1.9,
    "enforce_nonneg": True,
    "runs": 50,
    "seed": 0,
    "binarize_threshold": 1e-6,
    "sweep_T": None,
    "sweep_ranks": None,
    "trials": 1000,
    "output_dir": None,
}

_PENALTY_KEYS = ("tau", "gamma", "kappa", "alpha")
_POLICIES = ("fixed", "theorem3", "cv")


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated description of one benchmark run."""

    n: int
    r: int
    T: int
    sigma: float
    density: float
    noise_threshold: float | None
    factor_mode: str
    w0_spectral_norm: float
    feature_rank: int | None
    methods: tuple
    tuning_policy: str
    alpha: float
    confidence_x: float
    penalties: Penalties | None
    grid: tuple | None
    cv_folds: int
    max_iter: int
    tol: float
    theta_scale: float
    enforce_nonneg: bool
    runs: int
    seed: int
    binarize_threshold: float
    sweep_T: tuple | None
    sweep_ranks: tuple | None
    trials: int
    output_dir: str | None
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def effective_feature_rank(self):
        return self.r if self.feature_rank is None else self.feature_rank

    def run_seed(self, run_index):
        return self.seed ^ run_index

    def fold_seed(self, run_index):
        return self.run_seed(run_index) ^ (1 << 32)

    def generator_params(self, run_index, T=None, r=None):
        return GeneratorParams(
            n=self.n,
            r=self.r if r is None else r,
            T=self.T if T is None else T,
            sigma=self.sigma,
            density=self.density,
            noise_threshold=self.noise_threshold,
            factor_mode=self.factor_mode,
            w0_spectral_norm=self.w0_spectral_norm,
            seed=self.run_seed(run_index),
        )


def _expect_int(value, field_name, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field_name, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(field_name, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(field_name, f"must be <= {maximum}, got {value}")
    return value


def _expect_real(value, field_name, minimum=None, strict_min=None, strict_max=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field_name, f"expected a number, got {value!r}")
    value = float(value)
    if minimum is not None and value < minimum:
        raise ConfigError(field_name, f"must be >= {minimum}, got {value}")
    if strict_min is not None and value <= strict_min:
        raise ConfigError(field_name, f"must be > {strict_min}, got {value}")
    if strict_max is not None and value >= strict_max:
        raise ConfigError(field_name, f"must be < {strict_max}, got {value}")
    return value


def _parse_penalties(raw, field_name, default_alpha):
    if not isinstance(raw, dict):
        raise ConfigError(field_name, f"expected an object, got {raw!r}")
    unknown = set(raw) - set(_PENALTY_KEYS)
    if unknown:
        raise ConfigError(f"{field_name}.{sorted(unknown)[0]}", "unknown key")
    tau = _expect_real(raw.get("tau", 0.0), f"{field_name}.tau", minimum=0.0)
    gamma = _expect_real(raw.get("gamma", 0.0), f"{field_name}.gamma", minimum=0.0)
    kappa = _expect_real(raw.get("kappa", 0.0), f"{field_name}.kappa", minimum=0.0)
    alpha = _expect_real(
        raw.get("alpha", default_alpha), f"{field_name}.alpha", strict_min=0.0, strict_max=1.0
    )
    return Penalties(tau=tau, gamma=gamma, kappa=kappa, alpha=alpha)


def parse_experiment_dict(raw):
    """Validate a config dict and return the ExperimentSpec with defaults filled."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    cfg = dict(DEFAULTS)
    cfg.update(raw)

    n = _expect_int(cfg["n"], "n", minimum=2)
    r = _expect_int(cfg["r"], "r", minimum=1, maximum=n)
    T = _expect_int(cfg["T"], "T", minimum=1)
    sigma = _expect_real(cfg["sigma"], "sigma", minimum=0.0)
    density = _expect_real(cfg["density"], "density", strict_min=0.0)
    if density > 1.0:
        raise ConfigError("density", f"must be <= 1, got {density}")
    noise_threshold = cfg["noise_threshold"]
    if noise_threshold is not None:
        noise_threshold = _expect_real(noise_threshold, "noise_threshold", minimum=0.0)
    factor_mode = cfg["factor_mode"]
    if factor_mode not in ("signed", "nonneg"):
        raise ConfigError("factor_mode", f"must be 'signed' or 'nonneg', got {factor_mode!r}")
    w0_norm = _expect_real(cfg["w0_spectral_norm"], "w0_spectral_norm", strict_min=0.0)
    feature_rank = cfg["feature_rank"]
    if feature_rank is not None:
        feature_rank = _expect_int(feature_rank, "feature_rank", minimum=1, maximum=n)

    methods = cfg["methods"]
    if not isinstance(methods, (list, tuple)) or not methods:
        raise ConfigError("methods", "expected a nonempty list of method names")
    for name in methods:
        if name not in METHOD_NAMES:
            raise ConfigError(
                "methods", f"unknown method {name!r}; known: {', '.join(METHOD_NAMES)}"
            )

    alpha = _expect_real(cfg["alpha"], "alpha", strict_min=0.0, strict_max=1.0)
    confidence_x = _expect_real(cfg["confidence_x"], "confidence_x", strict_min=0.0)

    penalties = cfg["penalties"]
    if penalties is not None:
        penalties = _parse_penalties(penalties, "penalties", alpha)

    grid = cfg["grid"]
    if grid is not None:
        if not isinstance(grid, (list, tuple)) or not grid:
            raise ConfigError("grid", "expected a nonempty list of penalty objects")
        grid = tuple(
            _parse_penalties(cell, f"grid[{i}]", alpha) for i, cell in enumerate(grid)
        )

    policy = cfg["tuning_policy"]
    if policy is None:
        policy = "fixed" if penalties is not None else "theorem3"
    if policy not in _POLICIES:
        raise ConfigError(
            "tuning_policy", f"must be one of {', '.join(_POLICIES)}, got {policy!r}"
        )
    if policy == "fixed" and penalties is None:
        raise ConfigError("penalties", "tuning_policy 'fixed' needs explicit penalties")
    if policy == "cv" and grid is None:
        raise ConfigError("grid", "tuning_policy 'cv' needs a penalty grid")

    cv_folds = _expect_int(cfg["cv_folds"], "cv_folds", minimum=2)
    max_iter = _expect_int(cfg["max_iter"], "max_iter", minimum=1)
    tol = _expect_real(cfg["tol"], "tol", strict_min=0.0)
    theta_scale = _expect_real(cfg["theta_scale"], "theta_scale", strict_min=0.0)
    if not isinstance(cfg["enforce_nonneg"], bool):
        raise ConfigError("enforce_nonneg", f"expected a boolean, got {cfg['enforce_nonneg']!r}")
    runs = _expect_int(cfg["runs"], "runs", minimum=1)
    seed = _expect_int(cfg["seed"], "seed")
    binarize_threshold = _expect_real(cfg["binarize_threshold"], "binarize_threshold")
    trials = _expect_int(cfg["trials"], "trials", minimum=1)

    def _int_axis(key, minimum):
        values = cfg[key]
        if values is None:
            return None
        if not isinstance(values, (list, tuple)) or not values:
            raise ConfigError(key, "expected a nonempty list of integers")
        return tuple(
            _expect_int(v, f"{key}[{i}]", minimum=minimum) for i, v in enumerate(values)
        )

    sweep_T = _int_axis("sweep_T", 1)
    sweep_ranks = _int_axis("sweep_ranks", 1)
    if sweep_ranks is not None and max(sweep_ranks) > n:
        raise ConfigError("sweep_ranks", f"ranks must be <= n = {n}")

    output_dir = cfg["output_dir"]
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("output_dir", f"expected a string, got {output_dir!r}")

    return ExperimentSpec(
        n=n,
        r=r,
        T=T,
        sigma=sigma,
        density=density,
        noise_threshold=noise_threshold,
        factor_mode=factor_mode,
        w0_spectral_norm=w0_norm,
        feature_rank=feature_rank,
        methods=tuple(methods),
        tuning_policy=policy,
        alpha=alpha,
        confidence_x=confidence_x,
        penalties=penalties,
        grid=grid,
        cv_folds=cv_folds,
        max_iter=max_iter,
        tol=tol,
        theta_scale=theta_scale,
        enforce_nonneg=cfg["enforce_nonneg"],
        runs=runs,
        seed=seed,
        binarize_threshold=binarize_threshold,
        sweep_T=sweep_T,
        sweep_ranks=sweep_ranks,
        trials=trials,
        output_dir=output_dir,
        raw=dict(cfg),
    )


def parse_experiment_config(path, overrides=()):
    """Parse a JSON config file, apply dotted-key overrides, validate."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    if overrides:
        raw = apply_overrides(raw, overrides)
    return parse_experiment_dict(raw)


def apply_overrides(raw, overrides):
    """Apply ``key=value`` / ``outer.inner=value`` pairs to a config dict.

    Values are parsed as JSON when possible and kept as strings
    otherwise. Unknown keys are caught later by validation.
    """
    out = json.loads(json.dumps(raw))  # deep copy of plain JSON data
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(key or "<override>", f"override must look like key=value, got {item!r}")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        parts = key.split(".")
        target = out
        for part in parts[:-1]:
            node = target.get(part)
            if node is None:
                node = {}
                target[part] = node
            elif not isinstance(node, dict):
                raise ConfigError(key, f"cannot descend into non-object {part!r}")
            target = node
        target[parts[-1]] = parsed
    return out
