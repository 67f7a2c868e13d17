"""Flat key = value configuration files with dotted section prefixes.

Example:

    # desk-scale run
    synth.m = 2000
    synth.n = 1000
    synth.scenario = 2
    rpca.lambda = 0.006
    rpca.mu = auto
    osp.r = 10
    osp.s = 10
    train.window = 50

Unknown keys are rejected up front so typos fail loudly.  Builders below
turn sections into the typed configs of the science modules.
"""

from __future__ import annotations

from .decompose import RpcaConfig
from .errors import ValidationError
from .forecast import TrainConfig
from .synth import GroundTruthSpec, Scenario, ScenarioSpec

_KNOWN_KEYS = {
    "synth.m", "synth.n", "synth.rank", "synth.seed", "synth.smoothness",
    "synth.amplitude", "synth.scenario", "synth.noise_std", "synth.n_outliers",
    "synth.outlier_lo_min", "synth.outlier_lo_max",
    "synth.outlier_hi_min", "synth.outlier_hi_max",
    "synth.corruption_fraction", "synth.corruption_min", "synth.corruption_max",
    "synth.per_frame", "synth.dt", "synth.time_jitter",
    "rpca.lambda", "rpca.mu", "rpca.max_iters", "rpca.tol", "rpca.mu_growth",
    "osp.r", "osp.s",
    "train.window", "train.horizon", "train.learning_rate", "train.epochs",
    "train.batch_size", "train.seed", "train.hidden_dim", "train.dense_dim",
    "train.dropout", "train.clip_norm", "train.val_fraction",
    "train.interpolate", "train.dt", "train.holdout",
    "evaluate.pgm", "evaluate.frame_height", "evaluate.frame_width",
    "evaluate.truth", "evaluate.baseline",
}


def parse_config(path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in stripped.split("=", 1))
            if key not in _KNOWN_KEYS:
                raise ValidationError(f"{path}:{lineno}: unknown key '{key}'")
            values[key] = value
    return values


def _get(cfg: dict[str, str], key: str, cast, default):
    if key not in cfg:
        return default
    raw = cfg[key]
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"config key '{key}': bad value '{raw}'") from exc


def _bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(raw)


def ground_truth_spec(cfg: dict[str, str], seed: int | None = None) -> GroundTruthSpec:
    return GroundTruthSpec(
        m=_get(cfg, "synth.m", int, 2000),
        n=_get(cfg, "synth.n", int, 1000),
        rank=_get(cfg, "synth.rank", int, 10),
        smoothness=_get(cfg, "synth.smoothness", float, 0.08),
        amplitude=_get(cfg, "synth.amplitude", float, 10.0),
        seed=seed if seed is not None else _get(cfg, "synth.seed", int, 0),
    )


def scenario_spec(cfg: dict[str, str], seed: int | None = None) -> ScenarioSpec:
    pos = (_get(cfg, "synth.outlier_hi_min", float, 30.0),
           _get(cfg, "synth.outlier_hi_max", float, 40.0))
    neg = (_get(cfg, "synth.outlier_lo_min", float, -40.0),
           _get(cfg, "synth.outlier_lo_max", float, -30.0))
    return ScenarioSpec(
        scenario=Scenario(_get(cfg, "synth.scenario", int, 1)),
        noise_std=_get(cfg, "synth.noise_std", float, 4.0),
        n_outliers=_get(cfg, "synth.n_outliers", int, 100),
        outlier_ranges=(pos, neg),
        corruption_fraction=_get(cfg, "synth.corruption_fraction", float, 0.10),
        corruption_interval=(_get(cfg, "synth.corruption_min", float, -15.0),
                             _get(cfg, "synth.corruption_max", float, 30.0)),
        seed=seed if seed is not None else _get(cfg, "synth.seed", int, 0),
        per_frame=_get(cfg, "synth.per_frame", _bool, True),
    )


def rpca_config(cfg: dict[str, str]) -> RpcaConfig:
    lam_raw = cfg.get("rpca.lambda", "auto")
    mu_raw = cfg.get("rpca.mu", "auto")
    lam = None if lam_raw == "auto" else float(lam_raw)
    mu = None if mu_raw == "auto" else float(mu_raw)
    return RpcaConfig(
        lam=lam,
        mu=mu,
        max_iters=_get(cfg, "rpca.max_iters", int, 500),
        tol=_get(cfg, "rpca.tol", float, 1e-7),
        mu_growth=_get(cfg, "rpca.mu_growth", float, 1.0),
    )


def train_config(cfg: dict[str, str], seed: int | None = None) -> TrainConfig:
    return TrainConfig(
        window=_get(cfg, "train.window", int, 50),
        horizon=_get(cfg, "train.horizon", int, 100),
        learning_rate=_get(cfg, "train.learning_rate", float, 1e-4),
        epochs=_get(cfg, "train.epochs", int, 100),
        batch_size=_get(cfg, "train.batch_size", int, 32),
        seed=seed if seed is not None else _get(cfg, "train.seed", int, 0),
        hidden_dim=_get(cfg, "train.hidden_dim", int, 128),
        dense_dim=_get(cfg, "train.dense_dim", int, 128),
        dropout=_get(cfg, "train.dropout", float, 0.2),
        clip_norm=_get(cfg, "train.clip_norm", float, 5.0),
        val_fraction=_get(cfg, "train.val_fraction", float, 0.2),
    )
