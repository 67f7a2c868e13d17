"""Batch workflow: synth -> clean -> compress -> train -> predict -> evaluate.

Each stage reads only its declared inputs from the output directory,
writes its artifacts atomically, and drops a JSON report with wall-clock
timings, stage metrics, and a sha256 manifest of the artifacts it wrote.
Reports carry timings and are therefore excluded from the manifests, which
must be byte-identical across reruns with the same config and seed.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import decompose, forecast, matio, osp, synth
from .errors import ValidationError
from .rng import Xoshiro256pp

TRUTH_FILE = "truth.rbdm"
PERTURBED_FILE = "perturbed.rbdm"
MASK_FILE = "mask.rbdm"
TIMESTAMPS_FILE = "timestamps.csv"
CLEAN_L_FILE = "clean_L.rbdm"
CLEAN_S_FILE = "clean_S.rbdm"
RESIDUALS_FILE = "rpca_residuals.csv"
BASIS_FILE = "basis.ospb"
MEASUREMENTS_FILE = "measurements.rbdm"
MODEL_FILE = "model.lstm"
HISTORY_FILE = "train_history.csv"
PRED_SPARSE_FILE = "pred_sparse.rbdm"
PRED_FULL_FILE = "pred_full.rbdm"
RMSE_FILE = "rmse_per_step.csv"
TIMINGS_FILE = "timings.csv"

_STAGES = ("synth", "clean", "compress", "train", "predict", "evaluate")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_report(out: Path, stage: str, elapsed_ms: float,
                  metrics: dict, artifacts: list[str]) -> dict:
    report = {
        "stage": stage,
        "elapsed_ms": elapsed_ms,
        "metrics": metrics,
        "manifest": {name: _sha256(out / name) for name in sorted(artifacts)},
    }
    with matio.atomic_write(out / f"report_{stage}.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return report


def _write_csv(path: Path, header: str, rows) -> None:
    with matio.atomic_write(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.17g}" if isinstance(x, float) else str(x)
                              for x in row))
            fh.write("\n")


def _sample_times(cfg: dict[str, str], n: int, seed: int) -> np.ndarray:
    """Timestamps with average spacing synth.dt; synth.time_jitter in
    [0, 1) perturbs each gap uniformly for irregular sampling."""
    dt = cfgmod._get(cfg, "synth.dt", float, 0.5)
    jitter = cfgmod._get(cfg, "synth.time_jitter", float, 0.0)
    if not 0.0 <= jitter < 1.0:
        raise ValidationError("synth.time_jitter must lie in [0, 1)")
    gaps = np.full(n - 1, dt) if n > 1 else np.empty(0)
    if jitter > 0.0 and n > 1:
        rng = Xoshiro256pp(seed ^ 0x74696D65)
        gaps = gaps * (1.0 + jitter * (2.0 * np.array(
            [rng.random() for _ in range(n - 1)]) - 1.0))
    return np.concatenate([[0.0], np.cumsum(gaps)])


def cmd_synth(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict:
    t0 = time.perf_counter()
    gt_spec = cfgmod.ground_truth_spec(cfg, seed)
    sc_spec = cfgmod.scenario_spec(cfg, seed)
    truth = synth.generate_ground_truth(gt_spec)
    perturbed, mask = synth.apply_scenario(truth, sc_spec)
    times = _sample_times(cfg, truth.shape[1], gt_spec.seed)
    matio.write_matrix(truth, out / TRUTH_FILE)
    matio.write_matrix(perturbed, out / PERTURBED_FILE)
    matio.write_matrix(mask.astype(np.float64), out / MASK_FILE)
    matio.write_matrix_csv(times[:, None], out / TIMESTAMPS_FILE)
    metrics = {"m": gt_spec.m, "n": gt_spec.n, "rank": gt_spec.rank,
               "scenario": int(sc_spec.scenario), "masked": int(mask.sum())}
    if sc_spec.scenario is synth.Scenario.SUPERPOSITION:
        # the composed mask is the union of the per-component masks; the
        # components reuse the same substreams, so they can be re-derived
        component_masked = {}
        for component in (synth.Scenario.NOISE, synth.Scenario.OUTLIERS,
                          synth.Scenario.CORRUPTIONS):
            _, cmask = synth.apply_scenario(
                truth, replace(sc_spec, scenario=component))
            component_masked[component.name.lower()] = int(cmask.sum())
        metrics["component_masked"] = component_masked
    return _write_report(out, "synth", (time.perf_counter() - t0) * 1e3, metrics,
                         [TRUTH_FILE, PERTURBED_FILE, MASK_FILE, TIMESTAMPS_FILE])


def cmd_clean(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict:
    t0 = time.perf_counter()
    X = matio.read_matrix(out / PERTURBED_FILE)
    result = decompose.rpca(X, cfgmod.rpca_config(cfg))
    matio.write_matrix(result.L, out / CLEAN_L_FILE)
    matio.write_matrix(result.S, out / CLEAN_S_FILE)
    _write_csv(out / RESIDUALS_FILE, "iteration,residual",
               [(i + 1, r) for i, r in enumerate(result.residual_history)])
    metrics = {"iterations": result.iterations,
               "converged": result.converged,
               "final_residual": result.residual_history[-1]}
    return _write_report(out, "clean", (time.perf_counter() - t0) * 1e3, metrics,
                         [CLEAN_L_FILE, CLEAN_S_FILE, RESIDUALS_FILE])


def cmd_compress(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict:
    t0 = time.perf_counter()
    L = matio.read_matrix(out / CLEAN_L_FILE)
    r = cfgmod._get(cfg, "osp.r", int, 10)
    s = cfgmod._get(cfg, "osp.s", int, r)
    basis = osp.fit_basis(L, r, s)
    series = osp.compress(L, basis)
    osp.save_basis(basis, out / BASIS_FILE)
    matio.write_matrix(series.Y, out / MEASUREMENTS_FILE)
    metrics = {"r": r, "s": s,
               "sensor_indices": [int(i) for i in basis.sensor_indices],
               "compression_ratio": osp.compression_ratio(basis.m, s)}
    return _write_report(out, "compress", (time.perf_counter() - t0) * 1e3,
                         metrics, [BASIS_FILE, MEASUREMENTS_FILE])


def _training_series(cfg: dict[str, str], out: Path,
                     train_cfg: forecast.TrainConfig) -> forecast.TimeSeries:
    """Measurement series restricted to the training span, interpolated to
    a uniform grid when train.interpolate is set."""
    Y = matio.read_matrix(out / MEASUREMENTS_FILE)
    values = Y.T
    times_path = out / TIMESTAMPS_FILE
    if times_path.exists():
        times = matio.read_matrix_csv(times_path)[:, 0]
    else:
        times = 0.5 * np.arange(values.shape[0])
    holdout = cfgmod._get(cfg, "train.holdout", int, train_cfg.horizon)
    if holdout >= values.shape[0]:
        raise ValidationError("train.holdout leaves no training samples")
    cut = values.shape[0] - holdout
    ts = forecast.TimeSeries(timestamps=times[:cut], values=values[:cut])
    if cfgmod._get(cfg, "train.interpolate", cfgmod._bool, False):
        dt = cfgmod._get(cfg, "train.dt", float, 0.5)
        ts = forecast.interpolate_uniform(ts, dt)
    return ts


def cmd_train(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict:
    t0 = time.perf_counter()
    train_cfg = cfgmod.train_config(cfg, seed)
    ts = _training_series(cfg, out, train_cfg)
    model, history = forecast.train(ts, train_cfg)
    forecast.save_model(model, out / MODEL_FILE)
    _write_csv(out / HISTORY_FILE, "epoch,train_rmse",
               [(i + 1, r) for i, r in enumerate(history)])
    metrics = {"epochs": train_cfg.epochs, "final_train_rmse": history[-1],
               "samples": len(ts)}
    return _write_report(out, "train", (time.perf_counter() - t0) * 1e3, metrics,
                         [MODEL_FILE, HISTORY_FILE])


def cmd_predict(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict:
    t0 = time.perf_counter()
    train_cfg = cfgmod.train_config(cfg, seed)
    model = forecast.load_model(out / MODEL_FILE)
    basis = osp.load_basis(out / BASIS_FILE)
    ts = _training_series(cfg, out, train_cfg)
    if len(ts) < train_cfg.window:
        raise ValidationError("training span shorter than one window")
    seed_window = ts.values[-train_cfg.window:]
    preds = forecast.predict_multistep(model, seed_window, train_cfg.horizon)
    pred_sparse = preds.T                       # (s, horizon)
    pred_full = osp.reconstruct(pred_sparse, basis)
    matio.write_matrix(pred_sparse, out / PRED_SPARSE_FILE)
    matio.write_matrix(pred_full, out / PRED_FULL_FILE)
    metrics = {"horizon": train_cfg.horizon}
    return _write_report(out, "predict", (time.perf_counter() - t0) * 1e3,
                         metrics, [PRED_SPARSE_FILE, PRED_FULL_FILE])


def cmd_evaluate(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict:
    t0 = time.perf_counter()
    train_cfg = cfgmod.train_config(cfg, seed)
    pred_full = matio.read_matrix(out / PRED_FULL_FILE)
    truth_path = Path(cfg.get("evaluate.truth", out / TRUTH_FILE))
    truth = matio.read_matrix(truth_path)
    holdout = cfgmod._get(cfg, "train.holdout", int, train_cfg.horizon)
    start = truth.shape[1] - holdout
    horizon = min(pred_full.shape[1], truth.shape[1] - start)
    if pred_full.shape[0] != truth.shape[0]:
        raise ValidationError("prediction and truth have different spatial dimension")
    per_step = [forecast.rmse(pred_full[:, k], truth[:, start + k])
                for k in range(horizon)]
    _write_csv(out / RMSE_FILE, "step,rmse",
               [(k + 1, v) for k, v in enumerate(per_step)])
    artifacts = [RMSE_FILE]

    timing_rows = []
    for stage in _STAGES[:-1]:
        report_path = out / f"report_{stage}.json"
        if report_path.exists():
            with open(report_path) as fh:
                timing_rows.append((stage, float(json.load(fh)["elapsed_ms"])))
    _write_csv(out / TIMINGS_FILE, "stage,elapsed_ms", timing_rows)

    metrics: dict = {"mean_rmse": float(np.mean(per_step)),
                     "final_rmse": per_step[-1]}
    baseline_path = cfg.get("evaluate.baseline")
    if baseline_path:
        base = matio.read_matrix_csv(baseline_path)  # reuse header format
        k = min(len(per_step), base.shape[0])
        metrics["fraction_not_worse"] = float(
            np.mean(np.asarray(per_step[:k]) <= base[:k, 1]))

    if cfgmod._get(cfg, "evaluate.pgm", cfgmod._bool, False):
        height = cfgmod._get(cfg, "evaluate.frame_height", int, pred_full.shape[0])
        width = cfgmod._get(cfg, "evaluate.frame_width", int, 1)
        if height * width != pred_full.shape[0]:
            raise ValidationError("frame_height * frame_width must equal m")
        frames_dir = out / "frames"
        frames_dir.mkdir(exist_ok=True)
        for k in (0, horizon - 1):
            matio.write_pgm(truth[:, start + k].reshape(height, width),
                            frames_dir / f"truth_{k:04d}.pgm")
            matio.write_pgm(pred_full[:, k].reshape(height, width),
                            frames_dir / f"pred_{k:04d}.pgm")
            artifacts += [f"frames/truth_{k:04d}.pgm", f"frames/pred_{k:04d}.pgm"]
    # timings.csv is run-dependent metadata, not part of the manifest
    return _write_report(out, "evaluate", (time.perf_counter() - t0) * 1e3,
                         metrics, artifacts)


STAGE_FUNCS = {
    "synth": cmd_synth,
    "clean": cmd_clean,
    "compress": cmd_compress,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
}


def run_all(cfg: dict[str, str], out: Path, seed: int | None = None) -> dict[str, dict]:
    """Run every stage in order; returns the per-stage reports."""
    out.mkdir(parents=True, exist_ok=True)
    return {stage: STAGE_FUNCS[stage](cfg, out, seed) for stage in _STAGES}


def combined_manifest(reports: dict[str, dict]) -> dict[str, str]:
    merged: dict[str, str] = {}
    for report in reports.values():
        merged.update(report["manifest"])
    return merged
