#!/usr/bin/env python3
"""Measure per-epoch training wall time as a function of channel count,
with the architecture held fixed (hidden 128, dense 128, window 50).

The recurrent and dense layers cost the same regardless of channel count,
so the measured ratio between a wide and a narrow input flattens well
below the raw channel ratio; this script prints the actual curve for the
current host.

Usage: python3 scripts/timing_comparison.py [--channels 10 100 500 2000]
"""

import argparse
import time

import numpy as np

from sparsesense.forecast import TimeSeries, TrainConfig, train


def epoch_time(channels: int, epochs: int = 2) -> float:
    rng = np.random.default_rng(channels)
    values = rng.standard_normal((160, channels))
    ts = TimeSeries(0.5 * np.arange(160), values)
    cfg = TrainConfig(window=50, epochs=epochs, hidden_dim=128, dense_dim=128,
                      dropout=0.0, learning_rate=1e-4, seed=0)
    t0 = time.perf_counter()
    train(ts, cfg)
    return (time.perf_counter() - t0) / epochs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--channels", type=int, nargs="+",
                        default=[10, 100, 500, 2000])
    args = parser.parse_args()

    base = None
    print(f"{'channels':>8} {'s/epoch':>10} {'ratio':>7}")
    for channels in args.channels:
        seconds = epoch_time(channels)
        if base is None:
            base = seconds
        print(f"{channels:>8} {seconds:>10.3f} {seconds / base:>6.1f}x")


if __name__ == "__main__":
    main()
