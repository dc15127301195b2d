"""Desk-scale reproductions of the comparative experiments, emitting CSV tables.

Four experiment families:

* DP insufficiency: single-bit vs correlation-aware attackers on symmetric
  chains sanitized at the DP-calibrated flip rate, with the implied
  ("charged") budget per attacker.
* Noise-privacy comparison: the exact bisected flip rate vs the closed-form
  approximation vs the piecewise-linear reduction of Zhao et al.
* Reconstruction vs bound: whole-series Viterbi reconstruction accuracy
  against the BDP success ceiling, with an optional externally produced
  LSTM-accuracy column merged in.
* Feasible noise regions for a fixed chain and budget.

Every run is reproducible bit-for-bit from (config, seed): replicate streams
are derived with ``numpy.random.SeedSequence(seed).spawn`` in grid order, so
results do not depend on how work is scheduled.  CSV output is UTF-8 with a
header row and '.' decimals; NaN cells are written empty.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np
from scipy.special import logit

from .chain import BinaryMarkovChain, _sample_two_state, as_bits, estimate, sample, write_bits
from .hmm import posterior_batch, viterbi
from .mechanisms import NoiseParams
from .privacy import (
    calibrate_asymmetric,
    calibrate_symmetric_exact,
    dp_noise,
    log_lr_bound_grid,
    rho_sufficient_symmetric,
    success_bound_bdp,
    zhao_eps6_noise,
)

DEFAULT_FIG2_THETAS = (0.0, 0.09, 0.185, 0.285, 0.385, 0.475)
DEFAULT_EPS_GRID = tuple(1.0 + 0.25 * k for k in range(13))

SUCCESS_COLUMNS = ("theta", "suc_DP", "suc_BDP")
CHARGED_COLUMNS = ("theta", "eps_DP", "eps_BDP")
NOISE_COMPARISON_COLUMNS = ("eps", "rho_zhao", "rho_closed_form", "rho_exact")
RECONSTRUCTION_COLUMNS = ("eps", "viterbi_accuracy", "lstm_accuracy", "bdp_bound")
REGION_COLUMNS = ("rho0", "rho1", "feasible")

# theta = 0 rows sample a frozen chain (fair initial bit, no transitions); the
# correlation-aware attacker then runs inference with theta clamped here.
_THETA_INFERENCE_FLOOR = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment knobs; each runner reads the fields it needs.

    ``databases`` counts independent data samples and ``sanitizations`` the
    mechanism runs per sample, so a Monte-Carlo point uses
    databases * sanitizations trials.
    """

    n: int = 30
    thetas: tuple[float, ...] = DEFAULT_FIG2_THETAS
    chain: BinaryMarkovChain | None = None
    eps: float = 0.5
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    databases: int = 100
    sanitizations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not self.thetas or not self.eps_grid:
            raise ValueError("theta and eps grids must be nonempty")
        if self.databases < 1 or self.sanitizations < 1:
            raise ValueError("replicate counts must be >= 1")
        if self.eps <= 0 or any(e <= 0 for e in self.eps_grid):
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class ResultTable:
    """A rectangular named-column table of real values."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if any(len(row) != len(self.columns) for row in self.rows):
            raise ValueError("rows must all match the column count")

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])

    def write_csv(self, path) -> None:
        """Write atomically (temp file + rename); NaN cells become empty."""
        path = os.fspath(path)
        directory = os.path.dirname(path) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(self.columns)
                for row in self.rows:
                    writer.writerow("" if math.isnan(v) else repr(float(v)) for v in row)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def read_csv(cls, path) -> "ResultTable":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            rows = tuple(
                tuple(math.nan if cell == "" else float(cell) for cell in row)
                for row in reader
            )
        return cls(columns=header, rows=rows)


def charged_epsilon(p_s: float) -> float:
    """The budget an observed success rate implies: ln(p / (1 - p))."""
    if not 0.0 < p_s < 1.0:
        raise ValueError(f"success probability must lie in (0, 1), got {p_s}")
    return float(logit(p_s))


def _sample_database(theta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    if theta == 0.0:
        # frozen chain: fair initial bit (the symmetric stationary limit), no moves
        bit = 1 if rng.random() < 0.5 else 0
        return np.full(n, bit, dtype=np.uint8)
    return _sample_two_state(0.5, theta, theta, n, rng)


def run_dp_insufficiency(config: ExperimentConfig) -> tuple[ResultTable, ResultTable]:
    """Single-bit vs correlation-aware attack success at DP-calibrated noise.

    For each theta: sample ``databases`` chains, sanitize each
    ``sanitizations`` times at rho = 1/(e^eps + 1), attack the middle bit,
    and report success rates plus the charged budgets.
    """
    rho = dp_noise(config.eps)
    noise = NoiseParams(rho, rho)
    n = config.n
    i = n // 2  # 1-based middle index
    theta_streams = np.random.SeedSequence(config.seed).spawn(len(config.thetas))
    suc_rows, eps_rows = [], []
    for theta, stream in zip(config.thetas, theta_streams):
        inference_chain = BinaryMarkovChain(max(theta, _THETA_INFERENCE_FLOOR),
                                            max(theta, _THETA_INFERENCE_FLOOR))
        sb_hits = ca_hits = trials = 0
        z_blocks, truth = [], []
        for db_stream in stream.spawn(config.databases):
            rng = np.random.Generator(np.random.Philox(db_stream))
            x = _sample_database(theta, n, rng)
            flips = rng.random((config.sanitizations, n)) < rho
            z_blocks.append(x[None, :] ^ flips)
            truth.append(np.full(config.sanitizations, x[i - 1]))
        z_all = np.concatenate(z_blocks)
        truth = np.concatenate(truth)
        sb_guess = z_all[:, i - 1]
        post = posterior_batch(inference_chain, noise, z_all, i)
        ca_guess = (post[:, 1] > post[:, 0]).astype(np.uint8)
        trials = truth.size
        sb_hits = int(np.sum(sb_guess == truth))
        ca_hits = int(np.sum(ca_guess == truth))
        p_sb, p_ca = sb_hits / trials, ca_hits / trials
        suc_rows.append((theta, p_sb, p_ca))
        eps_rows.append((theta, charged_epsilon(p_sb), charged_epsilon(p_ca)))
    return (
        ResultTable(SUCCESS_COLUMNS, tuple(suc_rows)),
        ResultTable(CHARGED_COLUMNS, tuple(eps_rows)),
    )


def run_noise_privacy_comparison(config: ExperimentConfig) -> ResultTable:
    """Per-budget flip rates of the three calibration routes (symmetric chain).

    Columns: the Zhao et al. piecewise-linear reduction, the closed-form
    approximation, and the exact bisected rate.  Budgets the reduction cannot
    serve are flagged with an empty cell, never dropped.
    """
    if len(config.thetas) != 1:
        raise ValueError("noise-privacy comparison runs on a single symmetric theta")
    theta = config.thetas[0]
    rows = []
    for eps in config.eps_grid:
        rows.append((
            eps,
            zhao_eps6_noise(theta, eps, config.n),
            rho_sufficient_symmetric(theta, eps),
            calibrate_symmetric_exact(theta, eps),
        ))
    return ResultTable(NOISE_COMPARISON_COLUMNS, tuple(rows))


def _viterbi_accuracy(chain: BinaryMarkovChain, noise: NoiseParams,
                      x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    flips = rng.random(x.size) < np.where(x == 0, noise.rho0, noise.rho1)
    z = (x ^ flips).astype(np.uint8)
    return (viterbi(chain, noise, z) == x), z


def run_reconstruction_vs_bound(config: ExperimentConfig, bits=None,
                                lstm_csv=None, emit_dir=None) -> ResultTable:
    """Viterbi reconstruction accuracy vs the BDP success ceiling, per budget.

    With ``bits`` the series is taken as given (already binarized) and the
    chain is estimated from it; otherwise a synthetic series of length
    ``config.n`` is sampled from ``config.chain``.  Noise is calibrated per
    budget with the expected-noise-minimal asymmetric rates.  ``lstm_csv``
    merges an eps,lstm_accuracy file from the neural attacker; missing
    budgets stay empty.  ``emit_dir`` dumps the truth and each sanitized
    series in the one-line bit format for external consumers.
    """
    root = np.random.SeedSequence(config.seed)
    data_stream, noise_root = root.spawn(2)
    if bits is not None:
        x = as_bits(bits)
        chain = estimate(x).chain
    else:
        if config.chain is None:
            raise ValueError("need either bits or config.chain")
        chain = config.chain
        seed = int(data_stream.generate_state(1, np.uint64)[0])
        x = sample(chain, config.n, seed)
    lstm = _read_lstm_column(lstm_csv) if lstm_csv is not None else {}
    if emit_dir is not None:
        os.makedirs(emit_dir, exist_ok=True)
        write_bits(os.path.join(emit_dir, "truth.bits"), x)
    rows = []
    eps_streams = noise_root.spawn(len(config.eps_grid))
    for eps, stream in zip(config.eps_grid, eps_streams):
        noise = calibrate_asymmetric(chain, eps)
        hits = []
        z_last = None
        for rep_stream in stream.spawn(config.sanitizations):
            rng = np.random.Generator(np.random.Philox(rep_stream))
            ok, z_last = _viterbi_accuracy(chain, noise, x, rng)
            hits.append(ok)
        accuracy = float(np.concatenate(hits).mean())
        if emit_dir is not None:
            write_bits(os.path.join(emit_dir, f"sanitized_eps{eps:g}.bits"), z_last)
        rows.append((
            eps,
            accuracy,
            lstm.get(round(eps, 9), math.nan),
            success_bound_bdp(chain, eps),
        ))
    return ResultTable(RECONSTRUCTION_COLUMNS, tuple(rows))


def _read_lstm_column(path) -> dict[float, float]:
    table = ResultTable.read_csv(path)
    if tuple(table.columns) != ("eps", "lstm_accuracy"):
        raise ValueError(f"{path}: expected columns eps,lstm_accuracy, got {table.columns}")
    return {round(float(e), 9): float(a) for e, a in table.rows}


def feasible_region(chain: BinaryMarkovChain, eps, grid_resolution: int = 50) -> ResultTable:
    """Grid of noise rates with a 0/1 flag for both bounds staying <= e^eps.

    Cell-centered grid over (0, 0.5)^2, so boundary values never touch the
    closed endpoints.
    """
    eps = float(eps)
    if grid_resolution < 2:
        raise ValueError(f"grid_resolution must be >= 2, got {grid_resolution}")
    axis = (np.arange(grid_resolution) + 0.5) * (0.5 / grid_resolution)
    r0, r1 = np.meshgrid(axis, axis, indexing="ij")
    l0, l1 = log_lr_bound_grid(chain, r0.ravel(), r1.ravel())
    ok = (np.maximum(l0, l1) <= eps).astype(float)
    rows = tuple(zip(r0.ravel().tolist(), r1.ravel().tolist(), ok.tolist()))
    return ResultTable(REGION_COLUMNS, rows)
