"""Monte-Carlo sweeps over SNR or pilot budget, metrics, and result files.

Per-trial channels are seeded independently of the protocol so every protocol
sees the same channel set at a sweep point; the measurement noise stream is
seeded per (protocol, sweep point, trial). Codebooks are designed once per
configuration and reused across trials.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .arrays import ArrayGeometry, make_angle_grid
from .blockcode import build_plain_code, build_reduced_code
from .channel import SnrSpec, normalize_channel, sample_channel
from .codebook import GsConfig, beam_pattern_matrix, build_codebooks, ideal_codebook
from .seeding import derive_rng
from .training import (
    HierarchicalBeamProvider,
    ProtocolSpec,
    achievable_rate,
    ceil_log2,
    grid_transmit_pair,
    narrow_beam_matrices,
    run_coded,
    run_exhaustive,
    run_hierarchical,
)

CSV_COLUMNS = (
    "protocol", "sweep_variable", "sweep_value", "trials", "pilots",
    "success_rate", "success_ci95", "mean_rate", "rate_ci95",
)


@dataclass(frozen=True)
class ExperimentConfig:
    n_bs: int = 16
    n_ris_rows: int = 8
    n_ris_cols: int = 8
    spacing_over_wavelength: float = 0.5
    carrier_ghz: float = 28.0  # provenance only; enters through the spacing
    snr_grid_db: tuple = (0.0,)
    pilot_grid: tuple = ()
    trials: int = 2000
    protocols: tuple = (
        ProtocolSpec("exhaustive"),
        ProtocolSpec("hierarchical"),
        ProtocolSpec("coded", "one_bit"),
        ProtocolSpec("coded", "decoupled_two_bit"),
    )
    gs: GsConfig = field(default_factory=GsConfig)
    sampling_mode: str = "on_grid"
    master_seed: int = 0
    eval_snr_linear: float = 10.0
    ideal_beams: bool = False
    noiseless: bool = False
    sweep_over: str = "snr"  # "snr" | "pilots"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.sweep_over not in ("snr", "pilots"):
            raise ValueError("sweep_over must be 'snr' or 'pilots'")
        if self.sweep_over == "snr" and not self.snr_grid_db:
            raise ValueError("snr_grid_db must be nonempty")
        if self.sweep_over == "pilots" and not self.pilot_grid:
            raise ValueError("pilot_grid must be nonempty")
        if not self.protocols:
            raise ValueError("at least one protocol is required")

    @property
    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.n_bs, self.n_ris_rows, self.n_ris_cols,
                             self.spacing_over_wavelength)


@dataclass(frozen=True)
class ResultRow:
    protocol: str
    sweep_variable: str
    sweep_value: float
    trials: int
    pilots: int
    success_rate: float
    success_ci95: float
    mean_rate: float
    rate_ci95: float


@dataclass(frozen=True)
class TrialRecord:
    protocol: str
    sweep_value: float
    trial: int
    success: bool
    rate: float


@dataclass(frozen=True)
class ResultSet:
    rows: tuple[ResultRow, ...]
    trial_log: tuple[TrialRecord, ...] = ()


def success_rate(outcomes, ground_truths) -> float:
    """Fraction of trials whose estimated (bs, ris) tuple matches the truth."""
    outcomes = list(outcomes)
    ground_truths = list(ground_truths)
    if len(outcomes) != len(ground_truths):
        raise ValueError("outcomes and ground truths differ in length")
    if not outcomes:
        raise ValueError("empty input")
    hits = sum(
        (o.est_bs_index, o.est_ris_index) == tuple(t)
        for o, t in zip(outcomes, ground_truths)
    )
    return hits / len(outcomes)


def _build_coded_assets(cfg: ExperimentConfig, grid):
    """Codes for both sides, plus designed or ideal codebooks."""
    geometry = cfg.geometry
    code_t = build_plain_code(ceil_log2(geometry.n_bs))
    code_r = build_reduced_code(ceil_log2(geometry.n_ris_rows),
                                ceil_log2(geometry.n_ris_cols))
    if cfg.ideal_beams:
        books = (
            ideal_codebook(beam_pattern_matrix(code_t, geometry.n_bs, side="bs")),
            ideal_codebook(beam_pattern_matrix(code_r, geometry.n_ris, side="ris")),
        )
    else:
        books = build_codebooks(code_t, code_r, grid, geometry, cfg.gs)
    return (code_t, code_r), books


def run_sweep(cfg: ExperimentConfig, log_trials: bool = False) -> ResultSet:
    """Run every protocol over the sweep grid and aggregate the metrics.

    Infeasible configurations (for example a RIS dimension too small for the
    dimension-split code) surface before any trial runs.
    """
    geometry = cfg.geometry
    grid = make_angle_grid(geometry)
    narrow = narrow_beam_matrices(grid, geometry)
    eval_snr = SnrSpec(cfg.eval_snr_linear, noiseless=True)

    needs_coded = any(p.kind == "coded" for p in cfg.protocols)
    codes, books = _build_coded_assets(cfg, grid) if needs_coded else (None, None)
    provider = None
    if any(p.kind == "hierarchical" for p in cfg.protocols):
        provider = HierarchicalBeamProvider(geometry, grid, cfg.gs, ideal=cfg.ideal_beams)

    sweep_values = cfg.snr_grid_db if cfg.sweep_over == "snr" else cfg.pilot_grid
    sweep_name = "snr_db" if cfg.sweep_over == "snr" else "pilots"

    rows = []
    log: list[TrialRecord] = []
    for value in sweep_values:
        for proto in cfg.protocols:
            if cfg.sweep_over == "snr":
                snr = SnrSpec(10.0 ** (float(value) / 10.0), noiseless=cfg.noiseless)
                budget = proto.pilot_budget
            else:
                snr = SnrSpec(10.0 ** (float(cfg.snr_grid_db[0]) / 10.0),
                              noiseless=cfg.noiseless)
                budget = int(value)
            successes = 0
            rates = np.empty(cfg.trials)
            pilots_used = 0
            for trial in range(cfg.trials):
                ch_rng = derive_rng(cfg.master_seed, "channel", sweep_name,
                                    float(value), trial)
                ch = normalize_channel(
                    sample_channel(geometry, grid, ch_rng, cfg.sampling_mode))
                noise_rng = derive_rng(cfg.master_seed, proto.tag, sweep_name,
                                       float(value), trial)
                if proto.kind == "coded":
                    outcome = run_coded(ch, books, codes, snr, budget, noise_rng,
                                        proto.decode_mode, ideal=cfg.ideal_beams)
                elif proto.kind == "hierarchical":
                    outcome = run_hierarchical(ch, provider, snr, budget, noise_rng,
                                               variant=proto.hierarchical_variant)
                else:
                    outcome = run_exhaustive(ch, grid, geometry, snr, budget,
                                             noise_rng, narrow_beams=narrow)
                hit = (outcome.est_bs_index, outcome.est_ris_index) == (
                    ch.bs_index, ch.ue_ris_index)
                successes += hit
                v_tx, w_tx = grid_transmit_pair(ch, grid, geometry,
                                                outcome.est_bs_index,
                                                outcome.est_ris_index)
                rates[trial] = achievable_rate(ch, v_tx, w_tx, eval_snr)
                pilots_used = outcome.pilots_used
                if log_trials:
                    log.append(TrialRecord(proto.tag, float(value), trial,
                                           bool(hit), float(rates[trial])))
            p_hat = successes / cfg.trials
            success_ci = 1.96 * np.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
            rate_ci = (1.96 * rates.std(ddof=1) / np.sqrt(cfg.trials)
                       if cfg.trials > 1 else 0.0)
            rows.append(ResultRow(
                protocol=proto.tag,
                sweep_variable=sweep_name,
                sweep_value=float(value),
                trials=cfg.trials,
                pilots=int(pilots_used),
                success_rate=float(p_hat),
                success_ci95=float(success_ci),
                mean_rate=float(rates.mean()),
                rate_ci95=float(rate_ci),
            ))
    return ResultSet(rows=tuple(rows), trial_log=tuple(log))


def export_results(results: ResultSet, path, fmt: str = "csv") -> None:
    """Write the aggregated rows; CSV floats carry 10 significant digits."""
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in results.rows:
                writer.writerow([
                    row.protocol, row.sweep_variable,
                    _fmt(row.sweep_value), row.trials, row.pilots,
                    _fmt(row.success_rate), _fmt(row.success_ci95),
                    _fmt(row.mean_rate), _fmt(row.rate_ci95),
                ])
    elif fmt == "json":
        payload = {
            "schema": list(CSV_COLUMNS),
            "rows": [asdict(row) for row in results.rows],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def import_results(path) -> ResultSet:
    """Read back a JSON result file written by export_results."""
    payload = json.loads(Path(path).read_text())
    rows = tuple(ResultRow(**row) for row in payload["rows"])
    return ResultSet(rows=rows)


def export_trial_log(results: ResultSet, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("protocol", "sweep_value", "trial", "success", "rate"))
        for rec in results.trial_log:
            writer.writerow([rec.protocol, _fmt(rec.sweep_value), rec.trial,
                             int(rec.success), _fmt(rec.rate)])


# -- presets ---------------------------------------------------------------

def desk_snr_sweep(**overrides) -> ExperimentConfig:
    """CI-speed sweep: 16-antenna BS, 8x8 RIS, SNR from -10 to 20 dB."""
    base = ExperimentConfig(
        snr_grid_db=(-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0),
        sweep_over="snr",
    )
    return replace(base, **overrides)


def desk_pilot_sweep(**overrides) -> ExperimentConfig:
    base = ExperimentConfig(
        snr_grid_db=(10.0,),
        pilot_grid=tuple(range(4, 101, 8)),
        sweep_over="pilots",
    )
    return replace(base, **overrides)


def full_snr_sweep(**overrides) -> ExperimentConfig:
    """Full-scale sweep: 64-antenna BS, 16x16 RIS (minutes, not CI time)."""
    base = ExperimentConfig(
        n_bs=64, n_ris_rows=16, n_ris_cols=16,
        snr_grid_db=(-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0),
        trials=500,
        sweep_over="snr",
    )
    return replace(base, **overrides)


def full_pilot_sweep(**overrides) -> ExperimentConfig:
    base = ExperimentConfig(
        n_bs=64, n_ris_rows=16, n_ris_cols=16,
        snr_grid_db=(10.0,),
        pilot_grid=(4, 20, 32, 56, 100, 1000, 4000, 8000, 16384, 20000),
        trials=200,
        sweep_over="pilots",
    )
    return replace(base, **overrides)


PRESETS = {
    "desk": {"snr": desk_snr_sweep, "pilots": desk_pilot_sweep},
    "full": {"snr": full_snr_sweep, "pilots": full_pilot_sweep},
}


def config_to_dict(cfg: ExperimentConfig) -> dict:
    data = asdict(cfg)
    data["protocols"] = [asdict(p) for p in cfg.protocols]
    data["gs"] = asdict(cfg.gs)
    return data


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    if "protocols" in data:
        data["protocols"] = tuple(ProtocolSpec(**p) for p in data["protocols"])
    if "gs" in data:
        data["gs"] = GsConfig(**data["gs"])
    for key in ("snr_grid_db", "pilot_grid"):
        if key in data:
            data[key] = tuple(data[key])
    return ExperimentConfig(**data)


def load_config(path) -> ExperimentConfig:
    return config_from_dict(json.loads(Path(path).read_text()))
