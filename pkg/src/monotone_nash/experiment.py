"""Experiment orchestration: configs, replications, CSV/JSON artifacts.

Config files are flat ``key = value`` lines with ``#`` comments.  Every
replication owns a private generator seeded as base_seed XOR replication
index, so runs are reproducible and independent of the worker pool
schedule: record buffers are merged by replication index at write time.

The trajectory CSV schema is fixed: one row per (replication, t, player,
dim), floats printed with 17 significant digits, newline "\\n".  The
summary CSV carries wall-clock timings, which are the one intentionally
non-reproducible column.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .games import GameDefinition, registry
from .learner import IterationRecord, PayoffBasedLearner

RUNS_HEADER = "replication,t,player,dim,mu,x,payoff,gamma,sigma,epsilon,dist_ref"
SUMMARY_HEADER = "replication,final_dist,first_hit_0p1,wall_ms"
HIT_THRESHOLD = 0.1
THREADS_ENV = "MONOTONE_NASH_THREADS"


def parse_number(text: str) -> float:
    """Parse a decimal or a p/q rational, e.g. '0.5' or '5/9'."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as err:
        raise ValueError(f"not a number: {text!r}") from err


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"true", "yes", "on", "1"}:
        return True
    if lowered in {"false", "no", "off", "0"}:
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    """Settings for a batch of independent learner replications."""

    game: str = "bilinear"
    a: float = 5.0 / 9.0
    b: float = 5.0 / 27.0
    c: float = 1.0 / 27.0
    mu0: str = "uniform"
    max_iters: int = 5000
    replications: int = 20
    base_seed: int = 0
    regularized: bool = True
    thinning: Optional[int] = None
    out: str = "out"
    format: str = "csv"
    allow_invalid_schedule: bool = False

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.format not in {"csv", "json"}:
            raise ValueError(f"format must be csv or json, got {self.format!r}")

    @property
    def exponents(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


_FIELD_PARSERS = {
    "game": str,
    "a": parse_number,
    "b": parse_number,
    "c": parse_number,
    "mu0": str,
    "max_iters": int,
    "replications": int,
    "base_seed": int,
    "regularized": _parse_bool,
    "thinning": lambda s: None if s.strip().lower() == "none" else int(s),
    "out": str,
    "format": str,
    "allow_invalid_schedule": _parse_bool,
}


def parse_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blanks ignored."""
    mapping: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def config_from_mapping(mapping: dict[str, str], base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Apply string overrides on top of a base config."""
    config = base or ExperimentConfig()
    updates = {}
    for key, raw in mapping.items():
        if key not in _FIELD_PARSERS:
            known = ", ".join(sorted(_FIELD_PARSERS))
            raise ValueError(f"unknown config key {key!r}; known keys: {known}")
        try:
            updates[key] = _FIELD_PARSERS[key](raw)
        except (TypeError, ValueError) as err:
            raise ValueError(f"bad value for {key!r}: {raw!r} ({err})") from err
    return replace(config, **updates)


def load_config(path=None, overrides: Optional[dict[str, str]] = None) -> ExperimentConfig:
    config = ExperimentConfig()
    if path is not None:
        config = config_from_mapping(parse_config_file(path), config)
    if overrides:
        config = config_from_mapping(overrides, config)
    return config


def parse_mu0(spec: str, game: GameDefinition, rng: np.random.Generator) -> np.ndarray:
    """Resolve a mu0 spec: 'uniform' draws from the action box per run."""
    if spec.strip().lower() == "uniform":
        lower, upper = game.joint_bounds()
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("mu0 = uniform needs bounded action sets")
        return rng.uniform(lower, upper)
    parts = [p for chunk in spec.split(",") for p in chunk.split()]
    values = np.array([parse_number(p) for p in parts])
    if values.shape != (game.joint_dim,):
        raise ValueError(
            f"mu0 needs {game.joint_dim} coordinates for game {game.name!r}, got {len(values)}"
        )
    return values


@dataclass
class RunSummary:
    """Per-replication outcome row."""

    replication: int
    final_dist: Optional[float]
    first_hit_0p1: Optional[int]
    wall_ms: float


@dataclass
class ReplicationResult:
    replication: int
    records: list[IterationRecord]
    summary: RunSummary


def run_replication(config: ExperimentConfig, game: GameDefinition, replication: int) -> ReplicationResult:
    seed = config.base_seed ^ replication
    rng = np.random.default_rng(seed)
    mu0 = parse_mu0(config.mu0, game, rng)
    learner = PayoffBasedLearner(
        exponents=config.exponents,
        max_iters=config.max_iters,
        seed=rng,
        regularized=config.regularized,
        mu0=mu0,
        thinning=config.thinning,
        validate_schedule=not config.allow_invalid_schedule,
    )
    started = time.perf_counter()
    learner.fit(game)
    wall_ms = (time.perf_counter() - started) * 1e3
    records = learner.history_

    final_dist = records[-1].dist_to_ref if records else None
    first_hit = None
    for record in records:
        if record.dist_to_ref is not None and record.dist_to_ref <= HIT_THRESHOLD:
            first_hit = record.t
            break
    return ReplicationResult(
        replication=replication,
        records=records,
        summary=RunSummary(
            replication=replication,
            final_dist=final_dist,
            first_hit_0p1=first_hit,
            wall_ms=wall_ms,
        ),
    )


def worker_count(replications: int) -> int:
    """Worker cap: MONOTONE_NASH_THREADS, else 1.

    Replications are GIL-bound numpy-scalar work, so extra threads only
    pay off when cost evaluators release the GIL; the default keeps the
    pool at one worker and the env var opts into more.
    """
    cap = os.environ.get(THREADS_ENV)
    if cap is not None:
        try:
            limit = int(cap)
        except ValueError as err:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}") from err
        if limit < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {limit}")
    else:
        limit = 1
    return max(1, min(limit, replications))


def run_experiment(config: ExperimentConfig) -> list[ReplicationResult]:
    """Run all replications (worker pool) and return them ordered by index."""
    game = registry(config.game)
    indices = range(config.replications)
    workers = worker_count(config.replications)
    if workers == 1:
        results = [run_replication(config, game, r) for r in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: run_replication(config, game, r), indices))
    return sorted(results, key=lambda result: result.replication)


# ---------------------------------------------------------------------------
# Artifacts


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _record_rows(game: GameDefinition, replication: int, record: IterationRecord):
    for i in range(game.n_players):
        for k in range(game.dim):
            j = i * game.dim + k
            yield (
                replication,
                record.t,
                i,
                k,
                record.mu[j],
                record.x[j],
                record.payoff[i],
                record.gamma,
                record.sigma,
                record.epsilon,
                record.dist_to_ref,
            )


def write_runs_csv(path, game: GameDefinition, results: list[ReplicationResult]) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(RUNS_HEADER + "\n")
        for result in results:
            for record in result.records:
                for row in _record_rows(game, result.replication, record):
                    rep, t, player, dim, mu, x, payoff, gamma, sigma, epsilon, dist = row
                    dist_text = "" if dist is None else _fmt(dist)
                    handle.write(
                        f"{rep},{t},{player},{dim},{_fmt(mu)},{_fmt(x)},{_fmt(payoff)},"
                        f"{_fmt(gamma)},{_fmt(sigma)},{_fmt(epsilon)},{dist_text}\n"
                    )


def write_runs_json(path, game: GameDefinition, results: list[ReplicationResult]) -> None:
    keys = RUNS_HEADER.split(",")
    rows = []
    for result in results:
        for record in result.records:
            for row in _record_rows(game, result.replication, record):
                entry = dict(zip(keys, row))
                rows.append(entry)
    with open(path, "w", newline="") as handle:
        json.dump({"schema": "runs-v1", "rows": rows}, handle, indent=None, separators=(",", ":"))
        handle.write("\n")


def write_summary_csv(path, results: list[ReplicationResult]) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(SUMMARY_HEADER + "\n")
        for result in results:
            s = result.summary
            final = "" if s.final_dist is None else _fmt(s.final_dist)
            hit = "" if s.first_hit_0p1 is None else str(s.first_hit_0p1)
            handle.write(f"{s.replication},{final},{hit},{s.wall_ms:.3f}\n")


def write_artifacts(config: ExperimentConfig, results: list[ReplicationResult], out_dir=None) -> dict[str, str]:
    """Write the trajectory artifact and summary CSV; returns their paths."""
    out = Path(out_dir if out_dir is not None else config.out)
    out.mkdir(parents=True, exist_ok=True)
    game = registry(config.game)
    paths: dict[str, str] = {}
    if config.format == "csv":
        runs_path = out / "runs.csv"
        write_runs_csv(runs_path, game, results)
    else:
        runs_path = out / "runs.json"
        write_runs_json(runs_path, game, results)
    paths["runs"] = str(runs_path)
    summary_path = out / "summary.csv"
    write_summary_csv(summary_path, results)
    paths["summary"] = str(summary_path)
    return paths


_ROW_TYPES = (int, int, int, int, float, float, float, float, float, float)


def read_runs_csv(path) -> list[dict]:
    """Parse a trajectory CSV back into typed row dicts.

    Raises ValueError naming the 1-based line number on any malformed
    content (the header is line 1).
    """
    keys = RUNS_HEADER.split(",")
    rows: list[dict] = []
    with open(path, "r", newline="") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != RUNS_HEADER:
        got = lines[0] if lines else "<empty file>"
        raise ValueError(f"{path}:1: bad header {got!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(keys):
            raise ValueError(f"{path}:{lineno}: expected {len(keys)} fields, got {len(parts)}")
        row: dict = {}
        try:
            for key, caster, part in zip(keys[:-1], _ROW_TYPES, parts[:-1]):
                row[key] = caster(part)
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: {err}") from None
        last = parts[-1]
        if last == "":
            row["dist_ref"] = None
        else:
            try:
                row["dist_ref"] = float(last)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad dist_ref {last!r}") from None
        rows.append(row)
    return rows
