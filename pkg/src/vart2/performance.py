"""Average run length of the block-mean charts, analytic and simulated.

Analytic values use the noncentral chi-square law of the statistic under a
sustained mean shift. Simulated values draw independent inspection blocks
from the VAR recursion and count inspections up to the first alarm.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import numerics, var_model
from .charts import ChartDesign, build_design
from .errors import ExcessiveCensoring, InvalidModel, ParseError
from .numerics import RngStream
from .var_model import VarModel

DEFAULT_MAX_CAP = 100_000
CENSORING_LIMIT = 0.01


@dataclass(frozen=True, eq=False)
class ShiftSpec:
    """Mean shift in units of the innovation standard deviations."""

    delta: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        if not np.all(np.isfinite(d)):
            raise ValueError("shift entries must be finite")
        object.__setattr__(self, "delta", d)

    @classmethod
    def uniform(cls, delta: float, v: int) -> "ShiftSpec":
        return cls(np.full(v, float(delta)))

    def raw(self, model: VarModel) -> np.ndarray:
        """Shift in process units."""
        d = np.broadcast_to(self.delta, (model.v,))
        return d * model.innovation_sd


def _as_shift(shift, v: int) -> ShiftSpec:
    if isinstance(shift, ShiftSpec):
        return shift
    return ShiftSpec(np.broadcast_to(np.asarray(shift, dtype=float), (v,)).copy())


@dataclass(frozen=True)
class RunLengthResult:
    replications: int
    mean_rl: float
    std_error: float
    max_cap: int
    censored_count: int


@dataclass(frozen=True)
class FtsResult:
    p1: float
    p2: float
    p3: float
    n1: int
    n2: int
    n3: int
    replications: int
    censored_count: int = 0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("p1", "p2", "p3", "n1", "n2", "n3", "replications", "censored_count")}


# -- analytic --------------------------------------------------------------

def arl0(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return 1.0 / alpha


def residual_mean_shift(model: VarModel, delta_raw: np.ndarray) -> np.ndarray:
    """Steady-state shift in the one-step residuals when the mean moves by ``delta_raw``."""
    return (np.eye(model.v) - sum(model.phi)) @ delta_raw


def noncentrality(model: VarModel, n: int, shift, mode: str = "observations") -> float:
    """Noncentrality of the block statistic under a sustained mean shift.

    In observation mode this is ``D' inv(Sxbar) D`` with ``D`` the raw shift.
    In residual mode the residual mean moves by ``(I - sum Phi) D`` and is
    measured against ``sigma_eps / n``.
    """
    var_model.require_stationary(model)
    delta = _as_shift(shift, model.v).raw(model)
    if mode == "observations":
        return float(delta @ numerics.solve(var_model.sigma_xbar(model, n), delta))
    if mode == "residuals":
        de = residual_mean_shift(model, delta)
        return float(n * de @ numerics.solve(model.sigma_eps, de))
    raise ValueError(f"unknown mode {mode!r}")


def arl1(design: ChartDesign, model: VarModel, shift) -> float:
    """Analytic ARL of ``design`` when ``model``'s mean moves by ``shift``."""
    var_model.require_stationary(model)
    delta = _as_shift(shift, model.v).raw(model)
    if design.mode == "residuals":
        delta = residual_mean_shift(model, delta)
    d = max(float(delta @ design.inv_cov @ delta), 0.0)
    tail = numerics.noncentral_chi2_sf(design.ucl, design.v, d)
    return float("inf") if tail == 0.0 else 1.0 / tail


# -- scenario grids --------------------------------------------------------

@dataclass
class ScenarioGrid:
    alpha: float
    ns: list[int]
    deltas: list[float]
    scenarios: list[tuple[str, VarModel]] = field(default_factory=list)
    mode: str = "observations"


@dataclass(frozen=True)
class ArlRow:
    scenario_id: str
    n: int
    delta: float
    arl: float


def load_scenarios(path) -> ScenarioGrid:
    """Read a scenario file. Model references are resolved relative to the file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
        grid = ScenarioGrid(float(doc.get("alpha", 0.0027)), [int(n) for n in doc["n"]],
                            [float(d) for d in doc["deltas"]], mode=doc.get("mode", "observations"))
        entries = doc["scenarios"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from None
    for entry in entries:
        ref = entry.get("model")
        if isinstance(ref, str):
            model = var_model.load_model(path.parent / ref)
        elif isinstance(ref, dict):
            model = VarModel.from_dict(ref)
        else:
            raise InvalidModel(f"scenario {entry.get('id')!r} has no model")
        grid.scenarios.append((str(entry["id"]), model))
    return grid


def arl_table(grid: ScenarioGrid) -> list[ArlRow]:
    """Analytic ARL for every scenario, block size and shift in the grid."""
    rows = []
    for sid, model in grid.scenarios:
        var_model.require_stationary(model)
        for n in grid.ns:
            design = build_design(model, n, grid.alpha, grid.mode)
            for delta in grid.deltas:
                arl = arl0(grid.alpha) if delta == 0 else arl1(design, model, delta)
                rows.append(ArlRow(sid, n, delta, arl))
    return rows


def write_arl_csv(path_or_file, rows: Sequence[ArlRow]) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario_id", "n", "delta", "arl"])
        for r in rows:
            w.writerow([r.scenario_id, r.n, f"{r.delta:g}", f"{r.arl:.6g}"])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


# -- simulation ------------------------------------------------------------

def default_burn_in(p: int) -> int:
    return max(500, 50 * p)


def simulate_segment(model: VarModel, length: int, burn_in: int | None, stream: RngStream) -> np.ndarray:
    """``length`` consecutive rows of the process after discarding ``burn_in`` steps.

    The recursion starts at ``X = mu``. ``burn_in=None`` uses ``max(500, 50 p)``.
    """
    var_model.require_stationary(model)
    burn_in = default_burn_in(model.p) if burn_in is None else int(burn_in)
    if length < 0 or burn_in < 0:
        raise ValueError("length and burn_in must be non-negative")
    v, p = model.v, model.p
    chol = numerics.cholesky(model.sigma_eps)
    shocks = stream.generator().standard_normal((burn_in + length, v)) @ chol.T
    coef = np.hstack(model.phi)  # v x vp, lag 1 first
    c = model.intercept
    state = np.tile(model.mu, p)  # (X_{t-1}, ..., X_{t-p})
    out = np.empty((burn_in + length, v))
    for t in range(burn_in + length):
        x = c + coef @ state + shocks[t]
        out[t] = x
        state = np.concatenate([x, state[:-v]]) if p > 1 else x
    return out[burn_in:]


class BlockSampler:
    """Draws batches of independent inspection blocks with their lag history.

    Each block is ``n`` rows produced by the VAR recursion from a companion
    state (the ``history`` rows) drawn from its stationary law, which is the
    infinite burn-in limit of a segment started at the mean.
    """

    def __init__(self, model: VarModel, n: int):
        var_model.require_stationary(model)
        self.model, self.n = model, int(n)
        p = model.p
        self._state_chol = numerics.cholesky(var_model.sigma_z(model))
        self._eps_chol = numerics.cholesky(model.sigma_eps)
        self._coef = np.hstack(model.phi)
        self._c = model.intercept
        self._state_mean = np.tile(model.mu, p)

    def draw(self, gen: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(history, rows)`` shaped ``(count, p, v)`` and ``(count, n, v)``.

        History rows are in time order, oldest first.
        """
        v, p, n = self.model.v, self.model.p, self.n
        z = gen.standard_normal((count, v * p + n * v))
        state = self._state_mean + z[:, : v * p] @ self._state_chol.T  # newest lag first
        shocks = z[:, v * p:].reshape(count, n, v) @ self._eps_chol.T
        history = state.reshape(count, p, v)[:, ::-1, :].copy()
        rows = np.empty((count, n, v))
        for t in range(n):
            x = self._c + state @ self._coef.T + shocks[:, t]
            rows[:, t] = x
            state = np.concatenate([x, state[:, :-v]], axis=1) if p > 1 else x
        return history, rows


class _ContinuousStream:
    """One unbroken series cut into consecutive blocks."""

    def __init__(self, model: VarModel, n: int, gen: np.random.Generator):
        self.model, self.n, self.gen = model, n, gen
        v, p = model.v, model.p
        self._chol = numerics.cholesky(model.sigma_eps)
        self._coef = np.hstack(model.phi)
        self._c = model.intercept
        state = np.tile(model.mu, p)
        for _ in range(default_burn_in(p)):
            state = self._step(state, gen.standard_normal(v))[1]
        self._state = state

    def _step(self, state, z):
        v = self.model.v
        x = self._c + self._coef @ state + self._chol @ z
        return x, (np.concatenate([x, state[:-v]]) if self.model.p > 1 else x)

    def draw(self, gen, count: int) -> tuple[np.ndarray, np.ndarray]:
        v, p, n = self.model.v, self.model.p, self.n
        z = gen.standard_normal((count * n, v))
        hist = np.empty((count, p, v))
        rows = np.empty((count, n, v))
        state = self._state
        for k in range(count):
            hist[k] = state.reshape(p, v)[::-1]
            for t in range(n):
                rows[k, t], state = self._step(state, z[k * n + t])
        self._state = state
        return hist, rows


def _batch_t2(design: ChartDesign, history: np.ndarray, rows: np.ndarray) -> np.ndarray:
    if design.mode == "residuals":
        m = design.model
        p, n = m.p, rows.shape[1]
        full = np.concatenate([history[:, history.shape[1] - p:], rows], axis=1)
        pred = m.intercept + sum(full[:, p - i: p - i + n] @ phi.T for i, phi in enumerate(m.phi, start=1))
        rows = rows - pred
    d = rows.mean(axis=1) - design.mu0
    return np.einsum("ki,ij,kj->k", d, design.inv_cov, d)


def _first_alarms(designs: Sequence[ChartDesign], sampler, gen, max_cap: int) -> list[int | None]:
    """Inspection index of the first alarm of each design on one shared block stream."""
    found: list[int | None] = [None] * len(designs)
    done = 0
    chunk = 32
    while done < max_cap and any(f is None for f in found):
        k = min(chunk, max_cap - done)
        history, rows = sampler.draw(gen, k)
        for i, design in enumerate(designs):
            if found[i] is None:
                hits = np.flatnonzero(_batch_t2(design, history, rows) > design.ucl)
                if hits.size:
                    found[i] = done + int(hits[0]) + 1
        done += k
        chunk = min(chunk * 2, 8192)
    return found


def _check_censoring(censored: int, replications: int) -> None:
    if censored > CENSORING_LIMIT * replications:
        raise ExcessiveCensoring(f"{censored} of {replications} replications reached the cap")


def simulate_run_length(design: ChartDesign, model: VarModel, replications: int,
                        max_cap: int = DEFAULT_MAX_CAP, master_seed: int = 0,
                        continuous: bool = False) -> RunLengthResult:
    """Monte Carlo run length of ``design`` on data generated by ``model``.

    Args:
        design: chart under study.
        model: data-generating process, in control or shifted.
        replications: number of independent runs; run ``r`` uses stream ``r``.
        max_cap: inspections after which a run is stopped and counted as censored.
        master_seed: seed shared by all replication streams.
        continuous: cut one unbroken series into blocks instead of drawing
            independent blocks.

    Raises:
        ExcessiveCensoring: if more than 1% of runs reach ``max_cap``.
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    block_sampler = None if continuous else BlockSampler(model, design.n)
    lengths = np.empty(replications)
    censored = 0
    for r in range(replications):
        gen = RngStream(master_seed, r).generator()
        sampler = block_sampler or _ContinuousStream(model, design.n, gen)
        (first,) = _first_alarms([design], sampler, gen, max_cap)
        if first is None:
            censored += 1
            first = max_cap
        lengths[r] = first
    _check_censoring(censored, replications)
    se = float(lengths.std(ddof=1) / np.sqrt(replications)) if replications > 1 else 0.0
    return RunLengthResult(replications, float(lengths.mean()), se, max_cap, censored)


def iid_design(model: VarModel, n: int, alpha: float) -> ChartDesign:
    """Observation chart built as if the process had no serial dependence."""
    white = VarModel(model.mu, (np.zeros((model.v, model.v)),), model.sigma_eps, model.names)
    return build_design(white, n, alpha, "observations")


def misdesign_arl0(true_model: VarModel, n: int = 1, alpha: float = 0.0027, replications: int = 10_000,
                   master_seed: int = 0, max_cap: int = DEFAULT_MAX_CAP) -> RunLengthResult:
    """In-control ARL of the independence-assuming chart on serially dependent data."""
    var_model.require_stationary(true_model)
    return simulate_run_length(iid_design(true_model, n, alpha), true_model, replications, max_cap, master_seed)


def compare_first_signal(design_a: ChartDesign, design_b: ChartDesign, model: VarModel, replications: int,
                         max_cap: int = DEFAULT_MAX_CAP, master_seed: int = 0,
                         continuous: bool = False) -> FtsResult:
    """Run two charts on the same block stream and tally which alarms first."""
    if design_a.n != design_b.n:
        raise ValueError("both charts must inspect blocks of the same size")
    if replications < 1:
        raise ValueError("replications must be at least 1")
    block_sampler = None if continuous else BlockSampler(model, design_a.n)
    counts = [0, 0, 0]
    censored = 0
    for r in range(replications):
        gen = RngStream(master_seed, r).generator()
        sampler = block_sampler or _ContinuousStream(model, design_a.n, gen)
        ra, rb = _first_alarms([design_a, design_b], sampler, gen, max_cap)
        if ra is None or rb is None:
            censored += 1
        ra = max_cap + 1 if ra is None else ra
        rb = max_cap + 1 if rb is None else rb
        counts[0 if ra < rb else 1 if rb < ra else 2] += 1
    _check_censoring(censored, replications)
    n1, n2, n3 = counts
    return FtsResult(n1 / replications, n2 / replications, n3 / replications, n1, n2, n3, replications, censored)


def first_to_signal(model: VarModel, n: int, alpha: float, shift, replications: int = 10_000,
                    max_cap: int = DEFAULT_MAX_CAP, master_seed: int = 0,
                    continuous: bool = False) -> FtsResult:
    """First-alarm probabilities of the observation chart against the residual chart.

    Both charts use the same limit and see the same shifted blocks; ``p1`` is
    the share of runs where the observation chart alarms strictly first.
    """
    var_model.require_stationary(model)
    obs = build_design(model, n, alpha, "observations")
    res = build_design(model, n, alpha, "residuals")
    shifted = model.with_mean(model.mu + _as_shift(shift, model.v).raw(model))
    return compare_first_signal(obs, res, shifted, replications, max_cap, master_seed, continuous)
