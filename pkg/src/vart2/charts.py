"""Hotelling-type control charts on block means of a VAR process.

Two charts share one design record. The observation chart standardizes the
raw block mean with the autocorrelation-aware covariance of block means. The
residual chart filters each block through the fitted recursion first and then
standardizes the mean one-step residual with ``sigma_eps / n``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import numerics, var_model
from .errors import (DegreesOfFreedomExhausted, DimensionMismatch, InvalidModel, MissingHistory,
                     ParseError)
from .var_model import VarModel

MODES = ("observations", "residuals")
DEFAULT_ALPHA = 0.0027


def phase2_ucl(alpha: float, v: int) -> float:
    """Upper limit when the process parameters are known."""
    return numerics.chi2_quantile_upper(alpha, v)


def phase1_ucl(alpha: float, v: int, m: int, n: int) -> float:
    """Upper limit for retrospective checking of ``m`` blocks of size ``n``.

    Uses the F-based limit that accounts for estimating the mean and
    covariance from the same ``m * n`` observations.
    """
    df2 = m * n - m - v + 1
    if df2 < 1:
        raise DegreesOfFreedomExhausted(f"m*n - m - v + 1 = {df2} leaves no denominator degrees of freedom")
    return v * (m - 1) * (n - 1) / df2 * numerics.f_quantile_upper(alpha, v, df2)


@dataclass(frozen=True, eq=False)
class ChartDesign:
    mode: str
    n: int
    alpha: float
    mu0: np.ndarray
    cov: np.ndarray
    inv_cov: np.ndarray
    ucl: float
    model: VarModel
    phase: str = "II"
    m: int | None = None

    @property
    def v(self) -> int:
        return self.mu0.size

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "phase": self.phase,
            "m": self.m,
            "v": self.v,
            "n": self.n,
            "alpha": self.alpha,
            "mu0": self.mu0.tolist(),
            "cov": self.cov.reshape(-1).tolist(),
            "inv_cov": self.inv_cov.reshape(-1).tolist(),
            "ucl": self.ucl,
            "model": self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ChartDesign":
        try:
            v, n = int(doc["v"]), int(doc["n"])
            mode = doc["mode"]
            model = VarModel.from_dict(doc["model"])
            mu0 = np.asarray(doc["mu0"], dtype=float)
            cov = np.asarray(doc["cov"], dtype=float).reshape(v, v)
            inv_cov = np.asarray(doc["inv_cov"], dtype=float).reshape(v, v)
            design = cls(mode, n, float(doc["alpha"]), mu0, cov, inv_cov, float(doc["ucl"]), model,
                         doc.get("phase", "II"), doc.get("m"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed design document: {exc}") from None
        if mode not in MODES or mu0.size != v or model.v != v:
            raise InvalidModel("design document is internally inconsistent")
        return design


def build_design(model: VarModel, n: int, alpha: float = DEFAULT_ALPHA, mode: str = "observations",
                 phase: str = "II", m: int | None = None) -> ChartDesign:
    """Build the in-control reference for either chart.

    Args:
        model: in-control process.
        n: observations per inspection block.
        mode: ``"observations"`` or ``"residuals"``.
        alpha: per-inspection false-alarm probability.
        phase: ``"II"`` for known parameters, ``"I"`` for the F-based limit.
        m: number of blocks used for estimation, required in phase I.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "observations":
        cov = var_model.sigma_xbar(model, n)
        mu0 = model.mu.copy()
    else:
        var_model.require_stationary(model)
        cov = model.sigma_eps / n
        mu0 = np.zeros(model.v)
    if phase == "II":
        ucl = phase2_ucl(alpha, model.v)
    elif phase == "I":
        if m is None:
            raise ValueError("phase I limits need the number of blocks m")
        ucl = phase1_ucl(alpha, model.v, m, n)
    else:
        raise ValueError(f"phase must be 'I' or 'II', got {phase!r}")
    return ChartDesign(mode, int(n), alpha, mu0, cov, numerics.inv(cov), ucl, model, phase, m)


def t2_statistic(design: ChartDesign, mean) -> float:
    d = np.asarray(mean, dtype=float).reshape(-1)
    if d.size != design.v:
        raise DimensionMismatch(f"mean has {d.size} entries, design expects {design.v}")
    d = d - design.mu0
    return float(d @ design.inv_cov @ d)


@dataclass(frozen=True, eq=False)
class SampleBlock:
    t: int
    rows: np.ndarray
    history: np.ndarray | None = None


@dataclass(frozen=True)
class ChartPoint:
    t: int
    t2: float
    ucl: float
    signal: bool


def filter_residuals(model: VarModel, rows: np.ndarray, history: np.ndarray | None) -> np.ndarray:
    """One-step prediction errors for ``rows`` given at least ``p`` rows before them."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    p = model.p
    if history is None or len(history) < p:
        raise MissingHistory(f"residuals need {p} preceding observations")
    full = np.vstack([np.asarray(history, dtype=float)[len(history) - p:], rows])
    pred = np.broadcast_to(model.intercept, rows.shape).copy()
    for i, phi in enumerate(model.phi, start=1):
        pred += full[p - i: p - i + len(rows)] @ phi.T
    return rows - pred


def residuals(model: VarModel, block: SampleBlock) -> np.ndarray:
    return filter_residuals(model, block.rows, block.history)


def block_statistic(design: ChartDesign, block: SampleBlock, model: VarModel | None = None) -> float:
    rows = np.atleast_2d(np.asarray(block.rows, dtype=float))
    if rows.shape != (design.n, design.v):
        raise DimensionMismatch(f"block {block.t}: expected {design.n}x{design.v}, got {rows.shape[0]}x{rows.shape[1]}")
    if design.mode == "residuals":
        rows = filter_residuals(model or design.model, rows, block.history)
    return t2_statistic(design, rows.mean(axis=0))


def monitor(design: ChartDesign, model: VarModel | None, blocks: Iterable[SampleBlock]) -> list[ChartPoint]:
    """Chart every block in order. ``model`` defaults to the one stored in the design."""
    out = []
    for b in blocks:
        t2 = block_statistic(design, b, model)
        out.append(ChartPoint(b.t, t2, design.ucl, t2 > design.ucl))
    return out


# -- files -----------------------------------------------------------------

def save_design(design: ChartDesign, path) -> None:
    Path(path).write_text(json.dumps(design.to_dict(), indent=2) + "\n")


def load_design(path) -> ChartDesign:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read design {path}: {exc}") from None
    return ChartDesign.from_dict(doc)


def read_block_csv(path, n: int, p: int = 0) -> tuple[list[str], list[SampleBlock]]:
    """Read a ``t,<name1>,...`` file into blocks.

    Consecutive rows sharing a ``t`` value form one group. A group of ``n``
    rows is a block whose history is the ``p`` rows just before it in the
    file. A group of ``n + p`` rows carries its own history in its first
    ``p`` rows. Groups with ``t <= 0`` are history only and are not charted.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            records = [r for r in reader if r and any(c.strip() for c in r)]
    except (OSError, StopIteration) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    if not header or header[0].strip() != "t":
        raise ParseError("block file header must start with 't'")
    names = [h.strip() for h in header[1:]]
    try:
        ts = [int(float(r[0])) for r in records]
        values = np.array([[float(c) for c in r[1:]] for r in records], dtype=float).reshape(len(records), -1)
    except ValueError as exc:
        raise ParseError(f"non-numeric entry in {path}: {exc}") from None
    if records and values.shape[1] != len(names):
        raise ParseError("row width does not match header")

    blocks: list[SampleBlock] = []
    i = 0
    while i < len(ts):
        j = i
        while j < len(ts) and ts[j] == ts[i]:
            j += 1
        t, size = ts[i], j - i
        group = values[i:j]
        if t > 0:
            if size == n:
                hist = values[i - p:i] if p and i >= p else None
                blocks.append(SampleBlock(t, group, hist))
            elif p and size == n + p:
                blocks.append(SampleBlock(t, group[p:], group[:p]))
            else:
                raise ParseError(f"inspection {t} has {size} rows, expected {n}" + (f" or {n + p}" if p else ""))
        i = j
    return names, blocks


def write_block_csv(path_or_file, names: Sequence[str], blocks: Iterable[SampleBlock],
                    include_history: bool = False) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *names])
        for b in blocks:
            rows = np.vstack([b.history, b.rows]) if include_history and b.history is not None else b.rows
            for r in rows:
                w.writerow([b.t, *(f"{x:.10g}" for x in r)])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


def write_chart_csv(path_or_file, points: Iterable[ChartPoint]) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "t2", "ucl", "signal"])
        for pt in points:
            w.writerow([pt.t, f"{pt.t2:.8g}", f"{pt.ucl:.6g}", int(pt.signal)])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
