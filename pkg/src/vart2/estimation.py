"""Least-squares VAR fitting, AIC order selection and autocorrelation diagnostics."""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numerics, var_model
from .errors import (InsufficientData, NotPositiveDefinite, ParseError, RankDeficientRegressors,
                     ZeroVariance)
from .var_model import VarModel


@dataclass(frozen=True, eq=False)
class TimeSeriesData:
    names: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.shape[0] < 1:
            raise ValueError("series needs at least one row")
        if rows.shape[1] != len(self.names):
            raise ValueError(f"{len(self.names)} names for {rows.shape[1]} columns")
        if not np.all(np.isfinite(rows)):
            raise ValueError("series contains non-finite values")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "rows", rows)

    @property
    def v(self) -> int:
        return self.rows.shape[1]

    @property
    def T(self) -> int:
        return self.rows.shape[0]


def read_series_csv(path) -> TimeSeriesData:
    """Read a ``t,<name1>,...`` file; rows are taken in file order."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            body = [r for r in reader if r and any(c.strip() for c in r)]
        if header and header[0] == "t":
            header, body = header[1:], [r[1:] for r in body]
        rows = np.array([[float(c) for c in r] for r in body], dtype=float)
    except (OSError, StopIteration, ValueError) as exc:
        raise ParseError(f"cannot read series {path}: {exc}") from None
    if not header or rows.size == 0 or rows.ndim != 2 or rows.shape[1] != len(header):
        raise ParseError(f"{path} has no usable rows")
    try:
        return TimeSeriesData(tuple(header), rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def write_series_csv(path, data: TimeSeriesData) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *data.names])
        for i, r in enumerate(data.rows, start=1):
            w.writerow([i, *(f"{x:.10g}" for x in r)])


def center(data: TimeSeriesData) -> tuple[TimeSeriesData, np.ndarray]:
    means = data.rows.mean(axis=0)
    return TimeSeriesData(data.names, data.rows - means), means


@dataclass(frozen=True, eq=False)
class VarFit:
    model: VarModel
    intercept: np.ndarray
    residual_rows: np.ndarray
    log_det_sigma: float
    effective_T: int

    @property
    def p(self) -> int:
        return self.model.p


def fit_var_ols(data: TimeSeriesData, p: int, start: int | None = None) -> VarFit:
    """Equationwise least squares with intercept.

    Args:
        data: observations in time order.
        p: lag order.
        start: index of the first row used as a response; defaults to ``p``.
            Order selection passes a common start so every candidate sees the
            same responses.

    Returns:
        Fit whose model carries the small-sample innovation covariance
        (residual cross-products over ``T_eff - v p - 1``) and whose
        ``log_det_sigma`` uses the maximum-likelihood divisor ``T_eff``.
    """
    if p < 1:
        raise ValueError("order must be at least 1")
    start = p if start is None else int(start)
    if start < p:
        raise ValueError("start must leave p rows of history")
    x, v = data.rows, data.v
    if data.T < v * p + v + 10:
        raise InsufficientData(f"{data.T} rows cannot support a VAR({p}) in {v} variables")
    if np.any(np.ptp(x, axis=0) == 0):
        raise ZeroVariance("a column is constant")
    t_eff = data.T - start
    k = v * p + 1
    y = x[start:]
    reg = np.hstack([np.ones((t_eff, 1))] + [x[start - i: data.T - i] for i in range(1, p + 1)])
    coef, _, rank, _ = np.linalg.lstsq(reg, y, rcond=None)
    if rank < k:
        raise RankDeficientRegressors(f"regressor matrix has rank {rank} < {k}")
    resid = y - reg @ coef
    cross = resid.T @ resid
    intercept = coef[0]
    phis = tuple(coef[1 + (i - 1) * v: 1 + i * v].T for i in range(1, p + 1))

    lhs = np.eye(v) - sum(phis)
    probe = VarModel(np.zeros(v), phis, np.eye(v))
    if var_model.is_stationary(probe):
        mu = numerics.solve(lhs, intercept)
    else:
        warnings.warn("fitted model is not stationary; reporting the sample mean", RuntimeWarning, stacklevel=2)
        mu = x.mean(axis=0)
    try:
        model = VarModel(mu, phis, cross / (t_eff - k), data.names)
        sign, logdet = np.linalg.slogdet(cross / t_eff)
        if sign <= 0:
            raise NotPositiveDefinite("residual covariance is singular")
    except NotPositiveDefinite as exc:
        raise RankDeficientRegressors(f"residual covariance is degenerate: {exc}") from None
    return VarFit(model, intercept, resid, float(logdet), t_eff)


def aic(fit: VarFit) -> float:
    v = fit.model.v
    return fit.log_det_sigma + 2.0 * (fit.p * v * v + v) / fit.effective_T


def select_order(data: TimeSeriesData, p_max: int) -> tuple[int, list[dict]]:
    """AIC-minimizing order in ``1..p_max`` with every candidate fitted on rows ``p_max..T-1``.

    The table flags candidates whose fitted model is not stationary.
    """
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    table = []
    for p in range(1, p_max + 1):
        fit = fit_var_ols(data, p, start=p_max)
        margin = var_model.stationarity_margin(fit.model)
        table.append({"p": p, "aic": aic(fit), "stationary": margin > var_model.STATIONARITY_MARGIN,
                      "max_modulus": 1.0 - margin})
    best = min(table, key=lambda row: row["aic"])
    return best["p"], table


def sample_acf(series: Sequence[float], max_lag: int) -> tuple[np.ndarray, float]:
    """Sample autocorrelations ``r(0..max_lag)`` and the 95% white-noise band half-width."""
    x = np.asarray(series, dtype=float)
    if x.size < max_lag + 2:
        raise ValueError(f"need at least {max_lag + 2} values for {max_lag} lags")
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        raise ZeroVariance("series has zero variance")
    r = np.array([float(d[: x.size - k] @ d[k:]) / denom for k in range(max_lag + 1)])
    return r, 1.96 / np.sqrt(x.size)


def fit_report(data: TimeSeriesData, fit: VarFit, table: list[dict], max_lag: int = 20) -> dict:
    lags = min(max_lag, fit.residual_rows.shape[0] - 2)
    acf = {}
    for j, name in enumerate(data.names):
        r, band = sample_acf(fit.residual_rows[:, j], lags)
        acf[name] = r.tolist()
    return {
        "order": fit.p,
        "effective_T": fit.effective_T,
        "aic_table": table,
        "intercept": fit.intercept.tolist(),
        "stationarity_margin": var_model.stationarity_margin(fit.model),
        "residual_acf": acf,
        "acf_band": float(band),
    }
