"""Stationary VAR(p) processes and the covariance of their block means.

A model is ``X_t = C + sum_i Phi_i X_{t-i} + eps_t`` with Gaussian innovations
of covariance ``sigma_eps``, stored through its mean ``mu`` so that
``C = (I - sum_i Phi_i) mu``. Higher orders are handled through the companion
VAR(1) form of dimension ``v * p``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import numerics
from .errors import InvalidModel, NonStationary, ParseError

STATIONARITY_MARGIN = 1e-8


def _matrix(values, v: int, what: str) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.size != v * v:
        raise InvalidModel(f"{what} needs {v * v} entries, got {a.size}")
    return a.reshape(v, v)


@dataclass(frozen=True, eq=False)
class VarModel:
    """Mean, lag coefficient matrices and innovation covariance of a VAR(p)."""

    mu: np.ndarray
    phi: tuple[np.ndarray, ...]
    sigma_eps: np.ndarray
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        v = mu.size
        if v < 1:
            raise InvalidModel("model needs at least one variable")
        phis = tuple(_matrix(m, v, "lag matrix") for m in self.phi)
        if not phis:
            raise InvalidModel("model needs at least one lag matrix")
        # a zero last lag is allowed only for the white-noise VAR(1)
        if len(phis) > 1 and not np.any(phis[-1]):
            raise InvalidModel(f"lag {len(phis)} matrix is zero; the order is not exact")
        sig = _matrix(self.sigma_eps, v, "innovation covariance")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sig)) and all(np.all(np.isfinite(m)) for m in phis)):
            raise InvalidModel("model parameters must be finite")
        numerics.cholesky(sig)
        names = tuple(self.names) if self.names else tuple(f"x{i + 1}" for i in range(v))
        if len(names) != v:
            raise InvalidModel(f"{len(names)} names for {v} variables")
        for a in (mu, sig, *phis):
            a.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi", phis)
        object.__setattr__(self, "sigma_eps", sig)
        object.__setattr__(self, "names", names)

    @property
    def v(self) -> int:
        return self.mu.size

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def intercept(self) -> np.ndarray:
        return (np.eye(self.v) - sum(self.phi)) @ self.mu

    @property
    def innovation_sd(self) -> np.ndarray:
        return np.sqrt(np.diag(self.sigma_eps))

    def with_mean(self, mu: Sequence[float]) -> "VarModel":
        return VarModel(np.asarray(mu, dtype=float), self.phi, self.sigma_eps, self.names)

    def shifted(self, delta) -> "VarModel":
        """Copy with the mean moved by ``delta`` innovation standard deviations.

        ``delta`` is a scalar applied to every variable or a length-v vector.
        """
        d = np.broadcast_to(np.asarray(delta, dtype=float), (self.v,))
        return self.with_mean(self.mu + d * self.innovation_sd)

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "p": self.p,
            "names": list(self.names),
            "mu": self.mu.tolist(),
            "phi": [m.reshape(-1).tolist() for m in self.phi],
            "sigma_eps": self.sigma_eps.reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VarModel":
        try:
            v, p = int(doc["v"]), int(doc["p"])
            mu = np.asarray(doc.get("mu", [0.0] * v), dtype=float)
            phi = [np.asarray(m, dtype=float) for m in doc["phi"]]
            sig = np.asarray(doc["sigma_eps"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidModel(f"malformed model document: {exc}") from None
        if mu.size != v or len(phi) != p:
            raise InvalidModel(f"declared v={v}, p={p} but got mu of {mu.size} and {len(phi)} lag matrices")
        return cls(mu, tuple(phi), sig, tuple(doc.get("names") or ()))


def load_model(path) -> VarModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read model {path}: {exc}") from None
    return VarModel.from_dict(doc)


def save_model(model: VarModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


# -- companion form --------------------------------------------------------

def companion(model: VarModel) -> tuple[np.ndarray, np.ndarray]:
    """Companion transition matrix and its innovation covariance.

    The transition has the lag matrices along its first block row and identity
    blocks on the sub-diagonal; the innovation covariance is ``sigma_eps`` in
    the leading block and zero elsewhere.
    """
    v, p = model.v, model.p
    psi = np.zeros((v * p, v * p))
    psi[:v, :] = np.hstack(model.phi)
    psi[v:, :-v] = np.eye(v * (p - 1))
    sig_b = np.zeros((v * p, v * p))
    sig_b[:v, :v] = model.sigma_eps
    return psi, sig_b


def stationarity_margin(model: VarModel) -> float:
    """``1 - max |eigenvalue|`` of the companion matrix."""
    return 1.0 - float(numerics.eigen_magnitudes(companion(model)[0])[0])


def is_stationary(model: VarModel) -> bool:
    return stationarity_margin(model) > STATIONARITY_MARGIN


def require_stationary(model: VarModel) -> None:
    margin = stationarity_margin(model)
    if margin <= STATIONARITY_MARGIN:
        raise NonStationary(f"companion spectral radius {1 - margin:.10g} is not below one")


def sigma_z(model: VarModel) -> np.ndarray:
    """Stationary covariance of the stacked state ``(X_t, ..., X_{t-p+1})``.

    Solves ``(I - Psi kron Psi) vec(S) = vec(Sigma_b)``.
    """
    require_stationary(model)
    psi, sig_b = companion(model)
    k = psi.shape[0]
    s = numerics.unvec(numerics.solve(np.eye(k * k) - numerics.kron(psi, psi), numerics.vec(sig_b)), k)
    return 0.5 * (s + s.T)


def lag_covariances(model: VarModel, max_lag: int) -> np.ndarray:
    """Array ``g`` with ``g[k] = Cov(X_t, X_{t-k})`` for ``k = 0..max_lag``.

    Lags below ``p`` come from the first block row of the companion covariance,
    the rest from the Yule-Walker recursion. Negative lags are ``g[k].T``.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    v, p = model.v, model.p
    sz = sigma_z(model)
    g = np.zeros((max(max_lag, p - 1) + 1, v, v))
    for k in range(p):
        g[k] = sz[:v, k * v:(k + 1) * v]
    for k in range(p, max_lag + 1):
        g[k] = sum(model.phi[i] @ (g[k - i - 1] if k - i - 1 >= 0 else g[i + 1 - k].T) for i in range(p))
    return g[: max_lag + 1]


def sigma_x(model: VarModel) -> np.ndarray:
    return lag_covariances(model, 0)[0]


def cross_correlation(model: VarModel, lag: int) -> np.ndarray:
    """Lag-``lag`` cross-correlation matrix, entry (i, j) = corr(X_i,t, X_j,t-lag)."""
    g = lag_covariances(model, abs(lag))
    gk = g[abs(lag)] if lag >= 0 else g[-lag].T
    sd = np.sqrt(np.diag(g[0]))
    return gk / np.outer(sd, sd)


# -- block mean covariance -------------------------------------------------

def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"block size must be a positive integer, got {n}")
    return int(n)


def lambda_pi(phi: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Power sums ``sum_{k<n} phi^k`` and ``sum_{k<n} k phi^k`` over ``k >= 1``."""
    n = _check_n(n)
    phi = np.asarray(phi, dtype=float)
    lam = np.zeros_like(phi)
    pi = np.zeros_like(phi)
    power = np.eye(phi.shape[0])
    for k in range(1, n):
        power = power @ phi
        lam += power
        pi += k * power
    return lam, pi


def _mean_cov_var1(phi: np.ndarray, cov: np.ndarray, n: int) -> np.ndarray:
    lam, pi = lambda_pi(phi, n)
    lam_t, pi_t = lambda_pi(phi.T, n)
    eye = np.eye(phi.shape[0])
    s = (cov @ (eye + lam_t - pi_t / n) + (lam - pi / n) @ cov) / n
    return 0.5 * (s + s.T)


def sigma_xbar_var1(phi: np.ndarray, cov: np.ndarray, n: int) -> np.ndarray:
    """Covariance of the mean of ``n`` consecutive draws of a stationary VAR(1).

    Args:
        phi: transition matrix.
        cov: stationary covariance of the process.
        n: block size.
    """
    s = _mean_cov_var1(np.asarray(phi, dtype=float), np.asarray(cov, dtype=float), _check_n(n))
    numerics.cholesky(s)
    return s


def sigma_xbar(model: VarModel, n: int) -> np.ndarray:
    """Covariance of the mean of ``n`` consecutive observations.

    Orders above one go through the companion form and keep the leading block.
    """
    n = _check_n(n)
    psi, _ = companion(model)
    s = _mean_cov_var1(psi, sigma_z(model), n)[: model.v, : model.v]
    numerics.cholesky(s)
    return s


def sigma_xbar_direct(model: VarModel, n: int) -> np.ndarray:
    """Same quantity as :func:`sigma_xbar`, summed lag by lag.

    ``(1/n^2) sum_{|k|<n} (n - |k|) Cov(X_t, X_{t-k})``; kept as an
    independent route for cross-checking.
    """
    n = _check_n(n)
    g = lag_covariances(model, n - 1)
    s = n * g[0]
    for k in range(1, n):
        s = s + (n - k) * (g[k] + g[k].T)
    s = s / n**2
    return 0.5 * (s + s.T)


def block_covariance(model: VarModel, length: int) -> np.ndarray:
    """Joint covariance of ``length`` consecutive observations stacked oldest first."""
    v = model.v
    g = lag_covariances(model, length - 1)
    out = np.empty((length * v, length * v))
    for i in range(length):
        for j in range(length):
            k = i - j
            out[i * v:(i + 1) * v, j * v:(j + 1) * v] = g[k] if k >= 0 else g[-k].T
    return out
