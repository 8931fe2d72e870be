"""Shared helpers for the test suite."""
import numpy as np

from vart2 import data_path
from vart2.var_model import VarModel, load_model, stationarity_margin


def random_spd(rng, v, scale=1.0):
    a = rng.normal(size=(v, v))
    return scale * (a @ a.T / v + 0.3 * np.eye(v))


def random_var(rng, v, p, radius=None, mu_scale=1.0):
    """Random stationary VAR(p) whose companion spectral radius equals ``radius``."""
    radius = rng.uniform(0.1, 0.9) if radius is None else radius
    phis = [rng.normal(size=(v, v)) / (v * (i + 1)) for i in range(p)]
    model = VarModel(np.zeros(v), tuple(phis), np.eye(v))
    rho = 1.0 - stationarity_margin(model)
    # scaling lag i by c**i scales every companion eigenvalue by c
    c = radius / rho
    phis = [m * c ** (i + 1) for i, m in enumerate(phis)]
    return VarModel(rng.normal(scale=mu_scale, size=v), tuple(phis), random_spd(rng, v))


def equicorrelated(v, rho):
    s = np.full((v, v), float(rho))
    np.fill_diagonal(s, 1.0)
    return s


def var1(phi, sigma, mu=None):
    phi = np.asarray(phi, dtype=float)
    v = phi.shape[0]
    return VarModel(np.zeros(v) if mu is None else mu, (phi,), sigma)


def steel():
    return load_model(data_path("steel.json"))


def chemical_published():
    return load_model(data_path("chemical.json"))


def batch_means_se(values, batches=100):
    """Standard error of the mean of a serially dependent sequence of estimates."""
    values = np.asarray(values)
    usable = len(values) // batches * batches
    b = values[:usable].reshape(batches, -1, *values.shape[1:]).mean(axis=1)
    return b.mean(axis=0), b.std(axis=0, ddof=1) / np.sqrt(batches)
