"""Dense linear algebra, distribution functions and reproducible random streams.

Linear algebra and the central chi-square / F functions delegate to LAPACK
(via numpy/scipy) and the regularized incomplete gamma and beta functions.
The wrappers add the package's failure contracts on top: near-singular
systems raise ``SingularMatrix`` and non-positive pivots raise
``NotPositiveDefinite`` instead of silently returning garbage.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import special, stats

from .errors import NonConvergence, NotPositiveDefinite, SingularMatrix

PIVOT_RTOL = 1e-12
CHOLESKY_MIN_PIVOT = 1e-12
SYMMETRY_TOL = 1e-10
POISSON_TAIL = 1e-12


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def vec(a: np.ndarray) -> np.ndarray:
    """Stack the columns of ``a`` into a single vector."""
    return np.asarray(a, dtype=float).reshape(-1, order="F")


def unvec(x: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return np.asarray(x, dtype=float).reshape((rows, cols), order="F")


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Raises:
        SingularMatrix: if any pivot is below ``PIVOT_RTOL`` times the largest
            absolute entry of ``a``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0 or not np.all(np.isfinite(a)):
        raise SingularMatrix("matrix is zero or non-finite")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_RTOL * scale:
        raise SingularMatrix("pivot below relative tolerance")
    return scipy.linalg.lu_solve((lu, piv), np.asarray(b, dtype=float), check_finite=False)


def inv(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return solve(a, np.eye(a.shape[0]))


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower-triangular factor ``l`` with ``l @ l.T == a``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(a), initial=0.0)):
        raise NotPositiveDefinite("matrix is not symmetric")
    try:
        low = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    # relative floor keeps the check independent of the units of ``a``
    if np.min(np.diag(low) ** 2) <= CHOLESKY_MIN_PIVOT * np.max(np.diag(a)):
        raise NotPositiveDefinite("pivot at or below tolerance")
    return low


def is_positive_definite(a: np.ndarray) -> bool:
    try:
        cholesky(a)
    except NotPositiveDefinite:
        return False
    return True


def eigen_magnitudes(a: np.ndarray) -> np.ndarray:
    """Absolute eigenvalues of a real square matrix, largest first."""
    try:
        lam = np.linalg.eigvals(np.asarray(a, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from None
    return np.sort(np.abs(lam))[::-1]


# -- distributions ---------------------------------------------------------

def _check_df(v: float) -> None:
    if not v > 0:
        raise ValueError(f"degrees of freedom must be positive, got {v}")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def chi2_cdf(x: float, v: float) -> float:
    _check_df(v)
    if x <= 0:
        return 0.0
    return float(special.gammainc(v / 2.0, x / 2.0))


def chi2_sf(x: float, v: float) -> float:
    _check_df(v)
    if x <= 0:
        return 1.0
    return float(special.gammaincc(v / 2.0, x / 2.0))


def chi2_quantile_upper(alpha: float, v: float) -> float:
    """Point with upper-tail probability ``alpha`` under chi-square(v)."""
    _check_alpha(alpha)
    _check_df(v)
    return float(2.0 * special.gammainccinv(v / 2.0, alpha))


def f_quantile_upper(alpha: float, d1: float, d2: float) -> float:
    """Point with upper-tail probability ``alpha`` under F(d1, d2)."""
    _check_alpha(alpha)
    _check_df(d1)
    _check_df(d2)
    # F = (d2 / d1) * B / (1 - B) with B ~ Beta(d1/2, d2/2)
    b = float(special.betainccinv(d1 / 2.0, d2 / 2.0, alpha))
    return d2 * b / (d1 * (1.0 - b))


def _poisson_window(lam: float) -> tuple[int, int]:
    """Index range of Poisson(lam) holding all but POISSON_TAIL of the mass."""
    lo = int(stats.poisson.ppf(POISSON_TAIL / 2, lam))
    hi = int(stats.poisson.isf(POISSON_TAIL / 2, lam))
    if not 0 <= lo <= hi:
        raise NonConvergence(f"Poisson mixture window undefined for noncentrality {2 * lam}")
    return lo, hi


def _saturation_index(x: float) -> int:
    # beyond this many extra df, chi2 with that many df puts no representable mass below x
    half = x / 2.0
    return int(math.ceil(half + 40.0 * math.sqrt(half + 1.0) + 50.0))


def _mixture_cdf(x: float, v: float, lam: float, stop: int) -> float:
    lo, hi = _poisson_window(lam)
    j = np.arange(lo, min(hi, stop) + 1, dtype=float)
    if j.size == 0:
        return 0.0
    return float(np.dot(stats.poisson.pmf(j, lam), special.gammainc(v / 2.0 + j, x / 2.0)))


def noncentral_chi2_cdf(x: float, v: float, d: float) -> float:
    """CDF of the noncentral chi-square with ``v`` df and noncentrality ``d``.

    Evaluated as a Poisson(d/2) mixture of central chi-square CDFs. Poisson
    tails below 1e-12 are dropped, as are mixture terms whose central CDF
    underflows at ``x``, so the cost stays bounded for any ``d``.
    """
    _check_df(v)
    if d < 0:
        raise ValueError(f"noncentrality must be non-negative, got {d}")
    if x <= 0:
        return 0.0
    if d == 0:
        return chi2_cdf(x, v)
    return float(np.clip(_mixture_cdf(x, v, d / 2.0, _saturation_index(x)), 0.0, 1.0))


def noncentral_chi2_sf(x: float, v: float, d: float) -> float:
    """Upper tail of the noncentral chi-square, accurate when the CDF is near one."""
    _check_df(v)
    if d < 0:
        raise ValueError(f"noncentrality must be non-negative, got {d}")
    if x <= 0:
        return 1.0
    if d == 0:
        return chi2_sf(x, v)
    lam = d / 2.0
    lo, hi = _poisson_window(lam)
    stop = _saturation_index(x)
    if hi > stop:
        # most of the mass sits where the tail is exactly one; the CDF part is tiny
        return float(np.clip(1.0 - _mixture_cdf(x, v, lam, stop), 0.0, 1.0))
    j = np.arange(lo, hi + 1, dtype=float)
    return float(np.clip(np.dot(stats.poisson.pmf(j, lam), special.gammaincc(v / 2.0 + j, x / 2.0)), 0.0, 1.0))


# -- random streams --------------------------------------------------------

@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by ``(master_seed, stream_index)``.

    Streams are Philox4x64 generators keyed on the pair, so any replication
    can be regenerated on its own, in any order, on any worker.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            val = getattr(self, name)
            if not 0 <= int(val) < 2**64:
                raise ValueError(f"{name} must lie in [0, 2**64), got {val}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        """Stream for replication ``index`` under the same master seed."""
        return RngStream(self.master_seed, index)


def standard_normal_draws(stream: RngStream, count: int) -> np.ndarray:
    if count < 0:
        raise ValueError("count must be non-negative")
    return stream.generator().standard_normal(count)
