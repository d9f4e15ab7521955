"""Second-moment statistics of eigenvalue ensembles and ML decoding."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateEnsembleError, InvalidInputError, SingularCovarianceError

ISOTROPY_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class Ensemble2D:
    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2:
            raise InvalidInputError(f"expected (n, 2) points, got {p.shape}")
        if p.shape[0] < 2:
            raise InvalidInputError("need at least two points")
        if not np.all(np.isfinite(p)):
            raise InvalidInputError("points must be finite")
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]


def _as_ensemble(e) -> Ensemble2D:
    return e if isinstance(e, Ensemble2D) else Ensemble2D(e)


def sample_correlation(e) -> float:
    """``sum (x - xbar)(y - ybar) / ((n - 1) s_x s_y)``."""
    e = _as_ensemble(e)
    dx, dy = e.x - e.x.mean(), e.y - e.y.mean()
    sx, sy = np.std(e.x, ddof=1), np.std(e.y, ddof=1)
    if sx == 0 or sy == 0:
        raise DegenerateEnsembleError("a coordinate has zero sample variance")
    r = float(np.sum(dx * dy) / ((e.n - 1) * sx * sy))
    return float(np.clip(r, -1.0, 1.0))


def fold_angle(theta):
    """Map an axis direction to (-pi/2, pi/2]."""
    t = np.mod(np.asarray(theta, dtype=float) + np.pi / 2, np.pi) - np.pi / 2
    t = np.where(t <= -np.pi / 2 + 1e-15, t + np.pi, t)
    return float(t) if np.ndim(t) == 0 else t


def principal_angle(cov) -> tuple[float, bool]:
    """Angle of the dominant eigenvector of a 2x2 covariance with the x axis.

    Returns ``(angle, defined)``; ``defined`` is False when the two
    eigenvalues coincide to within ``ISOTROPY_GAP`` relative.
    """
    cov = np.asarray(cov, dtype=float)
    w, v = np.linalg.eigh(cov)
    defined = bool(w[1] - w[0] > ISOTROPY_GAP * max(abs(w[1]), np.finfo(float).tiny))
    vec = v[:, 1]
    return fold_angle(np.arctan2(vec[1], vec[0])), defined


@dataclass(frozen=True)
class CovarianceSummary:
    mean: np.ndarray
    cov: np.ndarray
    principal_angle: float
    correlation: float
    angle_defined: bool = True
    n: int = 0

    def as_dict(self) -> dict:
        return {"mean_x": float(self.mean[0]), "mean_y": float(self.mean[1]),
                "var_x": float(self.cov[0, 0]), "var_y": float(self.cov[1, 1]),
                "cov_xy": float(self.cov[0, 1]), "principal_angle": self.principal_angle,
                "correlation": self.correlation, "angle_defined": self.angle_defined,
                "n": self.n}


def covariance_summary(e) -> CovarianceSummary:
    """Mean, unbiased covariance, principal angle and correlation."""
    e = _as_ensemble(e)
    if e.n < 3:
        raise InvalidInputError("need at least three points")
    cov = np.cov(e.points, rowvar=False, ddof=1)
    angle, defined = principal_angle(cov)
    denom = np.sqrt(cov[0, 0] * cov[1, 1])
    corr = float(np.clip(cov[0, 1] / denom, -1, 1)) if denom > 0 else float("nan")
    return CovarianceSummary(e.points.mean(axis=0), cov, angle, corr, defined, e.n)


def angle_difference(a, b):
    """Signed difference of two axis angles, folded to (-pi/2, pi/2]."""
    return fold_angle(np.asarray(a) - np.asarray(b))


def bootstrap_angle(points, n_boot: int = 1000, rng=None, level: float = 0.95):
    """Percentile bootstrap interval ``(estimate, lo, hi)`` for the principal
    angle, unwrapped around the point estimate."""
    e = _as_ensemble(points)
    rng = np.random.default_rng(rng)
    est = covariance_summary(e).principal_angle
    idx = rng.integers(0, e.n, size=(n_boot, e.n))
    diffs = np.empty(n_boot)
    for i, row in enumerate(idx):
        ang, _ = principal_angle(np.cov(e.points[row], rowvar=False))
        diffs[i] = angle_difference(ang, est)
    lo, hi = np.quantile(diffs, [(1 - level) / 2, (1 + level) / 2])
    return est, est + lo, est + hi


def bootstrap_angle_difference(a, b, n_boot: int = 1000, rng=None, level: float = 0.95,
                               paired: bool = False):
    """Percentile interval ``(estimate, lo, hi)`` for the principal-angle
    difference of two ensembles, folded to (-pi/2, pi/2].

    Independent ensembles are resampled separately; ``paired`` resamples
    both with the same indices (runs must correspond).
    """
    a, b = _as_ensemble(a).points, _as_ensemble(b).points
    if paired and len(a) != len(b):
        raise InvalidInputError("paired bootstrap needs equal-length ensembles")
    rng = np.random.default_rng(rng)
    est = float(angle_difference(covariance_summary(a).principal_angle,
                                 covariance_summary(b).principal_angle))
    diffs = np.empty(n_boot)
    for i in range(n_boot):
        ia = rng.integers(0, len(a), len(a))
        ib = ia if paired else rng.integers(0, len(b), len(b))
        ta, _ = principal_angle(np.cov(a[ia], rowvar=False))
        tb, _ = principal_angle(np.cov(b[ib], rowvar=False))
        diffs[i] = angle_difference(angle_difference(ta, tb), est)
    lo, hi = np.quantile(diffs, [(1 - level) / 2, (1 + level) / 2])
    return est, est + lo, est + hi


def bootstrap_ratio(a, b, stat, n_boot: int = 1000, rng=None, level: float = 0.95):
    """Percentile interval for ``stat(a) / stat(b)`` resampling both samples."""
    rng = np.random.default_rng(rng)
    a, b = np.asarray(a), np.asarray(b)
    out = np.empty(n_boot)
    for i in range(n_boot):
        out[i] = stat(a[rng.integers(0, len(a), len(a))]) / stat(b[rng.integers(0, len(b), len(b))])
    return tuple(np.quantile(out, [(1 - level) / 2, (1 + level) / 2]))


def pairwise_summaries(points) -> dict:
    """Covariance summary for every coordinate pair of an ``(n, d)`` ensemble."""
    p = np.asarray(points, dtype=float)
    return {(i, j): covariance_summary(p[:, [i, j]]) for i, j in combinations(range(p.shape[1]), 2)}


# --------------------------------------------------------------------------
# decoding

@dataclass(frozen=True)
class Classification:
    assignments: np.ndarray
    error_rate: float
    bits_per_symbol: float


def ml_classify(received, constellation, cov=None, truth=None,
                metric: str = "mahalanobis") -> Classification:
    """Nearest constellation point under the Mahalanobis or Euclidean metric.

    For Gaussian noise with covariance ``cov`` the Mahalanobis rule is the
    maximum-likelihood decision.  ``truth`` holds the transmitted indices;
    without it the error rate is NaN.
    """
    x = np.atleast_2d(np.asarray(received, dtype=float))
    c = np.atleast_2d(np.asarray(constellation, dtype=float))
    if metric == "mahalanobis":
        if cov is None:
            raise InvalidInputError("Mahalanobis decoding needs a covariance")
        try:
            chol = np.linalg.cholesky(np.asarray(cov, dtype=float))
        except np.linalg.LinAlgError:
            raise SingularCovarianceError("covariance is not positive definite; "
                                          "use metric='euclidean'") from None
        xw = np.linalg.solve(chol, x.T).T
        cw = np.linalg.solve(chol, c.T).T
    elif metric == "euclidean":
        xw, cw = x, c
    else:
        raise InvalidInputError(f"unknown metric {metric!r}")
    d2 = (np.sum(xw ** 2, axis=1)[:, None] - 2 * xw @ cw.T + np.sum(cw ** 2, axis=1)[None, :])
    assign = np.argmin(d2, axis=1)
    err = float(np.mean(assign != np.asarray(truth))) if truth is not None else float("nan")
    return Classification(assign, err, float(np.log2(len(c))))


def grid_constellation(xs, ys) -> np.ndarray:
    return np.array([(x, y) for x in xs for y in ys], dtype=float)


def packed_constellation(n_points: int, box, cov, shape: str = "hex") -> np.ndarray:
    """``n_points`` lattice points inside ``box = ((x0, x1), (y0, y1))`` on a
    lattice that is hexagonal in the noise-whitened coordinates.

    Points crowd along the minor axis of the noise ellipse, where
    correlation-aware decoding can still separate them.  The lattice scale is
    bisected until at least ``n_points`` fit; the ``n_points`` closest to the
    box centre are returned.
    """
    (x0, x1), (y0, y1) = box
    L = np.linalg.cholesky(np.asarray(cov, dtype=float))
    L = L / np.sqrt(np.linalg.det(L @ L.T)) ** 0.5  # unit-area whitening
    if shape == "hex":
        basis = np.array([[1.0, 0.5], [0.0, np.sqrt(3) / 2]])
    else:
        basis = np.eye(2)
    centre = np.array([(x0 + x1) / 2, (y0 + y1) / 2])

    def points_at(scale):
        B = scale * L @ basis
        span = max(x1 - x0, y1 - y0)
        # enough integer coordinates to cover the box
        kmax = int(np.ceil(2 * span / (scale * np.min(np.abs(np.linalg.eigvalsh(L @ L.T))) ** 0.5))) + 2
        k = np.arange(-kmax, kmax + 1)
        ij = np.array(np.meshgrid(k, k)).reshape(2, -1)
        p = centre[:, None] + B @ ij
        inside = (p[0] >= x0 - 1e-12) & (p[0] <= x1 + 1e-12) & (p[1] >= y0 - 1e-12) & (p[1] <= y1 + 1e-12)
        return p[:, inside].T

    lo, hi = 1e-6, max(x1 - x0, y1 - y0)
    for _ in range(100):
        mid = np.sqrt(lo * hi)
        if len(points_at(mid)) >= n_points:
            lo = mid
        else:
            hi = mid
    pts = points_at(lo)
    order = np.argsort(np.sum((pts - centre) ** 2, axis=1), kind="stable")
    return pts[np.sort(order[:n_points])]
