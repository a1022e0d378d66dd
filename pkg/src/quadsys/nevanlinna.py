"""Monte-Carlo proximity function, characteristic and growth order of entire expressions.

For entire f the counting function of poles vanishes, so T(r, f) = m(r, f), the
sphere average of log+ |f|.  Averages use the unitarily invariant probability
measure on the sphere |z| = r, realised by normalising 2n real Gaussians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import DegenerateFit

DEFAULT_POINTS = 4096
BOOTSTRAP_ROUNDS = 200


@dataclass(frozen=True)
class SphereSampler:
    dim: int
    radius: float
    samples: int = DEFAULT_POINTS
    seed: int = 0
    radius_index: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.samples < 1:
            raise ValueError("dimension and sample count must be positive")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def points(self) -> np.ndarray:
        rng = np.random.default_rng([self.seed, self.radius_index])
        g = rng.standard_normal((self.samples, 2 * self.dim))
        z = g[:, : self.dim] + 1j * g[:, self.dim:]
        return self.radius * z / np.linalg.norm(z, axis=1, keepdims=True)


def _require_entire(e: ex.Expr) -> None:
    if ex.contains_quotient(e):
        raise ValueError("only entire expressions (no quotients) are supported")


def log_plus_values(e: ex.Expr, sampler: SphereSampler) -> np.ndarray:
    """log+ |e| at each sphere point."""
    _require_entire(e)
    if e.dim != sampler.dim:
        raise ValueError("expression and sampler disagree on dimension")
    return np.maximum(0.0, np.atleast_1d(ex.eval_log_magnitude(e, sampler.points())))


def proximity(e: ex.Expr, sampler: SphereSampler) -> float:
    return float(np.mean(log_plus_values(e, sampler)))


def characteristic(e: ex.Expr, sampler: SphereSampler) -> float:
    """T(r, f) = m(r, f): entire expressions have no poles."""
    return proximity(e, sampler)


def characteristic_with_error(e: ex.Expr, sampler: SphereSampler) -> tuple[float, float]:
    """T(r, f) and the standard error of its Monte-Carlo mean."""
    v = log_plus_values(e, sampler)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else 0.0


@dataclass(frozen=True)
class OrderEstimate:
    radii: tuple[float, ...]
    T_values: tuple[float, ...]
    slope: float
    intercept: float
    fit_residual: float
    std_error: float

    def plot_rows(self) -> list[tuple[float, float]]:
        """(ln r, ln T) pairs for external plotting."""
        return [(float(np.log(r)), float(np.log(t))) for r, t in zip(self.radii, self.T_values)]

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "T_values": list(self.T_values), "order": self.slope,
                "intercept": self.intercept, "fit_residual": self.fit_residual,
                "std_error": self.std_error}


def _fit(log_r: np.ndarray, T: np.ndarray) -> tuple[float, float, float]:
    if np.any(T <= 0):
        raise DegenerateFit("a characteristic estimate is not positive; log T is undefined")
    y = np.log(T)
    A = np.stack([log_r, np.ones_like(log_r)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.linalg.norm(A @ np.array([slope, intercept]) - y))
    return float(slope), float(intercept), resid


def estimate_order(e: ex.Expr, radii, samples: int = DEFAULT_POINTS, seed: int = 0,
                   bootstrap: int = BOOTSTRAP_ROUNDS, min_radii: int = 4) -> OrderEstimate:
    """Least-squares slope of ln T(r) against ln r.

    The standard error resamples the per-point log+ values at every radius.
    """
    radii = [float(r) for r in radii]
    if len(radii) < min_radii:
        raise ValueError(f"at least {min_radii} radii are required")
    if any(r <= 1 for r in radii):
        raise ValueError("radii must exceed 1")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    values = [log_plus_values(e, SphereSampler(e.dim, r, samples, seed, i)) for i, r in enumerate(radii)]
    T = np.array([v.mean() for v in values])
    log_r = np.log(radii)
    slope, intercept, resid = _fit(log_r, T)

    rng = np.random.default_rng([seed, len(radii), 1])
    boot = []
    for _ in range(bootstrap):
        Tb = np.array([v[rng.integers(0, len(v), len(v))].mean() for v in values])
        if np.all(Tb > 0):
            boot.append(_fit(log_r, Tb)[0])
    se = float(np.std(boot, ddof=1)) if len(boot) > 1 else float("nan")
    return OrderEstimate(tuple(radii), tuple(float(t) for t in T), slope, intercept, resid, se)


@dataclass(frozen=True)
class PairOrder:
    f1: OrderEstimate
    f2: OrderEstimate

    @property
    def order(self) -> float:
        """The order of a pair is taken as the larger of the two orders."""
        return max(self.f1.slope, self.f2.slope)

    def to_dict(self) -> dict:
        return {"f1": self.f1.to_dict(), "f2": self.f2.to_dict(), "order": self.order}


def estimate_pair_order(e1: ex.Expr, e2: ex.Expr, radii, samples: int = DEFAULT_POINTS,
                        seed: int = 0, **kw) -> PairOrder:
    return PairOrder(estimate_order(e1, radii, samples, seed, **kw),
                     estimate_order(e2, radii, samples, seed, **kw))
