"""Exact-increment path sampling for the simulable kernel presets.

Increments over a step of length dt are drawn exactly from the law at time
dt, so there is no discretization error in the marginals:

  * Gaussian: sqrt(2 dt) * Z per coordinate (variance-2t convention);
  * symmetric 1-d alpha-stable: Chambers-Mallows-Stuck transform, scaled
    by dt^(1/alpha);
  * isotropic d-dim alpha-stable: a positive (alpha/2)-stable subordinator
    increment (Kanter representation), then a Gaussian at that random time.

The only discretization artifact is the time grid itself: window extrema
over grid points overestimate path infima and underestimate path suprema
for jump processes.  Consumers account for that directionally.

Randomness comes from numpy's counter-based Philox generator; replica r of
an experiment with master seed s uses key s XOR r, so replicas are
independent, order-free, and individually regenerable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionError, UnsupportedModelError
from .kernels import LAW_CAUCHY, LAW_GAUSSIAN, LAW_STABLE, KernelModel


@dataclass(frozen=True)
class UniformGrid:
    dt: float

    def times(self, horizon: float) -> np.ndarray:
        if self.dt <= 0 or horizon <= 0:
            raise PreconditionError("dt and horizon must be positive")
        n = int(math.floor(horizon / self.dt + 1e-9))
        ts = self.dt * np.arange(n + 1)
        if ts[-1] < horizon - 1e-12 * horizon:
            ts = np.append(ts, horizon)
        return ts

    @property
    def label(self) -> str:
        return f"uniform:{self.dt:g}"


@dataclass(frozen=True)
class DyadicBlocks:
    """per_block equal steps inside each [base^n, base^(n+1)] block.

    The warm-up interval [0, 1] gets per_block equal steps as well, so a
    horizon of base^N yields roughly (N+1) * per_block grid points laid out
    to match the dyadic-window structure of the block-event arguments.
    """

    base: float = 2.0
    per_block: int = 256

    def times(self, horizon: float) -> np.ndarray:
        if self.base <= 1 or self.per_block < 1:
            raise PreconditionError("base must exceed 1 and per_block be >= 1")
        if horizon <= 0:
            raise PreconditionError("horizon must be positive")
        pieces = [np.linspace(0.0, min(1.0, horizon), self.per_block + 1)]
        lo = 1.0
        while lo < horizon:
            hi = min(lo * self.base, horizon)
            pieces.append(np.linspace(lo, hi, self.per_block + 1)[1:])
            lo *= self.base
        ts = np.concatenate(pieces)
        return np.unique(ts)

    @property
    def label(self) -> str:
        return f"dyadic:{self.base:g}:{self.per_block}"


def scheme_from_id(spec: str):
    """Parse scheme ids: "uniform:DT" or "dyadic:PER_BLOCK[:BASE]"."""
    head, _, tail = spec.partition(":")
    head = head.strip().lower()
    if head == "uniform":
        return UniformGrid(dt=float(tail))
    if head == "dyadic":
        parts = tail.split(":") if tail else []
        per_block = int(parts[0]) if parts and parts[0] else 256
        base = float(parts[1]) if len(parts) > 1 else 2.0
        return DyadicBlocks(base=base, per_block=per_block)
    raise ValueError(f"unknown scheme {spec!r}")


@dataclass(frozen=True)
class PathSkeleton:
    """A sampled trajectory on a deterministic time grid."""

    times: np.ndarray
    positions: np.ndarray  # shape (len(times), dim)
    seed: int
    model_id: str
    scheme_label: str

    def __post_init__(self):
        if self.times.shape[0] != self.positions.shape[0]:
            raise PreconditionError("times and positions must align")
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise PreconditionError("times must strictly increase from 0")

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Counter-based generator for one replica (key = seed XOR replica)."""
    return np.random.Generator(np.random.Philox(key=seed ^ replica))


# ---------------------------------------------------------------------------
# exact increment draws
# ---------------------------------------------------------------------------


def symmetric_stable(rng: np.random.Generator, alpha: float, size) -> np.ndarray:
    """Standard symmetric alpha-stable draws, char. function exp(-|xi|^alpha).

    Chambers-Mallows-Stuck transform; alpha = 1 reduces to tan(U) (Cauchy)
    and alpha = 2 to a centered normal with variance 2.
    """
    if not 0 < alpha <= 2:
        raise PreconditionError("alpha must lie in (0, 2]")
    u = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    if alpha == 1.0:
        return np.tan(u)
    w = rng.exponential(1.0, size)
    return (
        np.sin(alpha * u)
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    )


def positive_stable(rng: np.random.Generator, gamma: float, size) -> np.ndarray:
    """One-sided gamma-stable draws with Laplace transform exp(-lambda^gamma).

    Kanter representation; non-finite transforms (underflow at the interval
    endpoints) are redrawn.
    """
    if not 0 < gamma < 1:
        raise PreconditionError("gamma must lie in (0, 1)")
    g1 = 1.0 - gamma
    out = np.empty(size)
    flat = out.reshape(-1)
    need = np.ones(flat.shape[0], dtype=bool)
    while need.any():
        n = int(need.sum())
        u = rng.uniform(0.0, math.pi, n)
        w = rng.exponential(1.0, n)
        with np.errstate(all="ignore"):
            a = (np.sin(gamma * u) / np.sin(u) ** (1.0 / gamma)) * (
                np.sin(g1 * u) / w
            ) ** (g1 / gamma)
        good = np.isfinite(a) & (a > 0)
        idx = np.flatnonzero(need)[good]
        flat[idx] = a[good]
        need[idx] = False
    return out


def sample_increments(
    model: KernelModel, dts: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Exact increments for consecutive steps of lengths dts; shape (m, dim)."""
    if not model.is_simulable:
        raise UnsupportedModelError(f"{model.model_id} has no exact law to sample")
    m = dts.shape[0]
    dim = model.dim
    if model.exact_law == LAW_GAUSSIAN:
        return np.sqrt(2.0 * dts)[:, None] * rng.standard_normal((m, dim))
    if model.exact_law == LAW_CAUCHY:
        return (dts * symmetric_stable(rng, 1.0, m))[:, None]
    if model.exact_law == LAW_STABLE:
        alpha = model.alpha
        if dim == 1:
            return (dts ** (1.0 / alpha) * symmetric_stable(rng, alpha, m))[:, None]
        if alpha == 2.0:
            return np.sqrt(2.0 * dts)[:, None] * rng.standard_normal((m, dim))
        # subordinate Brownian motion at the (alpha/2)-stable time change
        s = dts ** (2.0 / alpha) * positive_stable(rng, 0.5 * alpha, m)
        return np.sqrt(2.0 * s)[:, None] * rng.standard_normal((m, dim))
    raise UnsupportedModelError(f"unknown exact law {model.exact_law!r}")


def sample_path(
    model: KernelModel,
    horizon: float,
    scheme,
    seed: int,
    replica: int = 0,
    start: Optional[np.ndarray] = None,
) -> PathSkeleton:
    """Sample one trajectory; identical arguments reproduce it bit-for-bit."""
    times = scheme.times(horizon)
    rng = replica_rng(seed, replica)
    incs = sample_increments(model, np.diff(times), rng)
    positions = np.vstack([np.zeros((1, model.dim)), np.cumsum(incs, axis=0)])
    if start is not None:
        positions = positions + np.asarray(start, dtype=float)[None, :]
    return PathSkeleton(
        times=times,
        positions=positions,
        seed=seed ^ replica,
        model_id=model.model_id,
        scheme_label=scheme.label,
    )


# ---------------------------------------------------------------------------
# path functionals
# ---------------------------------------------------------------------------


def _window_mask(path: PathSkeleton, a: float, b: float, include_left: bool) -> np.ndarray:
    if a > b:
        raise PreconditionError("window must satisfy a <= b")
    if a < 0 or b > path.horizon * (1 + 1e-12):
        raise PreconditionError("window must lie inside [0, horizon]")
    t = path.times
    mask = (t >= a) & (t <= b) if include_left else (t > a) & (t <= b)
    if not mask.any():
        raise PreconditionError(f"no grid points inside window ({a:g}, {b:g}]")
    return mask


def window_min_distance(
    path: PathSkeleton, origin, a: float, b: float, include_left: bool = True
) -> float:
    """Minimum over grid times in the window of d(X_t, origin).

    Overestimates the continuous-time infimum for jump processes: the grid
    can miss the deepest excursion.
    """
    mask = _window_mask(path, a, b, include_left)
    d = np.linalg.norm(path.positions[mask] - np.asarray(origin, dtype=float), axis=1)
    return float(d.min())


def window_max_distance(
    path: PathSkeleton, origin, a: float, b: float, include_left: bool = True
) -> float:
    """Maximum over grid times in the window; underestimates the true sup."""
    mask = _window_mask(path, a, b, include_left)
    d = np.linalg.norm(path.positions[mask] - np.asarray(origin, dtype=float), axis=1)
    return float(d.max())


def first_hit_time(path: PathSkeleton, center, r: float) -> Optional[float]:
    """First grid time t > 0 with d(X_t, center) <= r, or None."""
    if r <= 0:
        raise PreconditionError("radius must be positive")
    d = np.linalg.norm(path.positions - np.asarray(center, dtype=float), axis=1)
    hits = np.flatnonzero((d <= r) & (path.times > 0.0))
    if hits.size == 0:
        return None
    return float(path.times[hits[0]])
