"""Kernel models: transition-density envelopes, exact laws, and tail bounds.

A KernelModel packages the comparability class of a symmetric transition
density p(t, x, y) together with an optional exact law.  Three envelope
forms are supported:

    stable-like      p ~ t^(-a/b) AND t / d^(a+b)            (jump kernels)
    sub-gaussian     p ~ t^(-a/b) exp(-c0 (d/t^(1/b))^(b/(b-1)))
    two-sided-jump   p ~ 1/V(phi^-1(t)) AND t/(V(d) phi(d))  (general V, phi)

Convention fixed across the package: the isotropic alpha-stable law has
characteristic function exp(-t |xi|^alpha).  Hence alpha = 2 is Gaussian
with per-coordinate variance 2t and heat kernel
(4 pi t)^(-d/2) exp(-|x-y|^2 / (4t)); alpha = 1 in one dimension is the
Cauchy law with density t / (pi (x^2 + t^2)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import integrate, special, stats

from .errors import PreconditionError, UnsupportedModelError
from .integral_tests import CONVERGENT, DIVERGENT, Verdict, classify_tail_integral
from .scaling import (
    DECREASING,
    INCREASING,
    UPPER_DECAY,
    Envelope,
    ScalingFunction,
    check_h_conditions,
    exp_decay,
    from_id as scaling_from_id,
    inverse,
    power,
)

STABLE_LIKE = "stable-like"
SUB_GAUSSIAN = "sub-gaussian"
TWO_SIDED_JUMP = "two-sided-jump"

LAW_GAUSSIAN = "gaussian"
LAW_CAUCHY = "cauchy1d"
LAW_STABLE = "stable-numeric"

TRANSIENT = "transient"
RECURRENT = "recurrent"
INCONCLUSIVE_CLASS = "inconclusive"

#: Lebesgue measure of the unit ball, used to convert between mu(B(x, r))
#: and the volume profile V(r) = r^dim for the Euclidean presets.
_UNIT_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


@dataclass(frozen=True)
class KernelModel:
    """Immutable heat-kernel specification.

    ``c_lo``/``c_hi`` are the declared comparability constants bracketing
    density/envelope; calibration sharpens them (see calibration module)
    without mutating the model.
    """

    model_id: str
    form: str
    V: ScalingFunction
    phi: ScalingFunction
    dim: Optional[int] = None
    exact_law: Optional[str] = None
    alpha: Optional[float] = None  # stable index of the exact law
    c0: Optional[float] = None     # sub-gaussian decay constant
    c_lo: float = 0.01
    c_hi: float = 100.0
    mu_ball: float = 1.0           # mu(B(x,1)) / V(1)

    # -- envelope exponents (from the verified scaling envelopes) ------

    @property
    def d1(self) -> float:
        return self.V.envelope.d_lo

    @property
    def d2(self) -> float:
        return self.V.envelope.d_hi

    @property
    def d3(self) -> float:
        return self.phi.envelope.d_lo

    @property
    def d4(self) -> float:
        return self.phi.envelope.d_hi

    def phi_inverse(self, t: float) -> float:
        return inverse(self.phi, t)

    @property
    def is_simulable(self) -> bool:
        return self.exact_law is not None

    @property
    def has_density(self) -> bool:
        if self.exact_law in (LAW_GAUSSIAN, LAW_CAUCHY):
            return True
        return self.exact_law == LAW_STABLE and self.dim in (1, 2, 3)

    def with_comparability(self, c_lo: float, c_hi: float) -> "KernelModel":
        return replace(self, c_lo=c_lo, c_hi=c_hi)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _stable_like(dv: float, dw: float, **kw) -> KernelModel:
    return KernelModel(
        form=STABLE_LIKE, V=power(dv), phi=power(dw), **kw
    )


def from_id(spec: str) -> KernelModel:
    """Model presets by string id.

    Grammar:
        cauchy1d                  1-d Cauchy law (stable-like dv=1, dw=1)
        gaussian:DIM              Brownian law (sub-gaussian dv=DIM, dw=2, c0=1/4)
        stable:ALPHA,DIM          isotropic stable law (stable-like dv=DIM, dw=ALPHA)
        stablelike:DV,DW          envelope only
        subgaussian:DV,DW,C0      envelope only
        jump:V_ID,PHI_ID          two-sided-jump envelope from scaling presets
    """
    head, _, tail = spec.partition(":")
    head = head.strip().lower()
    if head == "cauchy1d":
        return _stable_like(
            1.0, 1.0, model_id="cauchy1d", dim=1, exact_law=LAW_CAUCHY,
            alpha=1.0, c_lo=1.0 / (2.0 * math.pi), c_hi=1.0 / math.pi,
            mu_ball=_UNIT_BALL_VOLUME[1],
        )
    if head == "gaussian":
        dim = int(float(tail))
        if dim not in (1, 2, 3):
            raise UnsupportedModelError("gaussian presets support dim 1..3")
        c = (4.0 * math.pi) ** (-dim / 2.0)
        return KernelModel(
            model_id=f"gaussian:{dim}", form=SUB_GAUSSIAN, V=power(float(dim)),
            phi=power(2.0), dim=dim, exact_law=LAW_GAUSSIAN, alpha=2.0,
            c0=0.25, c_lo=c, c_hi=c, mu_ball=_UNIT_BALL_VOLUME[dim],
        )
    if head == "stable":
        a_s, d_s = tail.split(",")
        alpha, dim = float(a_s), int(float(d_s))
        if not 0 < alpha < 2:
            raise UnsupportedModelError("stable presets need 0 < alpha < 2")
        if dim < 1:
            raise UnsupportedModelError("stable presets need dim >= 1")
        return _stable_like(
            float(dim), alpha, model_id=f"stable:{alpha:g},{dim}", dim=dim,
            exact_law=LAW_STABLE, alpha=alpha,
            mu_ball=_UNIT_BALL_VOLUME.get(dim, 1.0),
        )
    if head == "stablelike":
        dv_s, dw_s = tail.split(",")
        dv, dw = float(dv_s), float(dw_s)
        return _stable_like(dv, dw, model_id=f"stablelike:{dv:g},{dw:g}")
    if head == "subgaussian":
        dv_s, dw_s, c0_s = tail.split(",")
        dv, dw, c0 = float(dv_s), float(dw_s), float(c0_s)
        if dw <= 1:
            raise UnsupportedModelError("sub-gaussian form needs dw > 1")
        return KernelModel(
            model_id=f"subgaussian:{dv:g},{dw:g},{c0:g}", form=SUB_GAUSSIAN,
            V=power(dv), phi=power(dw), c0=c0,
        )
    if head == "jump":
        # the two function ids may themselves contain commas
        v_id, _, phi_id = tail.partition(";")
        if not phi_id:
            raise ValueError("jump preset syntax is jump:V_ID;PHI_ID")
        V = scaling_from_id(v_id.strip())
        phi = scaling_from_id(phi_id.strip())
        if V.monotonicity != INCREASING or phi.monotonicity != INCREASING:
            raise PreconditionError("jump models need increasing V and phi")
        return KernelModel(
            model_id=f"jump:{v_id.strip()};{phi_id.strip()}",
            form=TWO_SIDED_JUMP, V=V, phi=phi,
        )
    raise ValueError(f"unknown kernel preset {spec!r}")


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------


def envelope_density(model: KernelModel, t: float, d: float) -> float:
    """Comparison-class representative of p(t, x, y) at distance d.

    Constants are folded to one; the true density sits inside
    [c_lo, c_hi] times this value.  d = 0 returns the on-diagonal branch.
    """
    if t <= 0:
        raise PreconditionError("t must be positive")
    if d < 0:
        raise PreconditionError("distance must be nonnegative")
    if model.form == STABLE_LIKE:
        a, b = model.V.envelope.d_lo, model.phi.envelope.d_lo
        on_diag = t ** (-a / b)
        if d == 0.0:
            return on_diag
        return min(on_diag, t * d ** -(a + b))
    if model.form == SUB_GAUSSIAN:
        a, b = model.V.envelope.d_lo, model.phi.envelope.d_lo
        on_diag = t ** (-a / b)
        if d == 0.0:
            return on_diag
        x = -model.c0 * (d / t ** (1.0 / b)) ** (b / (b - 1.0))
        return on_diag * (math.exp(x) if x > -745.0 else 0.0)
    # two-sided-jump
    on_diag = 1.0 / model.V(inverse(model.phi, t))
    if d == 0.0:
        return on_diag
    return min(on_diag, t / (model.V(d) * model.phi(d)))


def tail_profile(model: KernelModel) -> tuple[ScalingFunction, ScalingFunction]:
    """(h, rho) such that p(t,x,y) <~ h(d/rho(t)) / V(d) off-diagonal."""
    b = model.phi.envelope.d_lo
    rho = power(1.0 / b)
    if model.form == STABLE_LIKE:
        return power(-b), rho
    if model.form == SUB_GAUSSIAN:
        return exp_decay(model.c0, b / (b - 1.0)), rho
    raise UnsupportedModelError(
        "two-sided-jump models have no factored (h, rho) tail profile"
    )


# ---------------------------------------------------------------------------
# exact laws
# ---------------------------------------------------------------------------


def density(model: KernelModel, t: float, d: float) -> float:
    """Exact transition density at time t and distance d."""
    if t <= 0:
        raise PreconditionError("t must be positive")
    if model.exact_law == LAW_CAUCHY:
        return t / (math.pi * (d * d + t * t))
    if model.exact_law == LAW_GAUSSIAN:
        return (4.0 * math.pi * t) ** (-model.dim / 2.0) * math.exp(
            -d * d / (4.0 * t)
        )
    if model.exact_law == LAW_STABLE:
        if model.dim not in (1, 2, 3):
            raise UnsupportedModelError(
                "radial inversion of the stable density supports dim 1..3"
            )
        if d > _FOURIER_REACH * t ** (1.0 / model.alpha):
            return _stable_density_subordination(model.alpha, model.dim, t, d)
        return _stable_density_radial(model.alpha, model.dim, t, d)
    raise UnsupportedModelError(f"{model.model_id} carries no exact law")


def radial_cdf(model: KernelModel, t: float, r: float) -> float:
    """P(d(X_t, x) <= r) under the exact law."""
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    if r == 0.0:
        return 0.0
    if model.exact_law == LAW_CAUCHY:
        return (2.0 / math.pi) * math.atan(r / t)
    if model.exact_law == LAW_GAUSSIAN:
        return float(stats.chi2.cdf(r * r / (2.0 * t), df=model.dim))
    if model.exact_law == LAW_STABLE:
        if model.dim not in (1, 2, 3):
            raise UnsupportedModelError(
                "radial inversion of the stable law supports dim 1..3"
            )
        if r > _FOURIER_REACH * t ** (1.0 / model.alpha):
            return 1.0 - _stable_sf_subordination(model.alpha, model.dim, t, r)
        return _stable_ball_radial(model.alpha, model.dim, t, r)
    raise UnsupportedModelError(f"{model.model_id} carries no exact law")


def radial_sf(model: KernelModel, t: float, r: float) -> float:
    """P(d(X_t, x) > r); complementary to radial_cdf, accurate at large r."""
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    if r == 0.0:
        return 1.0
    if model.exact_law == LAW_CAUCHY:
        return (2.0 / math.pi) * math.atan(t / r)
    if model.exact_law == LAW_GAUSSIAN:
        return float(stats.chi2.sf(r * r / (2.0 * t), df=model.dim))
    if model.exact_law == LAW_STABLE:
        if model.dim not in (1, 2, 3):
            raise UnsupportedModelError(
                "radial inversion of the stable law supports dim 1..3"
            )
        if r > _FOURIER_REACH * t ** (1.0 / model.alpha):
            return _stable_sf_subordination(model.alpha, model.dim, t, r)
        return 1.0 - _stable_ball_radial(model.alpha, model.dim, t, r)
    raise UnsupportedModelError(f"{model.model_id} carries no exact law")


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, **kw)
    return val


# -- one-sided stable subordinator density ----------------------------------
#
# S with Laplace transform exp(-lambda^gamma), 0 < gamma < 1.  Two regimes:
# a Zolotarev-type integral (positive integrand, Gauss-Legendre) for small
# and moderate arguments, and the convergent tail series beyond.

_GL_U, _GL_W = np.polynomial.legendre.leggauss(384)
_ETA_SERIES_FROM = 4.0
_ETA_SERIES_TERMS = 22


def _kanter_a(u: np.ndarray, gamma: float) -> np.ndarray:
    g1 = 1.0 - gamma
    return np.exp(
        (gamma * np.log(np.sin(gamma * u))
         + g1 * np.log(np.sin(g1 * u))
         - np.log(np.sin(u))) / g1
    )


def _eta1(gamma: float, w: float) -> float:
    """Density at w of the standard positive gamma-stable law."""
    if w <= 0:
        return 0.0
    if w >= _ETA_SERIES_FROM:
        # tail series sum_k (-1)^(k+1) Gamma(k g + 1)/k! sin(pi k g) w^(-k g - 1) / pi
        acc, sign, fact = 0.0, 1.0, 1.0
        for k in range(1, _ETA_SERIES_TERMS):
            fact *= k
            term = (
                special.gamma(k * gamma + 1.0)
                / fact
                * math.sin(math.pi * k * gamma)
                * w ** (-k * gamma - 1.0)
            )
            acc += sign * term
            sign = -sign
        return acc / math.pi
    g1 = 1.0 - gamma
    c = w ** (-gamma / g1)
    u = 0.5 * math.pi * (_GL_U + 1.0)
    a = _kanter_a(u, gamma)
    vals = a * np.exp(-a * c)
    integral = 0.5 * math.pi * float(np.dot(_GL_W, vals))
    return (gamma / g1) * w ** (-1.0 / g1) * integral / math.pi


def _log_window_quad(f, center: float) -> float:
    """Integrate f over [center-40, center+40] with knots near the peak.

    A single adaptive pass over the whole window can settle on the flat
    flanks and miss the concentrated peak entirely, so the region near the
    center is integrated in short segments.
    """
    knots = [
        center - 40.0, center - 6.0, center - 3.0, center - 1.0,
        center + 1.0, center + 3.0, center + 6.0, center + 40.0,
    ]
    return sum(_quad(f, a, b, limit=200) for a, b in zip(knots, knots[1:]))


def _stable_density_subordination(alpha: float, dim: int, t: float, r: float) -> float:
    """p_t(r) = int (4 pi v)^(-d/2) exp(-r^2/4v) eta_t(v) dv (far-tail safe)."""
    gamma = 0.5 * alpha
    scale = t ** (1.0 / gamma)

    def f(x: float) -> float:
        v = math.exp(x)
        gauss = (4.0 * math.pi * v) ** (-dim / 2.0) * math.exp(-r * r / (4.0 * v))
        return gauss * _eta1(gamma, v / scale) / scale * v

    return _log_window_quad(f, math.log(max(r * r / (2.0 * dim), scale)))


def _stable_sf_subordination(alpha: float, dim: int, t: float, r: float) -> float:
    """P(|X_t| > r) through the subordination mixture (positive integrand)."""
    gamma = 0.5 * alpha
    scale = t ** (1.0 / gamma)

    def f(x: float) -> float:
        v = math.exp(x)
        sf = float(stats.chi2.sf(r * r / (2.0 * v), df=dim))
        return sf * _eta1(gamma, v / scale) / scale * v

    center = math.log(max(r * r / (2.0 * dim), scale))
    return min(max(_log_window_quad(f, center), 0.0), 1.0)


#: beyond this many envelope lengths the Fourier inversion cancels badly
#: and the subordination route takes over
_FOURIER_REACH = 3.0


def _stable_density_radial(alpha: float, dim: int, t: float, r: float) -> float:
    """Fourier inversion of exp(-t s^alpha), radial part, dim 1..3."""
    decay = lambda s: math.exp(-t * s**alpha)
    if r == 0.0:
        # closed forms of int s^(dim-1) e^(-t s^alpha) ds
        g = special.gamma(dim / alpha) / (alpha * t ** (dim / alpha))
        if dim == 1:
            return g / math.pi
        if dim == 2:
            return g / (2.0 * math.pi)
        return g / (2.0 * math.pi**2)
    if dim == 1:
        val = _quad(decay, 0, np.inf, weight="cos", wvar=r, limit=400)
        return val / math.pi
    if dim == 2:
        f = lambda s: s * special.j0(r * s) * decay(s)
        s_max = (745.0 / t) ** (1.0 / alpha)
        return _quad(f, 0, s_max, limit=2000) / (2.0 * math.pi)
    f3 = lambda s: s * decay(s)
    val = _quad(f3, 0, np.inf, weight="sin", wvar=r, limit=400)
    return val / (2.0 * math.pi**2 * r)


def _stable_ball_radial(alpha: float, dim: int, t: float, r: float) -> float:
    """P(|X_t| <= r) by Fourier inversion of the ball indicator."""
    decay = lambda s: math.exp(-t * s**alpha)
    s0 = min(1.0, 1.0 / r)  # keep the unweighted head free of oscillation
    if dim == 1:
        # (2/pi) int sin(rs)/s e^(-t s^alpha) ds
        head = _quad(lambda s: math.sin(r * s) / s * decay(s) if s > 0 else r, 0, s0)
        tail = _quad(lambda s: decay(s) / s, s0, np.inf, weight="sin", wvar=r, limit=400)
        return min(max((head + tail) * 2.0 / math.pi, 0.0), 1.0)
    if dim == 2:
        # r int J1(rs) e^(-t s^alpha) ds
        s_max = (745.0 / t) ** (1.0 / alpha)
        val = r * _quad(lambda s: special.j1(r * s) * decay(s), 0, s_max, limit=2000)
        return min(max(val, 0.0), 1.0)
    # (2/pi) int (sin(rs) - rs cos(rs)) / s e^(-t s^alpha) ds
    head = _quad(
        lambda s: (math.sin(r * s) - r * s * math.cos(r * s)) / s * decay(s)
        if s > 0
        else 0.0,
        0,
        s0,
    )
    tail_sin = _quad(lambda s: decay(s) / s, s0, np.inf, weight="sin", wvar=r, limit=400)
    tail_cos = _quad(decay, s0, np.inf, weight="cos", wvar=r, limit=400)
    val = (head + tail_sin - r * tail_cos) * 2.0 / math.pi
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# probability operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailEstimate:
    estimate: float
    upper_bound: float
    c1: float


def tail_constant(model: KernelModel) -> float:
    """Tail-bound constant from the annulus summation.

    Summing the off-diagonal envelope over annuli theta^k r <= d < theta^(k+1) r
    gives P(d(X_t, x) >= r) <= c1 h(r / rho(t)) with

        c1 = max(1/h(1),  C_hi * mu_ball * sup_r V(theta r)/V(r) / (1 - c0))

    where (theta, c0) witness the geometric decay of h.
    """
    h, _rho = tail_profile(model)
    rep = check_h_conditions(h, UPPER_DECAY, grid=np.geomspace(1.0 + 1e-9, 1e4, 64))
    if not rep.ok:
        raise UnsupportedModelError(f"{model.model_id}: no geometric tail decay found")
    theta, c0 = rep.theta, rep.c0
    grid = model.V.grid()
    c_v = max(model.V(theta * r) / model.V(r) for r in grid)
    return max(1.0 / h(1.0), model.c_hi * model.mu_ball * c_v / (1.0 - c0))


def tail_probability(
    model: KernelModel, t: float, r: float, c1: Optional[float] = None
) -> TailEstimate:
    """Exceedance probability P(d(X_t, x) >= r) with its theoretical bound.

    The estimate comes from the exact law when the model has one, otherwise
    from the midpoint of the envelope annulus integral.  The bound holds for
    t >= 1 (the large-time envelope regime).
    """
    if t < 1.0:
        raise PreconditionError("the tail bound is asserted for t >= 1")
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    h, rho = tail_profile(model)
    if c1 is None:
        c1 = tail_constant(model)
    bound = c1 * h(max(r, 1e-300) / rho(t)) if r > 0 else c1 * math.inf
    if r == 0.0:
        return TailEstimate(estimate=1.0, upper_bound=math.inf, c1=c1)
    if model.has_density:
        est = radial_sf(model, t, r)
    else:
        est = _envelope_tail_midpoint(model, t, r)
    return TailEstimate(estimate=est, upper_bound=bound, c1=c1)


def _envelope_tail_midpoint(model: KernelModel, t: float, r: float) -> float:
    """Midpoint of the envelope bracket for the tail mass beyond r."""

    def integrand(s: float) -> float:
        # d(mu)(s) ~ mu_ball * dV(s); integrate in log s
        dv = model.V.envelope.d_hi
        return envelope_density(model, t, s) * model.mu_ball * dv * model.V(s)

    lo = math.log(r)
    hi = math.log(max(10.0 * r, 10.0 * inverse(model.phi, t))) + 40.0
    val = _quad(lambda u: integrand(math.exp(u)), lo, hi, limit=400)
    mid = 0.5 * (model.c_lo + model.c_hi) * val
    return min(max(mid, 0.0), 1.0)


@dataclass(frozen=True)
class BallProbability:
    probability: Optional[float]
    envelope: float


def ball_probability(model: KernelModel, t: float, r: float) -> BallProbability:
    """P(d(X_t, x) <= r) and its envelope 1 AND V(r)/V(phi^-1(t))."""
    if t <= 0 or r <= 0:
        raise PreconditionError("t and r must be positive")
    if model.V is None and not model.has_density:  # pragma: no cover - defensive
        raise UnsupportedModelError("model lacks both a volume profile and a law")
    env = min(1.0, model.V(r) / model.V(inverse(model.phi, t)))
    prob = radial_cdf(model, t, r) if model.has_density else None
    return BallProbability(probability=prob, envelope=env)


def classify_long_run(model: KernelModel) -> tuple[str, Verdict]:
    """Transience/recurrence from the on-diagonal decay integral.

    Convergence of int dt / V(phi^-1(t)) certifies transience (the
    sup-density criterion); divergence certifies recurrence for the whole
    comparability class.  The classifier may abstain.
    """

    def f(t: float) -> float:
        return 1.0 / model.V(inverse(model.phi, t))

    verdict = classify_tail_integral(f, 16.0)
    if verdict.label == CONVERGENT:
        return TRANSIENT, verdict
    if verdict.label == DIVERGENT:
        return RECURRENT, verdict
    return INCONCLUSIVE_CLASS, verdict


@dataclass(frozen=True)
class CompHeatReport:
    ratio: float
    k_bound: float

    @property
    def ok(self) -> bool:
        return (1.0 - 1e-9) / self.k_bound <= self.ratio <= self.k_bound * (1.0 + 1e-9)


def comp_heat_bound(model: KernelModel) -> float:
    """Uniform contract constant K for polynomial-envelope models.

    Valid for stable-like and two-sided-jump forms, where doubling the
    off-diagonal distance moves the envelope by at most a constant; the
    sub-gaussian envelope has no uniform constant (its comparison contract
    depends on the configuration, see comp_heat_check).
    """
    if model.form == SUB_GAUSSIAN:
        raise UnsupportedModelError(
            "sub-gaussian envelopes admit no uniform comparison constant"
        )
    env_v, env_p = model.V.envelope, model.phi.envelope
    move = env_v.c_hi * 2.0**env_v.d_hi * env_p.c_hi * 2.0**env_p.d_hi
    return (model.c_hi / model.c_lo) * move


def comp_heat_check(model: KernelModel, t: float, x, y, z) -> CompHeatReport:
    """Ratio p(t,x,z) / p(t,y,z) for nearby x, y.

    Requires d(x, y) <= phi^-1(t).  For polynomial envelopes (stable-like,
    two-sided-jump) the contract constant is uniform in the configuration;
    for sub-gaussian envelopes it carries the exponential displacement
    factor exp(c0 |w_x^gamma - w_y^gamma|), w_p = d(p, z)/t^(1/b).
    """
    if not model.has_density:
        raise UnsupportedModelError("comp-heat check needs an exact law")
    x, y, z = (np.atleast_1d(np.asarray(p, dtype=float)) for p in (x, y, z))
    dxy = float(np.linalg.norm(x - y))
    thr = inverse(model.phi, t)
    if dxy > thr:
        raise PreconditionError(
            f"d(x,y)={dxy:g} exceeds phi^-1(t)={thr:g}; no comparison contract"
        )
    dxz = float(np.linalg.norm(x - z))
    dyz = float(np.linalg.norm(y - z))
    num = density(model, t, dxz)
    den = density(model, t, dyz)
    if model.form == SUB_GAUSSIAN:
        b = model.phi.envelope.d_lo
        gamma = b / (b - 1.0)
        wx = dxz / t ** (1.0 / b)
        wy = dyz / t ** (1.0 / b)
        k = (model.c_hi / model.c_lo) * math.exp(
            model.c0 * abs(wx**gamma - wy**gamma)
        )
    else:
        k = comp_heat_bound(model)
    return CompHeatReport(ratio=num / den, k_bound=k)


def comparability_sweep(
    model: KernelModel,
    t_grid=None,
    n_dist: int = 24,
    d_max_factor: float = 10.0,
) -> tuple[float, float]:
    """Measure density/envelope bounds over a (t, d) grid.

    Returns (min_ratio, max_ratio); these are the calibrated (C_lo, C_hi)
    for exact-law presets.
    """
    if not model.has_density:
        raise UnsupportedModelError("comparability sweep needs an exact law")
    if t_grid is None:
        t_grid = np.geomspace(1.0, 1e3, 7)
    lo, hi = math.inf, -math.inf
    for t in t_grid:
        reach = d_max_factor * inverse(model.phi, float(t))
        for d in np.concatenate([[0.0], np.geomspace(1e-3 * reach, reach, n_dist)]):
            ratio = density(model, float(t), float(d)) / envelope_density(
                model, float(t), float(d)
            )
            lo, hi = min(lo, ratio), max(hi, ratio)
    return lo, hi
