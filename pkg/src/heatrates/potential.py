"""Green function, capacity, hitting and occupation bounds in closed form.

Every operation evaluates a bound *shape* determined by the volume profile
V and the walk scale phi, times constants resolved from a calibration
table.  With no table the constants default to 1 ("unit" mode), which
preserves all shapes, orderings and scalings but not absolute levels.

Transient-case shapes (volume exponent strictly above the walk exponent):

    green function      u(d)        ~ phi(d) / V(d)
    ball capacity       Cap(B_r)    >~ V(r) / phi(r)
    hit ball ever       P(hit B(x0,r) from distance D)
                                    ~ (V(r)/phi(r)) * phi(D +- r)/V(D +- r)
    late visit          Q(x, r, t)  ~ (V(r)/phi(r)) * t / V(phi^-1(t))

Critical-case (all four exponents equal) occupation sandwich for the
probability of approaching the start point within r during (a, b].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, PreconditionError, UnsupportedRegimeError
from .kernels import (
    TRANSIENT,
    KernelModel,
    classify_long_run,
    density,
)
from .scaling import inverse

UNIT = "unit"
CALIBRATED = "calibrated"
DERIVED = "derived"


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float
    formula_id: str
    constants_source: str

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise PreconditionError(f"{self.formula_id}: non-finite bound")
        if self.lower < 0 or self.lower > self.upper * (1 + 1e-12):
            raise PreconditionError(
                f"{self.formula_id}: bounds out of order ({self.lower}, {self.upper})"
            )

    @property
    def center(self) -> float:
        return math.sqrt(self.lower * self.upper) if self.lower > 0 else 0.5 * self.upper

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


_classification_cache: dict[str, str] = {}


def _require_transient(model: KernelModel) -> None:
    label = _classification_cache.get(model.model_id)
    if label is None:
        label = classify_long_run(model)[0]
        _classification_cache[model.model_id] = label
    if label != TRANSIENT:
        raise DomainError(
            f"{model.model_id} is {label}: Green function infinite"
        )


def _constants(table, model_id: str, key: str) -> tuple[float, float, str]:
    if table is not None:
        lo = table.get(model_id, f"{key}_lo")
        hi = table.get(model_id, f"{key}_hi")
        if lo is not None and hi is not None:
            return float(lo), float(hi), CALIBRATED
    return 1.0, 1.0, UNIT


# ---------------------------------------------------------------------------
# green function
# ---------------------------------------------------------------------------

ENVELOPE = "envelope"
QUADRATURE = "quadrature"


def _envelope_time_integral(model: KernelModel, d: float) -> float:
    """Exact time integral of the two-sided envelope at distance d.

    int_0^phi(d) t/(V(d) phi(d)) dt + int_phi(d)^inf dt/V(phi^-1(t));
    the tail is integrated numerically and extended by its power-law decay.
    """
    t_star = model.phi(d)
    head = t_star / (2.0 * model.V(d))
    ratio = model.d1 / model.d4
    t_big = t_star * 1e9

    from scipy import integrate as _integrate

    body, _ = _integrate.quad(
        lambda u: math.exp(u) / model.V(inverse(model.phi, math.exp(u))),
        math.log(t_star),
        math.log(t_big),
        limit=200,
    )
    tail = t_big / (model.V(inverse(model.phi, t_big)) * (ratio - 1.0))
    return head + body + tail


def green_function(
    model: KernelModel,
    d: float,
    mode: str = ENVELOPE,
    table=None,
):
    """Time-integrated transition density at distance d.

    ENVELOPE mode returns a BoundPair around the shape phi(d)/V(d);
    QUADRATURE mode (exact-law models) integrates the density numerically
    with the tail beyond 1e4 * phi(2d) supplied by on-diagonal power decay.
    Requires a transient model.
    """
    if d <= 0:
        raise PreconditionError("distance must be positive")
    _require_transient(model)
    if mode == ENVELOPE:
        center = model.phi(d) / model.V(d)
        lo, hi, source = _constants(table, model.model_id, "green")
        if source == UNIT:
            # rigorous fallback: exact envelope integral times the declared
            # comparability constants
            a_val = _envelope_time_integral(model, d)
            return BoundPair(
                lower=model.c_lo * a_val,
                upper=model.c_hi * a_val,
                formula_id="green-envelope",
                constants_source=DERIVED,
            )
        return BoundPair(
            lower=lo * center,
            upper=hi * center,
            formula_id="green-envelope",
            constants_source=source,
        )
    if mode == QUADRATURE:
        if not model.has_density:
            raise UnsupportedRegimeError("quadrature mode needs an exact law")
        from scipy import integrate as _integrate

        t_big = 1e4 * max(model.phi(2.0 * d), 1.0)
        center = math.log(model.phi(d))
        knots = [center + o for o in (-35.0, -6.0, -3.0, -1.0, 1.0, 3.0, 6.0)]
        knots.append(math.log(t_big))
        body = sum(
            _integrate.quad(
                lambda u: math.exp(u) * density(model, math.exp(u), d),
                a,
                b,
                limit=200,
            )[0]
            for a, b in zip(knots, knots[1:])
            if b > a
        )
        # on-diagonal tail: density(t, d) ~ density(t, 0) = psi0 t^(-dim/alpha)
        p = model.dim / model.alpha
        psi0 = density(model, 1.0, 0.0)
        tail = psi0 * t_big ** (1.0 - p) / (p - 1.0)
        return body + tail
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# capacity and hitting
# ---------------------------------------------------------------------------


def capacity_bound(model: KernelModel, r: float, table=None) -> BoundPair:
    """Two-sided capacity bound c * V(r)/phi(r) for the closed ball B(x0, r).

    The headline guarantee is the lower member; the matching upper member
    carries the same shape with its own constant.
    """
    if r <= 0:
        raise PreconditionError("radius must be positive")
    _require_transient(model)
    shape = model.V(r) / model.phi(r)
    lo, hi, source = _constants(table, model.model_id, "cap")
    return BoundPair(lo * shape, hi * shape, "capacity", source)


def capacity_lower_bound(model: KernelModel, r: float, table=None) -> float:
    return capacity_bound(model, r, table).lower


def hit_ball_from_distance(
    model: KernelModel, r: float, D: float, table=None
) -> BoundPair:
    """Probability of ever entering B(x0, r) from a start at distance D >= r.

    lower ~ (V(r)/phi(r)) * phi(D+r)/V(D+r),
    upper ~ (V(r)/phi(r)) * phi(D-r)/V(D-r); at D = r the upper argument is
    clamped to the walk scale's domain floor (the lower side already uses
    the 2r argument).
    """
    if r <= 0:
        raise PreconditionError("radius must be positive")
    if D < r:
        raise PreconditionError("start distance must satisfy D >= r")
    _require_transient(model)
    cap_shape = model.V(r) / model.phi(r)
    lo_c, hi_c, source = _constants(table, model.model_id, "hit")
    far = D + r
    near = max(D - r, model.phi.domain_floor)
    lower = lo_c * cap_shape * model.phi(far) / model.V(far)
    upper = hi_c * cap_shape * model.phi(near) / model.V(near)
    return BoundPair(min(lower, upper), upper, "hit-ball", source)


def q_bound(model: KernelModel, r: float, t: float, side: str, table=None) -> float:
    """Bound on P(the process visits B(x0, r) at some time after t).

    Valid for t >= phi(r) and start points within distance r of the center;
    also covers the closed-time variant (visits at some time >= t).  Values
    are clamped to [0, 1].
    """
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if r <= 0:
        raise PreconditionError("radius must be positive")
    if t < model.phi(r) * (1 - 1e-12):
        raise PreconditionError(
            f"q bound needs t >= phi(r) = {model.phi(r):g}, got t = {t:g}"
        )
    _require_transient(model)
    lo_c, hi_c, _source = _constants(table, model.model_id, "q")
    c = hi_c if side == "upper" else lo_c
    shape = (model.V(r) / model.phi(r)) * t / model.V(inverse(model.phi, t))
    return min(max(c * shape, 0.0), 1.0)


def _vp_lower_constant(model: KernelModel) -> float:
    """c0 with V(phi^-1(R))/V(phi^-1(r)) >= c0 (R/r)^(d1/d4)."""
    env_v, env_p = model.V.envelope, model.phi.envelope
    return env_v.c_lo * env_p.c_hi ** (-model.d1 / model.d4)


def r_window_lower(
    model: KernelModel, r: float, t: float, theta: float, table=None
) -> tuple[float, float]:
    """Lower bound for a visit to B(x0, r) during the window (t, theta*t].

    Returns (value, theta_min).  The window must be long enough that the
    post-window visits cannot eat the whole late-visit probability:
    theta_min solves (c_up/(c0 c_low)) theta^(1 - d1/d4) = 1/2.
    """
    lo_c, hi_c, source = _constants(table, model.model_id, "q")
    c0 = _vp_lower_constant(model)
    ratio = model.d1 / model.d4
    if ratio <= 1.0:
        raise UnsupportedRegimeError("window bound needs d1 > d4")
    theta_min = (2.0 * hi_c / (c0 * lo_c)) ** (1.0 / (ratio - 1.0))
    if theta < theta_min:
        raise PreconditionError(
            f"theta = {theta:g} below theta_min = {theta_min:g}"
        )
    value = 0.5 * q_bound(model, r, t, "lower", table)
    return value, theta_min


# ---------------------------------------------------------------------------
# critical-case occupation sandwich
# ---------------------------------------------------------------------------


def _require_critical(model: KernelModel) -> None:
    exps = (model.d1, model.d2, model.d3, model.d4)
    if max(exps) - min(exps) > 1e-9:
        raise UnsupportedRegimeError(
            f"occupation sandwich needs d1=d2=d3=d4, got {exps}"
        )


def occupation_sandwich(
    model: KernelModel, r: float, a: float, b: float, table=None
) -> BoundPair:
    """Bounds on P(d(X_s, x0) <= r for some s in (a, b]) in the critical case.

    Requires phi(r) <= b - a.  Members are raw bound values (an upper
    member above 1 is vacuous but kept, so scalings remain visible).

        lower ~ [(phi(r)-a)_+ + phi(r) log((b-a)/(a v phi(r)))] / den
        upper ~ [(phi(r)-a)_+ + phi(r) log((2b-a)/(a v phi(r)))] / den
        den    = phi(r) (1 + log((b-a)/phi(r)))
    """
    if not (0 < a < b):
        raise PreconditionError("need 0 < a < b")
    if r <= 0:
        raise PreconditionError("radius must be positive")
    _require_critical(model)
    pr = model.phi(r)
    if pr > b - a:
        raise UnsupportedRegimeError(
            f"occupation sandwich needs phi(r) <= b - a, got phi(r) = {pr:g}"
        )
    lo_c, hi_c, source = _constants(table, model.model_id, "occ")
    excess = max(pr - a, 0.0)
    floor = max(a, pr)
    den = pr * (1.0 + math.log((b - a) / pr))
    lower = lo_c * (excess + pr * math.log((b - a) / floor)) / den
    upper = hi_c * (excess + pr * math.log((2.0 * b - a) / floor)) / den
    return BoundPair(lower, upper, "occupation", source)
