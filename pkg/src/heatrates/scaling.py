"""Positive monotone shape functions with verified power-law envelopes.

Everything downstream (kernel envelopes, integral tests, potential-theory
bounds) consumes functions of one positive variable that are monotone and
sandwiched between two power laws:

    c_lo * (R/r)**d_lo  <=  f(R)/f(r)  <=  c_hi * (R/r)**d_hi      (r < R)

Decreasing functions simply carry non-positive exponents.  The envelope is
*declared* at construction and *verified* on a logarithmic grid; it is data,
not an inference, because the bound constants feed every later formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BracketError, EvaluationError, PreconditionError

INCREASING = "increasing"
DECREASING = "decreasing"

#: Number of points in the construction-time verification grid.
GRID_POINTS = 64
#: Number of decades the verification grid spans above the domain floor.
GRID_DECADES = 8
#: Pair checks are exhaustive up to this count, subsampled beyond.
MAX_PAIR_CHECKS = 10_000
#: Relative slack for all grid comparisons (floating-point headroom only).
GRID_RTOL = 1e-9

_INVERSE_RTOL = 1e-12
_INVERSE_MAX_ITER = 200


@dataclass(frozen=True)
class Envelope:
    """Two-sided power bracket for ratios f(R)/f(r), R > r."""

    c_lo: float
    d_lo: float
    c_hi: float
    d_hi: float

    def __post_init__(self):
        if self.c_lo <= 0 or self.c_hi <= 0:
            raise ValueError("envelope constants must be positive")
        if self.d_lo > self.d_hi:
            raise ValueError("envelope exponents must satisfy d_lo <= d_hi")


def log_grid(lo: float, hi: float, n: int = GRID_POINTS) -> np.ndarray:
    return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class ScalingFunction:
    """A positive monotone function on (0, inf) with a verified envelope.

    Attributes:
        evaluator: the function itself; must be pure.
        monotonicity: INCREASING or DECREASING.  Verified as non-strict
            monotonicity on the grid, so constants are admissible.
        envelope: declared two-sided power bracket, asserted only above
            ``domain_floor``.
        domain_floor: smallest argument at which the envelope and
            monotonicity are checked; all large-scale results only need
            behaviour above this.
        log_evaluator: optional exact evaluation of log f, used where f
            itself underflows (e.g. stretched-exponential decay at huge
            arguments).
        exact_inverse: optional closed-form inverse, used by ``inverse``
            to skip bisection.
    """

    evaluator: Callable[[float], float]
    monotonicity: str
    envelope: Envelope
    domain_floor: float = 1e-6
    name: str = ""
    log_evaluator: Optional[Callable[[float], float]] = None
    exact_inverse: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.monotonicity not in (INCREASING, DECREASING):
            raise ValueError(f"unknown monotonicity {self.monotonicity!r}")
        if self.domain_floor <= 0:
            raise ValueError("domain_floor must be positive")
        self._verify_on_grid()

    # -- construction-time checks -------------------------------------

    def grid(self) -> np.ndarray:
        return log_grid(self.domain_floor, self.domain_floor * 10.0**GRID_DECADES)

    def _verify_on_grid(self) -> None:
        g = self.grid()
        vals = np.array([self._eval_checked(r) for r in g])
        if np.any(vals <= 0):
            bad = g[np.argmax(vals <= 0)]
            raise EvaluationError(
                f"{self.name or 'scaling function'}: non-positive value at r={bad:g}"
            )
        diffs = np.diff(vals)
        slack = GRID_RTOL * np.maximum(vals[:-1], vals[1:])
        if self.monotonicity == INCREASING:
            if np.any(diffs < -slack):
                k = int(np.argmax(diffs < -slack))
                raise PreconditionError(
                    f"{self.name or 'scaling function'}: not nondecreasing near r={g[k]:g}"
                )
        else:
            if np.any(diffs > slack):
                k = int(np.argmax(diffs > slack))
                raise PreconditionError(
                    f"{self.name or 'scaling function'}: not nonincreasing near r={g[k]:g}"
                )
        self._verify_envelope(g, vals)

    def _verify_envelope(self, g: np.ndarray, vals: np.ndarray) -> None:
        n = len(g)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        if len(pairs) > MAX_PAIR_CHECKS:
            rng = np.random.default_rng(0)
            idx = rng.choice(len(pairs), MAX_PAIR_CHECKS, replace=False)
            pairs = [pairs[k] for k in idx]
        env = self.envelope
        for i, j in pairs:
            span = g[j] / g[i]
            ratio = vals[j] / vals[i]
            lo = env.c_lo * span**env.d_lo
            hi = env.c_hi * span**env.d_hi
            if ratio < lo * (1 - GRID_RTOL) or ratio > hi * (1 + GRID_RTOL):
                raise PreconditionError(
                    f"{self.name or 'scaling function'}: envelope violated at "
                    f"(r={g[i]:g}, R={g[j]:g}): ratio={ratio:g} outside [{lo:g}, {hi:g}]"
                )

    def _eval_checked(self, r: float) -> float:
        v = float(self.evaluator(r))
        if not math.isfinite(v):
            raise EvaluationError(
                f"{self.name or 'scaling function'}: non-finite value at r={r:g}"
            )
        return v

    # -- evaluation ----------------------------------------------------

    def __call__(self, r: float) -> float:
        return float(self.evaluator(r))

    def log_value(self, r: float) -> float:
        """log f(r), exact even where f underflows."""
        if self.log_evaluator is not None:
            return float(self.log_evaluator(r))
        v = float(self.evaluator(r))
        if v <= 0:
            raise EvaluationError(f"cannot take log of f({r:g})={v:g}")
        return math.log(v)


def fit_envelope(
    evaluator: Callable[[float], float],
    domain_floor: float,
    margin: float = 1e-6,
) -> Envelope:
    """Measure an admissible envelope by a pairwise slope sweep.

    Returns the tightest power bracket consistent with all grid pairs,
    with a small multiplicative safety margin.  Intended for functions
    whose exact exponent range is awkward to state by hand.
    """
    g = log_grid(domain_floor, domain_floor * 10.0**GRID_DECADES)
    logs = np.log(np.array([float(evaluator(r)) for r in g]))
    lg = np.log(g)
    slopes = []
    n = len(g)
    for i in range(n):
        for j in range(i + 1, n):
            slopes.append((logs[j] - logs[i]) / (lg[j] - lg[i]))
    d_lo, d_hi = min(slopes), max(slopes)
    return Envelope(c_lo=1.0 - margin, d_lo=d_lo, c_hi=1.0 + margin, d_hi=d_hi)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def check_doubling(
    f: ScalingFunction, factor: float, c: float, grid=None
) -> tuple[bool, float]:
    """Check f(factor*r) <= c*f(r) on a grid; return (ok, worst ratio)."""
    if factor <= 1:
        raise PreconditionError("factor must exceed 1")
    pts = np.asarray(f.grid() if grid is None else grid, dtype=float)
    if pts.size == 0 or np.any(np.diff(pts) <= 0):
        raise PreconditionError("grid must be nonempty and sorted")
    worst = -math.inf
    for r in pts:
        num = f._eval_checked(factor * r)
        den = f._eval_checked(r)
        worst = max(worst, num / den)
    return bool(worst <= c * (1 + GRID_RTOL)), worst


@dataclass(frozen=True)
class HConditionReport:
    ok: bool
    mode: str
    theta: Optional[float]
    c0: float
    worst_point: float


UPPER_DECAY = "upper-decay"
LOWER_DOUBLING = "lower-doubling"


def check_h_conditions(
    h: ScalingFunction, mode: str, grid=None, c0: Optional[float] = None
) -> HConditionReport:
    """Verify the decay conditions a tail profile h must satisfy.

    UPPER_DECAY: look for theta > 1 and c0 in (0,1) with
    h(theta*r) <= c0*h(r) for grid r > 1; theta swept over {2,4,8} and the
    best (smallest) c0 reported.

    LOWER_DOUBLING: verify h(r) <= c0*h(2r) for the declared c0 > 1.
    """
    if h.monotonicity != DECREASING:
        raise PreconditionError("h must be decreasing")
    pts = np.asarray(h.grid() if grid is None else grid, dtype=float)
    pts = pts[pts > 1.0]
    if pts.size == 0:
        raise PreconditionError("grid has no points above 1")

    if mode == UPPER_DECAY:
        # report the smallest theta that achieves c0 < 1; if none does,
        # report the sweep's smallest c0 so the failure is quantified
        best: Optional[tuple[float, float, float]] = None  # (c0, theta, argmax)
        for theta in (2.0, 4.0, 8.0):
            worst, arg = -math.inf, pts[0]
            for r in pts:
                diff = h.log_value(theta * r) - h.log_value(r)
                ratio = math.exp(diff) if diff < 700.0 else math.inf
                if ratio > worst:
                    worst, arg = ratio, r
            if 0 < worst < 1:
                return HConditionReport(
                    ok=True, mode=mode, theta=theta, c0=worst, worst_point=arg
                )
            if best is None or worst < best[0]:
                best = (worst, theta, arg)
        c0_found, theta, arg = best
        return HConditionReport(
            ok=False, mode=mode, theta=theta, c0=c0_found, worst_point=arg
        )

    if mode == LOWER_DOUBLING:
        if c0 is None or c0 <= 1:
            raise PreconditionError("lower-doubling mode needs declared c0 > 1")
        worst, arg = -math.inf, pts[0]
        for r in pts:
            # log-domain ratio: h may underflow to 0 at 2r
            diff = h.log_value(r) - h.log_value(2 * r)
            ratio = math.exp(diff) if diff < 700.0 else math.inf
            if ratio > worst:
                worst, arg = ratio, r
        return HConditionReport(
            ok=bool(worst <= c0 * (1 + GRID_RTOL)), mode=mode, theta=None,
            c0=worst, worst_point=arg,
        )

    raise ValueError(f"unknown mode {mode!r}")


def inverse(
    f: ScalingFunction, y: float, bracket: Optional[tuple[float, float]] = None
) -> float:
    """Solve f(t) = y for increasing f, to relative tolerance 1e-12.

    Uses the exact inverse when the function carries one and no explicit
    bracket was requested; otherwise bisects (monotone-safe, no smoothness
    assumed), capped at 200 iterations.
    """
    if f.monotonicity != INCREASING:
        raise PreconditionError("inverse requires an increasing function")
    if y <= 0 or not math.isfinite(y):
        raise BracketError(f"target value {y!r} not a positive real")

    if bracket is None and f.exact_inverse is not None:
        return float(f.exact_inverse(y))
    if bracket is None:
        bracket = _auto_bracket(f, y)

    lo, hi = float(bracket[0]), float(bracket[1])
    f_lo, f_hi = f._eval_checked(lo), f._eval_checked(hi)
    if not (f_lo <= y * (1 + _INVERSE_RTOL) and f_hi >= y * (1 - _INVERSE_RTOL)):
        raise BracketError(
            f"bracket [{lo:g}, {hi:g}] maps to [{f_lo:g}, {f_hi:g}], "
            f"which does not straddle y={y:g}"
        )
    for _ in range(_INVERSE_MAX_ITER):
        mid = 0.5 * (lo + hi)
        v = f._eval_checked(mid)
        if abs(v - y) <= _INVERSE_RTOL * y:
            return mid
        if v < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _auto_bracket(f: ScalingFunction, y: float) -> tuple[float, float]:
    lo = hi = 1.0
    for _ in range(200):
        if f._eval_checked(lo) <= y:
            break
        lo /= 2.0
    else:
        raise BracketError(f"could not bracket y={y:g} from below")
    for _ in range(200):
        if f._eval_checked(hi) >= y:
            break
        hi *= 2.0
    else:
        raise BracketError(f"could not bracket y={y:g} from above")
    return lo, hi


# ---------------------------------------------------------------------------
# rate candidates
# ---------------------------------------------------------------------------

DIRECT = "direct"
SUBCRITICAL = "subcritical"
CRITICAL = "critical"


@dataclass(frozen=True)
class RateCandidate:
    """A candidate time->radius rate function and its construction recipe.

    direct:       phi(t)
    subcritical:  phi^{-1}(t) * g(t)
    critical:     phi^{-1}(t * g(t))

    For the latter two, g must be nonincreasing on its grid (constants are
    tolerated so that algebraic identities like g == 1 can be exercised;
    genuine decay to 0 is the caller's responsibility).
    """

    recipe: str
    phi: ScalingFunction
    g: Optional[ScalingFunction] = None
    description: str = ""

    def __post_init__(self):
        if self.recipe not in (DIRECT, SUBCRITICAL, CRITICAL):
            raise ValueError(f"unknown recipe {self.recipe!r}")
        if self.recipe in (SUBCRITICAL, CRITICAL):
            if self.g is None:
                raise PreconditionError(f"{self.recipe} recipe requires g")
            if self.g.monotonicity != DECREASING:
                raise PreconditionError(f"{self.recipe} recipe requires nonincreasing g")
            if self.phi.monotonicity != INCREASING:
                raise PreconditionError("phi must be increasing for inverse recipes")

    def evaluate(self, t: float) -> float:
        return evaluate_rate(self, t)


def evaluate_rate(candidate: RateCandidate, t: float) -> float:
    """Evaluate a rate candidate at a time t > 1."""
    if t <= 1:
        raise PreconditionError(f"rate candidates are defined for t > 1, got {t!r}")
    if candidate.recipe == DIRECT:
        v = candidate.phi(t)
    elif candidate.recipe == SUBCRITICAL:
        v = inverse(candidate.phi, t) * candidate.g(t)
    else:
        v = inverse(candidate.phi, t * candidate.g(t))
    if not (math.isfinite(v) and v > 0):
        raise EvaluationError(f"rate candidate evaluated to {v!r} at t={t:g}")
    return v


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_E = math.e
_EE = math.exp(math.e)


def power(exponent: float, domain_floor: float = 1e-6) -> ScalingFunction:
    """f(r) = r**exponent."""
    mono = INCREASING if exponent >= 0 else DECREASING
    inv = (lambda y, p=exponent: y ** (1.0 / p)) if exponent != 0 else None
    return ScalingFunction(
        evaluator=lambda r, p=exponent: r**p,
        monotonicity=mono,
        envelope=Envelope(1.0, exponent, 1.0, exponent),
        domain_floor=domain_floor,
        name=f"power:{exponent:g}",
        log_evaluator=lambda r, p=exponent: p * math.log(r),
        exact_inverse=inv,
    )


def constant(value: float) -> ScalingFunction:
    """f(r) = value; admissible wherever only nonincreasing g is required."""
    if value <= 0:
        raise PreconditionError("constant preset must be positive")
    return ScalingFunction(
        evaluator=lambda r, v=value: v,
        monotonicity=DECREASING,
        envelope=Envelope(1.0, 0.0, 1.0, 0.0),
        domain_floor=1e-6,
        name=f"const:{value:g}",
        log_evaluator=lambda r, v=value: math.log(v),
    )


def powerlog(exponent: float, log_exponent: float, domain_floor: float = 2.0) -> ScalingFunction:
    """f(r) = r**exponent * (log r)**log_exponent, for r > 1."""
    if domain_floor <= 1.0:
        raise PreconditionError("powerlog needs domain_floor > 1 (log r must be positive)")

    def ev(r, p=exponent, q=log_exponent):
        return r**p * math.log(r) ** q

    def log_ev(r, p=exponent, q=log_exponent):
        return p * math.log(r) + q * math.log(math.log(r))

    sample = [ev(domain_floor), ev(domain_floor * 10**GRID_DECADES)]
    mono = INCREASING if sample[1] >= sample[0] else DECREASING
    return ScalingFunction(
        evaluator=ev,
        monotonicity=mono,
        envelope=fit_envelope(ev, domain_floor),
        domain_floor=domain_floor,
        name=f"powerlog:{exponent:g},{log_exponent:g}",
        log_evaluator=log_ev,
    )


def exp_decay(c0: float, gamma: float) -> ScalingFunction:
    """h(s) = exp(-c0 * s**gamma), the stretched-exponential tail profile."""
    if c0 <= 0 or gamma <= 0:
        raise PreconditionError("exp-decay needs c0 > 0 and gamma > 0")
    # keep the verification grid clear of exp underflow
    floor = min(1e-6, (700.0 / c0) ** (1.0 / gamma) / 10.0**GRID_DECADES)

    def ev(s, a=c0, g=gamma):
        return math.exp(-a * s**g)

    return ScalingFunction(
        evaluator=ev,
        monotonicity=DECREASING,
        envelope=fit_envelope(ev, floor),
        domain_floor=floor,
        name=f"exp-decay:{c0:g},{gamma:g}",
        log_evaluator=lambda s, a=c0, g=gamma: -a * s**g,
    )


def iterated_log_g(eps: float, domain_floor: float = 16.0) -> ScalingFunction:
    """g(t) = exp(-(log t) * (log log t)**(1+eps)); decays faster than any power."""

    def log_ev(t, e=eps):
        lt = math.log(t)
        return -lt * math.log(lt) ** (1.0 + e)

    def ev(t, e=eps):
        x = log_ev(t, e)
        return math.exp(x) if x > -745.0 else 0.0

    # the verification grid stays within exp range for moderate eps
    return ScalingFunction(
        evaluator=ev,
        monotonicity=DECREASING,
        envelope=fit_envelope(ev, domain_floor),
        domain_floor=domain_floor,
        name=f"iterated-log-g:{eps:g}",
        log_evaluator=log_ev,
    )


def loglog_g(eps: float, domain_floor: float = 4.0) -> ScalingFunction:
    """g(t) = (log log(e^e + t))**eps / log(e + t).

    eps = 0 gives exactly 1/log(e + t); eps = 1 the (log log t)/(log t) shape.
    """

    def ev(t, e=eps):
        return math.log(math.log(_EE + t)) ** e / math.log(_E + t)

    return ScalingFunction(
        evaluator=ev,
        monotonicity=DECREASING,
        envelope=fit_envelope(ev, domain_floor),
        domain_floor=domain_floor,
        name=f"loglog-g:{eps:g}",
        log_evaluator=lambda t, e=eps: e * math.log(math.log(math.log(_EE + t)))
        - math.log(math.log(_E + t)),
    )


def from_id(spec: str) -> ScalingFunction:
    """Build a preset from its string id.

    Grammar (documented for config files and the CLI):
        power:EXP              r**EXP
        powerlog:EXP,LOGEXP    r**EXP * (log r)**LOGEXP          (r > 1)
        exp-decay:C0,GAMMA     exp(-C0 * r**GAMMA)
        iterated-log-g:EPS     exp(-(log t)(log log t)**(1+EPS))  (t >= 16)
        loglog-g:EPS           (log log(e^e+t))**EPS / log(e+t)
        const:C                C
    """
    head, _, tail = spec.partition(":")
    head = head.strip().lower()
    try:
        args = [float(a) for a in tail.split(",")] if tail else []
    except ValueError as exc:
        raise ValueError(f"bad numeric arguments in preset id {spec!r}") from exc
    try:
        if head == "power":
            (exp_,) = args
            return power(exp_)
        if head == "powerlog":
            p, q = args
            return powerlog(p, q)
        if head == "exp-decay":
            c0, gamma = args
            return exp_decay(c0, gamma)
        if head == "iterated-log-g":
            (eps,) = args
            return iterated_log_g(eps)
        if head == "loglog-g":
            (eps,) = args
            return loglog_g(eps)
        if head == "const":
            (c,) = args
            return constant(c)
    except ValueError as exc:
        raise ValueError(f"wrong argument count in preset id {spec!r}") from exc
    raise ValueError(f"unknown scaling preset {spec!r}")
