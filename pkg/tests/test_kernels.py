import math

import numpy as np
import pytest
from scipy import integrate, stats

from heatrates import kernels as kn
from heatrates.errors import PreconditionError, UnsupportedModelError


@pytest.fixture(scope="module")
def cauchy():
    return kn.from_id("cauchy1d")


@pytest.fixture(scope="module")
def gaussian3():
    return kn.from_id("gaussian:3")


@pytest.fixture(scope="module")
def stable153():
    m = kn.from_id("stable:1.5,3")
    lo, hi = kn.comparability_sweep(m, t_grid=np.geomspace(1.0, 100.0, 4), n_dist=12)
    return m.with_comparability(0.9 * lo, 1.1 * hi)


class TestPresets:
    def test_ids(self):
        assert kn.from_id("cauchy1d").dim == 1
        assert kn.from_id("gaussian:2").c0 == 0.25
        assert kn.from_id("stablelike:3,1.5").form == kn.STABLE_LIKE
        assert kn.from_id("subgaussian:3,2,0.25").form == kn.SUB_GAUSSIAN
        j = kn.from_id("jump:power:3;powerlog:1.5,1")
        assert j.form == kn.TWO_SIDED_JUMP

    def test_exponents_from_envelopes(self):
        m = kn.from_id("stablelike:3,1.5")
        assert (m.d1, m.d2, m.d3, m.d4) == (3.0, 3.0, 1.5, 1.5)

    def test_unknown(self):
        with pytest.raises(ValueError):
            kn.from_id("brownian-sheet")


class TestEnvelopeDensity:
    def test_on_diagonal_branch(self):
        m = kn.from_id("stablelike:1,1")
        assert kn.envelope_density(m, 1.0, 0.0) == 1.0

    def test_off_diagonal_minimum(self):
        m = kn.from_id("stablelike:1,1")
        assert kn.envelope_density(m, 1.0, 2.0) == pytest.approx(0.25)

    def test_crossover_continuity(self):
        # the two branches meet within factor 2 at d = phi^-1(t)
        for spec in ("stablelike:3,1.5", "jump:power:3;power:1.5"):
            m = kn.from_id(spec)
            for t in (1.0, 10.0, 1e3):
                d = t ** (1.0 / 1.5)
                below = kn.envelope_density(m, t, d * (1 - 1e-9))
                above = kn.envelope_density(m, t, d * (1 + 1e-9))
                assert 0.5 <= below / above <= 2.0

    def test_subgaussian_form(self):
        m = kn.from_id("subgaussian:3,2,0.25")
        t, d = 4.0, 6.0
        expect = t ** -1.5 * math.exp(-0.25 * (d / math.sqrt(t)) ** 2)
        assert kn.envelope_density(m, t, d) == pytest.approx(expect, rel=1e-12)

    def test_decreasing_in_distance(self):
        m = kn.from_id("jump:power:3;powerlog:1.5,1")
        vals = [kn.envelope_density(m, 5.0, d) for d in np.linspace(0, 50, 40)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestExactLaws:
    def test_cauchy_density(self, cauchy):
        assert kn.density(cauchy, 1.0, 0.0) == pytest.approx(1 / math.pi, rel=1e-14)
        assert kn.density(cauchy, 2.0, 3.0) == pytest.approx(
            2.0 / (math.pi * 13.0), rel=1e-14
        )

    def test_cauchy_cdf(self, cauchy):
        assert kn.radial_cdf(cauchy, 1.0, 1.0) == pytest.approx(0.5, rel=1e-14)

    def test_gaussian_density_convention(self, gaussian3):
        # per-coordinate variance 2t
        assert kn.density(gaussian3, 1.0, 0.0) == pytest.approx(
            (4 * math.pi) ** -1.5, rel=1e-14
        )

    def test_gaussian_tail(self):
        g1 = kn.from_id("gaussian:1")
        expect = 2 * stats.norm.sf(4.0 / math.sqrt(2.0))
        assert kn.radial_sf(g1, 1.0, 4.0) == pytest.approx(expect, rel=1e-12)

    def test_stable_alpha1_matches_cauchy(self):
        m = kn.KernelModel(
            model_id="s11", form=kn.STABLE_LIKE, V=kn.power(1.0), phi=kn.power(1.0),
            dim=1, exact_law=kn.LAW_STABLE, alpha=1.0, mu_ball=2.0,
        )
        for t, r in [(1.0, 0.5), (2.0, 5.0), (1.0, 40.0)]:
            assert kn.density(m, t, r) == pytest.approx(
                t / (math.pi * (r * r + t * t)), rel=1e-7
            )
            assert kn.radial_cdf(m, t, r) == pytest.approx(
                2 / math.pi * math.atan(r / t), rel=1e-7
            )

    @pytest.mark.parametrize("t", [0.5, 1.0, 7.0])
    def test_normalization(self, t, stable153):
        models = [kn.from_id("cauchy1d"), kn.from_id("gaussian:3"), stable153]
        for m in models:
            dim = m.dim
            area = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}[dim]
            scale = t ** (1.0 / m.alpha)

            def radial(u):
                s = math.exp(u)
                return area * s**dim * kn.density(m, t, s)

            # piecewise segments around the envelope scale so the adaptive
            # rule cannot miss the density peak
            knots = [1e-9 * scale, 0.1 * scale, scale, 10.0 * scale, 300.0 * scale]
            body = sum(
                integrate.quad(radial, math.log(a), math.log(b), limit=300)[0]
                for a, b in zip(knots, knots[1:])
            )
            total = body + kn.radial_sf(m, t, knots[-1])
            assert total == pytest.approx(1.0, abs=1e-6), m.model_id

    @pytest.mark.parametrize("spec", ["cauchy1d", "gaussian:1"])
    def test_chapman_kolmogorov(self, spec):
        # numeric convolution of densities matches the semigroup in sup norm
        m = kn.from_id(spec)
        t, s = 0.7, 1.6
        for x in np.linspace(-4.0, 4.0, 9):
            conv, _ = integrate.quad(
                lambda z: kn.density(m, t, abs(z)) * kn.density(m, s, abs(x - z)),
                -np.inf,
                np.inf,
                limit=400,
            )
            assert conv == pytest.approx(kn.density(m, t + s, abs(x)), abs=1e-6)

    def test_envelope_bracket_on_grid(self, cauchy):
        lo, hi = kn.comparability_sweep(cauchy)
        # closed-form extremes: 1/(2 pi) at the crossover, 1/pi on-diagonal
        assert lo >= 1 / (2 * math.pi) - 1e-12
        assert hi <= 1 / math.pi + 1e-12

    def test_far_tail_against_series_oracle(self):
        # term-by-term closed form of the subordination mixture:
        # p_t(r) = sum_k (-1)^(k+1) G(kg+1) sin(pi k g)/(pi k!) t^k
        #          * pi^(-d/2) 4^(kg) G(d/2+kg) r^(-d-2kg),  g = alpha/2
        from scipy import special

        def series(alpha, d, t, r, terms=18):
            g = alpha / 2
            acc, sign, fact = 0.0, 1.0, 1.0
            for k in range(1, terms):
                fact *= k
                acc += sign * (
                    special.gamma(k * g + 1.0) * math.sin(math.pi * k * g)
                    / (math.pi * fact) * t**k * math.pi ** (-d / 2)
                    * 4.0 ** (k * g) * special.gamma(d / 2 + k * g)
                    * r ** (-d - 2 * k * g)
                )
                sign = -sign
            return acc

        m = kn.from_id("stable:1.5,3")
        for t, r in [(1.0, 10.0), (1.0, 50.0), (4.0, 150.0)]:
            assert kn.density(m, t, r) == pytest.approx(
                series(1.5, 3, t, r), rel=1e-7
            )


class TestTailProbability:
    def test_cauchy_oracle(self, cauchy):
        te = kn.tail_probability(cauchy, 1.0, 1.0)
        assert te.estimate == pytest.approx(0.5, rel=1e-12)
        assert te.estimate <= te.upper_bound

    def test_full_mass_at_zero_radius(self, gaussian3):
        te = kn.tail_probability(gaussian3, 1.0, 0.0)
        assert te.estimate == 1.0

    def test_bound_respected_on_grid(self, cauchy):
        for t in (1.0, 4.0, 16.0):
            for r in (1.0, 4.0, 16.0, 64.0):
                te = kn.tail_probability(cauchy, t, r)
                assert te.estimate <= te.upper_bound + 1e-12

    def test_stable3d_estimate_below_bound_mc_oracle(self, stable153):
        # estimate for t=4, r=64 against an independent subordination sampler
        t, r = 4.0, 64.0
        te = kn.tail_probability(stable153, t, r)
        assert te.estimate <= te.upper_bound
        rng = np.random.default_rng(123)
        n = 1_000_000
        gamma = 0.75
        u = rng.uniform(0.0, math.pi, n)
        w = rng.exponential(1.0, n)
        s1 = (np.sin(gamma * u) / np.sin(u) ** (1 / gamma)) * (
            np.sin((1 - gamma) * u) / w
        ) ** ((1 - gamma) / gamma)
        st = t ** (1 / gamma) * s1
        z = rng.standard_normal((n, 3))
        pts = np.sqrt(2.0 * st)[:, None] * z
        frac = float(np.mean(np.linalg.norm(pts, axis=1) >= r))
        ci3 = 3 * math.sqrt(frac * (1 - frac) / n)
        assert abs(te.estimate - frac) <= ci3

    def test_bound_regime_requires_t_at_least_one(self, cauchy):
        with pytest.raises(PreconditionError):
            kn.tail_probability(cauchy, 0.5, 1.0)

    def test_envelope_only_midpoint(self):
        m = kn.from_id("stablelike:3,1.5").with_comparability(0.02, 0.25)
        te = kn.tail_probability(m, 4.0, 64.0)
        assert 0.0 <= te.estimate <= 1.0
        assert te.estimate <= te.upper_bound


class TestBallProbability:
    def test_saturated_envelope(self, cauchy):
        bp = kn.ball_probability(cauchy, 1.0, 2.0)
        assert bp.envelope == 1.0

    def test_cauchy_values(self, cauchy):
        bp = kn.ball_probability(cauchy, 1.0, 1.0)
        assert bp.probability == pytest.approx(0.5, rel=1e-12)
        assert bp.envelope == 1.0
        assert cauchy.c_lo <= bp.probability / bp.envelope <= cauchy.c_hi * 2.0

    def test_gaussian_small_ball(self, gaussian3):
        bp = kn.ball_probability(gaussian3, 1.0, 0.1)
        assert bp.envelope == pytest.approx(1e-3, rel=1e-12)
        assert bp.probability == pytest.approx(stats.chi2.cdf(0.005, df=3), rel=1e-12)

    def test_monotonicity(self, cauchy):
        rs = np.linspace(0.1, 5.0, 12)
        probs = [kn.ball_probability(cauchy, 1.0, float(r)).probability for r in rs]
        assert all(a <= b for a, b in zip(probs, probs[1:]))
        ts = np.linspace(0.5, 8.0, 12)
        probs_t = [kn.ball_probability(cauchy, float(t), 1.0).probability for t in ts]
        assert all(a >= b for a, b in zip(probs_t, probs_t[1:]))


class TestClassifyLongRun:
    def test_transient_supercritical(self):
        assert kn.classify_long_run(kn.from_id("stablelike:3,1.5"))[0] == kn.TRANSIENT

    def test_recurrent_critical(self, cauchy):
        assert kn.classify_long_run(cauchy)[0] == kn.RECURRENT

    def test_recurrent_one_dim_diffusive(self):
        assert kn.classify_long_run(kn.from_id("stablelike:1,2"))[0] == kn.RECURRENT


class TestCompHeat:
    def test_identity(self, cauchy):
        rep = kn.comp_heat_check(cauchy, 1.0, 0.0, 0.0, 10.0)
        assert rep.ratio == 1.0
        assert rep.ok

    def test_cauchy_closed_form(self, cauchy):
        # p(1,x,z)/p(1,y,z) = (d(y,z)^2 + 1)/(d(x,z)^2 + 1) for the Cauchy law
        rep = kn.comp_heat_check(cauchy, 1.0, 0.0, 0.5, 10.0)
        assert rep.ratio == pytest.approx((90.25 + 1.0) / (100.0 + 1.0), rel=1e-12)
        assert rep.ok

    def test_gaussian_within_contract(self):
        g1 = kn.from_id("gaussian:1")
        for z in (2.0, 5.0, 20.0):
            rep = kn.comp_heat_check(g1, 1.0, 0.0, 1.0, z)
            assert rep.ok, f"z={z}: ratio {rep.ratio} vs K {rep.k_bound}"

    def test_precondition(self, cauchy):
        with pytest.raises(PreconditionError):
            kn.comp_heat_check(cauchy, 1.0, 0.0, 5.0, 10.0)

    def test_needs_exact_law(self):
        with pytest.raises(UnsupportedModelError):
            kn.comp_heat_check(kn.from_id("stablelike:3,1.5"), 1.0, 0.0, 0.1, 2.0)
