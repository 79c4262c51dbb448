import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lindeberg.distributions import DiscreteDistribution, DistributionError, two_point
from lindeberg.fractions import (G_0, G_1, G_CONST, G_STAR, FractionError, FractionKind, FractionParams,
                                 Method, WeightFunction, WeightFunctionError, WeightKind,
                                 abs_third_moment_fraction, esseen_fraction, fraction, lindeberg_fraction,
                                 rozovskii_fraction, third_moment_fraction, two_point_fraction_closed_form)
from oracles import esseen_sup_oracle, rozovskii_oracle

CANONICAL = {"g*": G_STAR, "gc": G_CONST, "g0": G_0, "g1": G_1}
KINDS = (FractionKind.ESSEEN, FractionKind.ROZOVSKII)


def _absolute(g, b):
    """The weight as a plain function of the absolute level, for the oracles."""
    return lambda z: g(z, b)


def _b(dists):
    return math.sqrt(math.fsum(d.second_moment for d in dists))


# -- truncated moments -----------------------------------------------------------------

@given(st.floats(min_value=0.5, max_value=0.99), st.integers(min_value=1, max_value=50))
def test_lindeberg_fraction_below_first_atom(p, n):
    q = 1 - p
    dists = [two_point(p)] * n
    # the smaller atom sits at z = sqrt(q / (n p)); stay a rounding step below it
    z = math.sqrt(q / (n * p)) * (1 - 1e-12)
    assert lindeberg_fraction(dists, z) == pytest.approx(1.0, rel=1e-14)
    assert lindeberg_fraction(dists, 0.5 * z) == pytest.approx(1.0, rel=1e-14)
    assert lindeberg_fraction(dists, 2.0 * math.sqrt(p / (n * q)) + 1.0) == 0.0


def test_lindeberg_fraction_sums_over_summands():
    a = DiscreteDistribution((-1.0, 2.0), (2 / 3, 1 / 3))
    c = DiscreteDistribution((-3.0, 0.0, 3.0), (0.1, 0.8, 0.1))
    b2 = a.second_moment + c.second_moment
    for z in (0.3, 0.6, 1.0, 1.5):
        zb = z * math.sqrt(b2)
        direct = (sum(x * x * p for x, p in a.atoms if abs(x) >= zb)
                  + sum(x * x * p for x, p in c.atoms if abs(x) >= zb)) / b2
        assert lindeberg_fraction([a, c], z) == pytest.approx(direct, rel=1e-14, abs=1e-15)


@given(st.floats(min_value=0.01, max_value=0.99), st.integers(min_value=1, max_value=20),
       st.floats(min_value=0.01, max_value=5.0))
def test_third_moment_bounded_by_absolute(p, n, z):
    dists = [two_point(p)] * n
    assert abs(third_moment_fraction(dists, z)) <= abs_third_moment_fraction(dists, z) * (1 + 1e-14)


def test_uncentered_summands_rejected():
    with pytest.raises(DistributionError):
        lindeberg_fraction([DiscreteDistribution((0.0, 1.0), (0.5, 0.5))], 1.0)


# -- weights ---------------------------------------------------------------------------

def test_custom_weight_validation():
    WeightFunction.custom(lambda z: 1 + z)
    WeightFunction.custom(lambda z: math.sqrt(z))
    with pytest.raises(WeightFunctionError):
        WeightFunction.custom(lambda z: z * z)          # z / g(z) decreases
    with pytest.raises(WeightFunctionError):
        WeightFunction.custom(lambda z: 1 / (1 + z))    # g decreases
    with pytest.raises(WeightFunctionError):
        WeightFunction.custom(lambda z: z - 1)          # not positive


def test_weight_ratios():
    b = 2.0
    for g in CANONICAL.values():
        for t in (0.3, 1.0, 2.5):
            assert g.ratio_c(t, b) == pytest.approx(g(t * b, b) / g(b, b))
            assert g.ratio_a(t, b) == pytest.approx(g(t * b, b) / (t * g(b, b)))


def test_params_validation():
    with pytest.raises(ValueError):
        FractionParams(0.0, 1.0)
    with pytest.raises(ValueError):
        FractionParams(1.0, -1.0)
    with pytest.raises(FractionError):
        esseen_fraction([two_point(0.7)], G_STAR, FractionParams(1.0, math.inf))


# -- documented values ---------------------------------------------------------------

@given(st.integers(min_value=1, max_value=100), st.sampled_from([0.1, 0.5, 1.0, 2.0, math.inf]),
       st.floats(min_value=0.05, max_value=10.0))
def test_symmetric_two_point_gstar(n, eps, gamma):
    dists = [two_point(0.5)] * n
    v = esseen_fraction(dists, G_STAR, FractionParams(eps, gamma)).value
    assert v == pytest.approx(min(eps, 1 / math.sqrt(n)), rel=1e-12)


@given(st.floats(min_value=0.5, max_value=0.99), st.integers(min_value=1, max_value=50),
       st.sampled_from([0.2, 1.0, 3.0, math.inf]), st.floats(min_value=0.05, max_value=1.0))
def test_gconst_esseen_is_one_for_small_gamma(p, n, eps, gamma):
    v = esseen_fraction([two_point(p)] * n, G_CONST, FractionParams(eps, gamma)).value
    assert v == pytest.approx(1.0, rel=1e-12)


@given(st.floats(min_value=0.01, max_value=0.99), st.integers(min_value=1, max_value=50),
       st.floats(min_value=0.05, max_value=10.0))
def test_gconst_rozovskii_infinite_eps_is_one(p, n, gamma):
    v = rozovskii_fraction([two_point(p)] * n, G_CONST, FractionParams(math.inf, gamma)).value
    assert v == pytest.approx(1.0, rel=1e-12)


def test_two_point_08_examples():
    p, q = 0.8, 0.2
    d = [two_point(p)]
    params = FractionParams(1.0, 1.0)
    e = esseen_fraction(d, G_STAR, params).value
    r = rozovskii_fraction(d, G_STAR, params).value
    assert e == pytest.approx(max(math.sqrt(q / p), math.sqrt(q ** 3 / p) + p), rel=1e-14)
    assert r == pytest.approx(math.sqrt(q ** 3 / p) + max(math.sqrt(q / p), p), rel=1e-14)
    assert e == pytest.approx(esseen_sup_oracle(d, _absolute(G_STAR, 1.0), 1.0, 1.0), rel=1e-9)
    assert r == pytest.approx(rozovskii_oracle(d, _absolute(G_STAR, 1.0), 1.0, 1.0), rel=1e-9)


@given(st.floats(min_value=0.51, max_value=0.99), st.integers(min_value=1, max_value=30))
def test_gstar_infinite_eps_unit_gamma(p, n):
    q = 1 - p
    assume(n * 1e6 > p / q)
    v = esseen_fraction([two_point(p)] * n, G_STAR, FractionParams(math.inf, 1.0)).value
    assert v == pytest.approx((q * q + p * p) / math.sqrt(n * p * q), rel=1e-12)


@given(st.integers(min_value=1, max_value=30), st.floats(min_value=1.01, max_value=10.0),
       st.floats(min_value=0.05, max_value=10.0))
def test_g1_symmetric_is_one(n, eps, gamma):
    v = two_point_fraction_closed_form(FractionKind.ESSEEN, G_1, 0.5, n, FractionParams(eps, gamma))
    assert v == pytest.approx(1.0, rel=1e-14)


@given(st.floats(min_value=0.51, max_value=0.99), st.floats(min_value=1.01, max_value=10.0),
       st.floats(min_value=0.05, max_value=10.0))
def test_rozovskii_g0_large_n_case(p, eps, gamma):
    q = 1 - p
    n = math.floor(p / q) + 1
    v = two_point_fraction_closed_form(FractionKind.ROZOVSKII, G_0, p, n, FractionParams(eps, gamma))
    expected = gamma * (p - q) / (eps * math.sqrt(n * p * q)) + max(math.sqrt(q / (n * p)),
                                                                    math.sqrt(p ** 3 / (n * q)))
    assert v == pytest.approx(expected, rel=1e-12)


def test_closed_form_rejects_custom_and_bad_inputs():
    params = FractionParams(1.0, 1.0)
    with pytest.raises(WeightFunctionError):
        two_point_fraction_closed_form(FractionKind.ESSEEN, WeightFunction.custom(lambda z: 1 + z), 0.6, 1, params)
    with pytest.raises(ValueError):
        two_point_fraction_closed_form(FractionKind.ESSEEN, G_STAR, 0.4, 1, params)
    with pytest.raises(ValueError):
        two_point_fraction_closed_form(FractionKind.ESSEEN, G_STAR, 0.6, 0, params)


# -- brute force vs closed forms ----------------------------------------------------

GRID_P = [0.5 + 0.05 * i for i in range(10)]
GRID_N = [1, 2, 5, 10, 37, 100]
GRID_EPS = [0.3, 1.0, 1.5, 3.0, math.inf]
GRID_GAMMA = [0.2, 0.56, 1.0, 2.0, 5.0]


def test_closed_forms_match_brute_force_on_grid():
    mismatches = []
    count = 0
    for p, n, eps, gamma in itertools.product(GRID_P, GRID_N, GRID_EPS, GRID_GAMMA):
        dists = [two_point(p)] * n
        params = FractionParams(eps, gamma)
        for (name, g), kind in itertools.product(CANONICAL.items(), KINDS):
            brute = fraction(kind, dists, g, params).value
            closed = two_point_fraction_closed_form(kind, g, p, n, params)
            count += 1
            if abs(brute - closed) > 1e-12 * max(1.0, abs(closed)):
                mismatches.append((p, n, eps, gamma, name, kind.value, brute, closed))
    assert count == 12_000
    assert not mismatches, mismatches[:5]


@given(st.floats(min_value=0.5, max_value=0.995), st.integers(min_value=1, max_value=300),
       st.one_of(st.floats(min_value=0.01, max_value=20.0), st.just(math.inf)),
       st.floats(min_value=0.01, max_value=20.0), st.sampled_from(sorted(CANONICAL)), st.sampled_from(KINDS))
def test_closed_forms_match_brute_force_random(p, n, eps, gamma, gname, kind):
    g = CANONICAL[gname]
    params = FractionParams(eps, gamma)
    brute = fraction(kind, [two_point(p)] * n, g, params).value
    closed = two_point_fraction_closed_form(kind, g, p, n, params)
    assert brute == pytest.approx(closed, rel=1e-12, abs=1e-12)


def test_reflected_two_point_has_same_fractions():
    for kind, g in itertools.product(KINDS, CANONICAL.values()):
        params = FractionParams(2.0, 0.7)
        a = fraction(kind, [two_point(0.3)] * 3, g, params).value
        b = fraction(kind, [two_point(0.7)] * 3, g, params).value
        assert a == pytest.approx(b, rel=1e-13)


def test_brute_force_method_tag():
    v = esseen_fraction([two_point(0.7)], G_STAR, FractionParams(1.0, 1.0))
    assert v.method is Method.BRUTE_FORCE
    assert float(v) == v.value
    assert 0 < v.attained_z <= 1.0 * 1.0


# -- brute force vs independent dense-grid oracle ----------------------------------

random_laws = st.builds(
    lambda vals, ws: _centered(vals, ws),
    st.lists(st.integers(min_value=-6, max_value=6), min_size=2, max_size=5, unique=True),
    st.lists(st.floats(min_value=0.05, max_value=1.0), min_size=5, max_size=5),
)


def _centered(vals, ws):
    ws = np.array(ws[:len(vals)])
    ps = ws / ws.sum()
    v = np.array(vals, float)
    v = v - float(np.dot(v, ps))
    order = np.argsort(v)
    return DiscreteDistribution(tuple(v[order]), tuple(ps[order] / math.fsum(ps)))


@given(st.lists(random_laws, min_size=1, max_size=3), st.sampled_from([0.4, 1.0, 2.5]),
       st.floats(min_value=0.1, max_value=4.0), st.sampled_from(sorted(CANONICAL)))
def test_brute_force_matches_dense_oracle(dists, eps, gamma, gname):
    g = CANONICAL[gname]
    b = _b(dists)
    params = FractionParams(eps, gamma)
    e = esseen_fraction(dists, g, params).value
    e_oracle = esseen_sup_oracle(dists, _absolute(g, b), eps, gamma)
    # the probes are a subset of (0, eps B): oracle <= exact, and the atom-hugging probes make it tight
    assert e_oracle <= e * (1 + 1e-9) + 1e-12
    assert e == pytest.approx(e_oracle, rel=1e-6, abs=1e-9)
    r = rozovskii_fraction(dists, g, params).value
    r_oracle = rozovskii_oracle(dists, _absolute(g, b), eps, gamma)
    assert r == pytest.approx(r_oracle, rel=1e-6, abs=1e-9)


# -- custom weights (branch and bound) -------------------------------------------------

def _custom_twins(b):
    return {
        "g*": WeightFunction.custom(lambda z: z),
        "gc": WeightFunction.custom(lambda z: 1.0, bounded=True),
        "g0": WeightFunction.custom(lambda z: min(z, b), bounded=True),
        "g1": WeightFunction.custom(lambda z: max(z, b)),
    }


@given(st.floats(min_value=0.5, max_value=0.98), st.integers(min_value=1, max_value=40),
       st.sampled_from([0.3, 1.0, 2.0, 5.0]), st.floats(min_value=0.05, max_value=5.0))
def test_custom_twins_reproduce_canonical(p, n, eps, gamma):
    dists = [two_point(p)] * n
    params = FractionParams(eps, gamma)
    for name, custom in _custom_twins(_b(dists)).items():
        for kind in KINDS:
            got = fraction(kind, dists, custom, params).value
            want = fraction(kind, dists, CANONICAL[name], params).value
            assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


@given(st.lists(random_laws, min_size=1, max_size=2), st.sampled_from([0.5, 1.0, 3.0]),
       st.floats(min_value=0.1, max_value=3.0), st.floats(min_value=0.05, max_value=0.95))
def test_custom_power_weight_against_oracle(dists, eps, gamma, delta):
    g = WeightFunction.custom(lambda z: 0.3 + z ** delta)
    params = FractionParams(eps, gamma)
    v = esseen_fraction(dists, g, params).value
    oracle = esseen_sup_oracle(dists, g, eps, gamma)
    assert oracle <= v * (1 + 1e-9) + 1e-12
    assert v == pytest.approx(oracle, rel=1e-5)


def test_custom_infinite_eps():
    dists = [two_point(0.7)] * 3
    bounded = WeightFunction.custom(lambda z: min(z, 2.0) + 0.1, bounded=True)
    unbounded = WeightFunction.custom(lambda z: 1.0 + z)
    params = FractionParams(math.inf, 1.0)
    assert rozovskii_fraction(dists, bounded, params).value > 0
    assert esseen_fraction(dists, unbounded, params).value > 0
    with pytest.raises(FractionError):
        rozovskii_fraction(dists, unbounded, params)


@given(st.lists(random_laws, min_size=1, max_size=3), st.sampled_from([0.5, 2.0, math.inf]),
       st.floats(min_value=0.1, max_value=3.0), st.sampled_from([0.1, 7.0]))
def test_scale_invariance(dists, eps, gamma, c):
    base = WeightFunction.custom(lambda z: 1.0 + min(z, 3.0), bounded=True)
    scaled = WeightFunction.custom(lambda z: c * (1.0 + min(z, 3.0)), bounded=True)
    params = FractionParams(eps, gamma)
    for kind in KINDS:
        a = fraction(kind, dists, base, params).value
        b = fraction(kind, dists, scaled, params).value
        assert b == pytest.approx(a, rel=1e-12)


@given(st.lists(random_laws, min_size=1, max_size=3), st.sampled_from([0.5, 1.0, 2.0, math.inf]),
       st.floats(min_value=0.1, max_value=3.0), st.floats(min_value=0.05, max_value=0.95))
def test_sandwich(dists, eps, gamma, delta):
    g = WeightFunction.custom(lambda z: 0.5 + min(z, 1.7) ** delta, bounded=True)
    params = FractionParams(eps, gamma)
    for kind in KINDS:
        lo = fraction(kind, dists, G_0, params).value
        mid = fraction(kind, dists, g, params).value
        hi = fraction(kind, dists, G_1, params).value
        assert lo <= mid * (1 + 1e-9) and mid <= hi * (1 + 1e-9)


@given(st.lists(random_laws, min_size=1, max_size=3), st.sampled_from([0.3, 1.0, 2.0, 6.0, math.inf]),
       st.floats(min_value=0.05, max_value=8.0))
def test_g1_fraction_range(dists, eps, gamma):
    params = FractionParams(eps, gamma)
    e = esseen_fraction(dists, G_1, params).value
    r = rozovskii_fraction(dists, G_1, params).value
    assert 1 - 1e-12 <= e <= max(eps, 1) * max(gamma, 1) * (1 + 1e-12)
    assert 1 - 1e-12 <= r <= max(eps, 1) * (gamma + 1) * (1 + 1e-12)


@given(st.floats(min_value=0.5, max_value=0.95), st.integers(min_value=1, max_value=20),
       st.floats(min_value=0.1, max_value=4.0))
def test_integrand_monotone_between_breakpoints(p, n, gamma):
    """With g* the Esseen integrand rises between breakpoints; with g_c it falls."""
    dists = [two_point(p)] * n
    b = _b(dists)
    mags = sorted({abs(x) for x in dists[0].values})
    edges = [0.0] + [m / b for m in mags] + [2 * mags[-1] / b]

    def integrand(weight, z):
        m = third_moment_fraction(dists, z)
        lind = lindeberg_fraction(dists, z)
        return weight(z * b, b) / (z * weight(b, b)) * (gamma * abs(m) + z * lind)

    for lo, hi in zip(edges, edges[1:]):
        if hi - lo < 1e-9 * hi:
            continue    # no representable interior to probe
        zs = np.linspace(lo, hi, 12)[1:-1]
        up = [integrand(G_STAR, z) for z in zs]
        down = [integrand(G_CONST, z) for z in zs]
        assert all(b2 >= a2 * (1 - 1e-12) for a2, b2 in zip(up, up[1:]))
        assert all(b2 <= a2 * (1 + 1e-12) for a2, b2 in zip(down, down[1:]))


def test_non_identical_summands():
    a = DiscreteDistribution((-1.0, 2.0), (2 / 3, 1 / 3))
    c = DiscreteDistribution((-3.0, 0.0, 3.0), (0.1, 0.8, 0.1))
    dists = [a, c, a]
    params = FractionParams(1.5, 0.8)
    for g in (G_STAR, G_0, G_1, G_CONST):
        v = esseen_fraction(dists, g, params).value
        assert v == pytest.approx(esseen_sup_oracle(dists, _absolute(g, _b(dists)), 1.5, 0.8), rel=1e-6)


def test_weight_kind_names():
    assert G_STAR.kind is WeightKind.GSTAR and G_STAR.name == "gstar"
    assert WeightFunction.custom(lambda z: 1 + z, label="affine").name == "affine"
