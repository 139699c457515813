import math

import mpmath as mp
import numpy as np
import pytest

from ecdim import DomainError, EnergyLimitParams, SearchCapExceeded, SpectrumModel, f_theorem1, f_theorem2, g_func
from ecdim.contbounds import (
    Lemma1Variant,
    Lemma2Variant,
    lemma1_bound,
    lemma2_f,
    lemma5_bound,
    truncation_distance,
    v_objective_value,
    v_theorem3,
)
from ecdim.spectrum import grounded_entropy_function, output_entropy_bound

mp.mp.dps = 40


def fhat_grounded(x):
    # one-mode oscillator bound with hbar*omega = 1, grounded argument
    return math.log(x + 1) + 1


# ---------------------------------------------------------------- lemma1_bound

def test_lemma1_closed_form():
    val = lemma1_bound(0.125, 1.0, fhat_grounded)
    g = lambda x: (x + 1) * mp.log(x + 1) - x * mp.log(x)  # noqa: E731
    ref = 2 * mp.mpf("0.5") * (mp.log(9) + 1) + 2 * g(mp.mpf("0.5"))
    assert val == pytest.approx(float(ref), rel=1e-14)


def test_lemma1_variants():
    eps, E = 0.1, 2.0
    gen = lemma1_bound(eps, E, fhat_grounded)
    eq = lemma1_bound(eps, E, fhat_grounded, "equal_bc")
    assert gen - eq == pytest.approx(g_func(math.sqrt(2 * eps)), rel=1e-14)
    pure = lemma1_bound(0.3, E, fhat_grounded, Lemma1Variant.PURE)
    assert pure == lemma1_bound(0.045, E, fhat_grounded)
    both = lemma1_bound(0.3, E, fhat_grounded, Lemma1Variant.PURE_EQUAL_MARGINAL_BC)
    assert both == lemma1_bound(0.045, E, fhat_grounded, "equal_bc")
    assert lemma1_bound(eps, E, fhat_grounded, base="two") == pytest.approx(gen / math.log(2))


def test_lemma1_domain():
    assert math.isfinite(lemma1_bound(0.5 - 1e-12, 1.0, fhat_grounded))
    assert lemma1_bound(0.0, 1.0, fhat_grounded) == 0.0
    with pytest.raises(DomainError):
        lemma1_bound(0.5, 1.0, fhat_grounded)
    with pytest.raises(DomainError):
        lemma1_bound(-0.1, 1.0, fhat_grounded)
    # pure variants accept eps up to 1 since eps^2 / 2 < 1/2
    assert math.isfinite(lemma1_bound(0.9, 1.0, fhat_grounded, "pure"))


def test_lemma1_decreases_to_zero():
    eps = np.logspace(-1, -12, 45)
    vals = [lemma1_bound(e, 3.0, fhat_grounded) for e in eps]
    assert np.all(np.diff(vals) < 0)
    # both terms scale like sqrt(eps) up to logarithms
    assert vals[-1] < 1e-3 * vals[0]
    assert vals[-1] < 1e3 * math.sqrt(1e-12)


# ---------------------------------------------------------------- lemma2_f

def test_lemma2_matches_theorem1(osc1):
    rng = np.random.default_rng(3)
    for _ in range(50):
        E = float(rng.uniform(0.51, 50))
        m = int(rng.integers(int(16 * (E - 0.5)) + 1, 10**11))
        q = f_theorem1("q", osc1, E, m).value
        assert lemma2_f(osc1, E, m) == pytest.approx(q, rel=1e-12)
        assert lemma2_f(osc1, E, m, "per_copy") == pytest.approx(f_theorem1("c", osc1, E, m).value, rel=1e-12)
        assert lemma2_f(osc1, E, m, "single_copy") == pytest.approx(f_theorem1("chi", osc1, E, m).value,
                                                                   rel=1e-12)
        eb = E - 0.5
        diff = lemma2_f(osc1, E, m) - lemma2_f(osc1, E, m, "per_copy")
        assert diff == pytest.approx(32 * eb / m * g_func(m / 16), rel=1e-9)


def test_lemma2_preconditions(osc1):
    with pytest.raises(DomainError):
        lemma2_f(osc1, 3, 20, Lemma2Variant.PER_COPY_ENERGY)
    with pytest.raises(DomainError):
        lemma2_f(osc1, 3, 5, Lemma2Variant.SINGLE_COPY)
    assert lemma2_f(osc1, 3, 5) > 0


def test_truncation_distance(osc1):
    assert truncation_distance(osc1, 3, 250) == pytest.approx(0.01 + 0.1)


# ---------------------------------------------------------------- lemma5_bound

def test_lemma5_closed_form():
    # t = 1/2, eps = 0: r = 1/2, h2(1/2) = log 2
    F = output_entropy_bound(SpectrumModel.oscillator(1.0))
    E, p = 2.0, 3.0
    ep = p * E
    ref = 3 * g_func(2 * ep) + 2 * g_func(0.5) + 4 * math.log(2) + (2 / p) * g_func(ep)
    assert lemma5_bound(0.0, E, EnergyLimitParams(), F, p, 0.5) == pytest.approx(ref, rel=1e-14)


def test_lemma5_per_copy_drops_last_term():
    F = output_entropy_bound(SpectrumModel.oscillator(1.0))
    params = EnergyLimitParams(2.0, 1.0)
    full = lemma5_bound(0.01, 3.0, params, F, 1.0 + 1e-15, 0.1)
    per = lemma5_bound(0.01, 3.0, params, F, 7.0, 0.1, per_copy=True)
    assert full - per == pytest.approx(2 * F(2.0 * 3.0 + 1.0), rel=1e-12)
    with pytest.raises(DomainError):
        lemma5_bound(0.01, 3.0, params, F, 1.0, 0.1)
    with pytest.raises(DomainError):
        lemma5_bound(0.01, 3.0, params, F, 2.0, 0.6)


@pytest.mark.parametrize("source", ["exact", "fhat"])
def test_theorem2_is_lemma5_of_truncation_distance(osc1, source):
    rng = np.random.default_rng(17)
    F = output_entropy_bound(osc1, source)
    for _ in range(200):
        E = float(rng.uniform(0.6, 200))
        m = int(rng.integers(1, 10**12))
        params = EnergyLimitParams(float(rng.uniform(0.1, 1e6)), float(rng.uniform(0, 1e6)))
        t = float(rng.uniform(1e-8, 0.5))
        p = float(np.exp(rng.uniform(1e-6, 12)))
        eps = truncation_distance(osc1, E, m)
        q = f_theorem2("q", osc1, F, params, E, m, t=t, p=p).value
        assert q == pytest.approx(lemma5_bound(eps, E, params, F, p, t), rel=1e-12)
        c = f_theorem2("c", osc1, F, params, E, m, t=t).value
        assert c == pytest.approx(lemma5_bound(eps, E, params, F, 1.0, t, per_copy=True), rel=1e-12)


def test_minimized_lemma5_matches_theorem2(osc1):
    res = f_theorem2("q", osc1, None, EnergyLimitParams(), 3.0, 10**5)
    F = output_entropy_bound(osc1)
    eps = truncation_distance(osc1, 3.0, 10**5)
    at_witness = lemma5_bound(eps, 3.0, EnergyLimitParams(), F, res.witnesses["p"], res.witnesses["t"])
    assert at_witness == pytest.approx(res.value, rel=1e-12)
    for t in np.linspace(0.001, 0.5, 30):
        for p in (1.5, 3.0, 30.0, 300.0):
            assert lemma5_bound(eps, 3.0, EnergyLimitParams(), F, p, t) >= res.value * (1 - 1e-9)


# ---------------------------------------------------------------- v_theorem3

def brute_v_chi(E, eps, m_max, chunk=10**7):
    """Independent vectorized scan of the one-mode Chi objective over m."""
    eb = E - 0.5
    best, best_m = math.inf, None
    g = lambda x: np.log1p(x) + x * np.log1p(1 / x)  # noqa: E731
    for start in range(int(math.ceil(16 * eb)), m_max + 1, chunk):
        m = np.arange(start, min(start + chunk, m_max + 1), dtype=float)
        x = np.sqrt(2 * m / eb * eps)
        r = eb / m
        s = r + np.sqrt(r)
        f = 2 * np.sqrt(2 * s) * g(eb / s) + g(np.sqrt(2 * s))
        obj = x * np.log(2 * m) + 2 * g(x) + 2 * f
        i = int(np.argmin(obj))
        if obj[i] < best:
            best, best_m = float(obj[i]), int(m[i])
    return best, best_m


def test_v_theorem3_golden(osc1):
    res = v_theorem3("chi", osc1, 3.0, 1e-6)
    assert res.witnesses["m"] == 13326
    assert res.value == pytest.approx(6.82476062, rel=1e-8)
    best, best_m = brute_v_chi(3.0, 1e-6, 10**8)
    assert res.witnesses["m"] == best_m
    assert res.value == pytest.approx(best, rel=1e-12)


@pytest.mark.parametrize("kind", ["chi", "c", "q", "p"])
def test_v_theorem3_local_minimality(osc1, kind):
    res = v_theorem3(kind, osc1, 3.0, 1e-4)
    m = res.witnesses["m"]
    assert m >= 40
    for k in (m - 1, m + 1):
        if k >= 40:
            assert v_objective_value(kind, osc1, 3.0, 1e-4, k) >= res.value


def test_v_theorem3_orderings(osc1):
    eps = [1e-8, 1e-6, 1e-4, 1e-2]
    vals = [v_theorem3("q", osc1, 10.0, e).value for e in eps]
    assert vals == sorted(vals)
    for e in eps:
        assert v_theorem3("p", osc1, 10.0, e).value >= v_theorem3("q", osc1, 10.0, e).value


def test_v_theorem3_errors(osc1):
    with pytest.raises(DomainError):
        v_theorem3("ea", osc1, 3.0, 1e-3)
    with pytest.raises(DomainError):
        v_theorem3("chi", osc1, 0.5, 1e-3)
    with pytest.raises(SearchCapExceeded):
        v_theorem3("chi", osc1, 3.0, 1e-3, cap=10)
    with pytest.raises(DomainError):
        v_objective_value("chi", osc1, 3.0, 1e-3, 10)


def test_v_theorem3_multimode_and_base():
    spec = SpectrumModel.oscillator([1.0, 1.5])
    E = spec.ground_energy + 0.5
    res = v_theorem3("c", spec, E, 1e-3)
    assert math.isfinite(res.value) and res.witnesses["cap"] <= 10**7
    two = v_theorem3("c", spec, E, 1e-3, base="two")
    assert two.witnesses["m"] == res.witnesses["m"]
    assert two.value == pytest.approx(res.value / math.log(2), rel=1e-12)
    F = grounded_entropy_function(spec)
    assert v_theorem3("c", spec, E, 1e-3, fbar_fn=F).value == pytest.approx(res.value, rel=1e-12)
