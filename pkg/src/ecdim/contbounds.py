"""Continuity bounds: QCMI bounds, truncation bounds and capacity continuity.

All values are computed in nats and converted to ``base`` on return.
Entropy-function handles passed in (``fstar``, ``fB``) must return nats.
"""

from __future__ import annotations

import enum
import math
from typing import Callable, Optional

from .dimbounds import (
    ANALYTIC_CAP,
    DEFAULT_CAP,
    BoundEvaluation,
    CapacityKind,
    EnergyLimitParams,
    _f1_nat,
    _Gaps,
    _grounded,
    _resolve_fbar,
)
from .errors import DegenerateInputError, DomainError, SearchCapExceeded
from .scalarfun import LogBase, _g_scalar, _h2_scalar, to_base
from .spectrum import SpectrumModel, energy_value


class Lemma1Variant(enum.Enum):
    GENERAL = "general"
    EQUAL_MARGINAL_BC = "equal_bc"
    PURE = "pure"
    PURE_EQUAL_MARGINAL_BC = "pure_equal_bc"


class Lemma2Variant(enum.Enum):
    GENERAL = "general"
    PER_COPY_ENERGY = "per_copy"
    SINGLE_COPY = "single_copy"


def lemma1_bound(eps: float, E: float, fstar: Callable, variant=Lemma1Variant.GENERAL,
                 base=LogBase.NATURAL) -> float:
    """QCMI continuity bound 2 sqrt(2 eps) F*(E/eps) + 2 g(sqrt(2 eps)).

    With equal BC marginals the g-term is halved; for pure states eps is
    replaced by eps^2 / 2 before evaluation. ``fstar`` is the caller's
    maximum-entropy function of the energy observable on the AD support.
    """
    variant = Lemma1Variant(variant)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    if variant in (Lemma1Variant.PURE, Lemma1Variant.PURE_EQUAL_MARGINAL_BC):
        eps = eps * eps / 2
    if eps == 0:
        return 0.0
    if not eps < 0.5:
        raise DomainError("eps must be below 1/2 after substitution")
    d = math.sqrt(2 * eps)
    g_coef = 1.0 if variant in (Lemma1Variant.EQUAL_MARGINAL_BC,
                                Lemma1Variant.PURE_EQUAL_MARGINAL_BC) else 2.0
    val = 2 * d * float(fstar(E / eps)) + g_coef * _g_scalar(d)
    return to_base(val, base)


def lemma2_f(specA: SpectrumModel, E, m: int, variant=Lemma2Variant.GENERAL, *,
             source: str = "exact", fbar_fn: Optional[Callable] = None,
             base=LogBase.NATURAL) -> float:
    """Mutual-information truncation bound f(E, m) and its two specializations."""
    variant = Lemma2Variant(variant)
    _, eb = _grounded(specA, E)
    gap = _Gaps(specA)(int(m))
    if gap <= 0:
        raise DegenerateInputError("zero grounded gap E_m - E_0")
    F = _resolve_fbar(specA, source, fbar_fn)
    if variant is Lemma2Variant.GENERAL:
        val = _f1_nat(CapacityKind.QUANTUM, eb, gap, F)
    elif variant is Lemma2Variant.PER_COPY_ENERGY:
        if not eb < gap / 16:
            raise DomainError("per-copy variant needs E - E_0 < (E_m - E_0) / 16")
        val = _f1_nat(CapacityKind.CLASSICAL, eb, gap, F)
    else:
        r = eb / gap
        if not r + math.sqrt(r) < 0.5:
            raise DomainError("single-copy variant needs s < 1/2")
        val = _f1_nat(CapacityKind.CHI, eb, gap, F)
    return to_base(val, base)


def lemma5_bound(eps: float, E, params: EnergyLimitParams, fB: Callable, p: float, t: float,
                 per_copy: bool = False, base=LogBase.NATURAL) -> float:
    """Energy-limited QCMI continuity bound at fixed (p, t).

    (4t + 2r) F_B(E_p/t) + 2 g(r) + 4 h2(t) + (2/p) F_B(E_p), with
    E_p = alpha p E + Ec and r = (eps + t/2) / (1 - t). ``per_copy`` forces
    p = 1 and drops the last term. eps = 0 is evaluated as is: r = t/2/(1-t)
    keeps every term finite.
    """
    E = energy_value(E)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    if not 0 < t <= 0.5:
        raise DomainError("t must lie in (0, 1/2]")
    if per_copy:
        p = 1.0
    elif not p > 1:
        raise DomainError("p must exceed 1")
    ep = params.alpha * p * E + params.Ec
    r = (eps + t / 2) / (1 - t)
    val = (4 * t + 2 * r) * float(fB(ep / t)) + 2 * _g_scalar(r) + 4 * _h2_scalar(t)
    if not per_copy:
        val += (2 / p) * float(fB(ep))
    return to_base(val, base)


def truncation_distance(specA: SpectrumModel, E, m: int) -> float:
    """Upper bound on half the energy-constrained diamond distance between a
    channel and its composition with the m-level truncation channel."""
    _, eb = _grounded(specA, E)
    gap = _Gaps(specA)(int(m))
    if gap <= 0:
        raise DegenerateInputError("zero grounded gap E_m - E_0")
    r = eb / gap
    return r + math.sqrt(r)


_V_COEFS = {
    CapacityKind.CHI: (1.0, 2.0),
    CapacityKind.CLASSICAL: (2.0, 2.0),
    CapacityKind.QUANTUM: (2.0, 2.0),
    CapacityKind.PRIVATE: (4.0, 4.0),
}


def _v_objective(kind, specA, eb, eps, gaps, F):
    c1, c2 = _V_COEFS[kind]

    def obj(m):
        gap = gaps(m)
        x = math.sqrt(2 * gap / eb * eps)
        return c1 * x * math.log(2 * m) + c2 * _g_scalar(x) + 2 * _f1_nat(kind, eb, gap, F)
    return obj


def v_theorem3(kind, specA: SpectrumModel, E, eps: float, *, source: str = "exact",
               fbar_fn: Optional[Callable] = None, base=LogBase.NATURAL,
               cap: Optional[int] = None, patience: int = 8) -> BoundEvaluation:
    """Capacity continuity bound v_{C*}(eps, E), minimized over admissible m.

    The m-scan doubles from the admissibility floor until the objective has
    exceeded the incumbent for ``patience`` consecutive doublings, then
    narrows by integer ternary search and finishes with a local scan.
    Witnesses report the minimizing m and the search cap.
    """
    kind = CapacityKind.coerce(kind)
    if kind is CapacityKind.EA:
        raise DomainError("no continuity bound of this form for the entanglement-assisted capacity")
    E, eb = _grounded(specA, E)
    if eb <= 0:
        raise DomainError("v_theorem3 needs E strictly above the ground energy")
    if eps <= 0:
        raise DomainError("eps must be positive")
    b = LogBase.coerce(base)
    gaps = _Gaps(specA)
    F = _resolve_fbar(specA, source, fbar_fn)
    cap = min(cap or (ANALYTIC_CAP if specA.is_single_mode else DEFAULT_CAP), gaps.max_index)
    floor = gaps.floor(16 * eb)
    if floor > cap:
        raise SearchCapExceeded(f"admissible set starts at {floor}, beyond the cap {cap}", cap=cap)
    obj = _v_objective(kind, specA, eb, eps, gaps, F)

    best_m, best = floor, obj(floor)
    m, worse = floor, 0
    while worse < patience and m < cap:
        m = min(2 * m, cap)
        val = obj(m)
        if val < best:
            best_m, best, worse = m, val, 0
        else:
            worse += 1
    # the minimum lies between the doubling points around the incumbent
    lo = max(floor, best_m // 2)
    hi = min(cap, 2 * best_m)
    while hi - lo > 2:
        a = lo + (hi - lo) // 3
        c = hi - (hi - lo) // 3
        if obj(a) <= obj(c):
            hi = c
        else:
            lo = a
    for k in range(max(floor, lo - 2), min(cap, hi + 2) + 1):
        val = obj(k)
        if val < best:
            best_m, best = k, val
    # local descent guards against a flat ternary bracket
    while True:
        moved = False
        for k in (best_m - 1, best_m + 1):
            if floor <= k <= cap:
                val = obj(k)
                if val < best:
                    best_m, best, moved = k, val, True
        if not moved:
            break
    return BoundEvaluation(to_base(best, b), {"m": best_m, "cap": cap}, True, b)


def v_objective_value(kind, specA: SpectrumModel, E, eps: float, m: int, *,
                      source: str = "exact", fbar_fn: Optional[Callable] = None,
                      base=LogBase.NATURAL) -> float:
    """The bracketed expression minimized by ``v_theorem3``, at a single m."""
    kind = CapacityKind.coerce(kind)
    _, eb = _grounded(specA, E)
    gaps = _Gaps(specA)
    if gaps(int(m)) < 16 * eb:
        raise DomainError(f"m={m} is outside the admissible set")
    obj = _v_objective(kind, specA, eb, eps, gaps, _resolve_fbar(specA, source, fbar_fn))
    return to_base(obj(int(m)), base)
