"""Randomized brute-force checks of the finite-dimensional inequalities.

Each ``check_*`` taking concrete operators tests a single instance and
returns a :class:`CheckResult`. The suite runners draw random instances,
one independent PRNG stream per trial derived from ``(seed, trial)``, and
merge the outcomes into a :class:`VerificationReport`.

A comparison ``lhs <= rhs`` is a violation when ``lhs - rhs`` exceeds the
slack for that inequality. ``max_margin_used`` is the largest ``lhs - rhs``
seen over all evaluated comparisons; a negative value means every instance
held with room to spare.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..contbounds import Lemma1Variant, lemma1_bound
from ..dimbounds import f_theorem1
from ..errors import DomainError
from ..scalarfun import _h2_scalar
from ..spectrum import SpectrumModel, gibbs_entropy
from .quantum import (
    ChannelRep,
    Ensemble,
    conditional_entropy,
    conditional_mutual_information,
    holevo_quantity,
    mutual_information,
    partial_trace,
    permute_systems,
    random_isometry,
    random_projector,
    random_state,
    random_unitary,
    trace_distance,
    trace_norm,
    truncate,
    von_neumann_entropy,
)

SLACK_OPERATOR = 1e-9
SLACK_TAIL = 1e-12
SLACK_ENTROPY = 1e-6
SLACK_TRACE = 1e-10

DEFAULT_SEED = 7


@dataclass
class CheckResult:
    passed: bool
    lhs: float
    rhs: float
    slack: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


def _result(lhs, rhs, slack):
    lhs, rhs = float(lhs), float(rhs)
    return CheckResult(lhs - rhs <= slack, lhs, rhs, slack)


@dataclass
class VerificationReport:
    check: str
    trials: int
    dims: list
    seed: int
    violations: list = field(default_factory=list)
    max_margin_used: float = -math.inf
    evaluated: int = 0
    skipped: int = 0
    slack: dict = field(default_factory=dict)
    by_inequality: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["max_margin_used"] == -math.inf:
            d["max_margin_used"] = None
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# --------------------------------------------------------------------------
# single-instance checks
# --------------------------------------------------------------------------

def _complement(P):
    return np.eye(P.shape[0]) - P


def check_gentle(rho, P, slack=SLACK_OPERATOR) -> CheckResult:
    """||(I - P) rho P||_1 <= sqrt(Tr (I - P) rho)."""
    Q = _complement(P)
    lhs = trace_norm(Q @ rho @ P)
    rhs = math.sqrt(max(np.trace(Q @ rho).real, 0.0))
    return _result(lhs, rhs, slack)


def pinch(rho, P, tau):
    """P rho P + Tr((I - P) rho) tau."""
    return P @ rho @ P + np.trace(_complement(P) @ rho) * tau


def check_pinching(omega, P, tau, dims, slack=SLACK_OPERATOR) -> CheckResult:
    """||omega - (Pi (x) id)(omega)||_1 <= 2x + 2 sqrt(x), x = Tr (I - P) omega_A.

    ``dims = (dA, dB)``; the pinching acts on the first factor.
    """
    dA, dB = dims
    IB = np.eye(dB)
    PP = np.kron(P, IB)
    rest = np.kron(_complement(P), IB) @ omega
    pinched = PP @ omega @ PP + np.kron(tau, partial_trace(rest, dims, [1]))
    x = max(np.trace(_complement(P) @ partial_trace(omega, dims, [0])).real, 0.0)
    lhs = trace_norm(omega - pinched)
    return _result(lhs, 2 * x + 2 * math.sqrt(x), slack)


def check_tail_bound(spec: SpectrumModel, rho, m: int, slack=SLACK_TAIL) -> CheckResult:
    """Tr (I - P_m) rho <= (Tr H rho - E_0) / (E_m - E_0) for explicit H = diag(levels).

    P_m projects onto the m lowest levels.
    """
    if spec.kind != "explicit":
        raise DomainError("check_tail_bound needs an explicit spectrum")
    levels = np.sort(np.asarray(spec.levels))
    if not 0 < m < len(levels):
        raise DomainError("m must lie in 1..dim-1")
    gap = levels[m] - levels[0]
    if gap <= 0:
        raise DomainError("E_m must exceed E_0")
    diag = np.diag(rho).real
    lhs = diag[m:].sum()
    rhs = (float(levels @ diag) - levels[0]) / gap
    return _result(lhs, rhs, slack)


# --------------------------------------------------------------------------
# trial driver
# --------------------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ECDIM_THREADS", "1")))
    except ValueError:
        return 1


def _run(check: str, trial_fn: Callable, trials: int, seed: int, dims, slacks: dict,
         notes=()) -> VerificationReport:
    """Run ``trial_fn(rng)`` per trial and merge the outcomes in trial order.

    ``trial_fn`` returns ``None`` for a skipped trial, else a list of
    ``(name, lhs, rhs)`` comparisons whose slack is ``slacks[name]``.
    """
    if trials < 0:
        raise DomainError("trials must be nonnegative")

    def one(i):
        return trial_fn(np.random.default_rng([seed, i]))

    n = _threads()
    if n > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            outcomes = list(pool.map(one, range(trials)))
    else:
        outcomes = [one(i) for i in range(trials)]

    rep = VerificationReport(check, trials, list(dims), int(seed), slack=dict(slacks),
                             notes=list(notes))
    for i, out in enumerate(outcomes):
        if out is None:
            rep.skipped += 1
            continue
        rep.evaluated += 1
        for name, lhs, rhs in out:
            margin = float(lhs) - float(rhs)
            stats = rep.by_inequality.setdefault(name, {"count": 0, "max_margin": -math.inf})
            stats["count"] += 1
            stats["max_margin"] = max(stats["max_margin"], margin)
            rep.max_margin_used = max(rep.max_margin_used, margin)
            if margin > slacks[name]:
                rep.violations.append({"trial": i, "inequality": name, "lhs": float(lhs),
                                       "rhs": float(rhs), "margin": margin})
    return rep


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------

def suite_gentle(trials=10_000, seed=DEFAULT_SEED, max_dim=6) -> VerificationReport:
    def trial(rng):
        d = int(rng.integers(1, max_dim + 1))
        rho = random_state(d, rng, rank=int(rng.integers(1, d + 1)))
        r = check_gentle(rho, random_projector(d, rng))
        return [("gentle", r.lhs, r.rhs)]
    return _run("gentle", trial, trials, seed, [max_dim], {"gentle": SLACK_OPERATOR})


def suite_pinching(trials=10_000, seed=DEFAULT_SEED, max_dim=4) -> VerificationReport:
    def trial(rng):
        dA, dB = (int(x) for x in rng.integers(1, max_dim + 1, size=2))
        omega = random_state(dA * dB, rng, rank=int(rng.integers(1, dA * dB + 1)))
        P = random_projector(dA, rng)
        tau = random_state(dA, rng, rank=int(rng.integers(1, dA + 1)))
        r = check_pinching(omega, P, tau, (dA, dB))
        return [("pinching", r.lhs, r.rhs)]
    return _run("pinching", trial, trials, seed, [max_dim, max_dim], {"pinching": SLACK_OPERATOR})


def _random_levels(d, rng):
    # small integer grid so that degenerate levels show up regularly
    levels = np.sort(rng.integers(0, 2 * d, size=d).astype(float)) * rng.uniform(0.1, 5.0)
    return levels + rng.uniform(-2.0, 2.0)


def suite_tail_bound(trials=10_000, seed=DEFAULT_SEED, max_dim=12) -> VerificationReport:
    def trial(rng):
        d = int(rng.integers(2, max_dim + 1))
        levels = _random_levels(d, rng)
        ms = np.nonzero(levels > levels[0])[0]
        if ms.size == 0:
            return None
        m = int(rng.choice(ms))
        rho = random_state(d, rng, rank=int(rng.integers(1, d + 1)))
        # tilt towards the low levels in half of the trials
        if rng.random() < 0.5:
            w = np.exp(-rng.uniform(0, 3) * np.arange(d) / d)
            rho = w[:, None] * rho * w[None, :]
            rho /= np.trace(rho).real
        r = check_tail_bound(SpectrumModel.explicit(levels), rho, m)
        return [("tail_bound", r.lhs, r.rhs)]
    return _run("tail_bound", trial, trials, seed, [max_dim], {"tail_bound": SLACK_TAIL})


def _mix_weight(rng):
    u = rng.random()
    if u < 0.05:
        return 0.0
    if u < 0.10:
        return 1.0
    return float(rng.random())


def _rand_rank_state(d, rng):
    return random_state(d, rng, rank=int(rng.integers(1, d + 1)))


MISC_SLACKS = {
    "mi_upper": SLACK_ENTROPY,
    "entropy_mixture": SLACK_ENTROPY,
    "qcmi_mixture": SLACK_ENTROPY,
    "cond_entropy_concave": SLACK_ENTROPY,
    "cond_entropy_mixture": SLACK_ENTROPY,
    "qcmi_nonneg": SLACK_OPERATOR,
}


def check_misc_inequalities(trials=10_000, seed=DEFAULT_SEED, max_factor=3) -> VerificationReport:
    """Mutual information, mixture and concavity inequalities on random states.

    Per trial, with factor dimensions drawn from 2..max_factor:
    I(A:B) <= 2 min(H(A), H(B)); H(mix) <= pH(rho) + (1-p)H(sigma) + h2(p);
    |p I(A:B|C)_rho + (1-p) I(A:B|C)_sigma - I(A:B|C)_mix| <= h2(p);
    p H(A|B)_rho + (1-p) H(A|B)_sigma <= H(A|B)_mix <= the same + h2(p);
    and I(A:B|C) >= 0.
    """
    def trial(rng):
        dA, dB, dC = (int(x) for x in rng.integers(2, max_factor + 1, size=3))
        out = []
        ab = (dA, dB)
        rho = _rand_rank_state(dA * dB, rng)
        hA = von_neumann_entropy(partial_trace(rho, ab, [0]))
        hB = von_neumann_entropy(partial_trace(rho, ab, [1]))
        out.append(("mi_upper", mutual_information(rho, ab), 2 * min(hA, hB)))

        p = _mix_weight(rng)
        h2p = _h2_scalar(p)
        sigma = _rand_rank_state(dA * dB, rng)
        mix = p * rho + (1 - p) * sigma
        out.append(("entropy_mixture", von_neumann_entropy(mix),
                    p * von_neumann_entropy(rho) + (1 - p) * von_neumann_entropy(sigma) + h2p))
        avg_ce = p * conditional_entropy(rho, ab) + (1 - p) * conditional_entropy(sigma, ab)
        ce_mix = conditional_entropy(mix, ab)
        out.append(("cond_entropy_concave", avg_ce, ce_mix))
        out.append(("cond_entropy_mixture", ce_mix, avg_ce + h2p))

        abc = (dA, dB, dC)
        r3 = _rand_rank_state(dA * dB * dC, rng)
        s3 = _rand_rank_state(dA * dB * dC, rng)
        m3 = p * r3 + (1 - p) * s3
        ir = conditional_mutual_information(r3, abc, [0], [1], [2])
        is_ = conditional_mutual_information(s3, abc, [0], [1], [2])
        im = conditional_mutual_information(m3, abc, [0], [1], [2])
        out.append(("qcmi_mixture", abs(p * ir + (1 - p) * is_ - im), h2p))
        out.append(("qcmi_nonneg", -ir, 0.0))
        return out
    return _run("misc", trial, trials, seed, [max_factor] * 3, MISC_SLACKS)


# --------------------------------------------------------------------------
# QCMI continuity on four factors
# --------------------------------------------------------------------------

LEMMA1_NOTE = ("the energy observable acts on the whole AD space, which contains the "
               "supports of both AD marginals")

LEMMA1_SLACKS = {v.value: SLACK_ENTROPY for v in Lemma1Variant}


def _adbc_to_abcd(rho, dims):
    dA, dB, dC, dD = dims
    # stored order is A, D, B, C; new factor j is old factor order[j]
    return permute_systems(rho, [dA, dD, dB, dC], [0, 2, 3, 1])


def _cooled_vector(W, d_rest, rng):
    v = rng.standard_normal(W.shape[0] * d_rest) + 1j * rng.standard_normal(W.shape[0] * d_rest)
    v = (np.kron(W, np.eye(d_rest)) @ v)
    return v / np.linalg.norm(v)


def _cooled_state(W, d_rest, rng):
    d = W.shape[0] * d_rest
    k = int(rng.integers(1, d + 1))
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    g = np.kron(W, np.eye(d_rest)) @ g
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _lemma1_instance(rho, sigma, dims, H, spec, eps, variant):
    abcd = list(dims)
    dAD = dims[0] * dims[3]
    e_r = np.trace(H @ partial_trace(rho, abcd, [0, 3]).reshape(dAD, dAD)).real
    e_s = np.trace(H @ partial_trace(sigma, abcd, [0, 3]).reshape(dAD, dAD)).real
    E = max(e_r, e_s)
    lhs = abs(conditional_mutual_information(rho, abcd, [0], [1], [2])
              - conditional_mutual_information(sigma, abcd, [0], [1], [2]))

    def fstar(x):
        return gibbs_entropy(spec, x).entropy
    return lhs, lemma1_bound(eps, E, fstar, variant)


def check_lemma1(dims: Sequence[int] = (2, 2, 2, 2), trials=1_000, seed=DEFAULT_SEED) -> VerificationReport:
    """QCMI continuity under an energy constraint on AD, all four variants.

    Each trial draws a positive H* on AD and one pair per variant: a
    general mixed pair; a mixed pair with equal BC marginals, obtained by
    mixing rho with the output of a random channel acting on AD; a pure pair
    at prescribed distance along the great circle; and a pure pair related by
    a unitary on AD. States are tilted towards low H* energy so that the
    entropy term is not saturated at log(dA dD).
    """
    dims = tuple(int(x) for x in dims)
    if len(dims) != 4 or min(dims) < 1:
        raise DomainError("dims must give four positive factor dimensions A, B, C, D")
    dA, dB, dC, dD = dims
    dAD, dBC = dA * dD, dB * dC

    def trial(rng):
        scale = rng.uniform(1.0, 20.0)
        levels = np.sort(rng.uniform(0.0, scale, size=dAD))
        U = random_unitary(dAD, rng)
        H = (U * levels) @ U.conj().T
        spec = SpectrumModel.explicit(levels)
        beta = rng.uniform(0.0, 8.0) / scale
        W = (U * np.exp(-beta * levels / 2)) @ U.conj().T
        out = []

        # general mixed pair at trace distance eps by linear mixing
        r0 = _cooled_state(W, dBC, rng)
        r1 = _cooled_state(W, dBC, rng)
        T = trace_distance(r0, r1)
        eps = math.exp(rng.uniform(math.log(1e-3), math.log(min(T, 0.499))))
        s0 = (1 - eps / T) * r0 + (eps / T) * r1
        rho, sigma = _adbc_to_abcd(r0, dims), _adbc_to_abcd(s0, dims)
        out.append(("general",) + _lemma1_instance(rho, sigma, dims, H, spec, eps,
                                                   Lemma1Variant.GENERAL))

        # equal BC marginals: sigma = (1-x) rho + x (N_AD (x) id)(rho)
        V = random_isometry(dAD, dAD * 2, rng).reshape(dAD, 2, dAD)
        kraus = [np.kron(V[:, e, :], np.eye(dBC)) for e in range(2)]
        n0 = sum(K @ r0 @ K.conj().T for K in kraus)
        T = trace_distance(r0, n0)
        if T > 1e-9:
            eps = math.exp(rng.uniform(math.log(1e-3), math.log(min(T, 0.499))))
            s0 = (1 - eps / T) * r0 + (eps / T) * n0
            sigma = _adbc_to_abcd(s0, dims)
            bc_gap = np.max(np.abs(partial_trace(rho, list(dims), [1, 2])
                                   - partial_trace(sigma, list(dims), [1, 2])))
            if bc_gap > 1e-12:
                raise DomainError("equal-marginal construction lost BC equality")
            out.append(("equal_bc",) + _lemma1_instance(rho, sigma, dims, H, spec, eps,
                                                        Lemma1Variant.EQUAL_MARGINAL_BC))

        # pure pair at trace distance eps = sin(theta)
        psi = _cooled_vector(W, dBC, rng)
        phi = _cooled_vector(W, dBC, rng)
        perp = phi - np.vdot(psi, phi) * psi
        if np.linalg.norm(perp) > 1e-9:
            perp /= np.linalg.norm(perp)
            eps = math.exp(rng.uniform(math.log(1e-3), math.log(0.499)))
            chi = math.sqrt(1 - eps * eps) * psi + eps * perp
            rho_p = _adbc_to_abcd(np.outer(psi, psi.conj()), dims)
            sig_p = _adbc_to_abcd(np.outer(chi, chi.conj()), dims)
            out.append(("pure",) + _lemma1_instance(rho_p, sig_p, dims, H, spec, eps,
                                                    Lemma1Variant.PURE))

        # pure pair with equal BC marginals: unitary on AD close to identity
        K = rng.standard_normal((dAD, dAD)) + 1j * rng.standard_normal((dAD, dAD))
        K = (K + K.conj().T) / 2
        w, Q = np.linalg.eigh(K)
        theta = rng.uniform(0.01, 0.5) / max(np.max(np.abs(w)), 1e-12)
        for _ in range(60):
            Ut = (Q * np.exp(-1j * theta * w)) @ Q.conj().T
            chi = np.kron(Ut, np.eye(dBC)) @ psi
            eps = math.sqrt(max(1 - abs(np.vdot(psi, chi)) ** 2, 0.0))
            if eps < 0.499:
                break
            theta /= 2
        if eps > 0:
            rho_p = _adbc_to_abcd(np.outer(psi, psi.conj()), dims)
            sig_p = _adbc_to_abcd(np.outer(chi, chi.conj()), dims)
            out.append(("pure_equal_bc",) + _lemma1_instance(rho_p, sig_p, dims, H, spec, eps,
                                                             Lemma1Variant.PURE_EQUAL_MARGINAL_BC))
        return out
    return _run("lemma1", trial, trials, seed, dims, LEMMA1_SLACKS, notes=[LEMMA1_NOTE])


# --------------------------------------------------------------------------
# Holevo quantity under input truncation
# --------------------------------------------------------------------------

CHI_SLACKS = {"chi_truncation": SLACK_ENTROPY, "channel_trace": SLACK_TRACE,
              "channel_positivity": SLACK_OPERATOR}


def check_chi_truncation(dA=8, dB=4, m=6, trials=1_000, seed=DEFAULT_SEED,
                         levels: Optional[Sequence[float]] = None) -> VerificationReport:
    """Change of the output Holevo quantity when inputs are truncated to m levels.

    Random Stinespring channels A -> B and random low-energy ensembles on A
    with spectrum ``levels`` (default E_k = k). The bound is the single-copy
    truncation bound at the ensemble's average energy; trials whose
    truncation distance s is at least 1/2 are skipped. Channel outputs are
    also checked for unit trace and positivity.
    """
    if levels is None:
        levels = np.arange(dA, dtype=float)
    levels = np.sort(np.asarray(levels, dtype=float))
    if len(levels) != dA:
        raise DomainError("need one level per input dimension")
    spec = SpectrumModel.explicit(levels)
    E0 = levels[0]

    def trial(rng):
        dE = int(rng.integers(2, 5))
        ch = ChannelRep.random(dA, dB, dE, rng)
        n = int(rng.integers(2, 5))
        probs = rng.dirichlet(np.ones(n))
        beta = rng.uniform(1.5, 6.0)
        w = np.exp(-beta * (levels - E0) / 2)
        states = []
        for _ in range(n):
            k = int(rng.integers(1, dA + 1))
            g = w[:, None] * (rng.standard_normal((dA, k)) + 1j * rng.standard_normal((dA, k)))
            s = g @ g.conj().T
            states.append(s / np.trace(s).real)
        ens = Ensemble(probs, states)
        E = float(levels @ np.diag(ens.average()).real)
        out_full = ens.mapped(ch)
        checks = []
        for s in out_full.states:
            checks.append(("channel_trace", abs(np.trace(s).real - 1), 0.0))
            checks.append(("channel_positivity", -np.linalg.eigvalsh(s).min(), 0.0))
        if m >= dA:
            bound = 0.0
        else:
            gap = levels[m] - E0
            r = (E - E0) / gap
            if gap <= 0 or r + math.sqrt(r) >= 0.5:
                return None
            bound = f_theorem1("chi", spec, E, m).value
        out_trunc = ens.mapped(lambda s: ch(truncate(s, m)))
        lhs = abs(holevo_quantity(out_full) - holevo_quantity(out_trunc))
        checks.append(("chi_truncation", lhs, bound))
        return checks
    return _run("chi_truncation", trial, trials, seed, [dA, dB, m], CHI_SLACKS)


SUITES = {
    "gentle": suite_gentle,
    "pinching": suite_pinching,
    "tail_bound": suite_tail_bound,
    "misc": check_misc_inequalities,
    "lemma1": check_lemma1,
    "chi_truncation": check_chi_truncation,
}

DEFAULT_TRIALS = {
    "gentle": 10_000,
    "pinching": 10_000,
    "tail_bound": 10_000,
    "misc": 10_000,
    "lemma1": 1_000,
    "chi_truncation": 1_000,
}


def run_suite(name: str, trials: Optional[int] = None, seed: int = DEFAULT_SEED) -> VerificationReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise DomainError(f"unknown check {name!r}; choose from {sorted(SUITES)}") from None
    return fn(trials=DEFAULT_TRIALS[name] if trials is None else trials, seed=seed)
