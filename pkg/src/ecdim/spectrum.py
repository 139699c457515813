"""Hamiltonian spectra and the maximum-entropy function F_H(E).

Three spectrum kinds are supported:

* ``explicit``: a finite nondecreasing list of eigenvalues,
* ``oscillator``: an l-mode harmonic oscillator with frequencies omega_i,
* ``sequence``: an infinite spectrum given by a vectorized map k -> E_k.

Entropies are returned in the requested log base; all internal work is in nats.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import CapabilityError, ConvergenceError, DomainError
from .scalarfun import LogBase, _g_nat, _g_scalar, to_base

ENUMERATION_CAP = 10**7
TRUNCATION_CAP = 10**7
TAIL_TOL = 1e-14


@dataclass(frozen=True)
class SpectrumModel:
    kind: str
    levels: Optional[tuple] = None
    omegas: Optional[tuple] = None
    hbar: float = 1.0
    level_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.kind == "explicit":
            lv = self.levels
            if lv is None or len(lv) < 2:
                raise DomainError("explicit spectrum needs at least two levels")
            if not all(math.isfinite(x) for x in lv):
                raise DomainError("explicit levels must be finite")
            if any(b < a for a, b in zip(lv, lv[1:])):
                raise DomainError("explicit levels must be nondecreasing")
        elif self.kind == "oscillator":
            if not self.omegas or any(w <= 0 for w in self.omegas):
                raise DomainError("oscillator frequencies must be positive")
            if self.hbar <= 0:
                raise DomainError("hbar must be positive")
        elif self.kind == "sequence":
            if self.level_fn is None:
                raise DomainError("sequence spectrum needs a level function")
        else:
            raise DomainError(f"unknown spectrum kind {self.kind!r}")

    @classmethod
    def explicit(cls, levels: Sequence[float]) -> "SpectrumModel":
        return cls("explicit", levels=tuple(float(x) for x in levels))

    @classmethod
    def oscillator(cls, omegas, hbar: float = 1.0) -> "SpectrumModel":
        if np.ndim(omegas) == 0:
            omegas = [omegas]
        return cls("oscillator", omegas=tuple(float(w) for w in omegas), hbar=float(hbar))

    @classmethod
    def sequence(cls, level_fn: Callable, label: str = "sequence") -> "SpectrumModel":
        """Infinite spectrum E_k = level_fn(k); level_fn must accept integer arrays."""
        return cls("sequence", level_fn=level_fn, label=label)

    @property
    def ell(self) -> int:
        return len(self.omegas) if self.kind == "oscillator" else 0

    @property
    def is_single_mode(self) -> bool:
        return self.kind == "oscillator" and len(self.omegas) == 1

    @property
    def size(self) -> Optional[int]:
        """Number of levels, or None for infinite spectra."""
        return len(self.levels) if self.kind == "explicit" else None

    @property
    def ground_energy(self) -> float:
        if self.kind == "explicit":
            return self.levels[0]
        if self.kind == "oscillator":
            return 0.5 * self.hbar * math.fsum(self.omegas)
        return float(self.level_fn(np.arange(1))[0])

    @property
    def energy_unit(self) -> float:
        """hbar*omega for single-mode oscillators, 1 otherwise."""
        return self.hbar * self.omegas[0] if self.is_single_mode else 1.0

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "levels": list(self.levels)}
        if self.kind == "oscillator":
            return {"kind": "oscillator", "ell": self.ell,
                    "omegas": list(self.omegas), "hbar": self.hbar}
        raise DomainError("sequence spectra have no file representation")


@dataclass(frozen=True)
class EnergyBudget:
    E: float

    def grounded(self, spec: SpectrumModel) -> float:
        return self.E - spec.ground_energy


@dataclass(frozen=True)
class GibbsSolution:
    lam: float
    entropy: float
    cutoff: int
    mean_energy: float
    base: LogBase = LogBase.NATURAL


@dataclass(frozen=True)
class ConditionReport:
    h_cond: Optional[bool]
    h_cond_plus: Optional[bool]
    witness: str
    heuristic: bool = True

    def to_dict(self) -> dict:
        return {"h_cond": self.h_cond, "h_cond_plus": self.h_cond_plus,
                "witness": self.witness, "heuristic": self.heuristic}


def energy_value(E) -> float:
    return float(E.E) if isinstance(E, EnergyBudget) else float(E)


def spectrum_from_dict(data: dict) -> SpectrumModel:
    kind = data.get("kind")
    if kind == "explicit":
        return SpectrumModel.explicit(data["levels"])
    if kind == "oscillator":
        omegas = data["omegas"]
        ell = data.get("ell", len(omegas))
        if ell != len(omegas):
            raise DomainError(f"ell={ell} does not match {len(omegas)} frequencies")
        return SpectrumModel.oscillator(omegas, data.get("hbar", 1.0))
    raise DomainError(f"unknown spectrum kind {kind!r}")


def load_spectrum(path) -> SpectrumModel:
    return spectrum_from_dict(json.loads(Path(path).read_text()))


# --------------------------------------------------------------------------
# Eigenvalues
# --------------------------------------------------------------------------

def _mode_energy(spec, ns):
    return spec.hbar * math.fsum(w * (n + 0.5) for w, n in zip(spec.omegas, ns))


def iter_levels(spec: SpectrumModel) -> Iterator[float]:
    """Yield the oscillator eigenvalues in nondecreasing order.

    Best-first expansion of the occupation lattice. Each tuple is reached
    from a unique parent (its last nonzero entry decremented), so no
    duplicate bookkeeping is needed.
    """
    if spec.kind != "oscillator":
        raise DomainError("iter_levels enumerates oscillator spectra")
    ell = spec.ell
    start = (0,) * ell
    heap = [(_mode_energy(spec, start), start)]
    while heap:
        energy, ns = heapq.heappop(heap)
        yield energy
        last = max((i for i, n in enumerate(ns) if n > 0), default=0)
        for i in range(last, ell):
            child = ns[:i] + (ns[i] + 1,) + ns[i + 1:]
            heapq.heappush(heap, (_mode_energy(spec, child), child))


def eigenvalue_at(spec: SpectrumModel, k: int) -> float:
    """The k-th smallest eigenvalue (0-based, multiplicity counted)."""
    k = int(k)
    if k < 0:
        raise DomainError("eigenvalue index must be nonnegative")
    if spec.kind == "explicit":
        if k >= len(spec.levels):
            raise IndexError(f"index {k} beyond the {len(spec.levels)} explicit levels")
        return spec.levels[k]
    if spec.kind == "sequence":
        return float(spec.level_fn(np.array([k]))[0])
    if spec.is_single_mode:
        return spec.hbar * spec.omegas[0] * (k + 0.5)
    if k >= ENUMERATION_CAP:
        raise CapabilityError(f"multi-mode enumeration is capped at {ENUMERATION_CAP} levels")
    for i, energy in enumerate(iter_levels(spec)):
        if i == k:
            return energy
    raise AssertionError("unreachable")


def eigenvalues(spec: SpectrumModel, count: int) -> np.ndarray:
    """The ``count`` smallest eigenvalues as a sorted array."""
    count = int(count)
    if spec.kind == "explicit":
        if count > len(spec.levels):
            raise IndexError("requested more levels than the explicit spectrum has")
        return np.array(spec.levels[:count])
    if spec.kind == "sequence":
        return np.asarray(spec.level_fn(np.arange(count)), dtype=float)
    if spec.is_single_mode:
        return spec.hbar * spec.omegas[0] * (np.arange(count) + 0.5)
    if count > ENUMERATION_CAP:
        raise CapabilityError(f"multi-mode enumeration is capped at {ENUMERATION_CAP} levels")
    return _lattice_levels(spec, count)


def _lattice_levels(spec, count):
    # grow an energy threshold until the lattice below it holds >= count points
    w = np.array(spec.omegas) * spec.hbar
    e0 = 0.5 * w.sum()
    thresh = w.max() * max(1.0, count ** (1.0 / len(w)))
    while True:
        vals = np.array([0.0])
        for wi in w:
            nmax = int(math.floor(thresh / wi))
            vals = (vals[:, None] + wi * np.arange(nmax + 1)[None, :]).ravel()
            vals = vals[vals <= thresh]
        if vals.size >= count:
            vals.sort(kind="stable")
            return vals[:count] + e0
        thresh *= 1.5


# --------------------------------------------------------------------------
# Gibbs states
# --------------------------------------------------------------------------

def _solve_lambda(mean_fn, target, lam_guess):
    """Solve mean_fn(lam) = target for lam > 0; mean_fn strictly decreasing."""
    lo = hi = math.log(lam_guess)
    while mean_fn(math.exp(hi)) > target:
        hi += 2.0
        if hi > 700:
            raise ConvergenceError("could not bracket the inverse temperature")
    while mean_fn(math.exp(lo)) < target:
        lo -= 2.0
        if lo < -700:
            raise ConvergenceError("could not bracket the inverse temperature")
    if lo == hi:
        return math.exp(lo)
    y = brentq(lambda y: mean_fn(math.exp(y)) - target, lo, hi,
               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(y)


def _finite_gibbs(x, u):
    """Gibbs solve on grounded levels x (x[0] = 0); returns (lam, H_nat, mean)."""
    x = np.asarray(x, dtype=float)
    if u <= 0:
        d0 = int(np.count_nonzero(x <= 0.0))
        return math.inf, math.log(d0), 0.0
    flat_mean = float(x.mean())
    if u >= flat_mean:
        return 0.0, math.log(x.size), flat_mean

    def mean(lam):
        w = np.exp(-lam * x)
        return float(np.dot(w, x) / w.sum())

    lam = _solve_lambda(mean, u, 1.0 / u)
    w = np.exp(-lam * x)
    z = w.sum()
    m = float(np.dot(w, x) / z)
    return lam, lam * m + math.log(z), m


def _oscillator_gibbs(spec, u):
    w = np.array(spec.omegas) * spec.hbar
    if u <= 0:
        return math.inf, 0.0, 0.0
    if len(w) == 1:
        n = u / w[0]
        return math.log1p(1.0 / n) / w[0], float(_g_nat(n)), u

    def mean(lam):
        with np.errstate(over="ignore"):
            return float(np.sum(w / np.expm1(lam * w)))

    lam = _solve_lambda(mean, u, len(w) / u)
    n = 1.0 / np.expm1(lam * w)
    return lam, float(np.sum(_g_nat(n))), float(np.dot(w, n))


def _sequence_gibbs(spec, u):
    if u <= 0:
        k = 64
        x = np.asarray(spec.level_fn(np.arange(k)), float)
        return math.inf, math.log(int(np.count_nonzero(x <= x[0]))), 0.0
    k = 64
    while k <= TRUNCATION_CAP:
        levels = np.asarray(spec.level_fn(np.arange(k)), dtype=float)
        x = levels - levels[0]
        if u < float(x.mean()):
            lam, h, m = _finite_gibbs(x, u)
            w = np.exp(-lam * x)
            z = w.sum()
            tail = w[k // 2:]
            if tail.sum() / z < TAIL_TOL and np.dot(tail, x[k // 2:]) / (z * max(u, 1e-300)) < TAIL_TOL:
                return lam, h, m
        k *= 2
    raise ConvergenceError("Gibbs truncation did not converge below the level cap; "
                           "the partition function may diverge (H-cond violated)")


def _gibbs_nat(spec, E):
    u = E - spec.ground_energy
    if u < -1e-12 * max(1.0, abs(E)):
        raise DomainError(f"energy {E} is below the ground energy {spec.ground_energy}")
    u = max(u, 0.0)
    if spec.kind == "oscillator":
        lam, h, m = _oscillator_gibbs(spec, u)
        return lam, h, 0, m
    if spec.kind == "explicit":
        x = np.array(spec.levels) - spec.levels[0]
        lam, h, m = _finite_gibbs(x, u)
        return lam, h, len(spec.levels), m
    lam, h, m = _sequence_gibbs(spec, u)
    return lam, h, -1, m


def gibbs_entropy(spec: SpectrumModel, E, base=LogBase.NATURAL) -> GibbsSolution:
    """Maximum entropy F_H(E) over states with mean energy at most E.

    The maximizer is the Gibbs state with weights exp(-lam * E_k). ``lam`` is
    ``inf`` at the ground energy and 0 when the energy budget exceeds the
    mean energy of the maximally mixed state of a finite spectrum.
    ``cutoff`` is the number of levels summed (0 for the mode-factorized
    oscillator solution).
    """
    E = energy_value(E)
    lam, h, cutoff, m = _gibbs_nat(spec, E)
    b = LogBase.coerce(base)
    return GibbsSolution(lam=lam, entropy=to_base(h, b), cutoff=cutoff,
                         mean_energy=m + spec.ground_energy, base=b)


def fbar(spec: SpectrumModel, E, base=LogBase.NATURAL) -> float:
    """Grounded maximum entropy: F_H(E + E_0)."""
    E = energy_value(E)
    if E < 0:
        raise DomainError("fbar takes a grounded energy E >= 0")
    if spec.is_single_mode:
        return float(to_base(_g_nat(E / spec.energy_unit), base))
    return gibbs_entropy(spec, E + spec.ground_energy, base).entropy


def fhat(ell: int, omegas, hbar: float, E, base=LogBase.NATURAL):
    """Closed-form upper bound l*log((E+E_0)/(l*E_*)) + l on the oscillator F_H."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if len(omegas) != ell:
        raise DomainError("ell must equal the number of frequencies")
    e0 = 0.5 * hbar * omegas.sum()
    e_star = float(np.exp(np.mean(np.log(hbar * omegas))))
    ratio = (np.asarray(E, dtype=float) + e0) / (ell * e_star)
    if np.any(ratio <= 0):
        raise DomainError("fhat argument out of domain")
    out = to_base(ell * np.log(ratio) + ell, base)
    return float(out) if np.ndim(E) == 0 else out


def condition_diagnostics(spec: SpectrumModel) -> ConditionReport:
    """Heuristic check of the spectral growth conditions.

    ``h_cond``: Tr exp(-lam H) < inf for all lam > 0, i.e. E_k / log k -> inf.
    ``h_cond_plus``: lim_{lam->0} [Tr exp(-lam H)]^lam = 1, sufficient if
    liminf E_k / log^q k > 0 for some q > 2. For sequence spectra the growth
    ratios are sampled at k = 10^3 .. 10^12; this is a diagnostic, not a proof.
    """
    if spec.kind == "explicit":
        return ConditionReport(True, True, "finite spectrum: Tr exp(-lam H) is a finite sum")
    if spec.kind == "oscillator":
        return ConditionReport(
            True, True,
            f"{spec.ell}-mode oscillator: E_k grows like k^(1/{spec.ell}), "
            "so E_k / log^q k -> inf for every q")
    ks = np.logspace(3, 12, 10).astype(np.int64)
    e = np.asarray(spec.level_fn(ks), dtype=float) - spec.ground_energy
    logk = np.log(ks.astype(float))
    r1 = e / logk
    rq = e / logk ** 2.5
    h_cond = bool(r1[-1] > 1.2 * r1[len(r1) // 2] and np.all(np.diff(r1) > 0))
    h_plus = bool(h_cond and rq[-1] >= 0.5 * rq[len(rq) // 2])
    witness = (f"E_k/log k: {r1[len(r1) // 2]:.4g} -> {r1[-1]:.4g}; "
               f"E_k/log^2.5 k: {rq[len(rq) // 2]:.4g} -> {rq[-1]:.4g}")
    return ConditionReport(h_cond, h_plus, witness)


def grounded_entropy_function(spec: SpectrumModel, source: str = "exact") -> Callable:
    """Vectorized x -> F_H(x + E_0) in nats, exact or via the oscillator bound."""
    if source == "exact":
        if spec.is_single_mode:
            unit = spec.energy_unit

            def exact(x):
                if isinstance(x, float):
                    return _g_scalar(x / unit)
                return _g_nat(np.asarray(x, dtype=float) / unit)
            return exact
        return np.vectorize(lambda x: _gibbs_nat(spec, x + spec.ground_energy)[1], otypes=[float])
    if source == "fhat":
        _require_oscillator(spec)
        return _fhat_closure(spec, spec.ground_energy)
    raise DomainError(f"unknown entropy source {source!r}")


def output_entropy_bound(spec: SpectrumModel, source: str = "exact") -> Callable:
    """Vectorized upper bound x -> F^_{H_B}(x) in nats for an output system.

    ``exact`` uses x -> F_{H_B}(x + E_0^B); ``fhat`` uses the oscillator
    bound applied to x directly.
    """
    if source == "exact":
        return grounded_entropy_function(spec, "exact")
    if source == "fhat":
        _require_oscillator(spec)
        return _fhat_closure(spec, 0.0)
    raise DomainError(f"unknown entropy source {source!r}")


def _fhat_closure(spec, shift):
    ell = spec.ell
    e0 = spec.ground_energy
    scale = ell * math.exp(math.fsum(math.log(spec.hbar * w) for w in spec.omegas) / ell)

    def bound(x):
        if isinstance(x, float):
            return ell * math.log((x + shift + e0) / scale) + ell
        return ell * np.log((np.asarray(x, dtype=float) + shift + e0) / scale) + ell
    return bound


def _require_oscillator(spec):
    if spec.kind != "oscillator":
        raise DomainError("the fhat bound is defined for oscillator spectra only")
