"""Small-dimension quantum numerics: states, channels, entropies, norms.

States are plain complex ``numpy`` arrays. Multipartite states carry their
factor dimensions in a separate ``dims`` sequence; subsystems are addressed
by index into ``dims``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DomainError
from ..scalarfun import LogBase, to_base

EIG_FLOOR = 1e-14


def validate_state(rho, tol=1e-12):
    """Raise DomainError unless ``rho`` is a density matrix to tolerance ``tol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise DomainError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise DomainError("density matrix has a negative eigenvalue")
    return rho


def random_state(d, rng, rank=None):
    """Ginibre-distributed density matrix of dimension d and given rank."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def pure(v):
    v = np.asarray(v)
    return np.outer(v, v.conj())


def random_isometry(d_in, d_out, rng):
    """Isometry C^{d_in} -> C^{d_out} from QR of a Ginibre block."""
    if d_out < d_in:
        raise DomainError("isometry needs d_out >= d_in")
    g = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
    q, r = np.linalg.qr(g)
    # fix the phases so the distribution does not depend on the QR convention
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unitary(d, rng):
    return random_isometry(d, d, rng)


def random_projector(d, rng, rank=None):
    if rank is None:
        rank = int(rng.integers(0, d + 1))
    if rank == 0:
        return np.zeros((d, d), dtype=complex)
    q = random_isometry(rank, d, rng)
    return q @ q.conj().T


@dataclass
class ChannelRep:
    """Channel A -> B given by a Stinespring isometry V: A -> B (x) E."""

    dA: int
    dB: int
    dE: int
    V: np.ndarray

    def __post_init__(self):
        self.V = np.asarray(self.V)
        if self.V.shape != (self.dB * self.dE, self.dA):
            raise DomainError("isometry shape does not match (dB*dE, dA)")
        if np.max(np.abs(self.V.conj().T @ self.V - np.eye(self.dA))) > 1e-10:
            raise DomainError("V is not an isometry")

    @classmethod
    def random(cls, dA, dB, dE, rng):
        return cls(dA, dB, dE, random_isometry(dA, dB * dE, rng))

    def dilate(self, rho):
        return self.V @ rho @ self.V.conj().T

    def __call__(self, rho):
        return partial_trace(self.dilate(rho), (self.dB, self.dE), [0])

    def complementary(self, rho):
        return partial_trace(self.dilate(rho), (self.dB, self.dE), [1])

    def kraus(self):
        v = self.V.reshape(self.dB, self.dE, self.dA)
        return [v[:, e, :] for e in range(self.dE)]


@dataclass
class Ensemble:
    probs: np.ndarray
    states: list

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1) > 1e-12:
            raise DomainError("ensemble probabilities must be a distribution")
        if len(self.states) != len(self.probs):
            raise DomainError("one state per probability")

    def average(self):
        return sum(p * s for p, s in zip(self.probs, self.states))

    def mapped(self, fn):
        return Ensemble(self.probs, [fn(s) for s in self.states])


# --------------------------------------------------------------------------
# tensor bookkeeping
# --------------------------------------------------------------------------

def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]):
    """Reduced state on the subsystems ``keep`` (kept in increasing order)."""
    dims = list(dims)
    n = len(dims)
    if int(np.prod(dims)) != rho.shape[0]:
        raise DomainError("dims do not factor the state dimension")
    keep = sorted(keep)
    if any(k < 0 or k >= n for k in keep):
        raise DomainError("subsystem index out of range")
    t = rho.reshape(dims + dims)
    trace_out = [i for i in range(n) if i not in keep]
    # trace pairs from the highest index down so remaining axes stay put
    for count, i in enumerate(sorted(trace_out, reverse=True)):
        cur = n - count
        t = np.trace(t, axis1=i, axis2=i + cur)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


def permute_systems(rho, dims: Sequence[int], order: Sequence[int]):
    """Reorder tensor factors so that new factor j is old factor order[j]."""
    dims = list(dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = t.transpose(list(order) + [n + i for i in order])
    d = rho.shape[0]
    return t.reshape(d, d)


def apply_local(rho, dims, targets, op_fn):
    """Apply a map on the joint factors ``targets`` and identity elsewhere.

    ``op_fn`` receives and returns operators on the targets' joint space
    and must be linear; it is applied block by block.
    """
    dims = list(dims)
    rest = [i for i in range(len(dims)) if i not in targets]
    order = list(targets) + rest
    r = permute_systems(rho, dims, order)
    dt = int(np.prod([dims[i] for i in targets]))
    dr = int(np.prod([dims[i] for i in rest])) if rest else 1
    blocks = r.reshape(dt, dr, dt, dr)
    out = np.empty_like(blocks)
    for a in range(dr):
        for b in range(dr):
            out[:, a, :, b] = op_fn(blocks[:, a, :, b])
    inv = np.argsort(order)
    return permute_systems(out.reshape(dt * dr, dt * dr), [dims[i] for i in order], inv)


# --------------------------------------------------------------------------
# entropies and distances
# --------------------------------------------------------------------------

def von_neumann_entropy(rho, base=LogBase.NATURAL) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > EIG_FLOOR]
    return to_base(float(-np.sum(w * np.log(w))), base)


def _marg_entropy(rho, dims, subset):
    if not subset:
        return 0.0
    if len(subset) == len(dims):
        return von_neumann_entropy(rho)
    return von_neumann_entropy(partial_trace(rho, dims, subset))


def conditional_mutual_information(rho, dims, A, B, C=(), base=LogBase.NATURAL) -> float:
    """I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C) for index sets A, B, C."""
    A, B, C = list(A), list(B), list(C)
    val = (_marg_entropy(rho, dims, A + C) + _marg_entropy(rho, dims, B + C)
           - _marg_entropy(rho, dims, A + B + C) - _marg_entropy(rho, dims, C))
    return to_base(val, base)


def mutual_information(rho_ab, dims=None, base=LogBase.NATURAL) -> float:
    dims = dims or _square_dims(rho_ab)
    return conditional_mutual_information(rho_ab, dims, [0], [1], [], base)


def qcmi(rho_abc, dims, base=LogBase.NATURAL) -> float:
    return conditional_mutual_information(rho_abc, dims, [0], [1], [2], base)


def conditional_entropy(rho_ab, dims, base=LogBase.NATURAL) -> float:
    """H(A|B) = H(AB) - H(B)."""
    return to_base(von_neumann_entropy(rho_ab) - von_neumann_entropy(partial_trace(rho_ab, dims, [1])), base)


def _square_dims(rho):
    d = rho.shape[0]
    r = int(round(np.sqrt(d)))
    if r * r != d:
        raise DomainError("pass dims explicitly for non-square bipartitions")
    return (r, r)


def cq_state(ens: Ensemble):
    """sum_i p_i rho_i (x) |i><i| with the classical register second."""
    n = len(ens.probs)
    return sum(p * np.kron(s, np.diag(np.eye(n)[i])) for i, (p, s) in enumerate(zip(ens.probs, ens.states)))


def holevo_quantity(ens: Ensemble, base=LogBase.NATURAL) -> float:
    val = von_neumann_entropy(ens.average()) - sum(
        p * von_neumann_entropy(s) for p, s in zip(ens.probs, ens.states) if p > 0)
    return to_base(val, base)


def trace_norm(x) -> float:
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))


def trace_distance(rho, sigma) -> float:
    if rho.shape != sigma.shape:
        raise DomainError("states differ in dimension")
    return 0.5 * trace_norm(rho - sigma)


def truncate(rho, m: int):
    """m-level truncation: P rho P plus the discarded weight on level 0."""
    d = rho.shape[0]
    if m >= d:
        return rho.copy()
    out = np.zeros_like(rho)
    out[:m, :m] = rho[:m, :m]
    out[0, 0] += np.trace(rho[m:, m:])
    return out
