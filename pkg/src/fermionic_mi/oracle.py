"""Brute-force Fock-space reference for chains of at most 12 sites.

Basis states are integers whose bit ``j-1`` is the occupation of site ``j``.
A basis state stands for ``c_{j1}^dag c_{j2}^dag ... |0>`` with ``j1 < j2 < ...``,
so ``c_j`` picks up ``(-1)**(number of occupied sites left of j)``.

The Hamiltonian is assembled from real-space couplings written out per model,
independently of the momentum-space formulas in :mod:`fermionic_mi.lattice`
(the fractal model, which has no closed real-space kernel, is the exception).
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .lattice import (
    Boundary,
    FractalDispersion,
    KitaevChain,
    ModelError,
    ModelSpec,
    PhaseModulatedHopping,
    PowerLawHopping,
    SelectiveHopping,
    dispersion,
)

MAX_SITES = 12


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x >>= 1
    return count


def annihilators(n_sites: int) -> list[sp.csr_matrix]:
    """Sparse ``c_1 .. c_N`` on the ``2**N`` Fock space."""
    dim = 1 << n_sites
    basis = np.arange(dim)
    ops = []
    for j in range(n_sites):
        bit = 1 << j
        src = basis[(basis & bit) != 0]
        sign = np.where(_popcount(src & (bit - 1)) % 2, -1.0, 1.0)
        ops.append(sp.csr_matrix((sign, (src ^ bit, src)), shape=(dim, dim)))
    return ops


# ---------------------------------------------------------------------------
# real-space couplings
# ---------------------------------------------------------------------------


def _power(m: int, exponent: float) -> float:
    return 1.0 if m == 1 else float(m) ** (-exponent)


def _hopping_offsets(spec: ModelSpec) -> dict[int, complex]:
    """``{m: a_m}`` with ``H = sum_j sum_m a_m c_j^dag c_{j+m}``."""
    v = spec.variant
    n = spec.n_sites
    terms: dict[int, complex] = defaultdict(complex)
    if isinstance(v, PowerLawHopping):
        reach = 1 if math.isinf(v.alpha) else n // 2
        for m in range(1, reach + 1):
            terms[m] += -v.t * _power(m, v.alpha)
            terms[-m] += -v.t * _power(m, v.alpha)
    elif isinstance(v, PhaseModulatedHopping):
        for m in range(1, n // 2 + 1):
            amp = -v.t * _power(m, v.alpha)
            terms[m] += amp * np.exp(1j * v.phi * m)
            terms[-m] += amp * np.exp(-1j * v.phi * m)
    elif isinstance(v, SelectiveHopping):
        for q in range(-v.r, v.r + 1):
            for s, t in ((v.s1, v.t1), (v.s2, v.t2)):
                terms[s + q] += -t
                terms[-(s + q)] += -t
    elif isinstance(v, KitaevChain):
        terms[0] += -spec.mu
        if v.hopping_beta is None or math.isinf(v.hopping_beta):
            terms[1] += v.t
            terms[-1] += v.t
        else:
            for m in range(1, n // 2 + 1):
                amp = -v.t * (-1) ** m * _power(m, v.hopping_beta)
                terms[m] += amp
                terms[-m] += amp
    else:
        raise ModelError(f"no real-space hopping for {type(v).__name__}")
    return dict(terms)


def _pairing_offsets(spec: ModelSpec) -> dict[int, complex]:
    """``{m: b_m}`` with ``H_P = 1/2 sum_j sum_m (b_m c_j^dag c_{j+m}^dag + h.c.)``."""
    v = spec.variant
    n = spec.n_sites
    terms: dict[int, complex] = defaultdict(complex)
    for m in range(1, n):
        w = 0.5 * v.delta * (-1) ** m * _power(min(m, n - m), v.alpha)
        terms[m] += w
        terms[-m] += -w
    return dict(terms)


def _ring_matrix(n: int, offsets: dict[int, complex], antiperiodic: bool) -> np.ndarray:
    mat = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for m, coef in offsets.items():
            wraps, target = divmod(j + m, n)
            sign = -1.0 if (antiperiodic and wraps % 2) else 1.0
            mat[j, target] += sign * coef
    return mat


def quadratic_form(spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Real-space ``(A, B)`` with ``H = c^dag A c + 1/2 (c^dag B c^dag + h.c.)``."""
    n = spec.n_sites
    anti = spec.geometry.boundary is Boundary.ANTIPERIODIC
    if isinstance(spec.variant, FractalDispersion):
        labels = spec.geometry.mode_labels()
        k = spec.geometry.momenta()
        eps = dispersion(spec, k, labels)
        j = np.arange(n)
        plane = np.exp(1j * np.outer(j, k)) / np.sqrt(n)
        A = (plane * eps) @ plane.conj().T
    else:
        A = _ring_matrix(n, _hopping_offsets(spec), anti)
    if spec.has_pairing:
        B = _ring_matrix(n, _pairing_offsets(spec), anti)
    else:
        B = np.zeros((n, n), dtype=complex)
    return A, B


def oracle_hamiltonian(spec: ModelSpec) -> sp.csr_matrix:
    """Sparse many-body Hamiltonian on the full ``2**N`` Fock space.

    Kitaev chains include the constant of ``-mu sum_j (n_j - 1/2)``.
    """
    n = spec.n_sites
    if n > MAX_SITES:
        raise ModelError(f"oracle limited to {MAX_SITES} sites, got {n}")
    A, B = quadratic_form(spec)
    c = annihilators(n)
    cd = [op.T.tocsr() for op in c]
    dim = 1 << n
    H = sp.csr_matrix((dim, dim), dtype=complex)
    for i, j in itertools.product(range(n), repeat=2):
        if A[i, j] != 0:
            H = H + A[i, j] * (cd[i] @ c[j])
        if B[i, j] != 0:
            pair = 0.5 * B[i, j] * (cd[i] @ cd[j])
            H = H + pair + pair.conj().T
    if spec.has_pairing:
        H = H + 0.5 * spec.mu * n * sp.identity(dim, format="csr")
    return H.tocsr()


# ---------------------------------------------------------------------------
# ground state and reduced density matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FockState:
    n_sites: int
    amplitudes: np.ndarray
    energy: float
    gap: float
    """Distance to the next many-body level in the searched sector(s)."""


def _lowest(H: sp.csr_matrix, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    block = H[idx][:, idx].toarray()
    return np.linalg.eigh(block)


def oracle_ground_state(spec: ModelSpec) -> FockState:
    """Exact ground state: fixed particle number (hopping-only) or lowest over both parities."""
    n = spec.n_sites
    H = oracle_hamiltonian(spec)
    dim = 1 << n
    pop = _popcount(np.arange(dim))
    if spec.has_pairing:
        sectors = [np.flatnonzero(pop % 2 == p) for p in (0, 1)]
    else:
        n_occ = int(spec.occupation.f * n)
        sectors = [np.flatnonzero(pop == n_occ)]
    levels = []
    best = None
    for idx in sectors:
        w, v = _lowest(H, idx)
        levels.extend(w[:2].tolist())
        if best is None or w[0] < best[0]:
            best = (w[0], idx, v[:, 0])
    levels.sort()
    energy, idx, vec = best
    psi = np.zeros(dim, dtype=complex)
    psi[idx] = vec
    return FockState(n, psi, float(energy), float(levels[1] - levels[0]))


def parity_expectation(state: FockState) -> float:
    pop = _popcount(np.arange(1 << state.n_sites))
    return float(np.sum(np.abs(state.amplitudes) ** 2 * np.where(pop % 2, -1.0, 1.0)))


def _reorder(state: FockState, sites: Sequence[int]) -> np.ndarray:
    """Amplitudes in the mode order (sites..., rest ascending), shape (2**rest, 2**len(sites))."""
    n = state.n_sites
    front = [s - 1 for s in sites]
    order = front + [j for j in range(n) if j not in front]
    newpos = np.empty(n, dtype=np.int64)
    newpos[order] = np.arange(n)
    basis = np.arange(1 << n)
    bits = [(basis >> j) & 1 for j in range(n)]
    new_index = np.zeros_like(basis)
    inversions = np.zeros_like(basis)
    for j in range(n):
        new_index |= bits[j] << newpos[j]
    for u, v in itertools.combinations(range(n), 2):
        if newpos[u] > newpos[v]:
            inversions += bits[u] & bits[v]
    out = np.zeros(1 << n, dtype=complex)
    out[new_index] = state.amplitudes * np.where(inversions % 2, -1.0, 1.0)
    return out.reshape(1 << (n - len(front)), 1 << len(front))


def reduced_density_matrix(state: FockState, sites: Sequence[int]) -> np.ndarray:
    if len(set(sites)) != len(sites) or not all(1 <= s <= state.n_sites for s in sites):
        raise ModelError(f"invalid site subset {list(sites)}")
    psi = _reorder(state, sites)
    return psi.T @ psi.conj()


def oracle_reduced_entropy(state: FockState, sites: Sequence[int]) -> float:
    """``-tr(rho ln rho)`` of the fermionic reduced density matrix of ``sites``."""
    if len(sites) == state.n_sites:
        return 0.0
    lam = np.linalg.eigvalsh(reduced_density_matrix(state, sites))
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log(lam)))


def oracle_mi(state: FockState, sites_a: Sequence[int], sites_b: Sequence[int]) -> float:
    s_a = oracle_reduced_entropy(state, sites_a)
    s_b = oracle_reduced_entropy(state, sites_b)
    s_ab = oracle_reduced_entropy(state, list(sites_a) + list(sites_b))
    return s_a + s_b - s_ab


def oracle_correlators(state: FockState, sites: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``<c_a^dag c_b>`` and ``<c_a c_b>`` restricted to ``sites``."""
    c = annihilators(state.n_sites)
    psi = state.amplitudes
    applied = {s: c[s - 1] @ psi for s in sites}
    C = np.array([[np.vdot(applied[a], applied[b]) for b in sites] for a in sites])
    F = np.array([[np.vdot(psi, c[a - 1] @ applied[b]) for b in sites] for a in sites])
    return C, F


def oracle_density_covariance(state: FockState, i: int, j: int) -> float:
    c = annihilators(state.n_sites)
    psi = state.amplitudes
    ni = (c[i - 1].T @ c[i - 1])
    nj = (c[j - 1].T @ c[j - 1])
    mean_i = np.vdot(psi, ni @ psi).real
    mean_j = np.vdot(psi, nj @ psi).real
    return float(np.vdot(psi, ni @ (nj @ psi)).real - mean_i * mean_j)
