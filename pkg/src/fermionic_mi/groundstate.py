"""Ground states of quadratic chains and their real-space two-point functions.

Fourier convention: ``c_j = N**-0.5 * sum_k exp(i k j) c_k``. With it

    C_ab = <c_a^dag c_b> = 1/N sum_k n_k exp(-i k (a - b)),
    F_ab = <c_a c_b>     = 1/N sum_k exp(i k (a - b)) * (i/2) sin(2 theta_k),

where ``n_k`` is the mode occupation and ``theta_k`` the Bogoliubov angle of the
pair ``(k, -k)`` in ``prod_k (cos theta_k - i sin theta_k c_k^dag c_-k^dag)|0>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .lattice import (
    ChemicalPotential,
    FixedFilling,
    KitaevChain,
    ModelError,
    ModelSpec,
    ModeGrid,
    OccupationRule,
    kitaev_components,
    mode_grid,
)

logger = logging.getLogger(__name__)

#: global sign of the anomalous correlator, checked against the Fock oracle
ANOMALOUS_SIGN = 1.0

#: relative tolerance under which two mode energies count as degenerate
DEGENERACY_RTOL = 1e-12

GAPLESS_TOL = 1e-14


class DegenerateFermiLevelError(ModelError):
    """The Fermi level cuts through a degenerate shell of modes."""


class GaplessModeError(ModelError):
    """A Bogoliubov mode has zero energy, so the ground state is degenerate."""


@dataclass(frozen=True)
class GroundStateData:
    """Immutable ground-state description from which every correlator follows.

    Exactly one of ``occupied`` (hopping-only) and ``angles`` (paired) is set.
    """

    n_sites: int
    grid: ModeGrid
    occupations: np.ndarray
    achieved_filling: float
    occupied: tuple[int, ...] | None = None
    angles: np.ndarray | None = None
    fermi_gap: float = field(default=np.inf, compare=False)

    @property
    def has_pairing(self) -> bool:
        return self.angles is not None

    @cached_property
    def normal_table(self) -> np.ndarray:
        """``c(r) = <c_a^dag c_{a-r}>`` for ``r = 0..N-1``."""
        n = self.n_sites
        r = np.arange(n)
        k0 = self.grid.momenta[0]
        tab = np.exp(-1j * k0 * r) * np.fft.fft(self.occupations) / n
        tab.setflags(write=False)
        return tab

    @cached_property
    def anomalous_table(self) -> np.ndarray | None:
        """``f(r) = <c_a c_{a-r}>`` for ``r = 0..N-1`` (paired states only)."""
        if self.angles is None:
            return None
        n = self.n_sites
        r = np.arange(n)
        k0 = self.grid.momenta[0]
        amp = ANOMALOUS_SIGN * 0.5j * np.sin(2.0 * self.angles)
        tab = np.exp(1j * k0 * r) * np.fft.ifft(amp)
        tab.setflags(write=False)
        return tab


def _fermi_order(grid: ModeGrid) -> np.ndarray:
    """Mode indices sorted by energy, ties by ascending |n|, then n > 0 first."""
    e = grid.energies
    scale = max(1.0, float(np.max(np.abs(e)))) if e.size else 1.0
    # bucket energies so float noise cannot reorder a degenerate shell
    buckets = np.round(e / (scale * DEGENERACY_RTOL * 16)).astype(np.int64)
    labels = grid.labels
    return np.lexsort((labels <= 0, np.abs(labels), buckets))


def occupy_modes(grid: ModeGrid, rule: OccupationRule, *, strict: bool = False) -> GroundStateData:
    """Fermi-sea ground state of a hopping-only model.

    Under ``FixedFilling`` the ``f N`` lowest modes are filled. If the Fermi
    level cuts a degenerate shell the tie-break rule decides and a warning is
    logged; with ``strict=True`` a :class:`DegenerateFermiLevelError` is raised.
    """
    n = len(grid)
    e = grid.energies
    scale = max(1.0, float(np.max(np.abs(e))))
    tol = DEGENERACY_RTOL * 16 * scale
    if isinstance(rule, FixedFilling):
        n_occ = rule.f * n
        if n_occ.denominator != 1:
            raise ModelError(f"filling {rule.f} is incompatible with {n} sites")
        n_occ = int(n_occ)
        order = _fermi_order(grid)
        chosen = order[:n_occ]
        if 0 < n_occ < n:
            top = e[order[n_occ - 1]]
            nxt = e[order[n_occ]]
            gap = float(nxt - top)
            if abs(gap) <= tol:
                msg = f"Fermi level cuts a degenerate shell at energy {top:.12g}"
                if strict:
                    raise DegenerateFermiLevelError(msg)
                logger.warning("%s; tie broken by ascending |n|, positive n first", msg)
        else:
            gap = np.inf
    elif isinstance(rule, ChemicalPotential):
        chosen = np.flatnonzero(e < rule.mu)
        below = e[e < rule.mu]
        above = e[e >= rule.mu]
        gap = float(above.min() - below.max()) if below.size and above.size else np.inf
        if np.any(np.abs(e - rule.mu) <= tol):
            msg = f"mode energy coincides with mu={rule.mu:.12g}"
            if strict:
                raise DegenerateFermiLevelError(msg)
            logger.warning(msg)
    else:
        raise ModelError(f"unknown occupation rule {rule!r}")
    occ = np.zeros(n)
    occ[chosen] = 1.0
    occ.setflags(write=False)
    labels = tuple(sorted(int(x) for x in grid.labels[chosen]))
    return GroundStateData(
        n_sites=n,
        grid=grid,
        occupations=occ,
        achieved_filling=len(labels) / n,
        occupied=labels,
        fermi_gap=gap,
    )


def bdg_angles(spec: ModelSpec, grid: ModeGrid | None = None) -> GroundStateData:
    """BCS ground state of a Kitaev chain.

    ``theta_k`` satisfies ``tan(2 theta_k) = -pairing/(mu - 2t cos k)`` on the
    branch with ``cos 2theta_k = -kinetic/E_k`` and ``sin 2theta_k = pairing/E_k``,
    so ``sin(theta_k)**2`` is the mode occupation and mu -> +inf fills the band.
    """
    if not isinstance(spec.variant, KitaevChain):
        raise ModelError("bdg_angles needs a KitaevChain spec")
    kinetic, pairing = kitaev_components(spec)
    energies = np.hypot(kinetic, pairing)
    i_min = int(np.argmin(energies))
    if energies[i_min] <= GAPLESS_TOL:
        raise GaplessModeError(
            f"gapless mode at k={spec.geometry.momenta()[i_min]:.6g} (mu={spec.mu}); "
            "perturb mu or n_sites"
        )
    if grid is None:
        grid = mode_grid(spec)
    theta = 0.5 * np.arctan2(pairing, -kinetic)
    occ = np.sin(theta) ** 2
    theta.setflags(write=False)
    occ.setflags(write=False)
    grid = ModeGrid(grid.labels, grid.momenta, grid.energies, theta)
    return GroundStateData(
        n_sites=spec.n_sites,
        grid=grid,
        occupations=occ,
        achieved_filling=float(occ.mean()),
        angles=theta,
        fermi_gap=float(energies[i_min]),
    )


def ground_state(spec: ModelSpec, *, strict: bool = False) -> GroundStateData:
    """Ground state of any supported model."""
    if spec.has_pairing:
        return bdg_angles(spec)
    return occupy_modes(mode_grid(spec), spec.occupation, strict=strict)


def filling_from_mu(spec: ModelSpec) -> float:
    """Average occupation ``(1/N) sum_k sin(theta_k)**2`` of a Kitaev ground state."""
    return bdg_angles(spec).achieved_filling


@dataclass(frozen=True)
class CorrelationData:
    """Two-point functions restricted to ``sites`` (1-based, in the given order)."""

    sites: tuple[int, ...]
    C: np.ndarray
    F: np.ndarray | None = None


def _check_sites(sites: Sequence[int], n_sites: int) -> np.ndarray:
    s = np.asarray(list(sites), dtype=np.int64)
    if s.ndim != 1 or s.size == 0:
        raise ModelError("site list must be a non-empty sequence")
    if np.unique(s).size != s.size:
        raise ModelError(f"duplicate site indices in {list(sites)}")
    if s.min() < 1 or s.max() > n_sites:
        raise ModelError(f"site indices must lie in 1..{n_sites}")
    return s


def correlation_matrix(state: GroundStateData, sites: Sequence[int]) -> CorrelationData:
    s = _check_sites(sites, state.n_sites)
    disp = s[:, None] - s[None, :]
    pos = disp >= 0
    idx = np.abs(disp)
    tab = state.normal_table
    C = np.where(pos, tab[idx], np.conj(tab[idx]))
    F = None
    if state.has_pairing:
        ftab = state.anomalous_table
        F = np.where(pos, ftab[idx], -ftab[idx])
    return CorrelationData(tuple(int(x) for x in s), C, F)


def majorana_matrix(corr: CorrelationData) -> np.ndarray:
    """``M_pq = <a_p a_q>`` for ``a_{2q-1} = c_q + c_q^dag``, ``a_{2q} = i(c_q - c_q^dag)``.

    Rows/columns interleave the two Majoranas of each site. ``M = 1 + i Gamma``
    with ``Gamma`` real antisymmetric.
    """
    if corr.F is None:
        raise ModelError("majorana_matrix needs anomalous correlators; use the C-only path")
    C, F = corr.C, corr.F
    l = C.shape[0]
    hole = np.eye(l) - C.T  # <c_p c_q^dag>
    Fd = np.conj(F.T)  # <c_p^dag c_q^dag>
    M = np.empty((2 * l, 2 * l), dtype=complex)
    M[0::2, 0::2] = F + hole + C + Fd
    M[0::2, 1::2] = 1j * (F - hole + C - Fd)
    M[1::2, 0::2] = 1j * (F + hole - C - Fd)
    M[1::2, 1::2] = -(F - hole - C + Fd)
    return M
