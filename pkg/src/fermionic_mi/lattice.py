"""Chain geometry, hopping/pairing kernels and momentum-space spectra.

All spectra are defined directly in momentum space. Sites are labelled
``1..n_sites`` in the public API; momenta are stored in ascending order.

Kitaev chains are written in the frame where the Bogoliubov energy reads

    E_k = sqrt(kinetic(k)**2 + pairing(k)**2),
    kinetic(k) = mu - 2 t cos k,      pairing(k) = delta * f_alpha(k + pi),

and the coefficient of ``c_k^dagger c_k`` is ``-kinetic(k)`` so that a large
positive chemical potential fills the band.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np


class ModelError(ValueError):
    """Invalid model parameters or geometry."""


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"


@dataclass(frozen=True)
class ChainGeometry:
    """Ring of ``n_sites`` sites (always even) with (anti)periodic closure."""

    n_sites: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ModelError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if self.n_sites % 2:
            raise ModelError(f"n_sites must be even, got {self.n_sites}")

    def mode_labels(self) -> np.ndarray:
        """Integer mode labels in ascending-momentum order."""
        n = self.n_sites
        if self.boundary is Boundary.PERIODIC:
            return np.arange(-n // 2, n // 2)
        return np.arange(n)

    def momenta(self) -> np.ndarray:
        n = self.n_sites
        labels = self.mode_labels()
        if self.boundary is Boundary.PERIODIC:
            return 2.0 * np.pi * labels / n
        return -np.pi + 2.0 * np.pi * (labels + 0.5) / n


# ---------------------------------------------------------------------------
# model variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLawHopping:
    """Hopping ``t / |i-j|_p**alpha``; ``alpha=math.inf`` is nearest-neighbour."""

    alpha: float
    t: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ModelError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class FractalDispersion:
    gamma: int = 1
    t: float = 1.0

    def __post_init__(self):
        if int(self.gamma) != self.gamma or self.gamma < 1 or self.gamma % 2 == 0:
            raise ModelError(f"gamma must be a positive odd integer, got {self.gamma}")


@dataclass(frozen=True)
class PhaseModulatedHopping:
    """Power-law hopping carrying the phase ``exp(i phi d(i-j))``.

    ``phi`` is the phase per unit oriented distance, in radians.
    """

    alpha: float
    phi: float
    t: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ModelError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class SelectiveHopping:
    """Hopping to the windows ``s1 + q`` and ``s2 + q`` for ``|q| <= r``."""

    s1: int
    s2: int = 0
    t1: float = 1.0
    t2: float = 0.0
    r: int = 0

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 0:
            raise ModelError(f"r must be a non-negative integer, got {self.r}")
        for name in ("s1", "s2"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ModelError(f"{name} must be an integer site offset")


@dataclass(frozen=True)
class KitaevChain:
    """Kitaev chain with pairing decaying as ``1/|m|_p**alpha``.

    ``hopping_beta=None`` selects nearest-neighbour hopping; a finite value
    gives power-law hopping ``t/|m|_p**beta``. Defaults follow ``delta = 2t = 1``.
    """

    alpha: float
    t: float = 0.5
    delta: float = 1.0
    hopping_beta: float | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ModelError(f"alpha must be > 0, got {self.alpha}")
        if self.hopping_beta is not None and not self.hopping_beta > 0:
            raise ModelError(f"hopping_beta must be > 0, got {self.hopping_beta}")


HoppingVariant = Union[PowerLawHopping, FractalDispersion, PhaseModulatedHopping, SelectiveHopping]
Variant = Union[HoppingVariant, KitaevChain]


@dataclass(frozen=True)
class FixedFilling:
    f: Fraction

    def __post_init__(self):
        object.__setattr__(self, "f", Fraction(self.f).limit_denominator(10**6))
        if not 0 <= self.f <= 1:
            raise ModelError(f"filling must lie in [0, 1], got {self.f}")


@dataclass(frozen=True)
class ChemicalPotential:
    mu: float


OccupationRule = Union[FixedFilling, ChemicalPotential]


@dataclass(frozen=True)
class ModelSpec:
    """One chain: geometry, kernel variant and occupation rule."""

    geometry: ChainGeometry
    variant: Variant
    occupation: OccupationRule

    def __post_init__(self):
        n = self.geometry.n_sites
        if isinstance(self.variant, KitaevChain):
            if self.geometry.boundary is not Boundary.ANTIPERIODIC:
                raise ModelError("KitaevChain requires antiperiodic boundary conditions")
            if not isinstance(self.occupation, ChemicalPotential):
                raise ModelError("KitaevChain requires a chemical-potential occupation rule")
        else:
            if self.geometry.boundary is not Boundary.PERIODIC:
                raise ModelError("hopping-only models require periodic boundary conditions")
            if not isinstance(self.occupation, FixedFilling):
                raise ModelError("hopping-only models require a fixed filling")
            if (self.occupation.f * n).denominator != 1:
                raise ModelError(f"filling {self.occupation.f} times n_sites={n} is not an integer")
        if isinstance(self.variant, SelectiveHopping):
            v = self.variant
            for s in (v.s1, v.s2):
                if not 0 <= s <= n // 2:
                    raise ModelError(f"selective offset {s} outside [0, {n // 2}]")

    @property
    def n_sites(self) -> int:
        return self.geometry.n_sites

    @property
    def mu(self) -> float:
        if not isinstance(self.occupation, ChemicalPotential):
            raise ModelError("model has no chemical potential")
        return self.occupation.mu

    @property
    def has_pairing(self) -> bool:
        return isinstance(self.variant, KitaevChain)


def hopping_model(n_sites: int, variant: HoppingVariant, filling) -> ModelSpec:
    """Periodic ring at fixed filling."""
    return ModelSpec(ChainGeometry(n_sites, Boundary.PERIODIC), variant, FixedFilling(Fraction(filling)))


def kitaev_model(n_sites: int, alpha: float, mu: float, **kwargs) -> ModelSpec:
    """Antiperiodic Kitaev ring; ``kwargs`` go to :class:`KitaevChain`."""
    return ModelSpec(
        ChainGeometry(n_sites, Boundary.ANTIPERIODIC),
        KitaevChain(alpha, **kwargs),
        ChemicalPotential(mu),
    )


# ---------------------------------------------------------------------------
# distances and kernel sums
# ---------------------------------------------------------------------------


def periodic_distance(i: int, j: int, n_sites: int) -> int:
    """Arc distance ``min(|i-j|, N - |i-j|)`` between sites ``i, j`` in ``1..N``."""
    if not (1 <= i <= n_sites and 1 <= j <= n_sites):
        raise ModelError(f"site indices ({i}, {j}) outside 1..{n_sites}")
    m = abs(i - j)
    return min(m, n_sites - m)


def oriented_distance(m: int, n_sites: int) -> int:
    """Signed offset along the shorter arc; antisymmetric in ``m``."""
    if abs(m) >= n_sites:
        raise ModelError(f"|m|={abs(m)} must be smaller than n_sites={n_sites}")
    if abs(m) <= n_sites - abs(m):
        return m
    return m - int(np.sign(m)) * n_sites


def _inverse_powers(m: np.ndarray, alpha: float) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    with np.errstate(under="ignore"):
        return np.where(m == 1.0, 1.0, m ** (-float(alpha)))


def _kernel_sum(k, weights, orders, trig) -> np.ndarray:
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(k.shape)
    # chunked to bound the (len(k), len(orders)) phase table
    step = max(1, 2**22 // max(len(orders), 1))
    for start in range(0, k.size, step):
        kk = k.ravel()[start:start + step]
        out.ravel()[start:start + step] = trig(np.outer(kk, orders)) @ weights
    return out


def ell_alpha(k, alpha: float, n_sites: int, phi: float = 0.0):
    """``sum_{n=1}^{N/2} cos(n (k + phi)) / n**alpha``.

    Scalar input gives a float, array input an array.
    """
    if not alpha > 0:
        raise ModelError(f"alpha must be > 0, got {alpha}")
    orders = np.arange(1, n_sites // 2 + 1)
    res = _kernel_sum(np.asarray(k, dtype=float) + phi, _inverse_powers(orders, alpha), orders, np.cos)
    return float(res[0]) if np.ndim(k) == 0 else res.reshape(np.shape(k))


def f_alpha(k, alpha: float, n_sites: int):
    """``sum_{m=1}^{N-1} sin(m k) / |m|_p**alpha`` with the periodic distance."""
    if not alpha > 0:
        raise ModelError(f"alpha must be > 0, got {alpha}")
    m = np.arange(1, n_sites)
    res = _kernel_sum(k, _inverse_powers(np.minimum(m, n_sites - m), alpha), m, np.sin)
    return float(res[0]) if np.ndim(k) == 0 else res.reshape(np.shape(k))


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def _cos_label(offset: int, labels: np.ndarray, n_sites: int) -> np.ndarray:
    """``cos(2 pi offset n / N)`` with the phase reduced on integers first."""
    return np.cos(2.0 * np.pi * np.mod(offset * labels, n_sites) / n_sites)


def _selective_energies(v: SelectiveHopping, labels: np.ndarray, n_sites: int) -> np.ndarray:
    k = 2.0 * np.pi * labels / n_sites
    head = -2.0 * (v.t1 * _cos_label(v.s1, labels, n_sites) + v.t2 * _cos_label(v.s2, labels, n_sites))
    if v.r == 0:
        return head
    window = np.empty(k.shape)
    zero = labels == 0
    kr = _cos_label(v.r, labels, n_sites)
    sr = np.sin(2.0 * np.pi * np.mod(v.r * labels, n_sites) / n_sites)
    with np.errstate(divide="ignore", invalid="ignore"):
        # cos(kr) [1 + tan(kr)/tan(k/2)] written without the tan(kr) pole
        window = kr + sr / np.tan(k / 2.0)
    window[zero] = 2 * v.r + 1
    return head * window


def dispersion(spec: ModelSpec, k, n_k) -> np.ndarray:
    """Single-particle energies of a hopping-only model at momenta ``k``.

    ``n_k`` are the integer labels of ``k`` (``k = 2 pi n_k / N``); closed forms
    that depend on label parity use them instead of the floating-point momentum.
    """
    v = spec.variant
    n = spec.n_sites
    k = np.asarray(k, dtype=float)
    labels = np.asarray(n_k)
    if isinstance(v, PowerLawHopping):
        if math.isinf(v.alpha):
            return -2.0 * v.t * np.cos(k)
        return -2.0 * v.t * ell_alpha(k, v.alpha, n)
    if isinstance(v, PhaseModulatedHopping):
        return -2.0 * v.t * ell_alpha(k, v.alpha, n, phi=v.phi)
    if isinstance(v, FractalDispersion):
        safe = np.where(labels == 0, 1.0, k)
        return np.where(labels == 0, 0.0, -v.t * np.sin(1.0 / safe**v.gamma))
    if isinstance(v, SelectiveHopping):
        return _selective_energies(v, np.atleast_1d(labels), n).reshape(np.shape(labels))
    raise ModelError(f"no single-particle dispersion for {type(v).__name__}")


@lru_cache(maxsize=32)
def _kitaev_tables(alpha: float, beta: float | None, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Mu-independent pieces on the antiperiodic grid: (hopping shape, f_alpha(k+pi))."""
    k = ChainGeometry(n_sites, Boundary.ANTIPERIODIC).momenta()
    if beta is None or math.isinf(beta):
        hop = np.cos(k)
    else:
        # power-law hopping; reduces to cos k as beta -> inf
        hop = -ell_alpha(k + np.pi, beta, n_sites)
    pair = f_alpha(k + np.pi, alpha, n_sites)
    hop.setflags(write=False)
    pair.setflags(write=False)
    return hop, pair


def kitaev_components(spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """``(kinetic, pairing)`` on the antiperiodic grid of a Kitaev spec."""
    v = spec.variant
    if not isinstance(v, KitaevChain):
        raise ModelError("kitaev_components needs a KitaevChain spec")
    hop, pair = _kitaev_tables(float(v.alpha), v.hopping_beta, spec.n_sites)
    return spec.mu - 2.0 * v.t * hop, v.delta * pair


def bogoliubov_spectrum(spec: ModelSpec, k) -> np.ndarray:
    """Quasiparticle energies ``sqrt(kinetic**2 + pairing**2)`` at arbitrary ``k``."""
    v = spec.variant
    if not isinstance(v, KitaevChain):
        raise ModelError("bogoliubov_spectrum needs a KitaevChain spec")
    n = spec.n_sites
    k = np.asarray(k, dtype=float)
    if v.hopping_beta is None or math.isinf(v.hopping_beta):
        hop = np.cos(k)
    else:
        hop = -ell_alpha(k + np.pi, v.hopping_beta, n)
    kinetic = spec.mu - 2.0 * v.t * hop
    pairing = v.delta * f_alpha(k + np.pi, v.alpha, n)
    return np.hypot(kinetic, pairing)


@dataclass(frozen=True)
class ModeGrid:
    """Momenta with their energies (single-particle or Bogoliubov)."""

    labels: np.ndarray
    momenta: np.ndarray
    energies: np.ndarray
    bogoliubov_angles: np.ndarray | None = None

    def __len__(self):
        return len(self.momenta)


def mode_grid(spec: ModelSpec) -> ModeGrid:
    labels = spec.geometry.mode_labels()
    k = spec.geometry.momenta()
    if spec.has_pairing:
        kinetic, pairing = kitaev_components(spec)
        energies = np.hypot(kinetic, pairing)
    else:
        energies = np.asarray(dispersion(spec, k, labels), dtype=float)
    return ModeGrid(labels, k, energies)
