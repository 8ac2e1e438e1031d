"""Von Neumann entropies of Gaussian fermionic states from restricted correlators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groundstate import CorrelationData, majorana_matrix

#: eigenvalues this far outside [0, 1] are clamped; anything worse is an error
CLAMP_TOL = 1e-10
PAIRING_TOL = 1e-10


class SpectrumError(ArithmeticError):
    """Correlation spectrum is outside its physical range or malformed."""


@dataclass(frozen=True)
class EntropyResult:
    sites: tuple[int, ...]
    entropy: float
    spectrum: np.ndarray
    """Occupation eigenvalues ``C_gamma`` (C path) or ``nu_n`` (Majorana path)."""


def _clamp(p: np.ndarray) -> np.ndarray:
    if p.size and (p.min() < -CLAMP_TOL or p.max() > 1 + CLAMP_TOL):
        raise SpectrumError(f"occupation eigenvalue outside [0, 1]: range [{p.min()!r}, {p.max()!r}]")
    return np.clip(p, 0.0, 1.0)


def binary_entropy(p):
    """``-p ln p - (1-p) ln(1-p)`` with ``0 ln 0 = 0``; accepts scalars or arrays."""
    arr = _clamp(np.atleast_1d(np.asarray(p, dtype=float)))
    q = 1.0 - arr
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(arr > 0, arr * np.log(arr), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return float(h[0]) if np.ndim(p) == 0 else h


def _eigvalsh(mat: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(mat)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolver failed: {exc}") from exc


def majorana_nu(corr: CorrelationData) -> np.ndarray:
    """The ``l`` values ``nu_n >= 0`` from the eigenvalue pairs ``1 +- nu_n`` of M."""
    lam = np.sort(_eigvalsh(majorana_matrix(corr)) - 1.0)
    mismatch = np.max(np.abs(lam + lam[::-1])) if lam.size else 0.0
    if mismatch > PAIRING_TOL:
        raise SpectrumError(f"Majorana spectrum is not paired (+-) to {mismatch:.3e}")
    l = lam.size // 2
    return np.abs(lam[l:])


def subsystem_entropy(corr: CorrelationData) -> EntropyResult:
    """Entanglement entropy (natural log) of the site set of ``corr``."""
    if corr.F is None:
        spectrum = _clamp(_eigvalsh(corr.C))
        s = float(np.sum(binary_entropy(spectrum)))
    else:
        spectrum = majorana_nu(corr)
        if spectrum.max(initial=0.0) > 1 + CLAMP_TOL:
            raise SpectrumError(f"nu = {spectrum.max()!r} exceeds 1")
        spectrum = np.minimum(spectrum, 1.0)
        s = float(np.sum(binary_entropy((1.0 + spectrum) / 2.0)))
    return EntropyResult(corr.sites, s, spectrum)


def entropy_from_spectrum(result: EntropyResult, pairing: bool) -> float:
    """Recompute the entropy of ``result`` from its stored spectrum."""
    p = (1.0 + result.spectrum) / 2.0 if pairing else result.spectrum
    return float(np.sum(binary_entropy(p)))
