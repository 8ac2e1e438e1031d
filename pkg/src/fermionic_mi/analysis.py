"""Mutual information of two equal blocks, parameter sweeps and reference curves."""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import __version__
from .entropy import SpectrumError, subsystem_entropy
from .groundstate import GaplessModeError, GroundStateData, correlation_matrix, ground_state
from .lattice import ChemicalPotential, KitaevChain, ModelError, ModelSpec

logger = logging.getLogger(__name__)

GAPLESS_SHIFT = 1e-6

_NUMERICAL = (SpectrumError, GaplessModeError, np.linalg.LinAlgError, FloatingPointError)


class SweepPointError(RuntimeError):
    """A numerical failure at one sweep point; carries the axis and value."""

    def __init__(self, axis: str, value, cause: BaseException):
        super().__init__(f"{axis}={value}: {type(cause).__name__}: {cause}")
        self.axis = axis
        self.value = value


@dataclass(frozen=True)
class Partition:
    """Blocks ``A = [a, a+l-1]`` and ``B = [a+l+gap, a+2l+gap-1]`` on the ring."""

    l: int
    gap: int
    a_start: int = 1

    def __post_init__(self):
        if self.l < 1 or self.gap < 0:
            raise ModelError(f"need l >= 1 and gap >= 0, got l={self.l}, gap={self.gap}")

    def validate(self, n_sites: int) -> None:
        if 2 * self.l + self.gap > n_sites:
            raise ModelError(f"2l + d = {2 * self.l + self.gap} exceeds n_sites={n_sites}")
        if not 1 <= self.a_start <= n_sites:
            raise ModelError(f"a_start={self.a_start} outside 1..{n_sites}")

    def _block(self, first: int, n_sites: int) -> list[int]:
        return [(first - 1 + i) % n_sites + 1 for i in range(self.l)]

    def sites_a(self, n_sites: int) -> list[int]:
        return self._block(self.a_start, n_sites)

    def sites_b(self, n_sites: int) -> list[int]:
        return self._block(self.a_start + self.l + self.gap, n_sites)


@dataclass(frozen=True)
class MIRecord:
    l: int
    d: int
    x: float
    S_A: float
    S_B: float
    S_AB: float
    I: float

    @property
    def l_over_d(self) -> float:
        return math.inf if self.d == 0 else self.l / self.d


@dataclass(frozen=True)
class SweepPoint:
    value: float
    record: MIRecord
    filling: float
    note: str = ""


@dataclass
class SweepResult:
    model: ModelSpec
    axis: str
    points: list[SweepPoint]
    skipped: list[tuple[float, str]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    @property
    def mi(self) -> np.ndarray:
        return np.array([p.record.I for p in self.points])

    @property
    def x(self) -> np.ndarray:
        return np.array([p.record.x for p in self.points])


def four_point_ratio(l: int, d: int) -> float:
    if l < 1 or d < 0:
        raise ModelError(f"need l >= 1, d >= 0 (got {l}, {d})")
    return l * l / (l + d) ** 2


def mutual_information(state: GroundStateData, p: Partition) -> MIRecord:
    n = state.n_sites
    p.validate(n)
    a = p.sites_a(n)
    b = p.sites_b(n)
    s_a = subsystem_entropy(correlation_matrix(state, a)).entropy
    s_b = subsystem_entropy(correlation_matrix(state, b)).entropy
    s_ab = subsystem_entropy(correlation_matrix(state, a + b)).entropy
    return MIRecord(p.l, p.gap, four_point_ratio(p.l, p.gap), s_a, s_b, s_ab, s_a + s_b - s_ab)


def reference_dirac(x: float) -> float:
    """MI of two intervals for free Dirac fermions, ``(1/3) ln(1/(1-x))``."""
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    return -math.log1p(-x) / 3.0


def reference_holographic(x: float, c: float = 1.0) -> float:
    """Strong-coupling holographic MI: zero below ``x = 1/2``, ``(c/3) ln(x/(1-x))`` above."""
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    if c <= 0:
        raise ValueError("central charge must be positive")
    if x < 0.5:
        return 0.0
    return c / 3.0 * math.log(x / (1.0 - x))


def _map(fn: Callable, items: Sequence, values: Sequence, axis: str, workers: int) -> list:
    """Apply ``fn`` to every item; results come back in input order whatever ``workers`` is."""

    def guarded(pair):
        item, value = pair
        try:
            return fn(item)
        except _NUMERICAL as exc:
            raise SweepPointError(axis, value, exc) from exc

    pairs = list(zip(items, values))
    if workers <= 1 or len(pairs) < 2:
        return [guarded(p) for p in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(guarded, pairs))


def _state(spec: ModelSpec, axis: str):
    try:
        return ground_state(spec)
    except _NUMERICAL as exc:
        raise SweepPointError(axis, "ground state", exc) from exc


def _metadata(spec: ModelSpec, axis: str) -> dict:
    return {"engine_version": __version__, "axis": axis, "model": repr(spec)}


def sweep_distance(
    spec: ModelSpec,
    l: int,
    d_values: Sequence[int] | None = None,
    *,
    a_start: int = 1,
    workers: int = 1,
) -> SweepResult:
    """MI against the gap ``d`` for one ground state (default ``d = 1..N/2 - l``)."""
    n = spec.n_sites
    if d_values is None:
        d_values = range(1, n // 2 - l + 1)
    state = _state(spec, "distance")
    result = SweepResult(spec, "distance", [], metadata=_metadata(spec, "distance"))
    valid = []
    for d in sorted(set(int(v) for v in d_values)):
        if d < 0 or 2 * l + d > n:
            logger.warning("skipping d=%d: needs 0 <= d <= %d", d, n - 2 * l)
            result.skipped.append((d, "outside 0 <= d <= N - 2l"))
        else:
            valid.append(d)
    records = _map(
        lambda d: mutual_information(state, Partition(l, d, a_start)), valid, valid, "distance", workers
    )
    result.points = [SweepPoint(d, rec, state.achieved_filling) for d, rec in zip(valid, records)]
    return result


def sweep_subsystem_size(
    spec: ModelSpec, d: int, l_values: Sequence[int], *, a_start: int = 1, workers: int = 1
) -> SweepResult:
    n = spec.n_sites
    state = _state(spec, "size")
    result = SweepResult(spec, "size", [], metadata=_metadata(spec, "size"))
    valid = []
    for l in sorted(set(int(v) for v in l_values)):
        if l < 1 or 2 * l + d > n:
            logger.warning("skipping l=%d: 2l + d exceeds %d", l, n)
            result.skipped.append((l, "2l + d > N"))
        else:
            valid.append(l)
    records = _map(
        lambda l: mutual_information(state, Partition(l, d, a_start)), valid, valid, "size", workers
    )
    result.points = [SweepPoint(l, rec, state.achieved_filling) for l, rec in zip(valid, records)]
    return result


def _kitaev_point(spec: ModelSpec, partition: Partition) -> tuple[MIRecord, float, str]:
    try:
        state = ground_state(spec)
        note = ""
    except GaplessModeError:
        shifted = dataclasses.replace(spec, occupation=ChemicalPotential(spec.mu + GAPLESS_SHIFT))
        logger.warning("gapless point mu=%g shifted by %g", spec.mu, GAPLESS_SHIFT)
        state = ground_state(shifted)
        note = f"gapless; mu shifted by {GAPLESS_SHIFT:g}"
    return mutual_information(state, partition), state.achieved_filling, note


def _require_kitaev(spec: ModelSpec) -> None:
    if not isinstance(spec.variant, KitaevChain):
        raise ModelError("this sweep needs a KitaevChain spec")


def sweep_mu(
    spec: ModelSpec, mu_values: Sequence[float], l: int, d: int, *, a_start: int = 1, workers: int = 1
) -> SweepResult:
    _require_kitaev(spec)
    partition = Partition(l, d, a_start)
    partition.validate(spec.n_sites)
    mus = sorted(float(m) for m in mu_values)
    specs = [dataclasses.replace(spec, occupation=ChemicalPotential(m)) for m in mus]
    out = _map(lambda s: _kitaev_point(s, partition), specs, mus, "mu", workers)
    result = SweepResult(spec, "mu", [], metadata=_metadata(spec, "mu"))
    result.points = [SweepPoint(m, rec, fill, note) for m, (rec, fill, note) in zip(mus, out)]
    return result


def sweep_alpha(
    spec: ModelSpec, alpha_values: Sequence[float], l: int, d: int, *, a_start: int = 1, workers: int = 1
) -> SweepResult:
    """MI against the pairing exponent of a Kitaev chain."""
    _require_kitaev(spec)
    partition = Partition(l, d, a_start)
    partition.validate(spec.n_sites)
    alphas = sorted(float(a) for a in alpha_values)
    specs = [dataclasses.replace(spec, variant=dataclasses.replace(spec.variant, alpha=a)) for a in alphas]
    out = _map(lambda s: _kitaev_point(s, partition), specs, alphas, "alpha", workers)
    result = SweepResult(spec, "alpha", [], metadata=_metadata(spec, "alpha"))
    result.points = [SweepPoint(a, rec, fill, note) for a, (rec, fill, note) in zip(alphas, out)]
    return result


class ScalingFit(NamedTuple):
    beta: float
    prefactor: float
    residual: float


def _block_entropies(spec: ModelSpec, l_values: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    state = ground_state(spec)
    ls = np.array(sorted(set(int(v) for v in l_values)))
    s = np.array([subsystem_entropy(correlation_matrix(state, range(1, l + 1))).entropy for l in ls])
    return ls, s


def ee_scaling_fit(spec: ModelSpec, l_values: Sequence[int]) -> ScalingFit:
    """Least-squares fit of ``ln S = ln(prefactor) + beta ln l`` over contiguous blocks."""
    if len(set(l_values)) < 5:
        raise ValueError("need at least five block sizes")
    if max(l_values) > spec.n_sites // 4:
        raise ValueError(f"block sizes must not exceed N/4 = {spec.n_sites // 4}")
    ls, s = _block_entropies(spec, l_values)
    keep = s > 0
    if not np.all(keep):
        logger.warning("excluding non-positive entropies at l=%s", ls[~keep].tolist())
    if keep.sum() < 2:
        raise ValueError("fewer than two positive entropies left to fit")
    X = np.column_stack([np.log(ls[keep]), np.ones(keep.sum())])
    coef, *_ = np.linalg.lstsq(X, np.log(s[keep]), rcond=None)
    resid = float(np.linalg.norm(X @ coef - np.log(s[keep])))
    return ScalingFit(float(coef[0]), float(np.exp(coef[1])), resid)


def log_scaling_fit(spec: ModelSpec, l_values: Sequence[int]) -> tuple[float, float, float]:
    """Fit ``S = slope ln l + offset``; returns ``(slope, offset, residual)`` in log-S units.

    The residual is measured on ``ln S`` so it compares directly with
    :func:`ee_scaling_fit`.
    """
    ls, s = _block_entropies(spec, l_values)
    X = np.column_stack([np.log(ls), np.ones(ls.size)])
    coef, *_ = np.linalg.lstsq(X, s, rcond=None)
    model = X @ coef
    if np.any(model <= 0):
        return float(coef[0]), float(coef[1]), math.inf
    return float(coef[0]), float(coef[1]), float(np.linalg.norm(np.log(model) - np.log(s)))


def density_covariance(state: GroundStateData, i: int, j: int) -> float:
    """``<n_i n_j> - <n_i><n_j>`` for ``i != j`` via Wick's theorem."""
    corr = correlation_matrix(state, [i, j])
    cov = -abs(corr.C[0, 1]) ** 2
    if corr.F is not None:
        cov += abs(corr.F[0, 1]) ** 2
    return float(cov)


def mi_correlation_bound_check(
    state: GroundStateData, p: Partition, i: int, j: int, tol: float = 1e-10
) -> tuple[float, float, bool]:
    """Check ``I(A,B) >= cov(n_i, n_j)**2 / 2`` for ``i`` in A and ``j`` in B."""
    n = state.n_sites
    if i not in p.sites_a(n) or j not in p.sites_b(n):
        raise ModelError(f"need i in A and j in B (got i={i}, j={j})")
    lhs = mutual_information(state, p).I
    rhs = density_covariance(state, i, j) ** 2 / 2.0
    return lhs, rhs, bool(lhs >= rhs - tol)


def local_maxima(values: Sequence[float]) -> list[int]:
    """Indices of strict discrete local maxima (three-point window)."""
    y = np.asarray(values)
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] > y[i + 1]]
