"""Cross-check every engine path against the Fock-space oracle on a fixed catalog."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .analysis import Partition, density_covariance, mutual_information
from .entropy import subsystem_entropy
from .groundstate import correlation_matrix, ground_state
from .lattice import (
    FractalDispersion,
    ModelSpec,
    PhaseModulatedHopping,
    PowerLawHopping,
    SelectiveHopping,
    hopping_model,
    kitaev_model,
)
from .oracle import (
    MAX_SITES,
    oracle_correlators,
    oracle_density_covariance,
    oracle_ground_state,
    oracle_mi,
    oracle_reduced_entropy,
)

THRESHOLD = 1e-9
MIN_GAP = 1e-6

# one gapped filling per size: closed shells of the cosine-like bands
_FILLING = {4: 0.25, 6: 0.5, 8: 0.375, 10: 0.3}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: ModelSpec


@dataclass(frozen=True)
class CheckRow:
    model: str
    n_sites: int
    quantity: str
    deviation: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.deviation < THRESHOLD


def catalog(max_sites: int = 10) -> list[CatalogEntry]:
    """Default catalog for ``N in {4, 6, 8, 10}`` restricted to ``N <= max_sites``."""
    if not 2 <= max_sites <= MAX_SITES:
        raise ValueError(f"max_sites must lie in 2..{MAX_SITES}")
    out = []
    for n in (4, 6, 8, 10):
        if n > max_sites:
            continue
        f = _FILLING[n]
        out += [
            CatalogEntry("tight-binding", hopping_model(n, PowerLawHopping(float("inf")), f)),
            CatalogEntry("power-law a=0.5", hopping_model(n, PowerLawHopping(0.5), f)),
            CatalogEntry("power-law a=2", hopping_model(n, PowerLawHopping(2.0), f)),
            CatalogEntry("fractal g=1", hopping_model(n, FractalDispersion(1), f)),
            CatalogEntry("antipodal", hopping_model(n, SelectiveHopping(n // 2), 0.5)),
            CatalogEntry("phase-modulated", hopping_model(n, PhaseModulatedHopping(2.0, 0.3), f)),
            CatalogEntry("kitaev a=0.5", kitaev_model(n, 0.5, 1.5)),
            CatalogEntry("kitaev a=1000", kitaev_model(n, 1000.0, 1.5)),
        ]
    return out


def _partitions(n: int) -> Iterable[Partition]:
    for l in range(1, n // 2 + 1):
        for d in range(0, n - 2 * l + 1):
            yield Partition(l, d)


def check_entry(entry: CatalogEntry) -> list[CheckRow]:
    spec = entry.spec
    n = spec.n_sites
    exact = oracle_ground_state(spec)
    row = lambda q, dev: CheckRow(entry.name, n, q, float(dev))  # noqa: E731
    if exact.gap < MIN_GAP:
        return [CheckRow(entry.name, n, "skipped", 0.0, f"oracle gap {exact.gap:.2e}")]
    state = ground_state(spec, strict=True)
    path = "entropy (Majorana)" if state.has_pairing else "entropy (C)"
    sites = list(range(1, n + 1))

    dev_s = max(
        abs(subsystem_entropy(correlation_matrix(state, sites[:l])).entropy - oracle_reduced_entropy(exact, sites[:l]))
        for l in range(1, n)
    )
    dev_i = 0.0
    for p in _partitions(n):
        engine = mutual_information(state, p).I
        dev_i = max(dev_i, abs(engine - oracle_mi(exact, p.sites_a(n), p.sites_b(n))))

    corr = correlation_matrix(state, sites)
    C, F = oracle_correlators(exact, sites)
    rows = [row(path, dev_s), row("mutual information", dev_i), row("C", np.max(np.abs(corr.C - C)))]
    if corr.F is not None:
        rows.append(row("F", np.max(np.abs(corr.F - F))))
    dev_cov = max(
        abs(density_covariance(state, 1, j) - oracle_density_covariance(exact, 1, j)) for j in range(2, n + 1)
    )
    rows.append(row("density covariance", dev_cov))
    return rows


def run_validation(max_sites: int = 10) -> list[CheckRow]:
    rows: list[CheckRow] = []
    for entry in catalog(max_sites):
        rows.extend(check_entry(entry))
    return rows


def format_table(rows: list[CheckRow]) -> str:
    lines = [f"{'model':<18} {'N':>3}  {'quantity':<20} {'max |dev|':>10}  result"]
    for r in rows:
        verdict = "SKIP" if r.quantity == "skipped" else ("PASS" if r.passed else "FAIL")
        extra = f"  {r.note}" if r.note else ""
        lines.append(f"{r.model:<18} {r.n_sites:>3}  {r.quantity:<20} {r.deviation:>10.2e}  {verdict}{extra}")
    return "\n".join(lines)
