"""Entanglement entropy and mutual information of quadratic fermionic chains."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    Boundary,
    ChainGeometry,
    ChemicalPotential,
    FixedFilling,
    FractalDispersion,
    KitaevChain,
    ModelError,
    ModelSpec,
    PhaseModulatedHopping,
    PowerLawHopping,
    SelectiveHopping,
    hopping_model,
    kitaev_model,
)
from .groundstate import correlation_matrix, ground_state  # noqa: E402
from .entropy import subsystem_entropy  # noqa: E402
from .analysis import Partition, mutual_information  # noqa: E402

__all__ = [
    "Boundary",
    "ChainGeometry",
    "ChemicalPotential",
    "FixedFilling",
    "FractalDispersion",
    "KitaevChain",
    "ModelError",
    "ModelSpec",
    "Partition",
    "PhaseModulatedHopping",
    "PowerLawHopping",
    "SelectiveHopping",
    "correlation_matrix",
    "ground_state",
    "hopping_model",
    "kitaev_model",
    "mutual_information",
    "subsystem_entropy",
]
