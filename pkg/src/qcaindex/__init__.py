"""Index computations for one-dimensional quantum cellular automata."""
from .classify import ClassificationWitness, find_intertwiner, symmetric_fdqc_check, witness_to_qca, z2_enumerate, z2_solve
from .doubled import doubled_z2, index_via_doubled
from .errors import DomainError, NumericalFailure, QCAError
from .gnvw import RationalIndex, eta_overlap, gnvw_index
from .model import (
    ChainSpec,
    Interval,
    OnsiteRep,
    QCAOperator,
    brickwork_qca,
    identity_qca,
    random_brickwork,
    shift_qca,
    spi_example_circuit,
    symmetric_brickwork,
)
from .reps import RepSpectrum, collision_search, powered_signature, shift_equivalent
from .spi import lr_decompose, refined_spi_g, spi_g, z2_indices
from .transport import transport_nu

__all__ = [
    "ChainSpec", "ClassificationWitness", "DomainError", "Interval", "NumericalFailure", "OnsiteRep", "QCAError",
    "QCAOperator", "RationalIndex", "RepSpectrum", "brickwork_qca", "collision_search", "doubled_z2",
    "eta_overlap", "find_intertwiner", "gnvw_index", "identity_qca", "index_via_doubled", "lr_decompose",
    "powered_signature", "random_brickwork", "refined_spi_g", "shift_equivalent", "shift_qca",
    "spi_example_circuit", "spi_g", "symmetric_brickwork", "symmetric_fdqc_check", "transport_nu",
    "witness_to_qca", "z2_enumerate", "z2_indices", "z2_solve",
]
