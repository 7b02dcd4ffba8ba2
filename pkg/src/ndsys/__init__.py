"""Toolkit for multiparametric linear stationary systems on the integer lattice.

The package models systems whose state and signals live on Z^N and evolve
along all N coordinate directions at once.  It provides windowed
simulation and closed-form trajectory formulas, symmetrized multipowers,
transfer functions on the polydisc, conservativity and dissipativity
analysis, translation-generator (scattering) views, and assembly of a
system from a transfer-function decomposition.
"""

from .errors import (
    ArityError,
    DivergenceError,
    DomainError,
    NdsysError,
    PreconditionError,
    RangeError,
    RankAmbiguityError,
    RealizationError,
    ShapeError,
    SingularityError,
)
from .lattice import Box, LatticeSignal, SimulationWindow
from .pencil import (
    OperatorTuple,
    bordered_multipower,
    bordered_multipower_table,
    eval_pencil,
    multinomial,
    sym_multipower,
    sym_multipower_table,
)
from .system import (
    EnergyReport,
    EnergyRow,
    MultiLSDS,
    SimulationResult,
    Violation,
    closed_form,
    energy_balance_report,
    front_energy,
    simulate,
    validate,
)
from .numerics import halton_disc, halton_torus, ordered_completion, orth_basis, spectral_norm
from .analysis import (
    BlockStructure,
    CnuReport,
    ConservativityCertificate,
    TorusScanReport,
    block_structure,
    closely_connected_subspace,
    completely_nonunitary_check,
    conservativity_check,
    dissipativity_scan,
    reduce_closely_connected,
)
from .transfer import (
    CommutingTuple,
    MatrixPolynomial,
    SchurSampleReport,
    conjugate_transfer_check,
    maclaurin_coeff,
    maclaurin_poly,
    schur_agler_sample_test,
    schwarz_split,
    transfer_eval,
    transfer_eval_series,
)
from .laxphillips import (
    LPMask,
    MetricReport,
    OneParamSystemView,
    TruncatedLPVector,
    apply_adjoint,
    apply_generator,
    associated_one_param,
    commutation_residual,
    gamma_map,
    metric_check,
)
from .realization import (
    AglerData,
    AglerReport,
    RealizationResult,
    assemble_colligation,
    builtin_examples,
    canonical_fixture,
    verify_agler_identity,
)
from . import serialization

__version__ = "0.1.0"

__all__ = [
    "NdsysError",
    "ArityError",
    "ShapeError",
    "RangeError",
    "DomainError",
    "PreconditionError",
    "SingularityError",
    "DivergenceError",
    "RankAmbiguityError",
    "RealizationError",
    "Box",
    "SimulationWindow",
    "LatticeSignal",
    "OperatorTuple",
    "eval_pencil",
    "multinomial",
    "sym_multipower",
    "sym_multipower_table",
    "bordered_multipower",
    "bordered_multipower_table",
    "MultiLSDS",
    "Violation",
    "validate",
    "simulate",
    "closed_form",
    "SimulationResult",
    "front_energy",
    "EnergyRow",
    "EnergyReport",
    "energy_balance_report",
    "spectral_norm",
    "orth_basis",
    "ordered_completion",
    "halton_disc",
    "halton_torus",
    "TorusScanReport",
    "dissipativity_scan",
    "ConservativityCertificate",
    "conservativity_check",
    "BlockStructure",
    "block_structure",
    "closely_connected_subspace",
    "reduce_closely_connected",
    "CnuReport",
    "completely_nonunitary_check",
    "MatrixPolynomial",
    "CommutingTuple",
    "transfer_eval",
    "transfer_eval_series",
    "maclaurin_coeff",
    "maclaurin_poly",
    "conjugate_transfer_check",
    "SchurSampleReport",
    "schur_agler_sample_test",
    "schwarz_split",
    "TruncatedLPVector",
    "LPMask",
    "apply_generator",
    "apply_adjoint",
    "gamma_map",
    "commutation_residual",
    "MetricReport",
    "metric_check",
    "OneParamSystemView",
    "associated_one_param",
    "AglerData",
    "AglerReport",
    "verify_agler_identity",
    "RealizationResult",
    "assemble_colligation",
    "builtin_examples",
    "canonical_fixture",
    "serialization",
]
