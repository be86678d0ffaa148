"""Simulation toolkit for identical particles without labels.

States are unordered lists of single-particle wave functions over discrete
mode bases; exchange statistics live in the transition amplitudes
(permanents for bosons, determinants for fermions).  On top of that the
package provides spatially localized deformations, an entropy-based degree
of indistinguishability, coincidence postselection onto detection regions,
two-qubit entanglement measures with local noise channels, and a scenario
pipeline with CSV/JSON/PNG reporting.
"""

from .errors import (
    BasisMismatchError,
    ChannelUndefinedError,
    DeformationUndefinedError,
    DegenerateStateError,
    MeasureUndefinedError,
    NoCoincidenceError,
    NoLabelError,
    PhaseUndefinedError,
    PipelineError,
    RegionSupportError,
    ScenarioError,
    StructureError,
)
from .states import (
    EQ_TOL,
    ZERO_TOL,
    Ensemble,
    ModeBasis,
    NState,
    ProductKet,
    Region,
    SingleParticleState,
    Statistics,
    build_preset,
    canonicalize,
    default_protocol_basis,
    permutation_parity,
)
from .kernels import (
    determinant,
    eta_sum,
    inner_product,
    norm,
    norm_squared,
    normalize,
    overlap,
    overlap_matrix,
    permanent,
)
from .deformations import (
    DeformationSpec,
    SingleParticleUnitary,
    UnitarityReport,
    check_unitarity,
    deform,
    deform_ensemble,
    identity_unitary,
    internal_unitary,
    localized_apply,
    region_weight,
    spatial_unitary,
    spin_rotation,
    two_mode_overlap,
)
from .indistinguishability import (
    DetectionSetup,
    DetectorSpec,
    degree_of_indistinguishability,
    detection_matrix,
    detection_prob,
    joint_prob,
    partition_function,
)
from .slocc import (
    LabeledDensityMatrix,
    LabeledState,
    SloccRegions,
    extract_exchange_phase,
    labeled_to_ensemble,
    localized_labeled_state,
    region_mode_state,
    slocc_postselect_mixed,
    slocc_postselect_pure,
    slocc_projector,
)
from .quantum_info import (
    CHANNEL_NAMES,
    KrausChannel,
    amplitude_damping,
    apply_local_channel,
    binary_entropy,
    channel,
    concurrence,
    depolarizing,
    entanglement_of_formation,
    fidelity,
    phase_damping,
    von_neumann_entropy,
)
from .scenario import (
    RUN_RECORD_COLUMNS,
    RunRecord,
    ScenarioConfig,
    emit_report,
    load_scenario,
    parse_scenario,
    render_report,
    run_pipeline,
    run_sweep,
)
from .validation import ValidationReport, validate_suite

__version__ = "0.1.0"
