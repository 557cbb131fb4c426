"""Sample-based quantum diagonalization toolkit.

Selected-CI machinery for ground and excited electronic states: bitstring
configuration algebra, Slater-Condon Hamiltonian action, configuration
recovery over noisy samples, batched subspace diagonalization, excitation
extension, quantum subspace expansion, spin observables, and spectroscopic
curve fits.
"""

from .configurations import (
    ALPHA,
    BETA,
    Configuration,
    ExcitationOperator,
    IDENTITY,
    Sector,
    SubspaceBasis,
    apply_excitation,
    enumerate_sector,
    hamming_weights,
    in_sector,
    reference_configuration,
    spin_inversion_closure,
)
from .eigensolver import EigResult, davidson, generalized_eig
from .fits import (
    CurveData,
    FitReport,
    MorseFit,
    PowerLawFit,
    dissociation_energy,
    fit_morse,
    fit_powerlaw,
    fit_report,
)
from .hamiltonian import (
    Hamiltonian,
    SparseState,
    apply_operator,
    build_subspace_operator,
    connected_configurations,
    hubbard_chain,
    matrix_element,
    parse_fcidump,
    write_fcidump,
)
from .observables import (
    OrbitalGroup,
    classify_roots,
    group_charges,
    local_spin,
    occupancy_profile,
    spin_correlation,
    total_s_squared,
)
from .pipelines import (
    CIState,
    GeneratorSet,
    QseResult,
    SolveSettings,
    cut_state,
    extend_subspace,
    make_generators,
    run_ext_sqd,
    run_qse,
    run_sqd,
    solve_subspace,
)
from .sampling import (
    RecoveryModel,
    SampleSet,
    make_batches,
    particle_number_stats,
    read_samples,
    recover_configurations,
    sample_state,
    sample_uniform_sector,
    update_model,
    write_samples,
)

__version__ = "0.1.0"
