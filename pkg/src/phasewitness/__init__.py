"""Phase-space witnesses for nonclassicality and quantum non-Gaussianity of single-mode light."""

from ._validation import DomainError, TruncationError
from .analytic import (
    GaussianWitnessOptimum,
    QNGReport,
    certify_qng,
    distance_lower_bound,
    gaussian_lambda_min,
    qng_bound,
    qng_threshold,
    squeezed_thermal_lambda_min,
    two_point_gaussian_minimum,
)
from .detector import (
    ArraySpec,
    ClickDistribution,
    TriangularMap,
    build_triangular_map,
    click_probabilities,
    recover_quasiprobs,
    simulate_shots,
    wigner_like,
    witness_from_clicks,
)
from .quasiprob import fock_kernel, quasiprob, sparam_gaussian, wigner_gaussian
from .states import (
    FockDensityMatrix,
    GaussianState,
    SqueezedFockState,
    apply_loss,
    coherent_fock,
    coherent_state,
    fock_mixture,
    fock_state,
    make_squeezed_thermal,
    mean_photon_number,
    squeezed_two_photon_mixture,
    thermal_fock,
    thermal_state,
    vacuum,
)
from .witness import (
    PhasePointSet,
    SearchConfig,
    Verdict,
    WitnessMatrix,
    WitnessReport,
    build_witness,
    detection_determinant,
    fds_detection_radius,
    min_eigenvalue,
    optimize_points,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "TruncationError",
    "GaussianWitnessOptimum",
    "QNGReport",
    "certify_qng",
    "distance_lower_bound",
    "gaussian_lambda_min",
    "qng_bound",
    "qng_threshold",
    "squeezed_thermal_lambda_min",
    "two_point_gaussian_minimum",
    "ArraySpec",
    "ClickDistribution",
    "TriangularMap",
    "build_triangular_map",
    "click_probabilities",
    "recover_quasiprobs",
    "simulate_shots",
    "wigner_like",
    "witness_from_clicks",
    "fock_kernel",
    "quasiprob",
    "sparam_gaussian",
    "wigner_gaussian",
    "FockDensityMatrix",
    "GaussianState",
    "SqueezedFockState",
    "apply_loss",
    "coherent_fock",
    "coherent_state",
    "fock_mixture",
    "fock_state",
    "make_squeezed_thermal",
    "mean_photon_number",
    "squeezed_two_photon_mixture",
    "thermal_fock",
    "thermal_state",
    "vacuum",
    "PhasePointSet",
    "SearchConfig",
    "Verdict",
    "WitnessMatrix",
    "WitnessReport",
    "build_witness",
    "detection_determinant",
    "fds_detection_radius",
    "min_eigenvalue",
    "optimize_points",
]
