"""Semigroup accessibility of Weyl channels, their classical shadows and unistochastic dilations."""

from .accessibility import (
    Verdict,
    accessibility_times,
    channel_from_times,
    decide_accessibility,
    generator_from_times,
    log_generator,
    necessary_modulus_condition,
    product_face_vector,
    spectrum_from_times,
    star_shift,
    validate_lindblad,
)
from .classical import (
    Circulant,
    circulant_spectrum,
    classical_semigroup_matrix,
    decide_embeddability,
    hyperdecohere_channel,
    hyperdecohere_generator,
    kolmogorov_generator,
    validate_kolmogorov,
)
from .config import (
    DEFAULT_SEARCH,
    DEFAULT_TOL,
    InvalidDensityMatrix,
    NonPhysicalSpectrum,
    NonRealTimes,
    NotUnistochastic,
    SearchConfig,
    SingularSpectrum,
    ToleranceConfig,
    TriangleViolation,
    UnsupportedShape,
    WeylError,
)
from .geometry import spectral_support_area, spectral_support_contains, spiral_boundary, x_min
from .sampling import (
    VolumeEstimate,
    accessible_volume_fraction,
    cross_section_scan,
    fixed_p0_fraction,
    sample_simplex,
    spectra_scatter,
)
from .unistochastic import (
    channel_from_dilation,
    david_star_test,
    dilation_search_z_face,
    hypocycloid_test,
    jarlskog_Q,
    star_corner_unitaries,
    transition_from_dilation,
)
from .weyl import (
    WeylChannel,
    choi_of,
    hadamard_H,
    probabilities_from_spectrum,
    spectrum_from_probabilities,
    superoperator_of,
    weyl_matrix,
)

__version__ = "0.1.0"
