"""Short-time Fourier analysis on the flat torus [0,1) x [0,N) and finite Gabor frames."""
from .analysis import (
    QuadratureGrid,
    invert_stft,
    kernel_basis_sum,
    kernel_gaussian,
    kernel_pairing,
    kernel_reproduce_check,
    moyal_gram,
    torus_inner,
)
from .bargmann import (
    BargmannFn,
    ZeroSet,
    coeff_recursion_check,
    zero_count,
    zero_locate,
    zero_sum_check,
)
from .frames import (
    FrameReport,
    PointConfig,
    analysis_matrix,
    frame_bounds,
    frame_check,
    predicate_grid,
    predicate_torus,
    verify_equivalence,
)
from .signals import (
    FiniteSignal,
    GaussianWindow,
    GenericWindow,
    SNVector,
    duality_pairing,
    periodize,
    periodize_to_signal,
    sigma_coeffs,
    sinc_gaussian_witness,
)
from .torus_stft import TorusPoint, bridge_check, dgt, stft, stft_basis, zak
from .theta import theta, theta_dz

__version__ = "0.1.0"
