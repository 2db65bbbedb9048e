from sublaplacian_sdk.methods.group import (
    bracket,
    classify,
    j_of_mu,
    load_group,
    random_directions,
    stein_tomas_exponent,
    theta_interpolation,
    validate,
)
from sublaplacian_sdk.methods.symplectic import (
    MuDecomposition,
    check_homogeneity,
    conjugation_residual,
    decompose,
    decompose_many,
)
from sublaplacian_sdk.methods.grid import Grid, load_grid_function, save_grid_function
from sublaplacian_sdk.methods.pool import pool_map
from sublaplacian_sdk.methods.laguerre import (
    BlockParams,
    LatticePoint,
    apply_twisted_laplacian,
    diagonal_weight,
    eigenfunction_basis,
    eigenvalue,
    enumerate_lattice,
    laguerre_poly,
    laguerre_sequence,
    phi,
    projection_kernel,
    projection_normalization,
    special_hermite,
    twisted_convolution,
)
from sublaplacian_sdk.methods.heat import (
    ComplexTime,
    damped_fejer,
    damped_fejer_floor,
    dispersive_blowup,
    dispersive_scan,
    fejer_fourier_check,
    fejer_pair,
    heat_apply,
    heat_kernel,
    heat_kernel_expansion,
    s_fn,
    t_fn,
)
from sublaplacian_sdk.methods.cluster import (
    ClusterOperator,
    ClusterSpec,
    cluster_exponent,
    cluster_members,
    envelope_check,
    fit_exponent,
    norm_1to2_exact,
    norm_p_to_2_lower,
    scaling_identity_check,
)
from sublaplacian_sdk.methods.restriction import (
    JointGrid,
    MultiplierPair,
    PlancherelMeasure,
    QuadratureConfig,
    SampledFunction,
    apply_joint_multiplier,
    conv_kernel_eval,
    cowling_sikora_norm,
    ell0_threshold,
    load_multiplier_pair,
    norm_lower_sandwich_check,
    plancherel_kernel_norm,
    restriction_ratio,
    restriction_ratio_grid,
    save_multiplier_pair,
)
from sublaplacian_sdk.methods.sphere import lebedev_86, sphere_quadrature
