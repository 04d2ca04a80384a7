from .instances import (
    boundary_function,
    boundary_on_grid,
    density_function,
    density_on_grid,
    radial_boundary_value,
    radial_density,
)
from .profiles import (
    HolderExponent,
    LpMembership,
    PowerProfile,
    QuadraticProfile,
    RadialProfile,
    TabulatedProfile,
    ddc_to_det,
    lp_membership,
    make_profile,
    ma_density,
    true_holder_exponent,
)
