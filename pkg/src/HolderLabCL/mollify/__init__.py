from .kernels import (
    KERNELS,
    BallIndicatorKernel,
    DilatedKernel,
    Kernel,
    PlateauBumpKernel,
    SmoothBumpKernel,
    kernel_from_dict,
    make_kernel,
    sphere_area,
)
from .kiselman import KiselmanResult, kiselman_transform, t_grid
from .mollifier import (
    GapTable,
    MonotonicityReport,
    monotonicity_check,
    mollify,
    subharmonic_gap,
)
