from .poisson import (
    ComparisonReport,
    GridSolveResult,
    PoissonSolver,
    comparison_check,
    solve_poisson_n1,
)
from .radial import RadialSolveResult, solve_radial
