import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from rich import print

from ..barriers.budget import budget
from ..barriers.linfty import linfty_check
from ..domain.domain import Ball
from ..domain.grid import Grid, GridFn
from ..domain.io import write_csv, write_gridfn
from ..exact.instances import (
    boundary_on_grid,
    density_on_grid,
    radial_boundary_value,
    radial_density,
)
from ..holder.certificate import verify_lemma21
from ..holder.modulus import modulus
from ..mollify.kernels import make_kernel
from ..mollify.kiselman import kiselman_transform
from ..mollify.mollifier import monotonicity_check, subharmonic_gap
from ..solver.poisson import solve_poisson_n1
from ..solver.radial import solve_radial
from ..utils.errors import HolderLabError
from ..utils.utils import check_path_exists, write_json

RADIAL_MESH = 100_001
GAP_FLOOR = 1e-9

ANCHORS = {
    "budget.alpha": "Holder exponent of the boundary data",
    "budget.p": "integrability exponent of the density",
    "budget.p_star": "conjugate exponent p / (p - 1)",
    "budget.n": "complex dimension",
    "budget.gamma0": "integrability threshold 1 / (p* + 1) of the local L-infinity bound",
    "budget.gamma_n": "stability threshold 1 / (n p* + 1)",
    "budget.gamma": "stability exponent chosen below gamma_n",
    "budget.gamma_prime": "exponent of the boundary data branch, below gamma_n",
    "budget.gamma_dblprime": "exponent of the barrier branch, below gamma0",
    "budget.beta": "boundary Holder exponent from the exponent budget",
    "budget.alpha_prime": "global Holder exponent predicted by the exponent budget",
    "budget.regime": "which bound limits the boundary exponent",
    "solve.kind": "solver used: Poisson in C^1, radial reduction otherwise",
    "solve.method": "linear solver of the five-point system",
    "solve.iterations": "sweeps of the iterative solver, 0 for the direct solve",
    "solve.runtime": "wall time of the Dirichlet solve in seconds",
    "solve.residual": "discrete residual of the Dirichlet solve",
    "solve.n": "complex dimension of the radial reduction",
    "solve.S": "squared radius closing the radial mesh",
    "solve.mesh_size": "nodes of the radial mesh",
    "solve.boundary_value": "Dirichlet value pinned at the outer radius",
    "gap.eps": "ladder of regularization scales",
    "gap.sup_gaps": "sup regularization gap per scale",
    "gap.l1_gaps": "L1 regularization gap per scale",
    "gap.sup_slope": "order of the sup regularization gap, predicted alpha'",
    "gap.l1_slope": "interior cancellation of the L1 regularization gap, predicted order 1 + beta",
    "gap.subharmonic": "regularization of a subharmonic function majorizes it",
    "kiselman.K": "curvature constant of the Kiselman transform",
    "kiselman.c": "level of the Kiselman transform, eps^alpha'",
    "kiselman.eps": "largest scale of the Kiselman transform",
    "kiselman.theta": "minimizing scale of the Kiselman transform stays comparable to eps",
    "kiselman.t_grid_size": "scales in the Kiselman infimum",
    "kiselman.t_floor": "smallest scale in the Kiselman infimum",
    "kiselman.sandwich": "Kiselman transform lies between u - K eps^2 and the eps-regularization",
    "monotonicity.worst": "regularizations plus K eps^2 increase with eps",
    "modulus.mode": "exhaustive or sampled scan of point pairs",
    "modulus.pair_count": "point pairs inspected by the modulus scan",
    "modulus.h": "grid spacing of the scanned solution",
    "modulus.alpha_hat": "measured global Holder exponent of the solution",
    "modulus.C_hat": "measured global Holder constant of the solution",
    "modulus.residual": "log residual of the modulus fit",
    "modulus.degenerate": "whether the modulus admits an exponent fit",
    "lemma21.alpha": "target Holder exponent of the constant certificate",
    "lemma21.eps0": "largest dyadic scale of the certificate",
    "lemma21.R": "support radius of the rescaled kernel",
    "lemma21.scale": "dilation placing a ball of radius 3 inside the kernel plateau",
    "lemma21.C1": "boundary Holder constant of the solution",
    "lemma21.C2": "regularization gap constant along dyadic scales",
    "lemma21.kappa": "averaging mass of the kernel's plateau",
    "lemma21.delta": "lower bound of the kernel on its plateau",
    "lemma21.diam": "diameter of the domain",
    "lemma21.C3": "constant at scales above eps0 from the boundary constant and the diameter",
    "lemma21.C4": "constant carried through the dyadic descent by the gap and averaging constants",
    "lemma21.C": "global Holder constant assembled from boundary and gap constants",
    "lemma21.conclusion": "measured modulus against C r^alpha per dyadic radius",
    "lemma21.replay": "dyadic descent replayed on the measured modulus, one row per step",
    "lemma21.notes": "restrictions of the replay",
    "lemma21.passed": "modulus bounded by C r^alpha on every resolvable dyadic radius",
    "linfty.delta": "volume exponent of the L-infinity estimate",
    "linfty.lhs": "size of the infimum of the solution",
    "linfty.inf_phi": "size of the infimum of the boundary data",
    "linfty.rhs": "density norm to the power 1/n times the volume factor",
    "linfty.bound": "L-infinity estimate by the boundary infimum and the density norm",
    "linfty.passed": "the L-infinity estimate holds",
}


@dataclass
class PipelineBundle:
    """
    Results of one pipeline run.

    Attributes
    ----------
    name : str
    out : pathlib.Path
    stages : dict
        Stage name to its JSON-ready results, for every stage that finished.
    checks : list of dict
        ``name``, ``value``, ``threshold`` and ``passed`` per predicted inequality.
    failed_stage : str or None
    error : str or None
    files : dict
        Output name to path.
    """

    name: str
    out: Path
    stages: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    failed_stage: str = None
    error: str = None
    error_kind: str = None
    files: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    current_stage: str = None

    @property
    def passed(self):
        return self.failed_stage is None and all(c["passed"] for c in self.checks)

    def check(self, name, value, threshold, passed):
        self.checks.append(
            {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}
        )

    def traceability(self):
        trace = {}
        for stage, results in self.stages.items():
            for key, value in results.items():
                name = f"{stage}.{key}"
                trace[name] = {"value": value, "anchor": ANCHORS.get(name)}
        for c in self.checks:
            trace[f"check.{c['name']}"] = {
                "value": c["value"],
                "anchor": ANCHORS.get(c["name"], c["name"]),
            }
        return trace

    def to_dict(self):
        return {
            "name": self.name,
            "out": str(self.out),
            "passed": self.passed,
            "failed_stage": self.failed_stage,
            "error": self.error,
            "error_kind": self.error_kind,
            "stages": self.stages,
            "checks": self.checks,
            "files": {k: str(v) for k, v in self.files.items()},
            "warnings": self.warnings,
        }

    def summary(self):
        lines = [f"experiment {self.name}: {'PASSED' if self.passed else 'FAILED'}"]
        if self.failed_stage:
            lines.append(f"failed stage: {self.failed_stage} ({self.error})")
        for c in self.checks:
            mark = "ok" if c["passed"] else "VIOLATED"
            lines.append(f"  {c['name']}: {c['value']:.6g} vs {c['threshold']:.6g} [{mark}]")
        return "\n".join(lines) + "\n"


def solve_instance(config, verbose=False):
    """
    Solves the configured instance on a ball of C^n.

    Complex dimension 1 goes through the Poisson solver; higher dimensions solve
    the radial problem and sample u(z) = phi(|z|^2) on the grid.

    Returns
    -------
    u : GridFn
    f : GridFn
        Density on the same grid.
    report : dict
    """
    instance = config["instance"]
    n = int(instance["n"])
    domain = Ball(n=n, radius=instance["radius"])
    grid = Grid(domain, instance["resolution"])
    f = density_on_grid(instance, grid)
    start = time.perf_counter()

    if n == 1:
        solver = config["solver"]
        result = solve_poisson_n1(
            domain,
            f,
            boundary_on_grid(instance, grid),
            method=solver["method"],
            omega=solver["omega"],
            max_iter=solver["max_iter"],
            tol=solver["tol"],
            verbose=verbose,
        )
        return result.solution, f, {"kind": "poisson", **result.to_dict()}

    S = domain.radius**2
    mesh = np.linspace(0.0, S, RADIAL_MESH)
    result = solve_radial(
        n, radial_density(instance, n, mesh), radial_boundary_value(instance, domain.radius), mesh
    )
    center = domain.center

    def u(points):
        q = np.asarray(points) - center
        return np.interp(np.sum(q * q, axis=-1), result.mesh, result.phi)

    solution = GridFn.from_callable(u, grid)
    runtime = time.perf_counter() - start
    return solution, f, {"kind": "radial", **result.to_dict(), "runtime": runtime}


def _run(bundle, config, verbose):
    out = bundle.out
    tol = config["tolerances"]
    instance = config["instance"]
    n = int(instance["n"])

    bundle.current_stage = "budget"
    b = config["budget"]
    holder = budget(b["alpha"], b["p"], n, b["gamma"], b["gamma_prime"], b["gamma_dblprime"])
    bundle.stages["budget"] = holder.to_dict()

    bundle.current_stage = "solve"
    if verbose:
        print(f"[bold]solve[/bold] n = {n}, resolution {instance['resolution']}")
    u, f, report = solve_instance(config, verbose)
    csv_path, header = write_gridfn(u, out / "solution.csv", extra={"report": report})
    bundle.files.update(solution=csv_path, solution_header=header)
    bundle.stages["solve"] = report

    bundle.current_stage = "mollify"
    kernels = config["kernel"]
    mollify_cfg = config["mollify"]
    kernel = make_kernel(kernels["gap_kind"], n=n, plateau=kernels["plateau"])
    eps_list = mollify_cfg["eps"]
    if verbose:
        print(f"[bold]mollify[/bold] {kernel.kind} kernel at eps {eps_list}")
    table = subharmonic_gap(u, kernel, eps_list)
    bundle.files["gap_table"] = write_csv(table.frame, out / "gap_table.csv")

    eps = max(eps_list)
    K = mollify_cfg["kiselman_K"]
    kiselman = kiselman_transform(
        u, kernel, eps, c=eps**holder.alpha_prime, K=K, t_grid_size=mollify_cfg["kiselman_grid"]
    )
    sandwich = kiselman.sandwich_violation(u)
    monotone = monotonicity_check(u, kernel, K=K, eps_list=eps_list)
    bundle.stages["gap"] = {
        "eps": table.frame["eps"].tolist(),
        "sup_gaps": table.frame["sup_gap"].tolist(),
        "l1_gaps": table.frame["l1_gap"].tolist(),
        "sup_slope": table.sup_slope,
        "l1_slope": table.l1_slope,
        "subharmonic": table.subharmonic,
    }
    bundle.stages["kiselman"] = {**kiselman.to_dict(), "sandwich": sandwich}
    bundle.stages["monotonicity"] = {"worst": monotone.worst_violation}
    bundle.warnings.extend(table.warnings)

    sup_target = holder.alpha_prime - tol["exponent"]
    negligible = bool(table.frame["sup_gap"].max() <= GAP_FLOOR)
    bundle.check(
        "gap.sup_slope", table.sup_slope, sup_target, negligible or table.sup_slope >= sup_target
    )
    l1_target = 1 + holder.beta - tol["l1_slope"]
    bundle.check("gap.l1_slope", table.l1_slope, l1_target, table.l1_slope >= l1_target)
    bundle.check("kiselman.sandwich", sandwich, tol["sandwich"], sandwich <= tol["sandwich"])

    bundle.current_stage = "modulus"
    m = config["modulus"]
    curve = modulus(
        u,
        m["eps0"],
        m["s_max"],
        exhaustive_limit=m["exhaustive_limit"],
        pair_samples=m["pair_samples"],
        seed=config.seed,
        verbose=verbose,
    )
    bundle.files["modulus"] = write_csv(curve.to_frame(), out / "modulus.csv")
    bundle.stages["modulus"] = curve.to_dict()
    target = holder.alpha_prime - tol["exponent"]
    bundle.check("modulus.alpha_hat", curve.alpha_hat, target, curve.alpha_hat >= target)

    bundle.current_stage = "lemma21"
    lemma_kernel = make_kernel(kernels["lemma_kind"], n=n, plateau=kernels["plateau"])
    certificate = verify_lemma21(
        u,
        lemma_kernel,
        holder.alpha_prime,
        m["eps0"],
        s_max=m["s_max"],
        conclusion_factor=tol["conclusion_factor"],
        exhaustive_limit=m["exhaustive_limit"],
        pair_samples=m["pair_samples"],
        seed=config.seed,
    )
    bundle.stages["lemma21"] = certificate.to_dict()
    bundle.check("lemma21.passed", float(certificate.passed), 1.0, certificate.passed)

    bundle.current_stage = "linfty"
    p = holder.p
    delta = 0.5 * (p - 1) / (n * p)
    check = linfty_check(u, boundary_on_grid(instance, u.grid), f, p, delta)
    bundle.stages["linfty"] = {"delta": delta, **check.to_dict()}
    bundle.check("linfty.bound", check.lhs, check.bound, check.passed)
    bundle.current_stage = None


def run_pipeline(config, verbose=False):
    """
    Runs solve, regularization gaps, modulus, constant certificate and the
    L-infinity check for one experiment and writes its report bundle.

    Parameters
    ----------
    config : ExperimentConfig
    verbose : bool

    Returns
    -------
    PipelineBundle
        With ``failed_stage`` set when a stage raised; the results of earlier
        stages are kept and written.
    """
    out = check_path_exists(config.out, create=True)
    bundle = PipelineBundle(name=config.name, out=out)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            _run(bundle, config, verbose)
        except (HolderLabError, np.linalg.LinAlgError) as e:
            bundle.failed_stage = bundle.current_stage
            bundle.error = str(e)
            bundle.error_kind = type(e).__name__
            if verbose:
                print(f"[red]stage {bundle.failed_stage} failed:[/red] {e}")
    bundle.warnings.extend(sorted({str(w.message) for w in caught}))

    write_json(bundle.stages, out / "certificates.json")
    write_json(bundle.to_dict(), out / "report.json")
    write_json(bundle.traceability(), out / "traceability.json")
    (out / "summary.txt").write_text(bundle.summary())
    bundle.files.update(
        certificates=out / "certificates.json",
        report=out / "report.json",
        traceability=out / "traceability.json",
        summary=out / "summary.txt",
    )
    return bundle
