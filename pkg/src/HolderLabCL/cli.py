from contextlib import contextmanager
from pathlib import Path

import typer
from rich import print, print_json
from rich.table import Table
from typing_extensions import Annotated

from .barriers.barrier import TaylorData, build_barrier
from .barriers.budget import achievable_alpha_prime, budget as holder_budget
from .domain.io import read_gridfn, write_csv, write_gridfn
from .holder.certificate import verify_lemma21 as certify_constants
from .holder.modulus import modulus
from .mollify.kernels import kernel_from_dict, make_kernel
from .mollify.mollifier import subharmonic_gap
from .pipeline.runner import run_pipeline, solve_instance
from .utils.config import ExperimentConfig
from .utils.errors import (
    BarrierConstructionError,
    ConfigurationError,
    HolderLabError,
    ParameterError,
)
from .utils.utils import check_path_exists, read_json, to_jsonable, write_json

USAGE_ERRORS = (ConfigurationError, ParameterError, FileNotFoundError)

app = typer.Typer(
    name="HolderLabCL",
    help="Numerical laboratory for Holder regularity of the complex Monge-Ampere Dirichlet problem",
    pretty_exceptions_enable=False,
)

ConfigOption = Annotated[
    Path,
    typer.Option(
        "--config",
        "-c",
        exists=True,
        dir_okay=False,
        file_okay=True,
        resolve_path=True,
        help="Experiment file with [sections] of key = value pairs. Missing keys take the package defaults.",
    ),
]
OutOption = Annotated[
    Path,
    typer.Option(
        "--out",
        "-o",
        file_okay=False,
        resolve_path=True,
        help="Folder in which to leave the results. Overrides [experiment] out.",
    ),
]
SeedOption = Annotated[
    int, typer.Option("--seed", help="Seed for sampled scans. Overrides [experiment] seed.")
]
VerboseOption = Annotated[
    bool, typer.Option("--verbose", "-v", help="Verbosity of the execution.")
]
SolutionArgument = Annotated[
    Path,
    typer.Argument(
        exists=True,
        dir_okay=False,
        file_okay=True,
        resolve_path=True,
        help="Solution .csv or .parquet written by the solve command, with its .json header next to it.",
    ),
]


@contextmanager
def exit_on_error():
    """Maps library errors to exit codes: 2 for usage errors, 1 for everything else."""
    try:
        yield
    except USAGE_ERRORS as e:
        print(f"[red]{type(e).__name__}:[/red] {e}")
        raise typer.Exit(code=2)
    except HolderLabError as e:
        print(f"[red]{type(e).__name__}:[/red] {e}")
        raise typer.Exit(code=1)


def load_config(config, out, seed):
    experiment = ExperimentConfig.from_file(config, out=out, seed=seed)
    check_path_exists(experiment.out, create=True)
    return experiment


def parse_eps(eps):
    try:
        values = [float(item) for item in eps.split(",") if item.strip()]
    except ValueError:
        raise ConfigurationError(f"Couldn't parse the eps list {eps!r}")
    if not values or min(values) <= 0:
        raise ConfigurationError(f"eps must be a list of positive numbers, got {eps!r}")
    return values


@app.command()
def solve(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    table_format: Annotated[
        str, typer.Option("--format", help="Table format of the solution, csv or parquet.")
    ] = "csv",
    verbose: VerboseOption = False,
):
    """
    Solve the configured Dirichlet problem and write solution.csv (or .parquet) with its JSON header.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
        if table_format not in ("csv", "parquet"):
            raise ConfigurationError(f"Unknown table format {table_format!r}, use csv or parquet")
        u, _, report = solve_instance(experiment, verbose=verbose)
        csv_path, _ = write_gridfn(
            u, experiment.out / f"solution.{table_format}", extra={"report": report}
        )
    print(
        f"Solved with the {report['kind']} solver, residual {report['residual']:.3e} "
        f"in {report['runtime']:.2f}s"
    )
    print(f"Solution written to {csv_path}")


@app.command()
def mollify(
    solution: SolutionArgument,
    kernel: Annotated[
        Path,
        typer.Option(
            "--kernel",
            "-k",
            exists=True,
            dir_okay=False,
            resolve_path=True,
            help="Kernel .json with kind, n and plateau. Defaults to [kernel] gap_kind.",
        ),
    ] = None,
    eps: str = typer.Option(
        None, "--eps", "-e", help="Comma separated scales. Defaults to [mollify] eps."
    ),
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """
    Regularize a solution over a ladder of scales and write the gap table.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
        u = read_gridfn(solution)
        if kernel is not None:
            eta = kernel_from_dict({"n": u.n, **read_json(kernel)})
        else:
            k = experiment["kernel"]
            eta = make_kernel(k["gap_kind"], n=u.n, plateau=k["plateau"])
        eps_list = parse_eps(eps) if eps is not None else experiment["mollify"]["eps"]
        if verbose:
            print(f"Mollifying with the {eta.kind} kernel at eps {eps_list}")
        table = subharmonic_gap(u, eta, eps_list)
        path = write_csv(table.frame, experiment.out / "gap_table.csv")
    print(f"sup gap slope {table.sup_slope:.4f}, L1 gap slope {table.l1_slope:.4f}")
    print(f"Gap table written to {path}")


@app.command()
def estimate_exponent(
    solution: SolutionArgument,
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """
    Measure the modulus of continuity on dyadic radii and fit its Holder exponent.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
        u = read_gridfn(solution)
        m = experiment["modulus"]
        curve = modulus(
            u,
            m["eps0"],
            m["s_max"],
            exhaustive_limit=m["exhaustive_limit"],
            pair_samples=m["pair_samples"],
            seed=experiment.seed,
            verbose=verbose,
        )
        write_csv(curve.to_frame(), experiment.out / "modulus.csv")
        write_json(curve.to_dict(), experiment.out / "exponent.json")
    if curve.degenerate:
        print("[red]The modulus curve admits no exponent fit[/red]")
        raise typer.Exit(code=1)
    print(f"alpha_hat = {curve.alpha_hat:.4f}, C_hat = {curve.C_hat:.4g} ({curve.mode})")


@app.command()
def verify_lemma21(
    solution: SolutionArgument,
    alpha: float = typer.Option(
        None, "--alpha", "-a", help="Target exponent. Defaults to alpha' of the budget."
    ),
    kernel: Annotated[
        Path,
        typer.Option(
            "--kernel",
            "-k",
            exists=True,
            dir_okay=False,
            resolve_path=True,
            help="Kernel .json, plain or dilated, as written by Kernel.to_dict. Defaults to [kernel] lemma_kind.",
        ),
    ] = None,
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """
    Assemble the global Holder constant from the boundary and regularization
    constants and check it against the measured modulus.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
        u = read_gridfn(solution)
        if alpha is None:
            b = experiment["budget"]
            alpha = holder_budget(
                b["alpha"], b["p"], u.n, b["gamma"], b["gamma_prime"], b["gamma_dblprime"]
            ).alpha_prime
        k, m = experiment["kernel"], experiment["modulus"]
        if kernel is not None:
            eta = kernel_from_dict({"n": u.n, **read_json(kernel)})
        else:
            eta = make_kernel(k["lemma_kind"], n=u.n, plateau=k["plateau"])
        if eta.n != u.n:
            raise ConfigurationError(
                f"Kernel of dimension {eta.n} given for a solution in C^{u.n}"
            )
        certificate = certify_constants(
            u,
            eta,
            alpha,
            m["eps0"],
            s_max=m["s_max"],
            conclusion_factor=experiment["tolerances"]["conclusion_factor"],
            exhaustive_limit=m["exhaustive_limit"],
            pair_samples=m["pair_samples"],
            seed=experiment.seed,
        )
        path = write_json(certificate.to_dict(), experiment.out / "lemma21.json")

    if verbose:
        table = Table(title=f"Holder constants at alpha = {alpha:.4g}")
        for name in ("C1", "C2", "kappa", "C3", "C4", "C"):
            table.add_column(name)
        table.add_row(
            *(f"{getattr(certificate, name):.4g}" for name in ("C1", "C2", "kappa", "C3", "C4", "C"))
        )
        print(table)
    print(f"Certificate written to {path}")
    if not certificate.passed:
        print("[red]The assembled constant does not bound the measured modulus[/red]")
        raise typer.Exit(code=1)


@app.command()
def budget(
    alpha: float = typer.Option(None, "--alpha", help="Holder exponent of the boundary data."),
    p: float = typer.Option(None, "--p", help="Integrability exponent of the density."),
    n: int = typer.Option(None, "--n", help="Complex dimension."),
    gamma: float = typer.Option(None, "--gamma"),
    gamma_prime: float = typer.Option(None, "--gamma-prime"),
    gamma_dblprime: float = typer.Option(None, "--gamma-dblprime"),
    as_json: bool = typer.Option(False, "--json", help="Also print the budget as JSON."),
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """
    Derive the boundary exponent beta and the global exponent alpha' from the data exponents.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
        b = experiment["budget"]
        args = {
            "alpha": b["alpha"] if alpha is None else alpha,
            "p": b["p"] if p is None else p,
            "n": experiment["instance"]["n"] if n is None else n,
            "gamma": b["gamma"] if gamma is None else gamma,
            "gamma_prime": b["gamma_prime"] if gamma_prime is None else gamma_prime,
            "gamma_dblprime": b["gamma_dblprime"] if gamma_dblprime is None else gamma_dblprime,
        }
        result = holder_budget(**args)
        supremum = achievable_alpha_prime(result.alpha, result.p, result.n)
        record = {**result.to_dict(), "achievable_alpha_prime": supremum}
        path = write_json(record, experiment.out / "budget.json")

    table = Table(title="Holder exponent budget")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name in ("p_star", "gamma0", "gamma_n", "beta", "alpha_prime"):
        table.add_row(name, f"{getattr(result, name):.6g}")
    table.add_row("achievable alpha'", f"{supremum:.6g}")
    table.add_row("regime", result.regime)
    print(table)
    if as_json:
        print_json(data=to_jsonable(record))
    if verbose:
        print(f"Budget written to {path}")


@app.command()
def barrier(
    taylor: Annotated[
        Path,
        typer.Argument(
            exists=True,
            dir_okay=False,
            file_okay=True,
            resolve_path=True,
            help="Taylor data .json with a, b, c as [re, im] pairs and r0.",
        ),
    ],
    samples: int = typer.Option(10_000, "--samples", help="Verification sample size."),
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """
    Build the local barrier rho >= |z|^2 at a strictly pseudoconvex boundary point.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
        data = TaylorData.from_dict(read_json(taylor))
        try:
            _, certificate = build_barrier(data, seed=experiment.seed, n_samples=samples)
        except BarrierConstructionError as e:
            write_json(
                {"passed": False, "error": str(e), "diagnostic": e.diagnostic},
                experiment.out / "barrier.json",
            )
            raise
        path = write_json(certificate.to_dict(), experiment.out / "barrier.json")
    print(
        f"C_bar = {certificate.C_bar:g}, r0 = {certificate.r0:g}, margin {certificate.margin:.3e}"
    )
    if verbose:
        print(f"Certificate written to {path}")


@app.command()
def pipeline(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """
    Run solve, mollification gaps, modulus, constant certificate and budget
    comparison for one experiment, and write the report bundle.
    """
    with exit_on_error():
        experiment = load_config(config, out, seed)
    bundle = run_pipeline(experiment, verbose=verbose)

    table = Table(title=f"Experiment {bundle.name}")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("threshold", justify="right")
    table.add_column("verdict")
    for c in bundle.checks:
        verdict = "[green]ok[/green]" if c["passed"] else "[red]violated[/red]"
        table.add_row(c["name"], f"{c['value']:.6g}", f"{c['threshold']:.6g}", verdict)
    print(table)

    if bundle.failed_stage is not None:
        print(f"[red]Stage {bundle.failed_stage} failed:[/red] {bundle.error}")
        usage = bundle.error_kind in {cls.__name__ for cls in USAGE_ERRORS}
        raise typer.Exit(code=2 if usage else 1)
    if not bundle.passed:
        raise typer.Exit(code=1)
    print(f"Report written to {bundle.out}")


if __name__ == "__main__":
    app()
