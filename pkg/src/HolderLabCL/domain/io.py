"""CSV/JSON layout of grid functions.

One CSV row per grid point (``x0 .. x{2n-1}``, ``classification``, ``value``) followed
by one row per boundary crossing (``classification = crossing``). The JSON header
next to the CSV (same stem) carries ``n``, ``resolution`` and the shape descriptor.
Radial functions are written as ``s, value`` rows. A ``.parquet`` suffix stores the
same rows as a Parquet table instead of CSV.
"""

from pathlib import Path

import dask.dataframe as dd
import numpy as np
import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq

from ..utils.errors import ConfigurationError, ShapeError
from ..utils.utils import check_file, read_json, write_json
from .domain import domain_from_dict
from .grid import BOUNDARY, EXTERIOR, INTERIOR, Grid, GridFn

LABELS = {INTERIOR: "interior", BOUNDARY: "boundary", EXTERIOR: "exterior"}
FLOAT_FORMAT = "%.17g"


def header_path(csv_path):
    return Path(csv_path).with_suffix(".json")


def write_csv(frame, csv_path):
    """Writes a pandas frame as a single CSV file through dask."""
    ddf = dd.from_pandas(frame, npartitions=1)
    ddf.to_csv(str(csv_path), single_file=True, index=False, float_format=FLOAT_FORMAT)
    return Path(csv_path)


def read_csv(csv_path):
    return dd.read_csv(str(check_file(csv_path))).compute()


def write_parquet(frame, path):
    table = pa.Table.from_pandas(frame, preserve_index=False)
    pq.write_table(table, str(path))
    return Path(path)


def read_parquet(path):
    return pq.read_table(str(check_file(path))).to_pandas()


def write_table(frame, path):
    """Writes ``frame`` as Parquet or CSV depending on the suffix of ``path``."""
    if Path(path).suffix == ".parquet":
        return write_parquet(frame, path)
    return write_csv(frame, path)


def read_table(path):
    if Path(path).suffix == ".parquet":
        return read_parquet(path)
    return read_csv(path)


def gridfn_to_frame(f):
    if f.radial:
        return pd.DataFrame({"s": f.mesh, "value": f.values, "omitted": f.omitted})

    frame = f.to_dataarray().to_dataframe().reset_index()
    frame["classification"] = [LABELS[c] for c in f.grid.classification.ravel()]
    frame["omitted"] = f.omitted.ravel()
    frame = frame[f.grid.dims() + ["classification", "value", "omitted"]]

    links = f.grid.links
    if len(links):
        crossing = pd.DataFrame(links.points, columns=f.grid.dims())
        crossing["classification"] = "crossing"
        crossing["value"] = (
            np.full(len(links), np.nan) if f.boundary is None else f.boundary
        )
        crossing["omitted"] = False
        frame = pd.concat([frame, crossing], ignore_index=True)
    return frame


def write_gridfn(f, csv_path, extra=None):
    """
    Writes ``f`` to ``csv_path`` and its JSON header next to it.

    Returns
    -------
    tuple of pathlib.Path
        CSV and header paths.
    """
    csv_path = Path(csv_path)
    header = {"n": f.n, "radial": f.radial}
    if f.radial:
        header["S"] = float(f.mesh[-1])
        header["mesh_size"] = int(f.mesh.size)
    else:
        header["resolution"] = f.grid.resolution
        header["domain"] = f.grid.domain.descriptor()
    if extra:
        header.update(extra)

    write_table(gridfn_to_frame(f), csv_path)
    write_json(header, header_path(csv_path))
    return csv_path, header_path(csv_path)


def read_gridfn(csv_path, grid=None):
    """
    Reads a grid function written by ``write_gridfn``.

    Parameters
    ----------
    csv_path : pathlib.Path
    grid : Grid, optional
        Grid to reuse; rebuilt from the header otherwise.

    Returns
    -------
    GridFn
    """
    header = read_json(header_path(csv_path))
    frame = read_table(csv_path)

    if header.get("radial"):
        return GridFn.radial_fn(
            header["n"],
            frame["s"].to_numpy(),
            frame["value"].to_numpy(),
            omitted=frame["omitted"].to_numpy(dtype=bool),
        )

    if "domain" not in header or "resolution" not in header:
        raise ConfigurationError(f"Header of {csv_path} lacks the domain or resolution")
    if grid is None:
        grid = Grid(domain_from_dict(header["domain"]), header["resolution"])

    dims = grid.dims()
    is_crossing = frame["classification"] == "crossing"
    nodes = frame[~is_crossing]
    if len(nodes) != int(np.prod(grid.shape)):
        raise ShapeError(f"{csv_path} has {len(nodes)} grid rows, expected {np.prod(grid.shape)}")

    index = tuple(
        np.rint((nodes[d].to_numpy() - grid.lo[k]) / grid.h).astype(np.int64)
        for k, d in enumerate(dims)
    )
    values = np.full(grid.shape, np.nan)
    values[index] = nodes["value"].to_numpy()
    omitted = np.zeros(grid.shape, dtype=bool)
    omitted[index] = nodes["omitted"].to_numpy(dtype=bool)

    boundary = frame.loc[is_crossing, "value"].to_numpy(dtype=float)
    if boundary.size != len(grid.links):
        boundary = None
    return GridFn(values, grid=grid, boundary=boundary, omitted=omitted)
