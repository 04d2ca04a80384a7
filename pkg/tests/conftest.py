import numpy as np
import pytest

from HolderLabCL.domain.domain import Ball
from HolderLabCL.domain.grid import Grid, GridFn


@pytest.fixture(scope="session")
def disk():
    return Ball(n=1, radius=1.0)


@pytest.fixture(scope="session")
def grid32(disk):
    return Grid(disk, 32)


@pytest.fixture(scope="session")
def grid64(disk):
    return Grid(disk, 64)


@pytest.fixture(scope="session")
def grid128(disk):
    return Grid(disk, 128)


@pytest.fixture(scope="session")
def grid256(disk):
    return Grid(disk, 256)


@pytest.fixture
def sample():
    """Samples a vectorized function of points on the closure of a grid."""

    def _sample(func, grid):
        return GridFn.from_callable(func, grid)

    return _sample


@pytest.fixture
def write_config(tmp_path):
    """Writes an experiment file from ``{section: {key: value}}`` and returns its path."""

    def _write(sections, name="experiment.ini"):
        lines = []
        for section, entries in sections.items():
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {value}" for key, value in entries.items())
            lines.append("")
        path = tmp_path / name
        path.write_text("\n".join(lines))
        return path

    return _write
