import json
from pathlib import Path

import numpy as np

from .errors import DegenerateFitError


def check_file(file_path):
    file_path = Path(file_path)
    if not (file_path.exists() and file_path.is_file()):
        raise FileNotFoundError(f"Couldn't open file {file_path}")
    return file_path


def check_path_exists(path, create=False):
    path = Path(path)
    if not path.is_absolute():
        path = path.resolve()
    if path.is_dir():
        return path
    if create:
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError:
            raise OSError(f"Couldn't create path {path}")
        return path
    raise FileNotFoundError(f"Couldn't reach path {path}")


def dyadic_radii(eps0, depth):
    """
    Returns the radii eps0 / 2**k for k = 0..depth.
    """
    return eps0 / 2.0 ** np.arange(depth + 1)


def loglog_fit(x, y):
    """
    Least-squares line through (log x, log y).

    Parameters
    ----------
    x, y : array_like
        Positive abscissae and ordinates, at least two of each.

    Returns
    -------
    slope : float
    intercept : float
        Natural-log intercept, so ``y ~ exp(intercept) * x**slope``.
    residual : float
        Root mean square of the log residuals.

    Raises
    ------
    DegenerateFitError
        Fewer than two points or a non-positive value.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise DegenerateFitError("A log-log fit needs at least two paired points")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise DegenerateFitError("A log-log fit needs strictly positive finite values")

    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(intercept), residual


def to_jsonable(obj):
    """Turns numpy scalars, arrays, complex numbers and paths into JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return to_jsonable(float(obj))
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None if np.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def write_json(data, file_path):
    with open(file_path, "w") as fp:
        json.dump(to_jsonable(data), fp, indent=2, sort_keys=True)
    return Path(file_path)


def read_json(file_path):
    with open(check_file(file_path)) as fp:
        return json.load(fp)


def complex_array(value):
    """Parses ``[re, im]`` pairs (or plain reals) into a complex numpy array."""
    if np.iscomplexobj(value):
        return np.asarray(value, dtype=complex)
    arr = np.asarray(value, dtype=float)
    if arr.ndim >= 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)
