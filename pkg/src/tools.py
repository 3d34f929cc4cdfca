# Define tools: file readers and writers used by the pipeline stages

import os
import json
import logging

import numpy as np

from errors import InputError, InvalidModel
from inversion import ClusterData, InversionResult
from model import EBMModel, validate
from relaxation import RelaxationSpectrum, eval_kernel
from spectrum import ClusterSpectrum

logger = logging.getLogger(__name__)


def format_number(x) -> str:
    """17 significant digits, enough to read any double back exactly."""
    return format(float(x), ".17g")


def _plain(obj):
    # numpy containers and scalars -> json-native values
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(payload: dict, path: str):
    """Writes payload as JSON; floats use the shortest repr that reads back bit-exact."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_plain(payload), f, indent=2)
        f.write("\n")


def read_json(path: str) -> dict:
    if not os.path.exists(path):
        raise InputError(f"file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: malformed JSON ({e})") from e


# --- model ---

def read_model(path: str) -> EBMModel:
    """Reads a model JSON file.

    Args:
        path (str): file with keys n, R and elements[{lambda, mu, eta}].

    Returns:
        EBMModel: the model, not yet validated.
    """
    data = read_json(path)
    try:
        model = EBMModel.from_dict(data)
        n = int(data["n"])
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{path}: malformed model ({e!r})") from e
    if n != model.n:
        raise InputError(f"{path}: n={n} but {len(model.elements)} elements given")
    return model


def write_model(model: EBMModel, path: str):
    write_json(model.to_dict(), path)


def check_model(model: EBMModel) -> EBMModel:
    """Returns the model unchanged, or raises InvalidModel listing every violation."""
    violations = validate(model)
    if violations:
        raise InvalidModel(violations)
    return model


# --- clusters ---

def cluster_to_dict(cs: ClusterSpectrum) -> dict:
    return {
        "ell": cs.ell,
        "c": cs.c,
        "real_roots": [float(a) for a in cs.real_roots],
        "extra_roots": [[z.real, z.imag] for z in cs.extra_roots],
        "poly": [float(a) for a in cs.poly.coeffs],
    }


def write_cluster(cs: ClusterSpectrum, path: str):
    write_json(cluster_to_dict(cs), path)


def read_cluster(path: str) -> ClusterData:
    """Reads a cluster JSON file into the root list used by the inversion."""
    data = read_json(path)
    try:
        roots = [complex(float(a), 0.0) for a in data["real_roots"]]
        roots += [complex(float(re), float(im)) for re, im in data["extra_roots"]]
        c = data.get("c")
        ell = data.get("ell")
        return ClusterData(roots=tuple(roots),
                           c=None if c is None else float(c),
                           ell=None if ell is None else int(ell))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{path}: malformed cluster ({e!r})") from e


# --- tables ---

def write_kernel_table(spectrum: RelaxationSpectrum, times, path: str):
    """Kernel table t, g00, g00_bulk, gV, gS over the given times."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("t,g00,g00_bulk,gV,gS\n")
        for t in times:
            k = eval_kernel(spectrum, float(t))
            f.write(",".join(format_number(v) for v in (t, *k)) + "\n")


def write_mode_table(modes, path: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("ell,r,k_b\n")
        for m in modes:
            f.write(f"{m.ell},{format_number(m.r)},{format_number(m.k_b)}\n")


def read_table(path: str) -> tuple[list[str], np.ndarray]:
    """Header and numeric rows of a CSV table written by this module."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        rows = [[float(v) for v in line.strip().split(",")] for line in f if line.strip()]
    return header, np.array(rows)


# --- inversion ---

def inversion_to_dict(result: InversionResult) -> dict:
    return {
        "n": result.n,
        "D": result.D,
        "beta": result.beta,
        "alpha": result.alpha,
        "mu0": result.mu0,
        "lambda0": result.lam0,
        "shear": {"rates": result.shear_rates, "weights": result.shear_weights},
        "bulk": {"rates": result.bulk_rates, "weights": result.bulk_weights},
        "multipliers": {str(k): v for k, v in result.multipliers.items()},
        "fit_residual": result.fit_residual,
        "diagnostics": result.diagnostics,
    }


def write_inversion(result: InversionResult, path: str):
    write_json(inversion_to_dict(result), path)
