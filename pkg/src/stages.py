# Stage class: wraps a tool so the pipeline workers get a dict back instead of an exception

import logging
from typing import Callable

from ball_modes import solve_mode
from errors import EBMError
from inversion import invert_known_c, self_consistent_invert
from relaxation import compute_spectrum
from spectrum import build_prony, cluster_roots
from tools import check_model, read_cluster, read_model

logger = logging.getLogger(__name__)


class Stage:
    def __init__(self, name: str, instruction: str, tool: Callable, output_key: str):
        self.name = name
        self.instruction = instruction
        self.tool = tool
        self.output_key = output_key

    def run(self, *args, **kw) -> dict:
        try:
            logger.debug("%s: %s", self.name, self.tool.__name__)
            return {self.output_key: self.tool(*args, **kw)}
        except EBMError as e:
            logger.debug("%s failed: %s", self.name, e.to_json())
            return {"error": e}


# --- tools composed for the stages ---

def load_model(path: str):
    return check_model(read_model(path))


def prepare_prony(model):
    """Relaxation spectrum and the Prony pair of a valid model."""
    spectrum = compute_spectrum(model)
    return spectrum, build_prony(model, spectrum)


def generate_cluster(pair, mode):
    return cluster_roots(pair, mode)


def solve_model_mode(model, ell: int):
    e0 = model.maxwell
    return solve_mode(e0.lam, e0.mu, model.R, ell)


def invert_files(path1: str, path2: str, mode: str = "known-c", radius: float = 1.0):
    c1, c2 = read_cluster(path1), read_cluster(path2)
    if mode == "known-c":
        return invert_known_c(c1, c2)
    return self_consistent_invert(c1, c2, c1.ell, c2.ell, radius)


# Initialize the stages
read_model_stage = Stage(
    name="read_model_stage",
    instruction="Read a model JSON file and validate every element.",
    tool=load_model,
    output_key="model",
)

spectrum_stage = Stage(
    name="spectrum_stage",
    instruction="Diagonalize the shear and bulk mode matrices and interleave the Prony pair.",
    tool=prepare_prony,
    output_key="spectrum",
)

mode_stage = Stage(
    name="mode_stage",
    instruction="Solve the traction-free boundary equation for one radial mode index.",
    tool=solve_model_mode,
    output_key="mode",
)

cluster_stage = Stage(
    name="cluster_stage",
    instruction="Find every root of the cluster polynomial of one mode.",
    tool=generate_cluster,
    output_key="cluster",
)

invert_stage = Stage(
    name="invert_stage",
    instruction="Recover the Prony pair, moduli and weights from two cluster files.",
    tool=invert_files,
    output_key="result",
)
