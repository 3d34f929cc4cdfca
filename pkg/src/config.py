# Run configuration: defaults, flag parsing, environment

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import regex

from errors import UsageError

DEFAULT_ELLS = (1, 2)
DEFAULT_T_GRID = (0.0, 10.0, 0.1)
DEFAULT_SEED = 20240607
DEFAULT_CASES = None          # None keeps each suite's own case count
DEFAULT_FIT_TOL = 1e-6
DEFAULT_RADIUS = 1.0
OUT_DIR = "out"
LOG_DIR = "logs"
LOG_FILE = "pipeline_log.txt"

MODES = ("known-c", "self-consistent")

_ELL_LIST = regex.compile(r"^\s*[+-]?\d+(?:\s*,\s*[+-]?\d+)*\s*$")
_NUMBER = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_T_GRID = regex.compile(rf"^\s*(?P<start>{_NUMBER})\s*:\s*(?P<stop>{_NUMBER})\s*:\s*(?P<step>{_NUMBER})\s*$")


def parse_ells(text: str) -> tuple:
    """'1,2,5' -> (1, 2, 5); every index must be >= 1."""
    if not _ELL_LIST.match(text):
        raise UsageError(f"--ell expects a comma-separated list of integers, got {text!r}")
    ells = tuple(int(tok) for tok in regex.split(r"\s*,\s*", text.strip()))
    if any(ell < 1 for ell in ells):
        raise UsageError(f"mode indices must be >= 1, got {text!r}")
    return ells


def parse_t_grid(text: str) -> tuple:
    """'start:stop:step' -> (start, stop, step) with stop > start and step > 0."""
    m = _T_GRID.match(text)
    if not m:
        raise UsageError(f"--t-grid expects start:stop:step, got {text!r}")
    start, stop, step = (float(m.group(k)) for k in ("start", "stop", "step"))
    if step <= 0.0 or stop <= start:
        raise UsageError(f"time grid must be strictly increasing, got {text!r}")
    if start < 0.0:
        raise UsageError("time grid must start at t >= 0")
    return start, stop, step


def make_time_grid(grid: tuple) -> np.ndarray:
    """Grid points start + k·step up to stop (inclusive within rounding)."""
    start, stop, step = grid
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def thread_count() -> int:
    """EBM_THREADS caps the worker pool; unset means one worker per CPU."""
    raw = os.environ.get("EBM_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1
    if not regex.fullmatch(r"\d+", raw) or int(raw) < 1:
        raise UsageError(f"EBM_THREADS must be a positive integer, got {raw!r}")
    return int(raw)


@dataclass(frozen=True)
class RunConfig:
    command: str
    model_path: Optional[str] = None
    cluster_paths: tuple = ()
    out_dir: str = OUT_DIR
    ells: tuple = DEFAULT_ELLS
    t_grid: tuple = DEFAULT_T_GRID
    mode: str = "known-c"
    seed: int = DEFAULT_SEED
    cases: Optional[int] = DEFAULT_CASES
    only: tuple = ()
    tol: float = DEFAULT_FIT_TOL
    radius: float = DEFAULT_RADIUS
    threads: int = field(default_factory=thread_count)

    def __post_init__(self):
        if any(ell < 1 for ell in self.ells):
            raise UsageError("mode indices must be >= 1")
        start, stop, step = self.t_grid
        if step <= 0.0 or stop <= start:
            raise UsageError("time grid must be strictly increasing")
        if self.mode not in MODES:
            raise UsageError(f"--mode must be one of {MODES}")
        if self.cases is not None and self.cases < 1:
            raise UsageError("--cases must be positive")
        if self.tol <= 0.0 or self.radius <= 0.0:
            raise UsageError("--tol and --radius must be positive")
        inputs = {os.path.abspath(p) for p in (self.model_path, *self.cluster_paths) if p}
        if len(inputs) < len([p for p in (self.model_path, *self.cluster_paths) if p]):
            raise UsageError("input paths must be distinct")
        for name in self.output_names():
            if os.path.abspath(os.path.join(self.out_dir, name)) in inputs:
                raise UsageError(f"output {name} would overwrite an input file")

    def output_names(self) -> list[str]:
        if self.command == "forward":
            return [f"cluster_ell{ell}.json" for ell in self.ells] + ["modes.csv", "kernel.csv"]
        if self.command == "kernel":
            return ["kernel.csv"]
        if self.command == "invert":
            return ["inversion.json"]
        return ["verify_report.txt"]

    def out_path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)
