"""General utils."""

import contextlib
import inspect
import json
import logging
import logging.config
import os
import random
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

FILE = Path(__file__).resolve()
ROOT = FILE.parents[2]  # repository root

# Settings
NUM_THREADS = min(8, max(1, (os.cpu_count() or 1) - 1))  # number of worker threads for --jobs auto
VERBOSE = str(os.getenv("QWEYL_VERBOSE", True)).lower() == "true"  # global verbose mode
TQDM_BAR_FORMAT = "{l_bar}{bar:10}{r_bar}"  # tqdm bar format
GROUPS_DIR = ROOT / "data" / "groups"
CONFIGS_DIR = ROOT / "configs"

LOGGING_NAME = "qweyl"


def set_logging(name=LOGGING_NAME, verbose=True, debug=False):
    """Routes the package logger to stderr so reports on stdout stay machine-readable."""
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.ERROR
    handler = {"class": "logging.StreamHandler", "formatter": name, "level": level, "stream": "ext://sys.stderr"}
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {name: {"format": "%(message)s"}},
            "handlers": {name: handler},
            "loggers": {name: {"level": level, "handlers": [name], "propagate": False}},
        }
    )


set_logging(LOGGING_NAME, VERBOSE, os.getenv("QWEYL_DEBUG") == "1")  # before LOGGER
LOGGER = logging.getLogger(LOGGING_NAME)


class Profile(contextlib.ContextDecorator):
    """Accumulating wall-clock timer; `dt` is the last interval, `t` the running total in seconds."""

    def __init__(self, t=0.0, name: str = ""):
        self.t, self.name = t, name

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, type, value, traceback):
        self.dt = time.perf_counter() - self.start
        self.t += self.dt
        if self.name:
            LOGGER.debug(f"{self.name}: {self.dt:.3f}s")


def print_args(args: Optional[dict] = None, show_file=True, show_func=False):
    """Logs `args` (or the caller's arguments) as one `key=value` line prefixed by the calling module."""
    frame = inspect.currentframe().f_back
    file, _, func, _, _ = inspect.getframeinfo(frame)
    if args is None:
        names, _, _, values = inspect.getargvalues(frame)
        args = {k: values[k] for k in names}
    prefix = (f"{Path(file).stem}: " if show_file else "") + (f"{func}: " if show_func else "")
    LOGGER.info(colorstr(prefix) + ", ".join(f"{k}={v}" for k, v in sorted(args.items()) if v is not None))


def init_seeds(seed=0):
    """Seeds the global python and numpy RNGs; engine code draws from explicit generators."""
    random.seed(seed)
    np.random.seed(seed)
    os.environ["PYTHONHASHSEED"] = str(seed)


def yaml_load(file):
    """Parsed contents of a YAML file."""
    with open(file, errors="ignore") as f:
        return yaml.safe_load(f)


def _json_default(obj):
    """Serializes numpy scalars, Fractions and Paths that the stdlib encoder rejects."""
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (Path, set, frozenset, tuple)):
        return str(obj) if isinstance(obj, Path) else list(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def json_dumps(data, indent=2):
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, indent=indent, sort_keys=True, default=_json_default, ensure_ascii=False) + "\n"


def colorstr(*input):
    """ANSI-colored text, e.g. colorstr('green', 'passed'); defaults to bold blue."""
    *args, string = input if len(input) > 1 else ("blue", "bold", input[0])
    codes = {"red": 31, "green": 32, "yellow": 33, "blue": 34, "magenta": 35, "cyan": 36, "bold": 1, "underline": 4}
    return "".join(f"\033[{codes[x]}m" for x in args) + f"{string}\033[0m"
