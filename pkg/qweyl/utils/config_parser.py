"""Create argparse options for config files."""

import argparse
import json

from easydict import EasyDict as edict

from qweyl.utils.general import CONFIGS_DIR


def load_config_object(cfg_path: str) -> edict:
    """Loads a config json and returns a edict object."""
    with open(cfg_path, "r", encoding="utf-8") as json_file:
        cfg_dict = json.load(json_file)

    return edict(cfg_dict)


def merge_overrides(cfg: edict, overrides: dict) -> edict:
    """Returns a copy of `cfg` with every non-None entry of `overrides` applied on top."""
    merged = edict(dict(cfg))
    for k, v in overrides.items():
        if v is not None:
            merged[k] = v
    return merged


def get_argparser(desc="Exact quantum affine Weyl group engine") -> argparse.ArgumentParser:
    """Get parser with the default config argument."""
    parser = argparse.ArgumentParser(description=desc)
    parser.add_argument(
        "--cfg",
        "--config",
        type=str,
        dest="config",
        default=str(CONFIGS_DIR / "base.json"),
        help="Path to JSON run config (default: %(default)s)",
    )
    return parser
