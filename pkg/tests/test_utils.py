import json
from fractions import Fraction

import pytest
from easydict import EasyDict as edict

from qweyl import GenericityError
from qweyl.utils import TryExcept
from qweyl.utils.config_parser import load_config_object, merge_overrides
from qweyl.utils.general import CONFIGS_DIR, json_dumps
from qweyl.utils.linalg import nullspace, rank
from qweyl.utils.sampler import SpecializationSampler


def test_nullspace():
    rows = [[Fraction(1), Fraction(2), Fraction(3)], [Fraction(2), Fraction(4), Fraction(6)]]
    basis = nullspace(rows, 3)
    assert len(basis) == 2
    for v in basis:
        assert sum(a * b for a, b in zip(rows[0], v)) == 0
    assert rank(rows) == 1
    assert rank(rows + basis) == 3


def test_nullspace_without_rows():
    assert nullspace([], 2) == [[1, 0], [0, 1]]


def test_sampler_is_seeded():
    names = ["q", "h1", "h2", "e1"]
    a = SpecializationSampler(7).draw(names)
    assert a == SpecializationSampler(7).draw(names)
    assert len(set(a.values())) == len(names)
    assert all(v != 1 and v > 0 for v in a.values())


def test_sampler_hooks():
    sampler = SpecializationSampler(0)
    values = sampler.draw(["a", "b", "c"], derived={"c": lambda v: v["a"] * v["b"]}, fixed={"b": 3})
    assert values["b"] == 3 and values["c"] == values["a"] * 3
    with pytest.raises(GenericityError):
        sampler.draw(["a"], guard=lambda v: False)


def test_try_except_collects():
    errors = []
    with TryExcept("check", errors):
        raise ValueError("boom")
    assert errors == ["check: ValueError: boom"]


def test_config():
    cfg = load_config_object(str(CONFIGS_DIR / "base.json"))
    assert cfg.type == "e8"
    merged = merge_overrides(cfg, {"type": "d5", "jobs": None})
    assert merged.type == "d5" and merged.jobs == cfg.jobs
    assert cfg.type == "e8"
    assert isinstance(merged, edict)


def test_json_dumps():
    text = json_dumps({"b": Fraction(1, 3), "a": 1})
    assert text.endswith("\n")
    assert list(json.loads(text)) == ["a", "b"]
    assert json.loads(text)["b"] == "1/3"
