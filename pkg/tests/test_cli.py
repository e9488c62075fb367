import json
import shutil

from qweyl.cli import main, pretty_report
from qweyl.fpoly import orbit_cases
from qweyl.lattice import LatticeVector, load_group
from qweyl.skew_algebra import SkewElement
from qweyl.utils.general import CONFIGS_DIR, GROUPS_DIR
from qweyl.weyl_rep import TauSection


def run(tmp_path, *args, name="report.json"):
    out = tmp_path / name
    code = main([*args, "--quiet", "--out", str(out)])
    return code, json.loads(out.read_text(encoding="utf-8"))


def test_identities(tmp_path):
    code, report = run(tmp_path, "identities", "--which", "binom", "q-factorial", "--order", "4", "--trials", "1")
    assert code == 0
    assert report["schema_version"] == 1 and report["command"] == "identities"
    assert report["passed"]


def test_deterministic_output(tmp_path):
    args = ("act", "--type", "e8", "--word", "3 2 1 0 2 4 3", "--seed", "1", "--normalize")
    main([*args, "--quiet", "--out", str(tmp_path / "a.json")])
    main([*args, "--quiet", "--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_act(tmp_path):
    code, report = run(tmp_path, "act", "--word", "3 2 1 0 2 4 3", "--seed", "1", "--normalize")
    assert code == 0
    assert report["section"]["lambda"] == {"d": [2, 1], "m": [1, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1]}


def test_usage_errors(tmp_path):
    assert main(["act", "--word", "3 x", "--quiet"]) == 2
    assert main(["act", "--type", "d5", "--word", "7", "--quiet"]) == 2
    assert main(["bilinear", "--type", "e7", "--quiet"]) == 2
    assert main(["fpoly", "--quiet"]) == 2


def test_fpoly(tmp_path):
    code, report = run(tmp_path, "fpoly", "--word", "3 2 1 0 2 4 3", "--seed", "1", "--seeds", "2")
    assert code == 0
    assert report["dimension"] == report["dimension_count"] == 1


def test_orbit(tmp_path):
    code, report = run(tmp_path, "orbit", "--type", "d5", "--depth", "2")
    assert code == 0
    assert report["size"] == len(report["classes"])


def test_verify_paper_subset(tmp_path):
    code, report = run(tmp_path, "verify-paper", "--only", "identities")
    assert code == 0
    assert list(report["suites"]) == ["identities"]


def test_broken_group_file(tmp_path):
    """A wrong Dynkin edge makes the Coxeter suite fail with exit code 1."""
    groups = tmp_path / "groups"
    shutil.copytree(GROUPS_DIR, groups)
    path = groups / "e8.yaml"
    path.write_text(path.read_text().replace("[0, 3]]", "[0, 4]]"))
    code, report = run(tmp_path, "verify-paper", "--only", "coxeter", "--groups-dir", str(groups))
    assert code == 1
    assert not report["suites"]["coxeter"]["passed"]


def test_pretty_format(tmp_path):
    out = tmp_path / "report.txt"
    args = ["identities", "--which", "q-factorial", "--order", "3", "--format", "pretty"]
    assert main([*args, "--quiet", "--out", str(out)]) == 0
    text = out.read_text()
    assert "passed: PASS" in text


def test_pretty_report():
    assert pretty_report({"b": [1, 2], "a": None, "ok": True}) == "a: -\nb:\n  [1, 2]\nok: PASS"


def test_non_conforming_seed_file(tmp_path):
    """1 + x at E11 cannot be mapped by s0; the command reports the failure instead of raising."""
    table = load_group("e8").table
    section = TauSection(SkewElement.one(table) + SkewElement.x(table), LatticeVector.E(11, 11))
    seed = tmp_path / "seed.json"
    seed.write_text(json.dumps(section.to_json()))
    code, report = run(tmp_path, "act", "--type", "e8", "--word", "0", "--seed", str(seed))
    assert code == 1
    assert report["passed"] is False
    assert report["error"].startswith("NotDivisible")
    assert report["command"] == "act" and report["schema_version"] == 1


def test_act_verify_covers_orbit(tmp_path):
    """Involution and classical checks visit the start section, every seed and every orbit image."""
    cfg = json.loads((CONFIGS_DIR / "base.json").read_text())
    cfg.update(type="d5", orbit_depth=2, orbit_sections=None)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, report = run(tmp_path, "--cfg", str(path), "act", "--word", "0", "--verify", "involution", "classical")
    assert code == 0
    d5 = load_group("d5")
    expected = 1 + d5.n_points + len(orbit_cases(d5, 2))
    assert report["checks"]["involution"]["checked"] == expected
    assert report["checks"]["classical"]["checked"] == expected


def test_orbit_sections_cap(tmp_path):
    cfg = json.loads((CONFIGS_DIR / "base.json").read_text())
    cfg.update(type="d5", orbit_depth=2, orbit_sections=3)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, report = run(tmp_path, "--cfg", str(path), "act", "--verify", "involution")
    assert code == 0
    assert report["checks"]["involution"]["checked"] == 1 + load_group("d5").n_points + 3
