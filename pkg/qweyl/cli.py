"""
Command-line entry point for the engine and its verification suites.

Usage:
    $ qweyl act --type e8 --word "3 2 1 0 2 4 3" --seed 1
    $ qweyl fpoly --type e8 --lambda "(2,1;1,0,0,0,0,0,1,0,1,1,1)" --mode both
    $ qweyl curve --type e7 --verify all --emit pretty
    $ qweyl bilinear --transport-words 50 --max-len 4
    $ qweyl identities --which dilog --order 8 --trials 3
    $ qweyl orbit --type d5 --depth 3
    $ qweyl verify-paper --only identities bilinear

Reports are JSON (sorted keys, schema version, seeds recorded); --format pretty renders the same JSON as text.
Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

import argparse
import json
import sys
from fractions import Fraction
from multiprocessing.pool import ThreadPool
from pathlib import Path
from typing import Callable, Dict, List, Optional

from easydict import EasyDict as edict
from tqdm import tqdm

from qweyl import QWeylError, StructuralError
from qweyl.curves import (
    CurveSpec,
    build_explicit_curve,
    verify_classical_curve,
    verify_constraint_reduction,
    verify_curve_conditions,
    verify_curve_invariance,
    verify_curve_space,
    verify_hinv,
    verify_lambda_fixed,
)
from qweyl.fpoly import (
    construct_via_weyl,
    fpoly_report,
    orbit_cases,
    verify_nonlog_consistency,
    verify_oracle_equivalence,
    verify_well_definedness,
)
from qweyl.lattice import (
    GROUP_TYPES,
    GroupSpec,
    LatticeVector,
    dimension_count,
    enumerate_orbit,
    load_group,
    parse_lattice,
    parse_word,
    verify_lattice_structure,
)
from qweyl.qseries import (
    q_factorial_check,
    verify_braid_product,
    verify_dilog_identity,
    verify_heine_chain,
    verify_q_binomial,
)
from qweyl.skew_algebra import classical_limit
from qweyl.tau_system import (
    TauTable,
    hirota_miwa_checks,
    transport_batch,
    verify_ex_bilinear,
    verify_path_consistency,
    verify_seed_fitting,
    verify_seed_relations,
)
from qweyl.utils import TryExcept
from qweyl.utils.config_parser import get_argparser, load_config_object, merge_overrides
from qweyl.utils.general import (
    LOGGER,
    NUM_THREADS,
    TQDM_BAR_FORMAT,
    Profile,
    colorstr,
    init_seeds,
    json_dumps,
    print_args,
    set_logging,
)
from qweyl.utils.sampler import SpecializationSampler
from qweyl.weyl_rep import (
    TauSection,
    apply_word,
    normalize,
    seed_section,
    verify_adjoint_realization,
    verify_classical_compatibility,
    verify_involution,
    verify_k_invariants,
    verify_relations,
)
from qweyl.worked import verify_worked_examples

SCHEMA_VERSION = 1
SUITES = (
    "coxeter",
    "worked-examples",
    "k-invariants",
    "adjoint",
    "fpoly",
    "nonlog",
    "curves",
    "bilinear",
    "identities",
    "classical",
)
ADJOINT_SYMBOLS = ("x", "y", "t10", "t11", "t1", "t7")


# Helpers ---------------------------------------------------------------------------------------------------------------
def guarded(name: str, fn: Callable[[], dict]) -> dict:
    """Runs one check; an exception becomes a failed entry carrying the error text."""
    errors: List[str] = []
    report = None
    with TryExcept(name, errors):
        report = fn()
    if errors:
        return {"passed": False, "witness": errors[0]}
    return report


def suite(checks: Dict[str, dict]) -> dict:
    return {"passed": all(c["passed"] for c in checks.values()), "checks": checks}


def witness_map(results: Dict[str, Optional[str]]) -> dict:
    """Report from a name -> witness map where None means the check passed."""
    failed = {k: v for k, v in results.items() if v}
    return {"passed": not failed, "witness": failed or None}


def group(cfg: edict, name: Optional[str] = None) -> GroupSpec:
    return load_group(name or cfg.type, cfg.groups_dir)


def workers(cfg: edict) -> int:
    return cfg.jobs if cfg.jobs > 0 else NUM_THREADS


def sample_sections(spec: GroupSpec, depth: int, limit: Optional[int]) -> List[TauSection]:
    """Normalized Weyl images of the τ_i reached by the shortest orbit words."""
    return [construct_via_weyl(spec, word, i) for i, word in orbit_cases(spec, depth, limit)]


def orbit_sections(spec: GroupSpec, cfg: edict) -> List[TauSection]:
    """Seeds (1, E_i) and every normalized image within `orbit_depth` generators, capped by `orbit_sections`."""
    seeds = [seed_section(spec, i) for i in range(1, spec.n_points + 1)]
    return seeds + sample_sections(spec, cfg.orbit_depth, cfg.orbit_sections)


def read_section(spec: GroupSpec, seed: str) -> TauSection:
    """`seed` is a tau index ('1' for τ1) or the path of a section JSON file."""
    if seed.isdigit():
        i = int(seed)
        if not 1 <= i <= spec.n_points:
            raise StructuralError(f"tau index {i} out of range 1..{spec.n_points}")
        return seed_section(spec, i)
    path = Path(seed)
    if not path.exists():
        raise StructuralError(f"seed '{seed}' is neither a tau index nor an existing file")
    return TauSection.from_json(spec.table, json.loads(path.read_text()))


def locate(spec: GroupSpec, lam: LatticeVector, depth: int):
    """(tau index, word) reaching λ from some E_i within `depth` generators, or None."""
    n = spec.n_points
    seeds = [LatticeVector.E(i, n) for i in range(1, n + 1)]
    found = enumerate_orbit(spec, seeds, depth).words.get(lam)
    return None if found is None else (found[0] + 1, found[1])


def read_seed_values(spec: GroupSpec, path: Optional[str]) -> Dict[LatticeVector, Fraction]:
    if not path:
        return {}
    data = json.loads(Path(path).read_text())
    values = {parse_lattice(k, spec.n_points): Fraction(v) for k, v in data.items()}
    allowed = set(TauTable(spec).seeds)
    stray = [str(k) for k in values if k not in allowed]
    if stray:
        raise StructuralError(f"seed overrides must be members of L0, got {stray}")
    return values


# Subcommands -----------------------------------------------------------------------------------------------------------
def cmd_act(opt, cfg: edict) -> dict:
    spec = group(cfg)
    word = parse_word(opt.word)
    spec.check_word(word)
    start = read_section(spec, opt.seed)
    section = apply_word(spec, word, start)
    if opt.normalize:
        section = normalize(section)
    report = {
        "passed": True,
        "word": list(word),
        "section": section.to_json(),
        "pretty": section.pretty(),
        "classical": classical_limit(section.F).pretty(),
    }
    checks = {}
    sections = [start] + orbit_sections(spec, cfg) if opt.verify else []
    for name in opt.verify or []:
        fn = {
            "relations": lambda: verify_relations(spec),
            "involution": lambda: verify_involution(spec, sections),
            "classical": lambda: verify_classical_compatibility(spec, sections),
            "k-invariants": lambda: verify_k_invariants(spec),
            "lattice": lambda: verify_lattice_structure(spec),
        }[name]
        checks[name] = guarded(name, fn)
    if checks:
        report.update(suite(checks))
    return report


def cmd_fpoly(opt, cfg: edict) -> dict:
    spec = group(cfg)
    if opt.word is not None:
        if not 1 <= opt.seed <= spec.n_points:
            raise StructuralError(f"tau index {opt.seed} out of range 1..{spec.n_points}")
        section = construct_via_weyl(spec, parse_word(opt.word), opt.seed)
        lam = section.lam
    elif opt.lam is not None:
        lam, section = parse_lattice(opt.lam, spec.n_points), None
        if opt.mode != "linear":
            found = locate(spec, lam, cfg.orbit_depth)
            if found is None:
                raise StructuralError(f"{lam} is not reached from any E_i within {cfg.orbit_depth} generators")
            section = construct_via_weyl(spec, found[1], found[0])
    else:
        raise StructuralError("fpoly needs --word or --lambda")
    if opt.mode == "linear":
        section = None
    sampler = SpecializationSampler(cfg.rng_seed)
    return fpoly_report(spec, lam, section, cfg.specializations, sampler, linear=opt.mode != "weyl")


def curve_checks(spec: GroupSpec, cfg: edict, which: str = "all") -> Dict[str, dict]:
    curve = CurveSpec.from_group(spec)
    sampler = SpecializationSampler(cfg.rng_seed)
    checks = {}
    if which in ("space", "all"):
        checks["lambda_fixed"] = guarded("lambda_fixed", lambda: verify_lambda_fixed(curve))
        checks["conditions"] = guarded("conditions", lambda: verify_curve_conditions(curve))
        checks["space"] = guarded("space", lambda: verify_curve_space(curve, sampler, cfg.specializations))
    if which in ("invariance", "all"):
        checks["invariance"] = guarded("invariance", lambda: verify_curve_invariance(curve))
        checks["constraint"] = guarded("constraint", lambda: verify_constraint_reduction(curve))
        checks["classical"] = guarded("classical", lambda: verify_classical_curve(curve))
        if spec.type == "E8":
            for i in (0, 3):
                checks[f"hinv_s{i}"] = guarded(f"hinv s{i}", lambda i=i: verify_hinv(curve, i))
    return checks


def cmd_curve(opt, cfg: edict) -> dict:
    spec = group(cfg)
    curve = CurveSpec.from_group(spec)
    P = build_explicit_curve(curve)
    report = {"curve": curve.to_json(), "P": P.pretty() if opt.emit == "pretty" else P.to_json()}
    if opt.verify != "none":
        report.update(suite(curve_checks(spec, cfg, opt.verify)))
    else:
        report["passed"] = True
    return report


def bilinear_checks(spec: GroupSpec, cfg: edict, overrides=None, transport_words=None, max_len=None) -> Dict[str, dict]:
    taus = TauTable(spec, max_len=cfg.tau_search_depth)
    count = cfg.transport_words if transport_words is None else transport_words
    length = cfg.transport_max_len if max_len is None else max_len
    seed = cfg.rng_seed
    return {
        "seeds": guarded("seeds", lambda: verify_seed_relations(spec, taus)),
        "ex_bilinear": guarded("ex_bilinear", lambda: verify_ex_bilinear(spec, taus)),
        "hirota_miwa": guarded("hirota_miwa", lambda: hirota_miwa_checks(spec, taus=taus)),
        "transport": guarded(
            "transport",
            lambda: transport_batch(spec, count, length, seed, workers(cfg), progress=cfg.progress, taus=taus),
        ),
        "paths": guarded("paths", lambda: verify_path_consistency(spec, length, cfg.collisions, taus)),
        "seed_fitting": guarded(
            "seed_fitting", lambda: verify_seed_fitting(spec, seed, cfg.collisions, min(length, 3), overrides)
        ),
    }


def cmd_bilinear(opt, cfg: edict) -> dict:
    if cfg.type != "e8":
        raise StructuralError(f"the bilinear tau system is defined for E8, not {cfg.type.upper()}")
    spec = group(cfg)
    overrides = read_seed_values(spec, opt.seeds_file)
    return suite(bilinear_checks(spec, cfg, overrides, opt.transport_words, opt.max_len))


def identity_checks(cfg: edict, which=("binom", "dilog", "heine", "braid-G", "q-factorial"), order=None, trials=None):
    order = cfg.series_order if order is None else order
    trials = cfg.series_trials if trials is None else trials
    seed = cfg.rng_seed
    e8 = load_group("e8", cfg.groups_dir)
    fns = {
        "binom": lambda: verify_q_binomial(order, trials, seed),
        "dilog": lambda: verify_dilog_identity(order, trials, seed),
        "heine": lambda: verify_heine_chain(order, trials, seed),
        "braid-G": lambda: suite({f"s{i}s{j}": verify_braid_product(e8, i, j, order, trials, seed) for i, j in ((0, 3),)}),
        "q-factorial": lambda: witness_map(q_factorial_check(min(order, 6), seed)),
    }
    return {name: guarded(name, fns[name]) for name in which}


def cmd_identities(opt, cfg: edict) -> dict:
    which = tuple(opt.which) if opt.which else ("binom", "dilog", "heine", "braid-G", "q-factorial")
    return suite(identity_checks(cfg, which, opt.order, opt.trials))


def cmd_orbit(opt, cfg: edict) -> dict:
    spec = group(cfg)
    n = spec.n_points
    seeds = [parse_lattice(s, n) for s in opt.seeds] if opt.seeds else [LatticeVector.E(i, n) for i in range(1, n + 1)]
    depth = cfg.orbit_depth if opt.depth is None else opt.depth
    orbit = enumerate_orbit(spec, seeds, depth, max_collisions=cfg.collisions, progress=cfg.progress)
    classes = [
        {"lambda": str(lam), "seed": str(seeds[k]), "word": list(w), "dimension_count": dimension_count(lam)}
        for lam, (k, w) in sorted(orbit.words.items())
    ]
    report = {"depth": depth, "size": len(classes), "classes": classes}
    checks = {"lattice": guarded("lattice", lambda: verify_lattice_structure(spec))}
    if opt.well_defined:
        checks["well_defined"] = guarded("well_defined", lambda: verify_well_definedness(spec, depth, cfg.collisions))
    report.update(suite(checks))
    return report


def verification_suites(cfg: edict) -> Dict[str, Callable[[], dict]]:
    """verify-paper suites in execution order."""
    e8 = load_group("e8", cfg.groups_dir)
    seed = cfg.rng_seed

    def coxeter():
        checks = {}
        for t in GROUP_TYPES:
            spec = load_group(t, cfg.groups_dir)
            checks[f"{t}_relations"] = guarded(t, lambda: verify_relations(spec))
            checks[f"{t}_lattice"] = guarded(t, lambda: verify_lattice_structure(spec))
        return suite(checks)

    def worked():
        return suite(
            {
                "orbit_examples": guarded("worked", lambda: verify_worked_examples(e8, seed)),
                "ex_bilinear": guarded("ex_bilinear", lambda: verify_ex_bilinear(e8)),
            }
        )

    def adjoint():
        checks = {}
        for i in (0, 3):
            for s in ADJOINT_SYMBOLS:
                checks[f"s{i}_{s}"] = guarded(f"s{i} {s}", lambda: verify_adjoint_realization(e8, i, s, cfg.adjoint_order))
        return suite(checks)

    def fpoly():
        cases = orbit_cases(e8, cfg.orbit_depth, cfg.fpoly_classes)
        return suite(
            {
                "oracle": guarded("oracle", lambda: verify_oracle_equivalence(e8, cases, cfg.specializations, seed)),
                "well_defined": guarded("well_defined", lambda: verify_well_definedness(e8, 4, cfg.collisions)),
            }
        )

    def nonlog():
        sections = sample_sections(e8, cfg.orbit_depth, cfg.fpoly_classes)
        return suite({"consistency": guarded("nonlog", lambda: verify_nonlog_consistency(e8, sections, seed))})

    def curves():
        checks = {}
        for t in GROUP_TYPES:
            for name, report in curve_checks(load_group(t, cfg.groups_dir), cfg).items():
                checks[f"{t}_{name}"] = report
        return suite(checks)

    def classical():
        checks = {}
        for t in GROUP_TYPES:
            spec = load_group(t, cfg.groups_dir)
            sections = orbit_sections(spec, cfg)
            checks[f"{t}_compatibility"] = guarded(t, lambda: verify_classical_compatibility(spec, sections))
            checks[f"{t}_involution"] = guarded(t, lambda: verify_involution(spec, sections))
        return suite(checks)

    return {
        "coxeter": coxeter,
        "worked-examples": worked,
        "k-invariants": lambda: verify_k_invariants(e8),
        "adjoint": adjoint,
        "fpoly": fpoly,
        "nonlog": nonlog,
        "curves": curves,
        "bilinear": lambda: suite(bilinear_checks(e8, cfg)),
        "identities": lambda: suite(identity_checks(cfg)),
        "classical": classical,
    }


def cmd_verify_paper(opt, cfg: edict) -> dict:
    suites = verification_suites(cfg)
    names = [s for s in SUITES if not opt.only or s in opt.only]
    pbar = tqdm(total=len(names), desc="verify-paper", bar_format=TQDM_BAR_FORMAT, disable=not cfg.progress)

    def run(name):
        with Profile() as dt:
            report = guarded(name, suites[name])
        LOGGER.info(f"{colorstr('bold', name)}: {'PASS' if report['passed'] else 'FAIL'} ({dt.dt:.1f}s)")
        pbar.update(1)
        return name, report

    # suites may finish in any order; the report is keyed by name
    with ThreadPool(workers(cfg)) as pool:
        results = dict(pool.map(run, names))
    pbar.close()
    return {"suites": results, "passed": all(r["passed"] for r in results.values())}


COMMANDS = {
    "act": cmd_act,
    "fpoly": cmd_fpoly,
    "curve": cmd_curve,
    "bilinear": cmd_bilinear,
    "identities": cmd_identities,
    "orbit": cmd_orbit,
    "verify-paper": cmd_verify_paper,
}


# Output ----------------------------------------------------------------------------------------------------------------
def pretty_report(data, indent: int = 0) -> str:
    """Indented text view of a JSON report."""
    pad = "  " * indent
    if isinstance(data, dict):
        lines = []
        for k in sorted(data):
            v = data[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(pretty_report(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {format_scalar(v)}")
        return "\n".join(lines)
    if isinstance(data, list):
        if all(not isinstance(v, (dict, list)) for v in data):
            return pad + "[" + ", ".join(format_scalar(v) for v in data) + "]"
        return "\n".join(f"{pad}-\n{pretty_report(v, indent + 1)}" for v in data)
    return pad + format_scalar(data)


def format_scalar(v) -> str:
    if isinstance(v, bool):
        return "PASS" if v else "FAIL"
    return "-" if v is None else str(v)


# Entry point -----------------------------------------------------------------------------------------------------------
def parse_opt(argv=None):
    parser = get_argparser()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", choices=[*GROUP_TYPES, *(t.upper() for t in GROUP_TYPES)], help="group type")
    common.add_argument("--rng-seed", type=int, dest="rng_seed", help="seed of every random specialization")
    common.add_argument("--out", type=str, help="write the report to this file instead of stdout")
    common.add_argument("--format", choices=("json", "pretty"), help="report format")
    common.add_argument("--jobs", type=int, help="worker threads, 0 for one per core")
    common.add_argument("--groups-dir", type=str, dest="groups_dir", help="directory of group YAML files")
    common.add_argument("--quiet", action="store_true", help="errors only on stderr, no progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("act", parents=[common], help="apply a word to a tau section")
    p.add_argument("--word", type=str, default="", help='generator word, e.g. "3 2 1 0 2 4 3" (rightmost first)')
    p.add_argument("--seed", type=str, default="1", help="tau index or section JSON file")
    p.add_argument("--normalize", action="store_true", help="normalize the resulting polynomial")
    p.add_argument(
        "--verify", nargs="*", choices=("relations", "involution", "classical", "k-invariants", "lattice"), help="checks"
    )

    p = sub.add_parser("fpoly", parents=[common], help="F-polynomial of a class by Weyl action and linear solve")
    p.add_argument("--word", type=str, help="generator word applied to τ_seed")
    p.add_argument("--seed", type=int, default=1, help="tau index the word acts on")
    p.add_argument("--lambda", type=str, dest="lam", help='class, e.g. "(2,1;1,0,0,0,0,0,1,0,1,1,1)"')
    p.add_argument("--mode", choices=("weyl", "linear", "both"), default="both")
    p.add_argument("--seeds", type=int, dest="specializations", help="number of random specializations")

    p = sub.add_parser("curve", parents=[common], help="explicit quantum curve and its checks")
    p.add_argument("--emit", choices=("pretty", "json"), default="pretty")
    p.add_argument("--verify", choices=("space", "invariance", "all", "none"), default="all")

    p = sub.add_parser("bilinear", parents=[common], help="E8 tau functions and bilinear relations")
    p.add_argument("--seeds-file", type=str, dest="seeds_file", help="JSON map lambda -> nonzero seed value")
    p.add_argument("--transport-words", type=int, dest="transport_words", help="number of transported relations")
    p.add_argument("--max-len", type=int, dest="max_len", help="maximum transport word length")

    p = sub.add_parser("identities", parents=[common], help="truncated q-series identities")
    p.add_argument("--which", nargs="*", choices=("binom", "dilog", "heine", "braid-G", "q-factorial"))
    p.add_argument("--order", type=int, help="total truncation order")
    p.add_argument("--trials", type=int, help="random exact (a, b, q) trials")

    p = sub.add_parser("orbit", parents=[common], help="breadth-first orbit of lattice classes")
    p.add_argument("--depth", type=int, help="maximum word length")
    p.add_argument("--seeds", nargs="*", help='seed classes such as "E1" or "(1,0;0,...)"; default E1..EN')
    p.add_argument("--well-defined", action="store_true", dest="well_defined", help="check colliding paths")

    p = sub.add_parser("verify-paper", parents=[common], help="run every verification suite")
    p.add_argument("--only", nargs="*", choices=SUITES, help="restrict to these suites")
    return parser.parse_args(argv)


def build_config(opt) -> edict:
    cfg = load_config_object(opt.config)
    overrides = {k: getattr(opt, k, None) for k in ("type", "rng_seed", "format", "jobs", "groups_dir", "specializations")}
    cfg = merge_overrides(cfg, overrides)
    cfg.type = cfg.type.lower()
    cfg.progress = not opt.quiet
    return cfg


def main(argv=None) -> int:
    opt = parse_opt(argv)
    set_logging(verbose=not opt.quiet)
    try:
        cfg = build_config(opt)
        print_args({"command": opt.command, **{k: v for k, v in cfg.items() if k != "progress"}})
        init_seeds(cfg.rng_seed)
        body = COMMANDS[opt.command](opt, cfg)
    except StructuralError as e:
        LOGGER.error(f"usage error: {e}")
        return 2
    except QWeylError as e:
        LOGGER.error(f"{opt.command} failed: {e}")
        body = {"passed": False, "error": f"{type(e).__name__}: {e}"}
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": opt.command,
        "type": cfg.type,
        "rng_seed": cfg.rng_seed,
        **body,
    }
    text = json_dumps(report) if cfg.format == "json" else pretty_report(report) + "\n"
    if opt.out:
        Path(opt.out).write_text(text, encoding="utf-8")
        LOGGER.info(f"report saved to {colorstr('bold', opt.out)}")
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
