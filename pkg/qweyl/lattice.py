"""
Picard-lattice layer.

A class λ = d1·H1 + d2·H2 − Σ m_k·E_k is stored as (d1, d2; m). Its multiplicative forms are
e^λ = h1^d1·h2^d2/Π e_k^m_k and τ^λ = σ1^d1·σ2^d2/Π τ_k^m_k. Every generator is a reflection in a root:

    swap s_{i,j}: E_i − E_j      x-type s^x_{a,b}: H2 − E_a − E_b      y-type s^y_{a,b}: H1 − E_a − E_b
"""

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from qweyl import QWeylError, StructuralError
from qweyl.coeffring import ExponentVector, SymbolTable, exp_from_dict
from qweyl.utils.general import GROUPS_DIR, LOGGER, TQDM_BAR_FORMAT, yaml_load

Word = Tuple[int, ...]  # written order: (3, 2, 1) means s3·s2·s1, rightmost acts first


@dataclass(frozen=True, order=True)
class LatticeVector:
    d1: int
    d2: int
    m: Tuple[int, ...]

    @classmethod
    def E(cls, i: int, n: int) -> "LatticeVector":
        """Exceptional class E_i (1-based), i.e. e^λ = e_i."""
        m = [0] * n
        m[i - 1] = -1
        return cls(0, 0, tuple(m))

    @classmethod
    def H1(cls, n: int) -> "LatticeVector":
        return cls(1, 0, (0,) * n)

    @classmethod
    def H2(cls, n: int) -> "LatticeVector":
        return cls(0, 1, (0,) * n)

    @classmethod
    def from_array(cls, a) -> "LatticeVector":
        a = [int(v) for v in a]
        return cls(a[0], a[1], tuple(a[2:]))

    @property
    def n(self) -> int:
        return len(self.m)

    def as_array(self) -> np.ndarray:
        return np.array((self.d1, self.d2) + self.m, dtype=np.int64)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "LatticeVector":
        return LatticeVector.from_array(-self.as_array())

    def dot(self, other: "LatticeVector") -> int:
        """Intersection pairing d1·d2' + d2·d1' − Σ m·m'."""
        return int(self.d1 * other.d2 + self.d2 * other.d1 - np.dot(self.m, other.m))

    def param_exps(self, table: SymbolTable) -> ExponentVector:
        """Exponent vector of e^λ."""
        d = {table.sid("h1"): self.d1, table.sid("h2"): self.d2}
        d.update({table.e(k + 1): -mk for k, mk in enumerate(self.m)})
        return exp_from_dict(d)

    def tau_exps(self, table: SymbolTable) -> ExponentVector:
        """Exponent vector of τ^λ."""
        d = {table.sid("s1"): self.d1, table.sid("s2"): self.d2}
        d.update({table.t(k + 1): -mk for k, mk in enumerate(self.m)})
        return exp_from_dict(d)

    @classmethod
    def from_tau_exps(cls, table: SymbolTable, exps: ExponentVector) -> "LatticeVector":
        d = dict(exps)
        m = tuple(-d.get(table.t(k), 0) for k in range(1, table.n_points + 1))
        extra = set(d) - {table.sid("s1"), table.sid("s2")} - {table.t(k) for k in range(1, table.n_points + 1)}
        if extra:
            raise StructuralError(f"not a tau monomial: stray symbols {sorted(table.names[s] for s in extra)}")
        return cls(d.get(table.sid("s1"), 0), d.get(table.sid("s2"), 0), m)

    @classmethod
    def from_param_exps(cls, table: SymbolTable, exps: ExponentVector) -> "LatticeVector":
        d = dict(exps)
        m = tuple(-d.get(table.e(k), 0) for k in range(1, table.n_points + 1))
        return cls(d.get(table.sid("h1"), 0), d.get(table.sid("h2"), 0), m)

    def to_json(self) -> dict:
        return {"d": [self.d1, self.d2], "m": list(self.m)}

    @classmethod
    def from_json(cls, data: dict) -> "LatticeVector":
        return cls(int(data["d"][0]), int(data["d"][1]), tuple(int(v) for v in data["m"]))

    def __str__(self):
        return f"({self.d1},{self.d2};{','.join(map(str, self.m))})"


def parse_lattice(text: str, n: int) -> LatticeVector:
    """Parses '(d1,d2;m1,...,mN)', 'E7', 'H1' or a JSON-like 'd1 d2 m1 ... mN' list."""
    s = text.strip()
    if re.fullmatch(r"[Ee]\d+", s):
        return LatticeVector.E(int(s[1:]), n)
    if s.upper() in ("H1", "H2"):
        return LatticeVector.H1(n) if s.upper() == "H1" else LatticeVector.H2(n)
    values = [int(v) for v in re.findall(r"-?\d+", s)]
    if len(values) != n + 2:
        raise StructuralError(f"lattice vector '{text}' needs {n + 2} integers, got {len(values)}")
    return LatticeVector.from_array(values)


def parse_word(text: str) -> Word:
    """'3 2 1 0' or '3,2,1,0' -> (3, 2, 1, 0); the empty string is the identity."""
    tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        return tuple(int(t) for t in tokens)
    except ValueError:
        raise StructuralError(f"invalid word '{text}': expected generator indices") from None


def delta_red(n: int) -> LatticeVector:
    """Anticanonical class 2H1 + 2H2 − ΣE_i."""
    return LatticeVector(2, 2, (1,) * n)


def dimension_count(lam: LatticeVector) -> int:
    """(d1+1)(d2+1) − Σ m(m+1)/2, the expected number of free coefficients."""
    return (lam.d1 + 1) * (lam.d2 + 1) - sum(mk * (mk + 1) // 2 for mk in lam.m)


def dimension_by_pairing(lam: LatticeVector) -> int:
    """½λ·λ + ½λ·δ + 1; equal to dimension_count."""
    twice = lam.dot(lam) + lam.dot(delta_red(lam.n))
    assert twice % 2 == 0, f"λ·λ + λ·δ must be even, got {twice}"
    return twice // 2 + 1


# Group definitions ------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class Generator:
    index: int
    kind: str  # 'swap' | 'x' | 'y'
    a: int
    b: int

    def root(self, n: int) -> np.ndarray:
        """Root as a (d1, d2, m) vector: E_a − E_b, H2 − E_a − E_b or H1 − E_a − E_b."""
        r = np.zeros(n + 2, dtype=np.int64)
        if self.kind == "swap":
            r[1 + self.a], r[1 + self.b] = -1, 1  # m-entries carry the −E coefficient
        else:
            r[1 if self.kind == "x" else 0] = 1
            r[1 + self.a] = r[1 + self.b] = 1
        return r

    def __str__(self):
        tag = {"swap": "s", "x": "s^x", "y": "s^y"}[self.kind]
        return f"s{self.index}={tag}_{{{self.a},{self.b}}}"


@dataclass(frozen=True)
class GroupSpec:
    type: str
    n_points: int
    generators: Tuple[Generator, ...]
    dynkin: Tuple[Tuple[int, int], ...]
    template_x: Tuple[Tuple[int, ...], Tuple[int, ...]]
    template_y: Tuple[Tuple[int, ...], Tuple[int, ...]]
    curve: Dict

    @classmethod
    def from_dict(cls, data: dict) -> "GroupSpec":
        gens = tuple(
            Generator(int(g["index"]), str(g["kind"]), int(g["pair"][0]), int(g["pair"][1]))
            for g in sorted(data["generators"], key=lambda g: g["index"])
        )
        assert [g.index for g in gens] == list(range(len(gens))), "generator indices must be 0..r"
        for g in gens:
            assert g.kind in ("swap", "x", "y"), f"unknown generator kind '{g.kind}'"
        tx, ty = data["templates"]["x"], data["templates"]["y"]
        return cls(
            type=str(data["type"]),
            n_points=int(data["n_points"]),
            generators=gens,
            dynkin=tuple(tuple(sorted(e)) for e in data["dynkin"]),
            template_x=(tuple(tx["I"]), tuple(tx["J"])),
            template_y=(tuple(ty["I"]), tuple(ty["J"])),
            curve=dict(data.get("curve", {})),
        )

    def __hash__(self):
        return hash((self.type, self.n_points, self.generators, self.dynkin))

    @cached_property
    def table(self) -> SymbolTable:
        return SymbolTable(self.n_points)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @cached_property
    def gram(self) -> np.ndarray:
        """Intersection form on (d1, d2, m1..mN) coordinates, with the m-entries carrying −E coefficients."""
        n = self.n_points
        g = np.zeros((n + 2, n + 2), dtype=np.int64)
        g[0, 1] = g[1, 0] = 1
        g[2:, 2:] = -np.eye(n, dtype=np.int64)
        return g

    @cached_property
    def star_matrices(self) -> Tuple[np.ndarray, ...]:
        """Matrices of the reflections λ ↦ λ + (λ·α)α."""
        mats = []
        for gen in self.generators:
            alpha = gen.root(self.n_points)
            mats.append(np.eye(self.n_points + 2, dtype=np.int64) + np.outer(alpha, alpha @ self.gram))
        return tuple(mats)

    def adjacency(self) -> np.ndarray:
        r = self.rank
        adj = np.zeros((r, r), dtype=np.int64)
        for i, j in self.dynkin:
            adj[i, j] = adj[j, i] = 1
        return adj

    def root_adjacency(self) -> np.ndarray:
        """Adjacency read off the roots: |α_i·α_j| = 1."""
        roots = [g.root(self.n_points) for g in self.generators]
        r = self.rank
        adj = np.zeros((r, r), dtype=np.int64)
        for i in range(r):
            for j in range(r):
                if i != j and abs(int(roots[i] @ self.gram @ roots[j])) == 1:
                    adj[i, j] = 1
        return adj

    def check_word(self, word: Iterable[int]):
        for g in word:
            if not 0 <= g < self.rank:
                raise StructuralError(f"generator s{g} does not exist for type {self.type} (rank {self.rank})")


@lru_cache(maxsize=None)
def load_group(name: str, groups_dir: Optional[str] = None) -> GroupSpec:
    """Loads data/groups/<name>.yaml; `name` is case-insensitive ('e8', 'E7', ...)."""
    path = Path(groups_dir or GROUPS_DIR) / f"{name.lower()}.yaml"
    if not path.exists():
        raise StructuralError(f"no group file at {path}")
    return GroupSpec.from_dict(yaml_load(path))


GROUP_TYPES = ("e8", "e7", "e6", "d5")


# Actions ---------------------------------------------------------------------------------------------------------------
def star_action(spec: GroupSpec, i: int, lam: LatticeVector) -> LatticeVector:
    """Induced linear action s*_i on the lattice."""
    return LatticeVector.from_array(spec.star_matrices[i] @ lam.as_array())


def apply_word(spec: GroupSpec, word: Sequence[int], lam: LatticeVector) -> LatticeVector:
    """w* λ with the rightmost generator applied first."""
    spec.check_word(word)
    for g in reversed(word):
        lam = star_action(spec, g, lam)
    return lam


def relation_words(spec: GroupSpec) -> List[Tuple[str, Word]]:
    """(label, word) for s_i², (s_i s_j)² on non-adjacent pairs and (s_i s_j)³ on adjacent pairs."""
    adj = spec.adjacency()
    out = [(f"s{i}^2", (i, i)) for i in range(spec.rank)]
    for i in range(spec.rank):
        for j in range(i + 1, spec.rank):
            order = 3 if adj[i, j] else 2
            out.append((f"(s{i}s{j})^{order}", (i, j) * order))
    return out


def verify_coxeter_relations(spec: GroupSpec, probe: Callable, states: Sequence, labels: Optional[Sequence] = None):
    """
    Checks every Coxeter relation of the Dynkin diagram on each state.

    `probe(i, state)` applies generator i. A relation word w must satisfy w(state) == state exactly. Returns a report
    with the first violated relation and the witness state.
    """
    checked = 0
    for label, word in relation_words(spec):
        for k, state in enumerate(states):
            out, error = state, None
            try:
                for g in reversed(word):
                    out = probe(g, out)
            except QWeylError as e:
                error = f"{type(e).__name__}: {e}"
            checked += 1
            if error or out != state:
                witness = labels[k] if labels else str(state)
                LOGGER.debug(f"relation {label} failed on {witness}")
                report = {"passed": False, "checked": checked, "relation": label, "witness": str(witness)}
                if error:
                    report["error"] = error
                return report
    return {"passed": True, "checked": checked, "relation": None, "witness": None}


@dataclass
class Orbit:
    """Breadth-first orbit data: the first word reaching each class and colliding word pairs."""

    words: Dict[LatticeVector, Tuple[int, Word]]  # class -> (seed index, word)
    collisions: List[Tuple[LatticeVector, Tuple[int, Word], Tuple[int, Word]]]


def enumerate_orbit(
    spec: GroupSpec,
    seeds: Sequence[LatticeVector],
    depth: int,
    max_collisions: int = 64,
    progress: bool = False,
) -> Orbit:
    """All classes reachable from `seeds` by words of length ≤ depth, deduplicated by lattice key."""
    words: Dict[LatticeVector, Tuple[int, Word]] = {}
    collisions = []
    queue = deque()
    for k, s in enumerate(seeds):
        if s not in words:
            words[s] = (k, ())
            queue.append(s)
    pbar = tqdm(total=depth, desc=f"{spec.type} orbit", bar_format=TQDM_BAR_FORMAT, disable=not progress)
    for _ in range(depth):
        nxt = deque()
        while queue:
            lam = queue.popleft()
            seed, word = words[lam]
            for g in range(spec.rank):
                if word and word[0] == g:
                    continue
                image = star_action(spec, g, lam)
                if image not in words:
                    words[image] = (seed, (g,) + word)
                    nxt.append(image)
                elif len(collisions) < max_collisions and words[image][1] != (g,) + word:
                    collisions.append((image, words[image], (seed, (g,) + word)))
        queue = nxt
        pbar.update(1)
    pbar.close()
    return Orbit(words, collisions)


def basis_vectors(n: int) -> List[LatticeVector]:
    """H1, H2, E1..EN."""
    return [LatticeVector.H1(n), LatticeVector.H2(n)] + [LatticeVector.E(i, n) for i in range(1, n + 1)]


def verify_lattice_structure(spec: GroupSpec) -> dict:
    """
    Pairing preservation on basis pairs, δ_Red fixed by every generator, involutions, and the Dynkin edges of the
    group file reproduced by the root pairings.
    """
    basis = basis_vectors(spec.n_points)
    delta = delta_red(spec.n_points)
    for i in range(spec.rank):
        if star_action(spec, i, delta) != delta:
            return {"passed": False, "check": "delta_fixed", "witness": f"s{i}"}
        for a in basis:
            sa = star_action(spec, i, a)
            if star_action(spec, i, sa) != a:
                return {"passed": False, "check": "involution", "witness": f"s{i} on {a}"}
            for b in basis:
                if sa.dot(star_action(spec, i, b)) != a.dot(b):
                    return {"passed": False, "check": "pairing", "witness": f"s{i} on {a}, {b}"}
    if not np.array_equal(spec.adjacency(), spec.root_adjacency()):
        diff = np.argwhere(spec.adjacency() != spec.root_adjacency())
        return {"passed": False, "check": "dynkin", "witness": f"edge s{diff[0][0]}-s{diff[0][1]}"}
    return {"passed": True, "check": None, "witness": None}
