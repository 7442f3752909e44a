"""Root systems of the simple types and the four-roots non-orthogonality scan.

Coordinates live in Q(sqrt2, sqrt3) so every orthogonality decision is an
exact zero test.  The minimum of

    count(first, second) = #{root : <root, first> != 0 and <root, second> != 0}

over nonzero first, second is attained on one-dimensional flats ("lines") of the
root hyperplane arrangement: if W is the intersection of the hyperplanes
containing first, any line of the arrangement inside W is orthogonal to at
least the roots first is orthogonal to.  Scans therefore range over lines.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import comb, gcd, lcm
from typing import Optional, Sequence

import numpy as np

from .qfield import HALF, Q23, dot, nullspace, qvec, regular_matrix, to_float

Vector = tuple[Q23, ...]

ROOT_COUNTS = {"E6": 72, "E7": 126, "E8": 240, "F4": 48, "G2": 12}
_FIXED_RANK = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}
_MIN_RANK = {"A": 1, "B": 2, "C": 3, "D": 4}


class RootSystemError(ValueError):
    """Invalid type label, rank or input vector."""


@dataclass(frozen=True)
class RootSystem:
    type_label: str
    rank: int
    roots: tuple[Vector, ...]
    ambient_dim: int
    # extra linear constraints cutting the ambient space down to the span of the roots
    constraints: tuple[Vector, ...] = ()

    @property
    def name(self) -> str:
        return self.type_label if self.type_label in ROOT_COUNTS else f"{self.type_label}{self.rank}"

    @property
    def expected_count(self) -> int:
        n, t = self.rank, self.type_label
        if t in ROOT_COUNTS:
            return ROOT_COUNTS[t]
        return {"A": n * (n + 1), "B": 2 * n * n, "C": 2 * n * n, "D": 2 * n * (n - 1)}[t]

    def positive_roots(self) -> list[Vector]:
        """One root from each {root, -root} pair (first nonzero coordinate positive)."""
        return [r for r in self.roots if next(x for x in r if x).sign() > 0]

    def float_roots(self) -> np.ndarray:
        return np.array([to_float(r) for r in self.roots])


# ------------------------------------------------------------------ models
def _unit(d: int, i: int, val=1) -> list:
    v = [0] * d
    v[i] = val
    return v


def _pm_pairs(d: int, width: Optional[int] = None) -> list[list]:
    """+-e_i +- e_j for i < j, padded to ``width``."""
    width = width or d
    out = []
    for i, j in itertools.combinations(range(d), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [0] * width
            v[i], v[j] = si, sj
            out.append(v)
    return out


def _half_signs(k: int, last, parity_filter) -> list[list]:
    out = []
    for signs in itertools.product((1, -1), repeat=k):
        for ls in (1, -1):
            if parity_filter(signs, ls):
                out.append([s * HALF for s in signs] + [last * ls])
    return out


def parse_root_type(spec: str) -> tuple[str, int]:
    """``"B2"`` -> ``("B", 2)``; ``"E8"`` -> ``("E8", 8)``."""
    m = re.fullmatch(r"\s*([A-Ga-g])(\d+)\s*", spec)
    if not m:
        raise RootSystemError(f"unknown root system spec {spec!r}")
    letter, num = m.group(1).upper(), int(m.group(2))
    label = f"{letter}{num}"
    if label in _FIXED_RANK:
        return label, num
    if letter in _MIN_RANK:
        return letter, num
    raise RootSystemError(f"unknown root system spec {spec!r}")


@lru_cache(maxsize=64)
def build_root_system(type_label: str, rank: Optional[int] = None) -> RootSystem:
    """Exact roots of a simple type.

    ``type_label`` is ``A``-``D`` with an explicit rank, or one of ``E6``,
    ``E7``, ``E8``, ``F4``, ``G2``.  A full spec such as ``"B3"`` is also
    accepted in place of the pair.
    """
    if rank is None:
        type_label, rank = parse_root_type(type_label)
    type_label = type_label.upper()
    if type_label in _FIXED_RANK:
        if rank != _FIXED_RANK[type_label]:
            raise RootSystemError(f"{type_label} has rank {_FIXED_RANK[type_label]}, not {rank}")
    elif type_label in _MIN_RANK:
        if rank < _MIN_RANK[type_label]:
            raise RootSystemError(f"type {type_label} needs rank >= {_MIN_RANK[type_label]}")
    else:
        raise RootSystemError(f"unknown type {type_label!r}")

    n = rank
    constraints: list = []
    ambient = n
    if type_label == "A":
        ambient = n + 1
        raw = []
        for i, j in itertools.permutations(range(n + 1), 2):
            v = [0] * (n + 1)
            v[i], v[j] = 1, -1
            raw.append(v)
        constraints = [[1] * (n + 1)]
    elif type_label == "B":
        raw = _pm_pairs(n) + [_unit(n, i, s) for i in range(n) for s in (1, -1)]
    elif type_label == "C":
        raw = _pm_pairs(n) + [_unit(n, i, 2 * s) for i in range(n) for s in (1, -1)]
    elif type_label == "D":
        raw = _pm_pairs(n)
    elif type_label == "F4":
        raw = _pm_pairs(4) + [_unit(4, i, s) for i in range(4) for s in (1, -1)]
        raw += [[s * HALF for s in signs] for signs in itertools.product((1, -1), repeat=4)]
    elif type_label == "G2":
        r3 = Q23.sqrt3()
        short = [(1, 0), (HALF, r3 * HALF), (-HALF, r3 * HALF)]
        long_ = [(0, r3), (Q23(Fraction(3, 2)), r3 * HALF), (Q23(Fraction(-3, 2)), r3 * HALF)]
        raw = []
        for v in short + long_:
            raw += [list(v), [-Q23.coerce(x) for x in v]]
    elif type_label == "E6":
        raw = _pm_pairs(5, 6)
        # odd number of plus signs among all six entries
        raw += _half_signs(5, Q23.sqrt3() * HALF, lambda s, ls: (sum(x > 0 for x in s) + (ls > 0)) % 2 == 1)
    elif type_label == "E7":
        raw = _pm_pairs(6, 7)
        # even number of +1/2 entries, last entry +-1/sqrt2 = +-sqrt2/2
        raw += _half_signs(6, Q23.sqrt2() * HALF, lambda s, ls: sum(x > 0 for x in s) % 2 == 0)
        raw += [_unit(7, 6, Q23.sqrt2()), _unit(7, 6, -Q23.sqrt2())]
    else:  # E8
        raw = _pm_pairs(8)
        raw += [[s * HALF for s in signs] for signs in itertools.product((1, -1), repeat=8)
                if sum(x < 0 for x in signs) % 2 == 0]
    roots = tuple(qvec(v) for v in raw)
    rs = RootSystem(type_label, n, roots, ambient, tuple(qvec(c) for c in constraints))
    if len(set(roots)) != len(roots) or len(roots) != rs.expected_count:
        raise AssertionError(f"internal error: {rs.name} has {len(roots)} roots")
    return rs


def reflect(v: Sequence[Q23], root: Sequence[Q23]) -> Vector:
    k = Q23(2) * dot(v, root) / dot(root, root)
    return tuple(x - k * r for x, r in zip(v, root))


def check_axioms(rs: RootSystem) -> dict:
    """Exact root-system axioms: negation and reflection closure, integral Cartan numbers."""
    pool = set(rs.roots)
    neg = all(tuple(-x for x in r) in pool for r in rs.roots)
    integral = True
    closed = True
    norms = [dot(r, r) for r in rs.roots]
    for a in rs.roots:
        for b, nb in zip(rs.roots, norms):
            k = Q23(2) * dot(a, b) / nb
            if not (k.is_rational() and k.a.denominator == 1):
                integral = False
                continue
            if k and tuple(x - k * y for x, y in zip(a, b)) not in pool:
                closed = False
    orth = all(not dot(r, c) for r in rs.roots for c in rs.constraints)
    return {"negation_closed": neg, "integral": integral, "reflection_closed": closed, "in_ambient": orth}


# ------------------------------------------------- exact integer embedding
def _integer_coeffs(v: Sequence[Q23]) -> list[int]:
    """Coefficients of a positive rational multiple of ``v`` as integers, gcd 1."""
    fr = [c for x in v for c in x.coeffs]
    den = lcm(*(f.denominator for f in fr))
    ints = [int(f * den) for f in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


def _root_block(v: Sequence[Q23]) -> np.ndarray:
    """4 x 4d integer matrix M with M @ coeffs(u) = coeffs(<u, v>) up to a positive factor."""
    scaled = _integer_coeffs(v)
    rows = []
    for k in range(len(v)):
        x = Q23(*scaled[4 * k : 4 * k + 4])
        rows.append(regular_matrix(x))
    return np.hstack(rows)


def _as_int_array(blocks: list) -> np.ndarray:
    arr = np.array(blocks, dtype=object)
    big = max((abs(int(x)) for x in arr.flat), default=0)
    return arr.astype(np.int64) if big < 2**20 else arr


@lru_cache(maxsize=64)
def _root_matrix(rs: RootSystem) -> np.ndarray:
    return _as_int_array([_root_block(r) for r in rs.roots])


def orthogonality_masks(rs: RootSystem, vectors: Sequence[Sequence[Q23]]) -> np.ndarray:
    """``mask[p, r]`` is True iff ``<roots[r], vectors[p]> == 0`` (exact)."""
    if not vectors:
        return np.zeros((0, len(rs.roots)), dtype=bool)
    R = _root_matrix(rs)  # N x 4 x 4d
    W = _as_int_array([_integer_coeffs(v) for v in vectors])  # P x 4d
    if R.dtype == object or W.dtype == object or np.abs(R).max() * np.abs(W).max() * R.shape[2] >= 2**62:
        prod = np.einsum("nij,pj->pni", R.astype(object), W.astype(object))
    else:
        prod = np.einsum("nij,pj->pni", R, W)
    return ~np.any(prod != 0, axis=2)


# ---------------------------------------------------------------- counting
def _check_vector(rs: RootSystem, v, name: str) -> Vector:
    v = qvec(v)
    if len(v) != rs.ambient_dim:
        raise RootSystemError(f"{name} must have {rs.ambient_dim} coordinates")
    if not any(v):
        raise RootSystemError(f"{name} must be nonzero")
    return v


def count_nonorthogonal(rs: RootSystem, first, second) -> int:
    """Number of roots orthogonal to neither ``first`` nor ``second``, decided exactly."""
    first = _check_vector(rs, first, "first")
    second = _check_vector(rs, second, "second")
    for c in rs.constraints:
        if dot(first, c) or dot(second, c):
            raise RootSystemError("inputs must lie in the trace-zero hyperplane")
    masks = orthogonality_masks(rs, [first, second])
    return int((~masks[0] & ~masks[1]).sum())


def _canonical(v: Sequence[Q23]) -> Vector:
    """Scale so that the first nonzero coordinate is 1."""
    lead = next(x for x in v if x)
    inv = lead.inverse()
    return tuple(x * inv if x else Q23(0) for x in v)


def _sort_key(v: Vector):
    return (sum(1 for x in v if x), tuple(-float(x) for x in v))


def _line_from(rs: RootSystem, rows: Sequence[Vector]) -> Optional[Vector]:
    ns = nullspace(list(rows) + list(rs.constraints), rs.ambient_dim)
    return _canonical(ns[0]) if len(ns) == 1 else None


def arrangement_lines(rs: RootSystem, max_subsets: int = 250_000) -> list[Vector]:
    """All one-dimensional flats of the root hyperplane arrangement, sorted canonically."""
    pos = rs.positive_roots()
    k = rs.rank - 1
    total = comb(len(pos), k)
    if total > max_subsets:
        raise RootSystemError(
            f"{rs.name}: {total} root subsets exceed the exhaustive limit {max_subsets}; use the random strategy"
        )
    seen: dict[Vector, None] = {}
    covered: set = set()
    for subset in itertools.combinations(range(len(pos)), k):
        # skip subsets already inside the orthogonal set of a known line
        if any(set(subset) <= c for c in covered):
            continue
        line = _line_from(rs, [pos[i] for i in subset])
        if line is None or line in seen:
            continue
        seen[line] = None
        covered.add(frozenset(i for i, r in enumerate(pos) if not dot(r, line)))
    return sorted(seen, key=_sort_key)


def random_lines(rs: RootSystem, count: int, rng: np.random.Generator, max_tries: int = 20) -> list[Vector]:
    """Distinct arrangement lines from seeded random subsets of rank - 1 positive roots."""
    pos = rs.positive_roots()
    fpos = np.array([to_float(r) for r in pos])
    fcon = np.array([to_float(c) for c in rs.constraints]).reshape(-1, rs.ambient_dim)
    k = rs.rank - 1
    seen: dict[Vector, None] = {}
    float_keys: set = set()
    for _ in range(count * max_tries):
        if len(seen) >= count:
            break
        idx = sorted(rng.choice(len(pos), size=k, replace=False).tolist())
        # cheap float screen; the exact solve runs only for lines not met before
        sv, vt = np.linalg.svd(np.vstack([fpos[idx], fcon]))[1:]
        if sv.size < rs.ambient_dim - 1 or sv[rs.ambient_dim - 2] < 1e-8:
            continue
        w = vt[-1] / vt[-1][np.flatnonzero(np.abs(vt[-1]) > 1e-9)[0]]
        key = tuple(np.round(w, 8))
        if key in float_keys:
            continue
        float_keys.add(key)
        line = _line_from(rs, [pos[i] for i in idx])
        if line is not None:
            seen.setdefault(line, None)
    return sorted(seen, key=_sort_key)


@dataclass
class ScanReport:
    type: str
    rank: int
    strategy: str
    samples: int
    seed: Optional[int]
    min_count: int
    argmin_first: list[str]
    argmin_second: list[str]
    passed: bool
    lines: int = 0

    def to_dict(self) -> dict:
        return {
            "type": self.type,
            "rank": self.rank,
            "strategy": self.strategy,
            "samples": self.samples,
            "seed": self.seed,
            "min_count": self.min_count,
            "argmin_first": self.argmin_first,
            "argmin_second": self.argmin_second,
            "pass": self.passed,
        }


def expected_minimum_ok(rs: RootSystem, min_count: int) -> bool:
    """Type A should bottom out at exactly 2; every other type at 4 or more."""
    return min_count == 2 if rs.type_label == "A" else min_count >= 4


def _pair_min(masks: np.ndarray, pairs: np.ndarray) -> tuple[int, int]:
    """Minimum count over index pairs and the position of its first occurrence."""
    n_roots = masks.shape[1]
    best, where = n_roots + 1, -1
    for start in range(0, len(pairs), 20_000):
        chunk = pairs[start : start + 20_000]
        counts = n_roots - (masks[chunk[:, 0]] | masks[chunk[:, 1]]).sum(axis=1)
        # lexicographically smallest pair among ties keeps the result order-independent
        m = int(counts.min())
        if m < best:
            best = m
            where = -1
        if m == best:
            cand = start + np.flatnonzero(counts == m)
            tie = cand[np.lexsort((pairs[cand, 1], pairs[cand, 0]))[0]]
            if where < 0 or tuple(pairs[tie]) < tuple(pairs[where]):
                where = int(tie)
    return best, where


def assertion_scan(rs: RootSystem, strategy: str = "random", samples: int = 100_000, seed: int = 0,
                   max_subsets: int = 250_000) -> ScanReport:
    """Minimum of ``count_nonorthogonal`` over arrangement lines.

    ``exhaustive-directions`` visits every pair of lines and certifies the
    minimum; ``random`` draws ``samples`` pairs from a seeded pool of lines.
    """
    if rs.rank < 2:
        raise RootSystemError("the scan needs rank >= 2")
    if strategy in ("exhaustive", "exhaustive-directions"):
        lines = arrangement_lines(rs, max_subsets)
        idx = np.arange(len(lines))
        pairs = np.array([(i, j) for i in idx for j in idx if i <= j])
        strategy, samples_used, seed_used = "exhaustive-directions", len(pairs), None
    elif strategy == "random":
        if samples < 1:
            raise RootSystemError("samples must be positive")
        rng = np.random.default_rng(seed)
        pool = max(8, int(2 * np.sqrt(samples)))
        lines = random_lines(rs, pool, rng)
        pairs = np.sort(rng.integers(0, len(lines), size=(samples, 2)), axis=1)
        samples_used, seed_used = samples, seed
    else:
        raise RootSystemError(f"unknown strategy {strategy!r}")
    masks = orthogonality_masks(rs, lines)
    best, where = _pair_min(masks, pairs)
    i, j = pairs[where]
    return ScanReport(
        type=rs.name,
        rank=rs.rank,
        strategy=strategy,
        samples=int(samples_used),
        seed=seed_used,
        min_count=best,
        argmin_first=[str(x) for x in lines[i]],
        argmin_second=[str(x) for x in lines[j]],
        passed=expected_minimum_ok(rs, best),
        lines=len(lines),
    )


def minimizing_pairs(rs: RootSystem, max_subsets: int = 250_000) -> tuple[int, list[tuple[Vector, Vector]]]:
    """Every pair of arrangement lines attaining the exhaustive minimum."""
    lines = arrangement_lines(rs, max_subsets)
    masks = orthogonality_masks(rs, lines)
    n = masks.shape[1]
    counts = n - (masks[:, None, :] | masks[None, :, :]).sum(axis=2)
    best = int(counts.min())
    ii, jj = np.nonzero(counts == best)
    return best, [(lines[i], lines[j]) for i, j in zip(ii, jj) if i <= j]


def extremal_pair(n: int) -> tuple[Vector, Vector]:
    """The A_n pair diag(-n, 1, ..., 1) and its transposed companion."""
    first = [1] * (n + 1)
    first[0] = -n
    second = [1] * (n + 1)
    second[1] = -n
    return qvec(first), qvec(second)


# ------------------------------------------------------- matrix cross-check
@dataclass
class BracketDimReport:
    root_count: int
    bracket_dim: int

    @property
    def agree(self) -> bool:
        return self.root_count == self.bracket_dim

    def to_dict(self) -> dict:
        return {"root_count": self.root_count, "bracket_dim": self.bracket_dim, "agree": self.agree}


def _diag_entries(v, size: int) -> np.ndarray:
    arr = np.asarray([float(x) for x in np.ravel(v)] if np.ndim(v) == 1 else v, dtype=complex)
    if arr.ndim == 1:
        if arr.size != size:
            raise RootSystemError(f"expected {size} diagonal entries")
        return arr.real
    if arr.shape != (size, size):
        raise RootSystemError(f"expected a {size} x {size} matrix")
    if np.abs(arr - np.diag(np.diag(arr))).max() > 1e-12:
        raise RootSystemError("inputs must be diagonal")
    d = np.diag(arr)
    return (d.imag if np.abs(d.real).max() < 1e-12 else d.real)


def _exact_entries(given, entries: np.ndarray) -> list:
    """Keep exact inputs exact; rationalise float entries."""
    if np.ndim(given) == 1 and all(isinstance(v, (int, Fraction, Q23)) for v in given):
        return list(given)
    return [Fraction(float(v)).limit_denominator(10**9) for v in entries]


def bracket_dim_crosscheck(n: int, first, second) -> BracketDimReport:
    """Compare dim [first, [second, su(n+1)]] with the A_n non-orthogonal root count.

    ``first`` and ``second`` are diagonal elements given by their n + 1 entries
    (trace zero) or as diagonal matrices.
    """
    from .lie import ad, build_su

    u = _diag_entries(first, n + 1)
    x = _diag_entries(second, n + 1)
    if abs(u.sum()) > 1e-12 or abs(x.sum()) > 1e-12:
        raise RootSystemError("diagonal entries must sum to zero")
    algebra = build_su(n + 1)
    Ucoord = algebra.from_matrix(np.diag(1j * u))
    Xcoord = algebra.from_matrix(np.diag(1j * x))
    comm = ad(algebra, Ucoord) @ Xcoord
    if np.abs(comm).max() > 1e-12:
        raise RootSystemError("inputs do not commute")
    M = ad(algebra, Ucoord) @ ad(algebra, Xcoord)
    sv = np.linalg.svd(M, compute_uv=False)
    bracket_dim = int((sv > 1e-9 * max(sv.max(), 1.0)).sum())
    rs = build_root_system("A", n)

    root_count = count_nonorthogonal(rs, _exact_entries(first, u), _exact_entries(second, x))
    return BracketDimReport(root_count, bracket_dim)
