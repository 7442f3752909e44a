from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alpha12.qfield import Q23, qvec
from alpha12.roots import (
    RootSystemError,
    arrangement_lines,
    assertion_scan,
    bracket_dim_crosscheck,
    build_root_system,
    check_axioms,
    count_nonorthogonal,
    minimizing_pairs,
    extremal_pair,
    parse_root_type,
    reflect,
)

TYPES = ["A1", "A2", "A3", "A5", "B2", "B3", "B5", "C3", "C4", "D4", "D5", "G2", "F4", "E6", "E7", "E8"]


@pytest.mark.parametrize("spec", TYPES)
def test_root_counts(spec):
    rs = build_root_system(spec)
    assert len(rs.roots) == rs.expected_count
    assert len(set(rs.roots)) == len(rs.roots)


def test_exceptional_counts():
    assert len(build_root_system("F4").roots) == 48
    assert len(build_root_system("E6").roots) == 72
    assert len(build_root_system("E7").roots) == 126
    assert len(build_root_system("E8").roots) == 240


@pytest.mark.parametrize("spec", ["A3", "B3", "C3", "D4", "G2", "F4", "E6", "E7"])
def test_root_system_axioms(spec):
    """Negation and reflection closure plus integral Cartan numbers, decided exactly."""
    assert all(check_axioms(build_root_system(spec)).values())


def test_type_a_roots_are_trace_free():
    rs = build_root_system("A4")
    assert rs.ambient_dim == 5
    assert all(sum(r, Q23(0)) == 0 for r in rs.roots)


@pytest.mark.parametrize("spec, rank", [("B", 1), ("C", 2), ("D", 3), ("A", 0)])
def test_invalid_ranks(spec, rank):
    with pytest.raises(RootSystemError):
        build_root_system(spec, rank)


def test_invalid_specs():
    for bad in ("H3", "E9", "B", "x2"):
        with pytest.raises(RootSystemError):
            build_root_system(bad)
    assert parse_root_type("e8") == ("E8", 8)


def test_count_examples():
    assert count_nonorthogonal(build_root_system("B2"), [1, 0], [1, 0]) == 6
    assert count_nonorthogonal(build_root_system("A2"), [-2, 1, 1], [1, -2, 1]) == 2
    assert count_nonorthogonal(build_root_system("D4"), [1, 1, 0, 0], [1, -1, 0, 0]) == 16


def test_count_input_errors():
    rs = build_root_system("A2")
    with pytest.raises(RootSystemError):
        count_nonorthogonal(rs, [0, 0, 0], [1, -1, 0])
    with pytest.raises(RootSystemError):
        count_nonorthogonal(rs, [1, 0, 0], [1, -1, 0])
    with pytest.raises(RootSystemError):
        count_nonorthogonal(rs, [1, -1], [1, -1, 0])


def test_irrational_coordinates_are_exact():
    rs = build_root_system("E6")
    r3 = Q23.sqrt3()
    U = qvec([0, 0, 0, 0, 0, 1])
    X = qvec([1, 1, 1, 1, 1, Q23(Fraction(1, 3)) * r3])
    # roots orthogonal to X only because sqrt3 * sqrt3/3 = 1 cancels exactly
    assert count_nonorthogonal(rs, U, X) == 12


def test_b2_random_scan():
    rep = assertion_scan(build_root_system("B2"), "random", samples=100_000, seed=1)
    assert rep.min_count == 4 and rep.passed
    assert (rep.argmin_first, rep.argmin_second) == (["1", "0"], ["0", "1"])


def test_g2_scan():
    rs = build_root_system("G2")
    assert assertion_scan(rs, "random", 10_000, 0).min_count == 8
    assert assertion_scan(rs, "exhaustive-directions").min_count == 8


@pytest.mark.parametrize("n", [2, 3, 4])
def test_type_a_minimum_and_pattern(n):
    rs = build_root_system("A", n)
    rep = assertion_scan(rs, "exhaustive-directions")
    assert rep.min_count == 2 and rep.passed
    U, X = extremal_pair(n)
    assert count_nonorthogonal(rs, U, X) == 2
    best, pairs = minimizing_pairs(rs)
    assert best == 2
    for U, X in pairs:
        for v in (U, X):
            # one entry of multiplicity 1, the rest equal
            values = sorted({x for x in v}, key=float)
            mult = sorted(sum(1 for x in v if x == val) for val in values)
            assert mult == [1, n]


def test_exhaustive_refuses_huge_enumerations():
    with pytest.raises(RootSystemError):
        assertion_scan(build_root_system("E8"), "exhaustive-directions")
    with pytest.raises(RootSystemError):
        assertion_scan(build_root_system("A1"), "random")
    with pytest.raises(RootSystemError):
        assertion_scan(build_root_system("B2"), "sideways")


def test_scan_is_deterministic():
    rs = build_root_system("D4")
    a = assertion_scan(rs, "random", 5000, 3).to_dict()
    b = assertion_scan(rs, "random", 5000, 3).to_dict()
    assert a == b


def test_lines_lie_on_the_arrangement():
    rs = build_root_system("B3")
    lines = arrangement_lines(rs)
    assert len(lines) == 13
    from alpha12.qfield import dot

    for line in lines:
        zeros = [r for r in rs.positive_roots() if not dot(r, line)]
        assert len(zeros) >= rs.rank - 1


small_ints = st.integers(-3, 3)


@given(st.lists(small_ints, min_size=4, max_size=4), st.lists(small_ints, min_size=4, max_size=4),
       st.integers(0, 23), st.integers(1, 5))
@settings(max_examples=60, deadline=None)
def test_count_symmetries(u, x, k, lam):
    rs = build_root_system("F4")
    if not any(u) or not any(x):
        return
    base = count_nonorthogonal(rs, u, x)
    assert base == count_nonorthogonal(rs, x, u)
    assert base == count_nonorthogonal(rs, [lam * c for c in u], [-c for c in x])
    root = rs.positive_roots()[k]
    assert base == count_nonorthogonal(rs, reflect(qvec(u), root), reflect(qvec(x), root))


def test_bracket_dim_crosscheck():
    rep = bracket_dim_crosscheck(2, [-2, 1, 1], [1, -2, 1])
    assert (rep.root_count, rep.bracket_dim) == (2, 2)
    rep = bracket_dim_crosscheck(2, [1, 2, -3], [3, -1, -2])
    assert (rep.root_count, rep.bracket_dim) == (6, 6)
    rep = bracket_dim_crosscheck(2, [1, 2, -3], [1, 2, -3])
    assert rep.bracket_dim == 6 and rep.agree


def test_bracket_dim_agrees_on_random_pairs(rng):
    for n in (2, 3, 4):
        for _ in range(5):
            # small integer entries hit degenerate strata often
            u = rng.integers(-2, 3, n + 1)
            x = rng.integers(-2, 3, n + 1)
            u[-1] -= u.sum()
            x[-1] -= x.sum()
            if not u.any() or not x.any():
                continue
            assert bracket_dim_crosscheck(n, [int(v) for v in u], [int(v) for v in x]).agree


def test_bracket_dim_rejects_non_diagonal():
    M = np.zeros((3, 3), dtype=complex)
    M[0, 1], M[1, 0] = 1, -1
    with pytest.raises(RootSystemError):
        bracket_dim_crosscheck(2, M, np.diag([1j, -1j, 0]))
    with pytest.raises(RootSystemError):
        bracket_dim_crosscheck(2, [1, 1, 1], [1, -1, 0])
