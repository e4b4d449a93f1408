import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from homgeo import signs
from homgeo.clique import Budget
from homgeo.signs import Maximality, OrthogonalFamily, SignTuple, SquareSignMatrix

from oracles import brute_dot, brute_max_orthogonal_family, matmul_hadamard

GOLDEN = Path(__file__).parent / "golden"

sign_lists = st.integers(1, 16).flatmap(
    lambda k: st.tuples(
        st.lists(st.sampled_from([1, -1]), min_size=k, max_size=k),
        st.lists(st.sampled_from([1, -1]), min_size=k, max_size=k),
    )
)


def T(*e):
    return SignTuple.from_entries(e)


def test_sign_tuple_representation():
    t = T(1, -1, -1, 1)
    assert t.bits == 0b0110
    assert t.entries() == (1, -1, -1, 1)
    assert (-t).entries() == (-1, 1, 1, -1)
    assert str(t) == "+1 -1 -1 +1"
    with pytest.raises(ValueError):
        SignTuple.from_entries([1, 0, 1])
    with pytest.raises(ValueError):
        SignTuple(2, 0b100)


def test_dot_examples():
    assert signs.dot(SignTuple.ones(4), SignTuple.ones(4)) == 4
    assert signs.dot(T(1, 1, 1, 1), T(-1, 1, -1, 1)) == 0
    assert signs.dot(T(1, 1, 1), T(-1, -1, 1)) == brute_dot((1, 1, 1), (-1, -1, 1)) == -1
    with pytest.raises(ValueError):
        signs.dot(T(1, 1), T(1, 1, 1))


@given(sign_lists)
def test_dot_matches_entrywise_sum(pair):
    u, v = pair
    d = signs.dot(SignTuple.from_entries(u), SignTuple.from_entries(v))
    assert d == brute_dot(u, v)
    assert -len(u) <= d <= len(u)
    assert (d - len(u)) % 2 == 0


# -- constructions -------------------------------------------------------------


def test_sylvester_examples():
    assert signs.sylvester(0).to_array().tolist() == [[1]]
    h1 = signs.sylvester(1)
    assert h1.to_array().tolist() == [[1, 1], [1, -1]]
    assert (h1.to_array() @ h1.to_array().T).tolist() == [[2, 0], [0, 2]]
    h3 = signs.sylvester(3)
    assert h3.k == 8 and signs.is_hadamard(h3) and matmul_hadamard(h3.to_array())
    with pytest.raises(ValueError):
        signs.sylvester(9)  # 512 > default cap
    assert signs.sylvester(9, cap=512).k == 512


@pytest.mark.parametrize("q", [3, 7, 11, 19, 23, 31, 43])
def test_paley_is_hadamard(q):
    h = signs.paley(q)
    assert h.k == q + 1
    assert signs.is_hadamard(h)
    assert matmul_hadamard(h.to_array())


@pytest.mark.parametrize("q, reason", [(5, "mod 4"), (9, "not prime"), (13, "mod 4"), (1, "not prime"), (15, "not prime")])
def test_paley_rejects(q, reason):
    with pytest.raises(ValueError, match=reason):
        signs.paley(q)


def test_paley_cap():
    with pytest.raises(ValueError, match="cap"):
        signs.paley(23, cap=16)


def test_kronecker():
    h = signs.kronecker(signs.paley(3), signs.sylvester(1))
    assert h.k == 8 and signs.is_hadamard(h)
    h24 = signs.kronecker(signs.sylvester(1), signs.paley(11))
    assert h24.k == 24 and signs.is_hadamard(h24)


def test_is_hadamard_examples():
    assert signs.is_hadamard(signs.sylvester(2))
    assert signs.is_hadamard(SquareSignMatrix.from_array([[1]]))
    a = signs.sylvester(2).to_array()
    a[1, 2] *= -1
    bad = SquareSignMatrix.from_array(a)
    assert not signs.is_hadamard(bad)
    gram = a @ a.T
    off = gram[~np.eye(4, dtype=bool)]
    assert set(np.abs(off[off != 0]).tolist()) == {2}
    i, j, d = signs.first_violation(bad)
    assert (i, j) == (0, 1) and abs(d) == 2
    assert signs.first_violation(signs.sylvester(2)) is None


def test_construct_hadamard_orders():
    for k in (1, 2, 4, 8, 12, 16, 20, 24, 32, 40, 44, 48):
        h = signs.construct_hadamard(k)
        assert h is not None and h.k == k and signs.is_hadamard(h), k
    # 28 and 36 would need the second Paley construction
    for k in (3, 6, 10, 14, 28, 36):
        assert signs.construct_hadamard(k) is None


def test_construct_by_method_errors():
    with pytest.raises(ValueError, match="power of 2"):
        signs.construct_by_method("sylvester", 6)
    with pytest.raises(ValueError, match="reachable orders"):
        signs.construct_by_method("paley", 16)
    with pytest.raises(ValueError, match="reachable orders"):
        signs.construct_by_method("kronecker", 10)
    with pytest.raises(ValueError):
        signs.construct_by_method("williamson", 12)
    assert signs.construct_by_method("kronecker", 8).k == 8


# -- family <-> matrix ----------------------------------------------------------


def test_hadamard_family_roundtrip():
    fam = signs.hadamard_to_family(signs.sylvester(2))
    assert fam.size == 4 and fam.members[0] == SignTuple.ones(4)
    assert all(m.entries()[0] == 1 for m in fam.members)
    back = signs.family_to_hadamard(fam)
    assert signs.is_hadamard(back)
    fam12 = signs.hadamard_to_family(signs.paley(11))
    assert signs.is_hadamard(signs.family_to_hadamard(fam12))


def test_family_to_hadamard_needs_full_family():
    fam = OrthogonalFamily(4, [SignTuple.ones(4), T(1, -1, 1, -1)], Maximality.CERTIFIED)
    with pytest.raises(ValueError):
        signs.family_to_hadamard(fam)
    with pytest.raises(ValueError):
        signs.hadamard_to_family(SquareSignMatrix.from_array([[1, 1], [1, 1]]))


def test_family_rejects_non_orthogonal_members():
    with pytest.raises(ValueError):
        OrthogonalFamily(3, [SignTuple.ones(3), T(1, 1, -1)], Maximality.CERTIFIED)
    with pytest.raises(ValueError):
        OrthogonalFamily(2, [SignTuple.ones(2), SignTuple.ones(2)], Maximality.CERTIFIED)


# -- search ------------------------------------------------------------------------


@pytest.mark.parametrize("k, size", [(1, 1), (2, 2), (3, 1), (4, 4), (5, 1), (6, 2), (7, 1), (8, 8), (10, 2), (12, 12)])
@pytest.mark.parametrize("seed", [True, False])
def test_max_orthogonal_tuples(k, size, seed):
    fam = signs.max_orthogonal_tuples(k, seed=seed)
    assert fam.size == size
    assert fam.maximality is Maximality.CERTIFIED
    assert fam.members[0] == SignTuple.ones(k)
    assert all(m.entries()[0] == 1 for m in fam.members)
    for u, v in itertools.combinations(fam.members, 2):
        assert signs.dot(u, v) == 0


@pytest.mark.parametrize("k", range(1, 7))
def test_canonical_maximum_equals_unrestricted_maximum(k):
    assert signs.max_orthogonal_tuples(k, seed=False).size == brute_max_orthogonal_family(k)


def test_search_is_deterministic():
    a = signs.max_orthogonal_tuples(12, seed=False)
    b = signs.max_orthogonal_tuples(12, seed=False)
    assert a.members == b.members and a.nodes == b.nodes


def test_parallel_search_matches_sequential():
    for k in (6, 8, 10):
        seq = signs.max_orthogonal_tuples(k, seed=False)
        par = signs.max_orthogonal_tuples(k, seed=False, jobs=2)
        assert par.size == seq.size and par.maximality is Maximality.CERTIFIED
        again = signs.max_orthogonal_tuples(k, seed=False, jobs=2)
        assert par.members == again.members


def test_budget_exhaustion_gives_lower_bound():
    fam = signs.max_orthogonal_tuples(12, Budget(max_nodes=2), seed=False)
    assert fam.maximality is Maximality.LOWER_BOUND_ONLY
    assert fam.size >= 1
    seeded = signs.max_orthogonal_tuples(10, Budget(max_nodes=0), seed=True)
    assert seeded.maximality is Maximality.LOWER_BOUND_ONLY and seeded.size == 2


def test_above_cap_uses_constructions():
    fam = signs.max_orthogonal_tuples(16)
    assert fam.size == 16 and fam.proof == "dimension bound" and fam.certified
    assert signs.is_hadamard(signs.family_to_hadamard(fam))
    odd = signs.max_orthogonal_tuples(15, cap=14)
    assert odd.size == 1 and odd.maximality is Maximality.LOWER_BOUND_ONLY
    two = signs.max_orthogonal_tuples(18)
    assert two.size == 2 and two.maximality is Maximality.LOWER_BOUND_ONLY


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 7])
def test_orthogonal_pair_count(k):
    brute = sum(
        1 for u, v in itertools.combinations([t for t in itertools.product((1, -1), repeat=k) if t[0] == 1], 2)
        if brute_dot(u, v) == 0
    )
    assert signs.orthogonal_pair_count(k) == brute
    full = sum(1 for u, v in itertools.combinations(itertools.product((1, -1), repeat=k), 2) if brute_dot(u, v) == 0)
    assert signs.orthogonal_pair_count(k, canonical=False) == full


def test_canonical_tuples_order():
    ts = signs.canonical_tuples(3)
    assert [t.entries() for t in ts] == [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)]


# -- text format -------------------------------------------------------------------


def test_parse_both_token_styles():
    a = signs.parse_matrix("+ +\n+ -\n")
    b = signs.parse_matrix("+1 +1\n+1 -1\n")
    assert a == b == signs.sylvester(1)


def test_parse_errors():
    with pytest.raises(ValueError, match="square"):
        signs.parse_matrix("+ +\n+\n")
    with pytest.raises(ValueError, match="bad entry"):
        signs.parse_matrix("+ x\n+ -\n")
    with pytest.raises(ValueError):
        signs.parse_matrix("")


def test_format_golden(tmp_path):
    path = tmp_path / "h4.txt"
    signs.write_matrix(signs.sylvester(2), path)
    assert path.read_text() == (GOLDEN / "h4_sylvester.txt").read_text()
    assert signs.read_matrix(path) == signs.sylvester(2)
    assert signs.format_matrix(signs.paley(3)) == (GOLDEN / "h4_paley.txt").read_text()
