"""Acceptance suite, one test group per criterion.

The summary hook in conftest.py prints a PASS/FAIL line per criterion at the
end of the run.  Wall-clock limits are asserted inside the tests.
"""

import itertools
import time

import numpy as np
import pytest

from homgeo import algebra as alg
from homgeo import riemann as rm
from homgeo import signs
from homgeo.algebra import AlgebraVector, ModelParams
from homgeo.riemann import GroupPoint
from homgeo.signs import Maximality

from oracles import commutator_coords

criterion = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


# -- 1 ---------------------------------------------------------------------------


def _criterion_sample(n, rng, count):
    """Half integer, half continuous vectors, each with planted geodesic
    vectors and near misses so both outcomes are well represented."""
    d = 2 * n + 1
    half = count // 2
    ints = rng.integers(-3, 4, size=(half, d))
    planted = rng.random(half) < 0.25
    for m in np.flatnonzero(planted):
        if rng.random() < 0.5:
            ints[m, : n + 1] = 0
        else:
            a0 = rng.integers(1, 4) * rng.choice([1, -1])
            ints[m, : n + 1] = a0 * np.r_[1, rng.choice([1, -1], size=n)]
            ints[m, n + 1 :] = 0
            if rng.random() < 0.3:  # break one condition by a single unit
                ints[m, rng.integers(0, d)] += 1
    floats = rng.normal(size=(count - half, d))
    planted = rng.random(count - half) < 0.25
    for m in np.flatnonzero(planted):
        scale = rng.uniform(0.1, 5.0)
        if rng.random() < 0.5:
            floats[m, : n + 1] = 0
        else:
            floats[m, : n + 1] = scale * rng.choice([1.0, -1.0], size=n + 1)
            floats[m, n + 1 :] = 0
        if rng.random() < 0.3:  # near miss, far above the tolerance
            floats[m, rng.integers(0, d)] += 1e-4
    return ints.astype(np.int64), floats


@criterion(1, "criterion equivalence, n=1..8, 10^4 vectors each")
def test_c01_criterion_equivalence():
    rng = np.random.default_rng(2024)
    disagreements = 0
    hits = 0
    with Timer() as t:
        for n in range(1, 9):
            params = ModelParams(n)
            ints, floats = _criterion_sample(n, rng, 10_000)
            for block in (ints, floats):
                crit = alg.is_geodesic_batch(block, params, tol=1e-9)
                closed = alg.closed_form_batch(block, params, tol=1e-9)
                disagreements += int(np.count_nonzero(crit != closed))
                hits += int(crit.sum())
                # scalar definition on a subset, planted vectors included
                idx = np.r_[np.flatnonzero(crit)[:60], np.arange(65)]
                for m in idx:
                    v = AlgebraVector.from_coords(block[m])
                    s = alg.is_geodesic_vector(v, params, tol=1e-9)
                    disagreements += int(s != alg.closed_form_conditions(v, params, tol=1e-9))
                    disagreements += int(s != bool(crit[m]))
    assert disagreements == 0
    assert hits > 1000  # both outcomes exercised
    assert t.seconds < 10.0, t.seconds


# -- 2 ---------------------------------------------------------------------------


@criterion(2, "classification counts, n=1..10")
def test_c02_classification_counts():
    with Timer() as t:
        for n in range(1, 11):
            rep = alg.classify(ModelParams(n), samples=200, seed=n)
            assert len(rep.w_basis) == n
            assert np.linalg.matrix_rank(np.array([v.coords for v in rep.w_basis], float)) == n
            assert len(rep.sign_rays) == 2**n
            assert len({r.bits for r in rep.sign_rays}) == 2**n
            assert all(rep.generator_checks)
            assert all(alg.is_geodesic_vector(v, ModelParams(n)) for v in rep.generators)
            assert rep.outside_failures == rep.outside_samples
    assert t.seconds < 5.0, t.seconds


# -- 3 ---------------------------------------------------------------------------


@criterion(3, "bracket oracle, n=1..4")
def test_c03_bracket_oracle():
    rng = np.random.default_rng(3)
    for n in range(1, 5):
        for u, v in itertools.product(alg.basis(n), repeat=2):
            assert alg.bracket(u, v).coords.tolist() == commutator_coords(u.coords.tolist(), v.coords.tolist(), n)
        for _ in range(1000):
            cu = rng.integers(-9, 10, 2 * n + 1)
            cv = rng.integers(-9, 10, 2 * n + 1)
            got = alg.bracket(AlgebraVector.from_coords(cu), AlgebraVector.from_coords(cv)).coords
            assert got.dtype.kind == "i"
            assert got.tolist() == commutator_coords(cu.tolist(), cv.tolist(), n)


# -- 4 ---------------------------------------------------------------------------


@criterion(4, "parity obstruction, odd k=3..13, exhaustive")
def test_c04_parity_obstruction():
    with Timer() as t:
        for k in (3, 5, 7, 9, 11, 13):
            assert signs.orthogonal_pair_count(k, canonical=False) == 0
            fam = signs.max_orthogonal_tuples(k)
            assert fam.size == 1 and fam.certified
    assert t.seconds < 30.0, t.seconds


# -- 5 ---------------------------------------------------------------------------


@criterion(5, "mod-4 obstruction, k=2,6,10")
@pytest.mark.parametrize("seed", [True, False], ids=["seeded", "unseeded"])
def test_c05_mod4_obstruction(seed):
    for k in (2, 6, 10):
        with Timer() as t:
            fam = signs.max_orthogonal_tuples(k, seed=seed)
        assert fam.size == 2 and fam.maximality is Maximality.CERTIFIED
        assert t.seconds < 60.0, (k, t.seconds)


# -- 6 ---------------------------------------------------------------------------


@criterion(6, "Hadamard equivalence, k=4,8,12")
@pytest.mark.parametrize("seed", [True, False], ids=["seeded", "unseeded"])
def test_c06_hadamard_equivalence(seed):
    for k in (4, 8, 12):
        with Timer() as t:
            fam = signs.max_orthogonal_tuples(k, seed=seed)
        assert fam.size == k and fam.maximality is Maximality.CERTIFIED
        h = signs.family_to_hadamard(fam)
        assert signs.is_hadamard(h)
        a = h.to_array()
        assert np.array_equal(a @ a.T, k * np.eye(k, dtype=np.int64))
        assert t.seconds < 600.0, (k, t.seconds)


# -- 7 ---------------------------------------------------------------------------


@criterion(7, "Hadamard constructions")
def test_c07_constructions():
    with Timer() as t:
        for order in (1, 2, 4, 8, 16):
            assert signs.is_hadamard(signs.construct_by_method("sylvester", order))
        for order in (4, 12, 24):
            assert signs.is_hadamard(signs.construct_by_method("paley", order))
        h8 = signs.kronecker(signs.paley(3), signs.sylvester(1))
        assert h8.k == 8 and signs.is_hadamard(h8)
        assert signs.is_hadamard(signs.construct_by_method("kronecker", 8))
    assert t.seconds < 1.0, t.seconds


# -- 8 ---------------------------------------------------------------------------


@criterion(8, "maximal orthogonal homogeneous sets")
@pytest.mark.parametrize("n, total", [(2, 3), (4, 5), (1, 3), (5, 7), (3, 7), (7, 15)])
def test_c08_max_orthogonal_sets(n, total):
    params = ModelParams(n)
    res = alg.max_orthogonal_geodesic_set(params)
    assert res.size == total
    assert res.maximality is Maximality.CERTIFIED
    assert all(alg.is_geodesic_vector(v, params) for v in res.vectors)
    gram = rm.tangent_gram(res.vectors, params)
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() <= 1e-12


# -- 9 ---------------------------------------------------------------------------


@criterion(9, "linear independence, n=1..8")
def test_c09_independent_family():
    for n in range(1, 9):
        params = ModelParams(n)
        fam = alg.independent_geodesic_family(params)
        assert len(fam) == 2 * n + 1
        assert all(alg.is_geodesic_vector(v, params) for v in fam)
        assert alg.coefficient_rank(fam) == 2 * n + 1


# -- 10 --------------------------------------------------------------------------


@criterion(10, "numerical geodesic verification, n=1..3")
def test_c10_numerical_verification():
    grid = rm.time_grid(1.0, 1e-3)
    with Timer() as t:
        for n in (1, 2, 3):
            params = ModelParams(n)
            rep = alg.classify(params, samples=10, seed=0)
            for v in rep.generators:
                orbit = rm.orbit_curve(v, grid, params)
                assert rm.geodesic_residual(orbit, params) < 1e-6
                num = rm.integrate_geodesic(GroupPoint.origin(n), orbit.v[0], params, grid, step=1e-3)
                assert np.abs(num.q - orbit.q).max() < 1e-6
                assert rm.energy_drift(num, params) <= 1e-8
        p1 = ModelParams(1, 1.0)
        assert rm.geodesic_residual(rm.orbit_curve(alg.X(0, 1), grid, p1), p1) >= 0.1
    assert t.seconds < 60.0, t.seconds


# -- 11 --------------------------------------------------------------------------


@criterion(11, "Christoffel cross-check, n=1..3")
def test_c11_christoffel_cross_check():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3):
        params = ModelParams(n)
        worst = 0.0
        for _ in range(100):
            p = GroupPoint(rng.uniform(-1, 1, n + 1), rng.uniform(-1, 1, n))
            worst = max(worst, np.abs(rm.christoffel(p, params) - rm.christoffel_fd(p, params, h=1e-5)).max())
        assert worst < 1e-6, (n, worst)
