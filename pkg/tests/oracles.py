"""Independent reference computations used by the tests.

Nothing here imports the code under test except for plain data containers.
"""

import itertools

import numpy as np
from scipy.linalg import expm


def algebra_matrix(coords, n):
    """(n+2)x(n+2) generator for coordinates (x_0..x_n, z_1..z_n)."""
    coords = list(coords)
    x, z = coords[: n + 1], coords[n + 1 :]
    dtype = object if all(isinstance(c, (int, np.integer)) for c in coords) else float
    m = np.zeros((n + 2, n + 2), dtype=dtype)
    m[0, 0] = -sum(z)
    for k in range(1, n + 1):
        m[k, k] = z[k - 1]
    for i in range(n + 1):
        m[i, n + 1] = x[i]
    return m


def matrix_coords(m, n):
    return [m[i, n + 1] for i in range(n + 1)] + [m[k, k] for k in range(1, n + 1)]


def commutator_coords(u, v, n):
    """Coordinates of [U, V] = UV - VU computed on explicit matrices (exact for ints)."""
    mu, mv = algebra_matrix(u, n), algebra_matrix(v, n)
    c = mu.dot(mv) - mv.dot(mu)
    # the result must be in the algebra: only last column and diagonal populated
    mask = np.ones_like(c, dtype=bool)
    mask[: n + 1, n + 1] = False
    mask[np.arange(n + 1), np.arange(n + 1)] = False
    assert not np.any(c[mask]), "commutator left the algebra"
    return matrix_coords(c, n)


def pullback_inner(u, v, n, lam):
    """Metric at the origin from sum exp(-2 z_i) dx_i^2 + lam^2 sum_{i=0..n} dz_i^2."""
    xu, zu = np.array(u[: n + 1], float), np.array(u[n + 1 :], float)
    xv, zv = np.array(v[: n + 1], float), np.array(v[n + 1 :], float)
    zu_full = np.concatenate(([-zu.sum()], zu))
    zv_full = np.concatenate(([-zv.sum()], zv))
    return float(xu @ xv + lam**2 * (zu_full @ zv_full))


def orbit_by_expm(coords, t, n):
    """Group coordinates of expm(t V) via scaling and squaring."""
    g = expm(t * algebra_matrix(np.asarray(coords, float), n).astype(float))
    x = g[: n + 1, n + 1]
    z = np.log(np.diag(g)[1 : n + 1])
    return np.concatenate((x, z))


def brute_dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def all_sign_tuples(k):
    return list(itertools.product((1, -1), repeat=k))


def brute_max_orthogonal_family(k, limit=None):
    """Largest set of mutually orthogonal +-1 tuples of length k, by plain
    recursion over all 2^k tuples (no normalisation, no pruning bound)."""
    tuples = all_sign_tuples(k)
    best = 0

    def grow(chosen, start):
        nonlocal best
        best = max(best, len(chosen))
        if limit is not None and best >= limit:
            return
        for idx in range(start, len(tuples)):
            t = tuples[idx]
            if all(brute_dot(t, tuples[c]) == 0 for c in chosen):
                grow(chosen + [idx], idx + 1)

    grow([], 0)
    return best


def brute_max_clique(adj_sets):
    """Maximum clique size by checking every subset (small graphs only)."""
    n = len(adj_sets)
    best = 0
    for mask in range(1 << n):
        verts = [i for i in range(n) if mask >> i & 1]
        if len(verts) <= best:
            continue
        if all(b in adj_sets[a] for a, b in itertools.combinations(verts, 2)):
            best = len(verts)
    return best


def matmul_hadamard(rows):
    a = np.array(rows, dtype=np.int64)
    return np.array_equal(a @ a.T, len(rows) * np.eye(len(rows), dtype=np.int64))
