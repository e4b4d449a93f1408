"""Lie algebra of the unimodular solvable group of diagonal-plus-translation matrices.

The group consists of the (n+2)x(n+2) matrices::

    [ e^{z_0}   0    ...    0     x_0 ]
    [   0    e^{z_1} ...    0     x_1 ]
    [  ...                        ... ]
    [   0       0    ... e^{z_n}  x_n ]
    [   0       0    ...    0      1  ]

with z_0 = -(z_1 + ... + z_n).  Its Lie algebra has the ordered basis
X_0..X_n, Z_1..Z_n where X_i = E_{i,n+1} and Z_k = E_{kk} - E_{00}.  A vector
is stored as the X-coefficients ``a`` (length n+1) and Z-coefficients ``b``
(length n); the derived diagonal entry c_0 = -(b_1+...+b_n) is computed, never
stored.

The only non-zero basis brackets are [Z_k, X_k] = X_k and [Z_k, X_0] = -X_0,
so the derived algebra sits inside the abelian X-span.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .clique import Budget
from .signs import (
    Maximality,
    OrthogonalFamily,
    SignTuple,
    max_orthogonal_tuples,
)

DEFAULT_TOL = 1e-9

METRIC_READING_NOTE = (
    "z-part of the metric is taken as lambda^2 * sum_{k=0..n} dz_k^2 with "
    "z_0 = -(z_1+...+z_n), i.e. Gram block lambda^2 (I + J) on Z_1..Z_n; the "
    "product reading lambda^2 * sum_{k,j} dz_k dz_j = lambda^2 (dz_0+...+dz_n)^2 "
    "vanishes identically under the trace constraint and is not a Riemannian metric"
)
CONDITION_MISPRINT_NOTE = (
    "closed-form conditions use a_i * b_i = 0 for i = 1..n; the variant "
    "a_i * b_1 = 0 admits non-geodesic solutions (e.g. n = 3, a = (1,1,1,1), "
    "b = (0,1,-1)) and is not used"
)
ZERO_VECTOR_NOTE = "the zero vector satisfies the criterion trivially but is not a geodesic vector"


@dataclass(frozen=True)
class ModelParams:
    n: int
    lam: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ValueError(f"lambda must be a positive real, got {self.lam!r}")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1


@dataclass(frozen=True, eq=False)
class AlgebraVector:
    """Element sum a_i X_i + sum b_k Z_k of the Lie algebra."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        if a.ndim != 1 or b.ndim != 1 or a.size != b.size + 1:
            raise ValueError(
                f"need len(a) = len(b) + 1, got shapes {a.shape} and {b.shape}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.size

    @property
    def c(self) -> np.ndarray:
        """Diagonal of the matrix representative: (c_0, b_1, ..., b_n)."""
        return np.concatenate(([-self.b.sum()], self.b))

    @property
    def c0(self):
        return -self.b.sum()

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate((self.a, self.b))

    @property
    def is_integral(self) -> bool:
        return _is_int_array(self.a) and _is_int_array(self.b)

    def is_zero(self) -> bool:
        return not np.any(self.a) and not np.any(self.b)

    @classmethod
    def from_coords(cls, coords: Sequence[float], n: Optional[int] = None) -> "AlgebraVector":
        coords = np.asarray(coords)
        if coords.ndim != 1 or coords.size % 2 != 1 or coords.size < 3:
            raise ValueError(f"expected 2n+1 >= 3 coordinates, got {coords.size}")
        m = (coords.size - 1) // 2
        if n is not None and m != n:
            raise ValueError(f"expected {2 * n + 1} coordinates for n={n}, got {coords.size}")
        return cls(coords[: m + 1], coords[m + 1 :])

    @classmethod
    def zero(cls, n: int) -> "AlgebraVector":
        return cls(np.zeros(n + 1, dtype=np.int64), np.zeros(n, dtype=np.int64))

    def __add__(self, other: "AlgebraVector") -> "AlgebraVector":
        _conform(self, other)
        return AlgebraVector(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "AlgebraVector") -> "AlgebraVector":
        _conform(self, other)
        return AlgebraVector(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "AlgebraVector":
        return AlgebraVector(-self.a, -self.b)

    def __mul__(self, s) -> "AlgebraVector":
        return AlgebraVector(self.a * s, self.b * s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraVector):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coords, other.coords)

    def __repr__(self) -> str:
        return f"AlgebraVector(a={self.a.tolist()}, b={self.b.tolist()})"


def _is_int_array(x: np.ndarray) -> bool:
    return np.issubdtype(x.dtype, np.integer)


def _conform(u: AlgebraVector, v: AlgebraVector, params: Optional[ModelParams] = None) -> None:
    if u.n != v.n:
        raise ValueError(f"dimension mismatch: n={u.n} vs n={v.n}")
    if params is not None and u.n != params.n:
        raise ValueError(f"vector has n={u.n} but params have n={params.n}")


def X(i: int, n: int) -> AlgebraVector:
    if not 0 <= i <= n:
        raise IndexError(f"X_{i} out of range for n={n}")
    a = np.zeros(n + 1, dtype=np.int64)
    a[i] = 1
    return AlgebraVector(a, np.zeros(n, dtype=np.int64))


def Z(k: int, n: int) -> AlgebraVector:
    if not 1 <= k <= n:
        raise IndexError(f"Z_{k} out of range for n={n}")
    b = np.zeros(n, dtype=np.int64)
    b[k - 1] = 1
    return AlgebraVector(np.zeros(n + 1, dtype=np.int64), b)


def basis(n: int) -> list[AlgebraVector]:
    """Ordered basis X_0..X_n, Z_1..Z_n."""
    return [X(i, n) for i in range(n + 1)] + [Z(k, n) for k in range(1, n + 1)]


def basis_labels(n: int) -> list[str]:
    return [f"X_{i}" for i in range(n + 1)] + [f"Z_{k}" for k in range(1, n + 1)]


def sign_ray_vector(eps: Sequence[int]) -> AlgebraVector:
    """X_0 + eps_1 X_1 + ... + eps_n X_n."""
    eps = np.asarray(eps, dtype=np.int64)
    return AlgebraVector(np.concatenate(([1], eps)), np.zeros(eps.size, dtype=np.int64))


# -- matrix embedding -------------------------------------------------------


def to_matrix(v: AlgebraVector) -> np.ndarray:
    n = v.n
    m = np.zeros((n + 2, n + 2), dtype=np.result_type(v.a, v.b))
    m[np.arange(n + 1), np.arange(n + 1)] = v.c
    m[: n + 1, n + 1] = v.a
    return m


def from_matrix(m: np.ndarray) -> AlgebraVector:
    """Inverse of :func:`to_matrix`; rejects matrices outside the algebra."""
    m = np.asarray(m)
    size = m.shape[0]
    if m.shape != (size, size) or size < 3:
        raise ValueError(f"expected a square matrix of order >= 3, got {m.shape}")
    n = size - 2
    diag = np.diag(m)[: n + 1]
    rest = m.copy()
    rest[np.arange(n + 1), np.arange(n + 1)] = 0
    rest[: n + 1, n + 1] = 0
    if np.any(rest) or m[n + 1, n + 1] != 0 or diag.sum() != 0:
        raise ValueError("matrix is not in the Lie algebra")
    return AlgebraVector(m[: n + 1, n + 1].copy(), diag[1:].copy())


# -- bracket and metric ------------------------------------------------------


def bracket(u: AlgebraVector, v: AlgebraVector, params: Optional[ModelParams] = None) -> AlgebraVector:
    """Lie bracket [u, v]; the Z-part of the result is always zero."""
    _conform(u, v, params)
    a = u.c * v.a - v.c * u.a
    return AlgebraVector(a, np.zeros_like(u.b * v.b))


def structure_constants(n: int) -> np.ndarray:
    """``C[i, j, k]`` = coefficient of e_k in [e_i, e_j] over the ordered basis."""
    d = 2 * n + 1
    C = np.zeros((d, d, d), dtype=np.int64)
    for k in range(1, n + 1):
        zk = n + k
        C[zk, k, k] = 1
        C[k, zk, k] = -1
        C[zk, 0, 0] = -1
        C[0, zk, 0] = 1
    return C


def gram_matrix(params: ModelParams) -> np.ndarray:
    """Inner product at the identity: I on the X-span, lambda^2 (I+J) on Z."""
    n = params.n
    g = np.zeros((params.dim, params.dim))
    g[: n + 1, : n + 1] = np.eye(n + 1)
    g[n + 1 :, n + 1 :] = params.lam**2 * (np.eye(n) + np.ones((n, n)))
    return g


def inner(u: AlgebraVector, v: AlgebraVector, params: ModelParams):
    _conform(u, v, params)
    xpart = u.a @ v.a
    zb = u.b @ v.b + u.b.sum() * v.b.sum()
    if _is_int_array(u.b) and _is_int_array(v.b) and zb == 0:
        return xpart
    return xpart + params.lam**2 * zb


def norm_sq(v: AlgebraVector, params: ModelParams):
    return inner(v, v, params)


# -- geodesic criterion ------------------------------------------------------


def criterion_values(v: AlgebraVector, params: ModelParams) -> np.ndarray:
    """<v, [v, e_j]> for every basis element e_j."""
    _conform(v, v, params)
    return np.array([inner(v, bracket(v, e, params), params) for e in basis(params.n)])


def _scale(v: AlgebraVector, params: ModelParams) -> float:
    return max(1.0, float(norm_sq(v, params)))


def is_geodesic_vector(v: AlgebraVector, params: ModelParams, tol: float = DEFAULT_TOL) -> bool:
    """Whether <v, [v, Y]> = 0 for all Y.

    Exact for integer coefficients; otherwise each value is compared with
    ``tol * max(1, <v, v>)``.  The zero vector passes (see ZERO_VECTOR_NOTE).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = criterion_values(v, params)
    if v.is_integral:
        return not np.any(vals)
    return bool(np.all(np.abs(vals) <= tol * _scale(v, params)))


def closed_form_residuals(v: AlgebraVector) -> dict[str, float]:
    """Left-hand sides of the polynomial system characterising geodesic vectors.

    ``a_0*(b_1+...+b_n)``, ``a_i*b_i`` for i >= 1 and ``a_0^2 - a_i^2``.
    """
    out = {"a_0*(b_1+...+b_n)": v.a[0] * v.b.sum()}
    for i in range(1, v.n + 1):
        out[f"a_{i}*b_{i}"] = v.a[i] * v.b[i - 1]
    for i in range(1, v.n + 1):
        out[f"a_0^2-a_{i}^2"] = v.a[0] ** 2 - v.a[i] ** 2
    return out


def closed_form_conditions(v: AlgebraVector, params: ModelParams, tol: float = DEFAULT_TOL) -> bool:
    _conform(v, v, params)
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = np.array(list(closed_form_residuals(v).values()))
    if v.is_integral:
        return not np.any(vals)
    return bool(np.all(np.abs(vals) <= tol * _scale(v, params)))


def failing_conditions(v: AlgebraVector, params: ModelParams, tol: float = DEFAULT_TOL) -> list[str]:
    scale = 0.0 if v.is_integral else tol * _scale(v, params)
    return [k for k, val in closed_form_residuals(v).items() if abs(val) > scale]


# Batched versions, rows are coordinate vectors (x_0..x_n, z_1..z_n).


def _batch_scale(coords: np.ndarray, params: ModelParams) -> np.ndarray:
    g = gram_matrix(params)
    return np.maximum(1.0, np.einsum("mi,ij,mj->m", coords, g, coords))


def is_geodesic_batch(coords: np.ndarray, params: ModelParams, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Criterion via structure constants and the Gram matrix, one row per vector."""
    coords = np.atleast_2d(coords)
    C = structure_constants(params.n)
    ad = np.einsum("mi,ijk->mjk", coords, C)  # ad[m, j] = [v_m, e_j]
    if _is_int_array(coords):
        # Brackets lie in the X-span where the Gram block is the identity.
        vals = np.einsum("mk,mjk->mj", coords, ad)
        return ~np.any(vals, axis=1)
    g = gram_matrix(params)
    vals = np.einsum("mk,kl,mjl->mj", coords, g, ad)
    return np.all(np.abs(vals) <= tol * _batch_scale(coords, params)[:, None], axis=1)


def closed_form_batch(coords: np.ndarray, params: ModelParams, tol: float = DEFAULT_TOL) -> np.ndarray:
    coords = np.atleast_2d(coords)
    n = params.n
    a, b = coords[:, : n + 1], coords[:, n + 1 :]
    vals = np.concatenate(
        [
            (a[:, 0] * b.sum(axis=1))[:, None],
            a[:, 1:] * b,
            a[:, :1] ** 2 - a[:, 1:] ** 2,
        ],
        axis=1,
    )
    if _is_int_array(coords):
        return ~np.any(vals, axis=1)
    return np.all(np.abs(vals) <= tol * _batch_scale(coords, params)[:, None], axis=1)


# -- classification ----------------------------------------------------------


def distance_to_geodesic_set(coords: np.ndarray, n: int) -> np.ndarray:
    """Euclidean coordinate distance from each row to W union the sign-ray lines.

    For the rays, the closest line is the one with eps_i = sign(a_0 a_i), since
    that maximises |<a, (1, eps)>|.
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    a, b = coords[:, : n + 1], coords[:, n + 1 :]
    d_w = np.linalg.norm(a, axis=1)
    proj = np.abs(a).sum(axis=1) / np.sqrt(n + 1)
    d_ray_sq = (a**2).sum(axis=1) - proj**2 + (b**2).sum(axis=1)
    return np.minimum(d_w, np.sqrt(np.maximum(d_ray_sq, 0.0)))


@dataclass
class ClassificationReport:
    n: int
    w_basis: list[AlgebraVector]
    sign_rays: list[SignTuple]
    generator_checks: list[bool]
    outside_samples: int = 0
    outside_failures: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def ray_vectors(self) -> list[AlgebraVector]:
        return [sign_ray_vector(s.entries()) for s in self.sign_rays]

    @property
    def generators(self) -> list[AlgebraVector]:
        return self.w_basis + self.ray_vectors

    @property
    def certified(self) -> bool:
        return all(self.generator_checks) and self.outside_failures == self.outside_samples


def classify(
    params: ModelParams,
    *,
    samples: int = 1000,
    sample_bound: int = 8,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> ClassificationReport:
    """All geodesic vectors: the subspace W = span(Z_1..Z_n) and 2^n sign rays.

    Each generator is checked with the criterion.  For n <= ``sample_bound``
    ``samples`` random vectors away from the reported set are drawn and must
    fail the criterion.
    """
    n = params.n
    w = [Z(k, n) for k in range(1, n + 1)]
    rays = [SignTuple.from_entries(e) for e in itertools.product((1, -1), repeat=n)]
    report = ClassificationReport(n, w, rays, [], notes=[ZERO_VECTOR_NOTE])
    report.generator_checks = [is_geodesic_vector(v, params, tol) for v in report.generators]
    if n <= sample_bound and samples > 0:
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((samples, params.dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts = pts[distance_to_geodesic_set(pts, n) > 1e-2]
        report.outside_samples = len(pts)
        report.outside_failures = int(np.count_nonzero(~is_geodesic_batch(pts, params, tol)))
    return report


# -- orthogonal and independent families -------------------------------------


def orthogonal_w_basis(params: ModelParams) -> list[AlgebraVector]:
    """Gram-Schmidt of Z_1, Z_2, ... against lambda^2 (I+J), no pivoting."""
    out: list[AlgebraVector] = []
    for k in range(1, params.n + 1):
        v = Z(k, params.n) * 1.0
        for u in out:
            v = v - u * (inner(v, u, params) / inner(u, u, params))
        out.append(v * (1.0 / np.sqrt(inner(v, v, params))))
    return out


def orthogonality_case(n: int) -> str:
    k = n + 1
    if k % 2:
        return "odd"
    if k % 4:
        return "even, not divisible by 4"
    return "divisible by 4"


def predicted_max_orthogonal(n: int) -> Optional[int]:
    """Closed-form maximum for the case of n+1; the last case assumes a Hadamard matrix of order n+1."""
    case = orthogonality_case(n)
    if case == "odd":
        return n + 1
    if case == "even, not divisible by 4":
        return n + 2
    return 2 * n + 1


@dataclass
class OrthogonalGeodesicSet:
    params: ModelParams
    w_part: list[AlgebraVector]
    family: OrthogonalFamily

    @property
    def b_part(self) -> list[AlgebraVector]:
        return [AlgebraVector(np.array(m.entries(), dtype=np.int64), np.zeros(self.params.n, dtype=np.int64))
                for m in self.family.members]

    @property
    def vectors(self) -> list[AlgebraVector]:
        return self.w_part + self.b_part

    @property
    def size(self) -> int:
        return len(self.w_part) + len(self.family.members)

    @property
    def maximality(self) -> Maximality:
        return self.family.maximality

    def max_off_diagonal(self) -> float:
        vs = self.vectors
        worst = 0.0
        for i, j in itertools.combinations(range(len(vs)), 2):
            worst = max(worst, abs(float(inner(vs[i], vs[j], self.params))))
        return worst


def max_orthogonal_geodesic_set(
    params: ModelParams,
    budget: Budget = Budget(),
    *,
    cap: int = 14,
    jobs: int = 1,
) -> OrthogonalGeodesicSet:
    """Largest mutually orthogonal set of geodesic vectors.

    W contributes n orthogonal vectors; the sign rays contribute a maximum
    family of mutually orthogonal +-1 tuples of length n+1.  Vectors from W
    and from the rays are orthogonal because X and Z spans are.
    """
    fam = max_orthogonal_tuples(params.n + 1, budget, cap=cap, jobs=jobs)
    return OrthogonalGeodesicSet(params, orthogonal_w_basis(params), fam)


def independent_geodesic_family(params: ModelParams) -> list[AlgebraVector]:
    """Z_1..Z_n and the rays of (1,...,1) and of (1,...,1) with entry i negated."""
    n = params.n
    out = [Z(k, n) for k in range(1, n + 1)]
    out.append(sign_ray_vector(np.ones(n, dtype=np.int64)))
    for i in range(1, n + 1):
        eps = np.ones(n, dtype=np.int64)
        eps[i - 1] = -1
        out.append(sign_ray_vector(eps))
    return out


def coefficient_rank(vectors: Iterable[AlgebraVector]) -> int:
    m = np.array([v.coords for v in vectors], dtype=float)
    return int(np.linalg.matrix_rank(m)) if m.size else 0
