"""Coordinate Riemannian geometry of the group in global coordinates.

A point is (x_0..x_n, z_1..z_n) and the left-invariant metric reads

    g = sum_{i=0..n} exp(-2 z_i) dx_i^2 + lambda^2 (I + J) on dz_1..dz_n,

with z_0 = -(z_1 + ... + z_n).  Coordinate vectors are ordered like the Lie
algebra basis, so the tangent space at the origin is identified with the
algebra by X_i <-> d/dx_i and Z_k <-> d/dz_k.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraVector, ModelParams


class GeodesicIntegrationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GroupPoint:
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if x.ndim != 1 or z.ndim != 1 or x.size != z.size + 1:
            raise ValueError(f"need len(x) = len(z) + 1, got {x.shape} and {z.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.z.size

    @property
    def z0(self) -> float:
        return -float(self.z.sum())

    @property
    def z_full(self) -> np.ndarray:
        """(z_0, z_1, ..., z_n)."""
        return np.concatenate(([self.z0], self.z))

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate((self.x, self.z))

    @classmethod
    def from_coords(cls, q: Sequence[float]) -> "GroupPoint":
        q = np.asarray(q, dtype=float)
        n = (q.size - 1) // 2
        if q.size != 2 * n + 1 or n < 1:
            raise ValueError(f"expected 2n+1 >= 3 coordinates, got {q.size}")
        return cls(q[: n + 1], q[n + 1 :])

    @classmethod
    def origin(cls, n: int) -> "GroupPoint":
        return cls(np.zeros(n + 1), np.zeros(n))

    def to_matrix(self) -> np.ndarray:
        n = self.n
        m = np.eye(n + 2)
        m[np.arange(n + 1), np.arange(n + 1)] = np.exp(self.z_full)
        m[: n + 1, n + 1] = self.x
        return m

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "GroupPoint":
        n = m.shape[0] - 2
        return cls(m[: n + 1, n + 1].copy(), np.log(np.diag(m)[1 : n + 1]))

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        return GroupPoint(self.x + np.exp(self.z_full) * other.x, self.z + other.z)

    def __repr__(self) -> str:
        return f"GroupPoint(x={self.x.tolist()}, z={self.z.tolist()})"


def _z_jacobian(n: int) -> np.ndarray:
    # D[i, k-1] = d z_i / d z_k for i = 0..n, k = 1..n
    d = np.zeros((n + 1, n))
    d[0, :] = -1.0
    d[np.arange(1, n + 1), np.arange(n)] = 1.0
    return d


def _z_block(params: ModelParams) -> np.ndarray:
    n = params.n
    return params.lam**2 * (np.eye(n) + np.ones((n, n)))


def _z_block_inv(params: ModelParams) -> np.ndarray:
    n = params.n
    return (np.eye(n) - np.ones((n, n)) / (n + 1)) / params.lam**2


def metric_at(p: GroupPoint, params: ModelParams) -> np.ndarray:
    if p.n != params.n:
        raise ValueError(f"point has n={p.n}, params have n={params.n}")
    n = params.n
    g = np.zeros((params.dim, params.dim))
    g[np.arange(n + 1), np.arange(n + 1)] = np.exp(-2.0 * p.z_full)
    g[n + 1 :, n + 1 :] = _z_block(params)
    return g


def christoffel(p: GroupPoint, params: ModelParams) -> np.ndarray:
    """Levi-Civita symbols ``G[k, i, j]`` = Gamma^k_{ij}.

    Non-zero ones: Gamma^{x_i}_{x_i z_k} = -dz_i/dz_k and
    Gamma^{z_m}_{x_i x_i} = exp(-2 z_i) (Gz^{-1} dz_i/dz)_m, with Gz the
    constant Z-block of the metric.
    """
    if p.n != params.n:
        raise ValueError(f"point has n={p.n}, params have n={params.n}")
    n = params.n
    D = _z_jacobian(n)
    gam = np.zeros((params.dim,) * 3)
    xi = np.arange(n + 1)
    for k in range(n):
        gam[xi, xi, n + 1 + k] = -D[:, k]
        gam[xi, n + 1 + k, xi] = -D[:, k]
    zz = (D @ _z_block_inv(params)) * np.exp(-2.0 * p.z_full)[:, None]  # (n+1, n)
    gam[n + 1 :, xi, xi] = zz.T
    return gam


def christoffel_fd(p: GroupPoint, params: ModelParams, h: float = 1e-5) -> np.ndarray:
    """Christoffel symbols from central differences of :func:`metric_at`."""
    d = params.dim
    q = p.coords
    dg = np.zeros((d, d, d))  # dg[l] = d g / d q_l
    for l in range(d):
        e = np.zeros(d)
        e[l] = h
        dg[l] = (
            metric_at(GroupPoint.from_coords(q + e), params)
            - metric_at(GroupPoint.from_coords(q - e), params)
        ) / (2 * h)
    ginv = np.linalg.inv(metric_at(p, params))
    # first kind: [ij, l] = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    first = 0.5 * (
        np.einsum("ilj->ijl", dg) + np.einsum("jli->ijl", dg) - np.einsum("lij->ijl", dg)
    )
    return np.einsum("kl,ijl->kij", ginv, first)


def geodesic_acceleration(q: np.ndarray, v: np.ndarray, params: ModelParams) -> np.ndarray:
    """-Gamma^k_{ij} v^i v^j in closed form; ``q`` and ``v`` may be batched on axis 0."""
    n = params.n
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    z = q[..., n + 1 :]
    zf = np.concatenate((-z.sum(axis=-1, keepdims=True), z), axis=-1)
    vx, vz = v[..., : n + 1], v[..., n + 1 :]
    vzf = np.concatenate((-vz.sum(axis=-1, keepdims=True), vz), axis=-1)
    ax = 2.0 * vx * vzf
    w = np.exp(-2.0 * zf) * vx**2  # (..., n+1)
    az = -(w @ _z_jacobian(n)) @ _z_block_inv(params)
    return np.concatenate((ax, az), axis=-1)


def kinetic_energy(q: np.ndarray, v: np.ndarray, params: ModelParams) -> np.ndarray:
    n = params.n
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    z = q[..., n + 1 :]
    zf = np.concatenate((-z.sum(axis=-1, keepdims=True), z), axis=-1)
    vx, vz = v[..., : n + 1], v[..., n + 1 :]
    return (np.exp(-2.0 * zf) * vx**2).sum(axis=-1) + np.einsum("...i,ij,...j->...", vz, _z_block(params), vz)


@dataclass
class CurveSample:
    """Curve on the group sampled on a time grid.

    ``q`` and ``v`` hold coordinates and coordinate velocities, one row per
    node.  ``acc`` is the exact second derivative when known.
    """

    t: np.ndarray
    q: np.ndarray
    v: np.ndarray
    acc: Optional[np.ndarray] = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.q = np.atleast_2d(np.asarray(self.q, dtype=float))
        self.v = np.atleast_2d(np.asarray(self.v, dtype=float))
        if self.t.ndim != 1 or self.t.size < 2:
            raise ValueError("curve needs at least 2 nodes")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if self.q.shape[0] != self.t.size or self.v.shape != self.q.shape:
            raise ValueError("positions and velocities must align with the time grid")
        if self.acc is not None and np.shape(self.acc) != self.q.shape:
            raise ValueError("accelerations must align with the time grid")

    @property
    def n(self) -> int:
        return (self.q.shape[1] - 1) // 2

    @property
    def points(self) -> list[GroupPoint]:
        return [GroupPoint.from_coords(row) for row in self.q]

    def header(self, prefix: str = "") -> list[str]:
        n = self.n
        names = (
            [f"x_{i}" for i in range(n + 1)]
            + [f"z_{k}" for k in range(1, n + 1)]
            + [f"vx_{i}" for i in range(n + 1)]
            + [f"vz_{k}" for k in range(1, n + 1)]
        )
        return [prefix + s for s in names]

    def to_csv(self, other: Optional["CurveSample"] = None, other_prefix: str = "int_") -> str:
        """CSV text with header t, x_0.., z_1.., vx_0.., vz_1..; optionally a
        second curve on the same grid appended with prefixed columns."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["t"] + self.header()
        if other is not None:
            if other.t.shape != self.t.shape or not np.allclose(other.t, self.t):
                raise ValueError("curves must share the time grid")
            head += other.header(other_prefix)
        w.writerow(head)
        for i, t in enumerate(self.t):
            row = [t, *self.q[i], *self.v[i]]
            if other is not None:
                row += [*other.q[i], *other.v[i]]
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def time_grid(t_max: float = 1.0, step: float = 1e-3) -> np.ndarray:
    if step <= 0 or t_max <= 0:
        raise ValueError("step and t_max must be positive")
    m = int(round(t_max / step))
    return np.linspace(0.0, m * step, m + 1)


def orbit_curve(v: AlgebraVector, grid: np.ndarray, params: ModelParams) -> CurveSample:
    """t -> exp(t v) in coordinates, with exact velocities and accelerations."""
    if v.n != params.n:
        raise ValueError(f"vector has n={v.n}, params have n={params.n}")
    t = np.asarray(grid, dtype=float)[:, None]
    a = v.a.astype(float)
    b = v.b.astype(float)
    c = v.c.astype(float)
    nz = c != 0
    safe = np.where(nz, c, 1.0)
    x = np.where(nz, a * np.expm1(t * c) / safe, a * t)
    ex = np.exp(t * c)
    vx = a * ex
    axx = a * c * ex
    z = t * b
    vz = np.broadcast_to(b, z.shape)
    q = np.concatenate((x, z), axis=1)
    vel = np.concatenate((vx, vz), axis=1)
    acc = np.concatenate((axx, np.zeros_like(z)), axis=1)
    return CurveSample(t[:, 0], q, vel, acc)


def _rk4_step(q, v, h, params):
    def f(q, v):
        return v, geodesic_acceleration(q, v, params)

    k1q, k1v = f(q, v)
    k2q, k2v = f(q + 0.5 * h * k1q, v + 0.5 * h * k1v)
    k3q, k3v = f(q + 0.5 * h * k2q, v + 0.5 * h * k2v)
    k4q, k4v = f(q + h * k3q, v + h * k3v)
    return (
        q + h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q),
        v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def integrate_geodesic(
    p0: GroupPoint,
    v0: Sequence[float],
    params: ModelParams,
    grid: Optional[np.ndarray] = None,
    step: float = 1e-3,
) -> CurveSample:
    """Classical RK4 for the geodesic equation, fixed step.

    Between consecutive grid nodes the interval is split into equal substeps
    no longer than ``step``, so nodes need not be multiples of it.
    """
    if not step > 0:
        raise GeodesicIntegrationError(f"step must be positive, got {step}")
    if grid is None:
        grid = time_grid(1.0, step)
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise GeodesicIntegrationError("grid must be strictly increasing with at least 2 nodes")
    q = p0.coords.copy()
    v = np.asarray(v0, dtype=float).copy()
    if v.shape != q.shape:
        raise GeodesicIntegrationError(f"velocity has {v.size} entries, expected {q.size}")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
        raise GeodesicIntegrationError("initial state is not finite")
    qs = [q]
    vs = [v]
    for t0, t1 in zip(grid[:-1], grid[1:]):
        m = max(1, math.ceil((t1 - t0) / step - 1e-9))
        h = (t1 - t0) / m
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(m):
                q, v = _rk4_step(q, v, h, params)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
            raise GeodesicIntegrationError(f"state became non-finite at t = {t1:.6g}: q={q}, v={v}")
        qs.append(q)
        vs.append(v)
    return CurveSample(grid, np.array(qs), np.array(vs))


def energy_drift(curve: CurveSample, params: ModelParams) -> float:
    """max |E(t) - E(0)| / E(0) with E = g(v, v)."""
    e = kinetic_energy(curve.q, curve.v, params)
    if e[0] == 0:
        return float(np.max(np.abs(e)))
    return float(np.max(np.abs(e - e[0])) / e[0])


def covariant_acceleration(curve: CurveSample, params: ModelParams) -> np.ndarray:
    """gamma''^k + Gamma^k_ij gamma'^i gamma'^j at every node."""
    if curve.acc is not None:
        acc = curve.acc
    else:
        acc = np.gradient(curve.v, curve.t, axis=0)
    return acc - geodesic_acceleration(curve.q, curve.v, params)


def residual_profile(curve: CurveSample, params: ModelParams) -> np.ndarray:
    """Metric norm of the covariant acceleration at every node."""
    n = params.n
    r = covariant_acceleration(curve, params)
    z = curve.q[:, n + 1 :]
    zf = np.concatenate((-z.sum(axis=1, keepdims=True), z), axis=1)
    rx, rz = r[:, : n + 1], r[:, n + 1 :]
    sq = (np.exp(-2.0 * zf) * rx**2).sum(axis=1) + np.einsum("mi,ij,mj->m", rz, _z_block(params), rz)
    return np.sqrt(np.maximum(sq, 0.0))


def geodesic_residual(curve: CurveSample, params: ModelParams) -> float:
    """Sup over interior nodes of the metric norm of the covariant acceleration.

    The metric norm makes the value invariant under left translation.
    Exact accelerations are used when the curve carries them, central
    differences of the velocities otherwise.
    """
    if curve.t.size < 3:
        raise ValueError("residual needs at least 3 nodes")
    return float(residual_profile(curve, params)[1:-1].max())


def translate_curve(curve: CurveSample, h: GroupPoint) -> CurveSample:
    """Left translate by h: positions via the group law, velocities and
    accelerations through the differential of left multiplication."""
    n = curve.n
    scale = np.concatenate((np.exp(h.z_full), np.ones(n)))
    shift = np.concatenate((h.x, h.z))
    q = shift + curve.q * scale
    v = curve.v * scale
    acc = None if curve.acc is None else curve.acc * scale
    return CurveSample(curve.t.copy(), q, v, acc)


def tangent_gram(vectors: Sequence[AlgebraVector], params: ModelParams) -> np.ndarray:
    """Gram matrix of initial orbit velocities at the origin."""
    if not vectors:
        raise ValueError("need at least one vector")
    vel = np.array([orbit_curve(v, np.array([0.0, 1.0]), params).v[0] for v in vectors])
    return vel @ metric_at(GroupPoint.origin(params.n), params) @ vel.T
