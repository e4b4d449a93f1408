"""Mutually orthogonal +-1 tuples and Hadamard matrices.

Everything here is exact integer arithmetic.  A sign tuple of length k is a
bitmask with bit i set when entry i is -1, so the dot product of two tuples
is ``k - 2 * popcount(u ^ v)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .clique import Budget, max_clique, max_clique_parallel

DEFAULT_ORDER_CAP = 256
DEFAULT_SEARCH_CAP = 14


class Maximality(str, enum.Enum):
    CERTIFIED = "Certified"
    LOWER_BOUND_ONLY = "LowerBoundOnly"


@dataclass(frozen=True, order=True)
class SignTuple:
    k: int
    bits: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("length must be positive")
        if self.bits < 0 or self.bits >> self.k:
            raise ValueError(f"bits {self.bits:#x} do not fit length {self.k}")

    @classmethod
    def from_entries(cls, entries: Iterable[int]) -> "SignTuple":
        entries = [int(e) for e in entries]
        bits = 0
        for i, e in enumerate(entries):
            if e == -1:
                bits |= 1 << i
            elif e != 1:
                raise ValueError(f"entries must be +1 or -1, got {e}")
        return cls(len(entries), bits)

    @classmethod
    def ones(cls, k: int) -> "SignTuple":
        return cls(k, 0)

    def entries(self) -> tuple[int, ...]:
        return tuple(-1 if (self.bits >> i) & 1 else 1 for i in range(self.k))

    def __neg__(self) -> "SignTuple":
        return SignTuple(self.k, self.bits ^ ((1 << self.k) - 1))

    def __str__(self) -> str:
        return " ".join("+1" if e > 0 else "-1" for e in self.entries())

    def lex_key(self) -> tuple[int, ...]:
        # +1 sorts before -1, reading left to right
        return tuple((self.bits >> i) & 1 for i in range(self.k))


def dot(u: SignTuple, v: SignTuple) -> int:
    if u.k != v.k:
        raise ValueError(f"length mismatch: {u.k} vs {v.k}")
    return u.k - 2 * (u.bits ^ v.bits).bit_count()


@dataclass
class OrthogonalFamily:
    k: int
    members: list[SignTuple]
    maximality: Maximality
    proof: str = ""
    nodes: int = 0
    seconds: float = 0.0

    def __post_init__(self):
        for m in self.members:
            if m.k != self.k:
                raise ValueError("member length differs from family length")
        if len(set(self.members)) != len(self.members):
            raise ValueError("family members must be distinct")
        for u, v in itertools.combinations(self.members, 2):
            if dot(u, v) != 0:
                raise ValueError(f"members {u} and {v} are not orthogonal")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def certified(self) -> bool:
        return self.maximality is Maximality.CERTIFIED


# -- square sign matrices -----------------------------------------------------


@dataclass(frozen=True)
class SquareSignMatrix:
    rows: tuple[SignTuple, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        k = len(self.rows)
        if k == 0 or any(r.k != k for r in self.rows):
            raise ValueError("matrix must be square and non-empty")

    @property
    def k(self) -> int:
        return len(self.rows)

    @classmethod
    def from_array(cls, arr, label: str = "") -> "SquareSignMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        return cls(tuple(SignTuple.from_entries(r) for r in arr), label)

    def to_array(self) -> np.ndarray:
        return np.array([r.entries() for r in self.rows], dtype=np.int64)


def first_violation(m: SquareSignMatrix) -> Optional[tuple[int, int, int]]:
    """First (i, j, <row_i, row_j>) with i < j and a non-zero product, in row order."""
    for i, j in itertools.combinations(range(m.k), 2):
        d = dot(m.rows[i], m.rows[j])
        if d:
            return i, j, d
    return None


def is_hadamard(m: SquareSignMatrix) -> bool:
    a = m.to_array()
    return bool(np.array_equal(a @ a.T, m.k * np.eye(m.k, dtype=np.int64)))


def sylvester(m: int, cap: int = DEFAULT_ORDER_CAP) -> SquareSignMatrix:
    if m < 0:
        raise ValueError("m must be non-negative")
    if 2**m > cap:
        raise ValueError(f"order 2^{m} exceeds cap {cap}")
    h = np.array([[1]], dtype=np.int64)
    block = np.array([[1, 1], [1, -1]], dtype=np.int64)
    for _ in range(m):
        h = np.kron(block, h)
    return SquareSignMatrix.from_array(h, f"sylvester({m})")


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def paley(q: int, cap: int = DEFAULT_ORDER_CAP) -> SquareSignMatrix:
    """Order q+1 from the quadratic residues mod a prime q = 3 (mod 4)."""
    if not is_prime(q):
        raise ValueError(f"q = {q} is not prime")
    if q % 4 != 3:
        raise ValueError(f"q = {q} is {q % 4} mod 4; need q = 3 mod 4")
    if q + 1 > cap:
        raise ValueError(f"order {q + 1} exceeds cap {cap}")
    residues = {(x * x) % q for x in range(1, q)}
    chi = np.array([0] + [1 if r in residues else -1 for r in range(1, q)], dtype=np.int64)
    idx = np.arange(q)
    jac = chi[(idx[None, :] - idx[:, None]) % q]
    s = np.zeros((q + 1, q + 1), dtype=np.int64)
    s[0, 1:] = 1
    s[1:, 0] = -1
    s[1:, 1:] = jac
    return SquareSignMatrix.from_array(np.eye(q + 1, dtype=np.int64) + s, f"paley({q})")


def kronecker(m1: SquareSignMatrix, m2: SquareSignMatrix, cap: int = DEFAULT_ORDER_CAP) -> SquareSignMatrix:
    if m1.k * m2.k > cap:
        raise ValueError(f"order {m1.k * m2.k} exceeds cap {cap}")
    return SquareSignMatrix.from_array(
        np.kron(m1.to_array(), m2.to_array()), f"kronecker({m1.label or m1.k}, {m2.label or m2.k})"
    )


def sylvester_orders(cap: int = DEFAULT_ORDER_CAP) -> list[int]:
    return [2**m for m in range(cap.bit_length()) if 2**m <= cap]


def paley_orders(cap: int = DEFAULT_ORDER_CAP) -> list[int]:
    return [q + 1 for q in range(3, cap) if q % 4 == 3 and is_prime(q) and q + 1 <= cap]


def construct_hadamard(k: int, cap: int = DEFAULT_ORDER_CAP) -> Optional[SquareSignMatrix]:
    """Some Hadamard matrix of order k from Sylvester, Paley and Kronecker products.

    Prefers Sylvester, then Paley, then the Kronecker product with the
    smallest left factor.  Returns None when k is not reachable.
    """
    if k < 1 or k > cap:
        return None
    if k & (k - 1) == 0:
        return sylvester(k.bit_length() - 1, cap)
    if is_prime(k - 1) and (k - 1) % 4 == 3:
        return paley(k - 1, cap)
    for f in range(2, k):
        if k % f == 0:
            left = construct_hadamard(f, cap)
            right = construct_hadamard(k // f, cap) if left is not None else None
            if right is not None:
                return kronecker(left, right, cap)
    return None


def reachable_orders(method: str, cap: int = DEFAULT_ORDER_CAP) -> list[int]:
    if method == "sylvester":
        return sylvester_orders(cap)
    if method == "paley":
        return paley_orders(cap)
    if method == "kronecker":
        return [
            k for k in range(4, cap + 1)
            if any(k % f == 0 and construct_hadamard(f, cap) and construct_hadamard(k // f, cap)
                   for f in range(2, k // 2 + 1))
        ]
    raise ValueError(f"unknown method {method!r}")


def construct_by_method(method: str, order: int, cap: int = DEFAULT_ORDER_CAP) -> SquareSignMatrix:
    """Hadamard matrix of ``order`` using exactly the named construction."""
    if method == "sylvester":
        if order < 1 or order & (order - 1):
            raise ValueError(f"order must be a power of 2 for sylvester, got {order}")
        return sylvester(order.bit_length() - 1, cap)
    if method == "paley":
        q = order - 1
        if not (is_prime(q) and q % 4 == 3):
            raise ValueError(
                f"paley needs order q+1 with q prime and q = 3 mod 4; reachable orders: {paley_orders(cap)}"
            )
        return paley(q, cap)
    if method == "kronecker":
        for f in range(2, order // 2 + 1):
            if order % f == 0:
                left = construct_hadamard(f, cap)
                right = construct_hadamard(order // f, cap)
                if left is not None and right is not None:
                    return kronecker(left, right, cap)
        raise ValueError(
            f"order {order} is not a product of two constructible orders; "
            f"reachable orders: {reachable_orders('kronecker', cap)}"
        )
    raise ValueError(f"unknown method {method!r}; choose sylvester, paley or kronecker")


# -- Hadamard matrices and families ------------------------------------------


def normalize_rows(rows: Sequence[SignTuple]) -> list[SignTuple]:
    """Canonical form: columns negated so rows[0] is all ones, then each row
    negated so its first entry is +1, then rows after the first sorted."""
    if not rows:
        return []
    flip = rows[0].bits
    out = [SignTuple(r.k, r.bits ^ flip) for r in rows]
    out = [(-r if r.bits & 1 else r) for r in out]
    return [out[0]] + sorted(out[1:], key=SignTuple.lex_key)


def hadamard_to_family(m: SquareSignMatrix) -> OrthogonalFamily:
    if not is_hadamard(m):
        raise ValueError("matrix is not Hadamard")
    members = normalize_rows(m.rows)
    return OrthogonalFamily(m.k, members, Maximality.CERTIFIED, proof="dimension bound")


def family_to_hadamard(f: OrthogonalFamily) -> SquareSignMatrix:
    if f.size != f.k:
        raise ValueError(f"need {f.k} members of length {f.k}, family has {f.size}")
    return SquareSignMatrix(tuple(f.members), f"family(k={f.k})")


# -- exhaustive search --------------------------------------------------------


def canonical_tuples(k: int) -> list[SignTuple]:
    """All tuples with first entry +1, in lexicographic order."""
    return sorted((SignTuple(k, m << 1) for m in range(1 << (k - 1))), key=SignTuple.lex_key)


def orthogonal_pair_count(k: int, canonical: bool = True) -> int:
    """Unordered orthogonal pairs among tuples of length k.

    By default only tuples with first entry +1 are scanned; ``canonical=False``
    scans all 2^k of them.
    """
    if canonical:
        bits = np.arange(1 << (k - 1), dtype=np.uint32) << 1
    else:
        bits = np.arange(1 << k, dtype=np.uint32)
    total = 0
    for chunk in np.array_split(bits, max(1, bits.size // 1024)):
        pc = np.bitwise_count(chunk[:, None] ^ bits[None, :])
        total += int(np.count_nonzero(2 * pc.astype(np.int64) == k))
    return total // 2


def _balanced_tuples(k: int) -> list[SignTuple]:
    # canonical tuples orthogonal to the all-ones tuple: k/2 entries -1, none at position 0
    out = []
    for pos in itertools.combinations(range(1, k), k // 2):
        out.append(SignTuple(k, sum(1 << p for p in pos)))
    return out


def _adjacency(verts: list[SignTuple], k: int) -> list[int]:
    bits = np.array([v.bits for v in verts], dtype=np.uint64)
    orth = np.bitwise_count(bits[:, None] ^ bits[None, :]) == k // 2
    packed = np.packbits(orth, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _seed_family(k: int) -> list[SignTuple]:
    h = construct_hadamard(k)
    if h is not None:
        return normalize_rows(h.rows)
    if k % 2 == 0:
        alt = SignTuple.from_entries([1 if i % 2 == 0 else -1 for i in range(k)])
        return [SignTuple.ones(k), alt]
    return [SignTuple.ones(k)]


def max_orthogonal_tuples(
    k: int,
    budget: Budget = Budget(),
    *,
    cap: int = DEFAULT_SEARCH_CAP,
    jobs: int = 1,
    seed: bool = True,
) -> OrthogonalFamily:
    """Maximum family of mutually orthogonal +-1 tuples of length k.

    Members are normalised to first entry +1 and the family to start with the
    all-ones tuple, so the search is a maximum clique among tuples with k/2
    entries equal to -1 (none in the first position) in the orthogonality
    graph.  The clique is bounded by k-1 since k orthogonal non-zero vectors
    already span R^k.  With ``seed`` the incumbent starts from a known
    construction.  Above ``cap`` no search is run and the construction is
    returned, certified only if it reaches k.
    """
    if k < 1:
        raise ValueError("k must be positive")
    seed_fam = _seed_family(k) if seed else [SignTuple.ones(k)]
    if k > cap:
        if len(seed_fam) == k:
            return OrthogonalFamily(k, seed_fam, Maximality.CERTIFIED, proof="dimension bound")
        return OrthogonalFamily(k, seed_fam, Maximality.LOWER_BOUND_ONLY, proof="construction only")
    verts = _balanced_tuples(k) if k % 2 == 0 else []
    if not verts:
        return OrthogonalFamily(k, [SignTuple.ones(k)], Maximality.CERTIFIED, proof="exhaustive search")
    adj = _adjacency(verts, k)
    lower = len(seed_fam) - 1
    if jobs > 1:
        res = max_clique_parallel(adj, lower=lower, upper=k - 1, budget=budget, jobs=jobs)
    else:
        res = max_clique(adj, lower=lower, upper=k - 1, budget=budget)
    members = [SignTuple.ones(k)] + [verts[i] for i in res.clique] if res.clique else seed_fam
    members = normalize_rows(members)
    if not res.complete:
        return OrthogonalFamily(k, members, Maximality.LOWER_BOUND_ONLY, "budget exhausted", res.nodes, res.seconds)
    proof = "dimension bound" if len(members) == k else "exhaustive search"
    return OrthogonalFamily(k, members, Maximality.CERTIFIED, proof, res.nodes, res.seconds)


# -- text format ---------------------------------------------------------------

_TOKENS = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}


def parse_matrix(text: str) -> SquareSignMatrix:
    """Read one row per line of ``+``/``-`` or ``+1``/``-1`` tokens."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([_TOKENS[t] for t in line.split()])
        except KeyError as exc:
            raise ValueError(f"line {lineno}: bad entry {exc.args[0]!r}") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError(f"matrix is not square ({len(rows)} rows, lengths {sorted({len(r) for r in rows})})")
    return SquareSignMatrix.from_array(rows)


def format_matrix(m: SquareSignMatrix) -> str:
    return "".join(str(r) + "\n" for r in m.rows)


def read_matrix(path: Union[str, Path]) -> SquareSignMatrix:
    return parse_matrix(Path(path).read_text())


def write_matrix(m: SquareSignMatrix, path: Union[str, Path]) -> None:
    Path(path).write_text(format_matrix(m))
