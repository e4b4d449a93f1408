"""Maximum clique search on bitset adjacency.

Vertex sets are Python ints used as bitsets (bit ``v`` set means vertex ``v``
is present).  The search is the classical branch and bound with a greedy
colouring bound: vertices are coloured greedily inside the candidate set and
a branch is cut as soon as ``|clique| + colour`` cannot beat the incumbent.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence


class BudgetExhausted(Exception):
    """Raised inside the search when the node or time budget runs out."""


@dataclass(frozen=True)
class Budget:
    """Search limits.  ``None`` means unlimited."""

    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = 600.0


@dataclass
class CliqueResult:
    clique: list[int]
    complete: bool
    nodes: int
    seconds: float


def _low_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def bits_to_list(bits: int) -> list[int]:
    out = []
    while bits:
        v = _low_bit(bits)
        out.append(v)
        bits &= bits - 1
    return out


def _colour_sort(cand: int, adj: Sequence[int]) -> tuple[list[int], list[int]]:
    # Greedy sequential colouring in increasing vertex order; returns vertices
    # grouped by colour class and the colour of each (non-decreasing).
    order: list[int] = []
    colours: list[int] = []
    colour = 0
    rest = cand
    while rest:
        colour += 1
        q = rest
        while q:
            v = _low_bit(q)
            order.append(v)
            colours.append(colour)
            rest &= ~(1 << v)
            q &= ~(1 << v)
            q &= ~adj[v]
    return order, colours


class _Search:
    def __init__(self, adj: Sequence[int], budget: Budget, lower: int, upper: Optional[int]):
        self.adj = adj
        self.budget = budget
        self.best: list[int] = []
        self.best_size = lower
        self.upper = upper
        self.nodes = 0
        self.start = time.perf_counter()
        self.deadline = (
            self.start + budget.max_seconds if budget.max_seconds is not None else None
        )

    def _tick(self) -> None:
        self.nodes += 1
        if self.budget.max_nodes is not None and self.nodes > self.budget.max_nodes:
            raise BudgetExhausted
        if self.deadline is not None and (self.nodes & 0xFF) == 0:
            if time.perf_counter() > self.deadline:
                raise BudgetExhausted

    def _done(self) -> bool:
        return self.upper is not None and self.best_size >= self.upper

    def expand(self, clique: list[int], cand: int) -> None:
        self._tick()
        order, colours = _colour_sort(cand, self.adj)
        # Visit in reverse colour order so the bound tightens monotonically.
        for idx in range(len(order) - 1, -1, -1):
            if len(clique) + colours[idx] <= self.best_size or self._done():
                return
            v = order[idx]
            clique.append(v)
            new_cand = cand & self.adj[v]
            if new_cand:
                self.expand(clique, new_cand)
            elif len(clique) > self.best_size:
                self.best_size = len(clique)
                self.best = list(clique)
            clique.pop()
            cand &= ~(1 << v)


def max_clique(
    adj: Sequence[int],
    candidates: Optional[int] = None,
    *,
    lower: int = 0,
    upper: Optional[int] = None,
    budget: Budget = Budget(),
) -> CliqueResult:
    """Find a maximum clique inside ``candidates`` (default: all vertices).

    Only cliques strictly larger than ``lower`` are reported; if none exists
    the returned clique is empty.  ``upper`` is an externally known bound at
    which the search may stop early.  ``complete`` is False when the budget
    ran out, in which case the clique is only a lower bound.
    """
    if candidates is None:
        candidates = (1 << len(adj)) - 1
    search = _Search(adj, budget, lower, upper)
    try:
        if candidates:
            search.expand([], candidates)
        complete = True
    except BudgetExhausted:
        complete = False
    return CliqueResult(
        clique=sorted(search.best),
        complete=complete,
        nodes=search.nodes,
        seconds=time.perf_counter() - search.start,
    )


def _subtree_job(args):
    adj, v, cand, lower, upper, budget = args
    res = max_clique(adj, cand, lower=max(lower - 1, 0), upper=None if upper is None else upper - 1, budget=budget)
    if res.clique:
        clique = sorted([v] + res.clique)
    else:
        clique = [v] if lower < 1 else []
    return CliqueResult(clique, res.complete, res.nodes, res.seconds)


def max_clique_parallel(
    adj: Sequence[int],
    candidates: Optional[int] = None,
    *,
    lower: int = 0,
    upper: Optional[int] = None,
    budget: Budget = Budget(),
    jobs: int = 2,
) -> CliqueResult:
    """Split the search into one subtree per vertex and run them in a pool.

    Subtree ``i`` looks for cliques containing vertex ``i`` and only
    higher-numbered vertices, so the subtrees partition the search space.
    The incumbent is not shared between workers, which makes the outcome
    independent of scheduling; the reported clique is the one from the
    lowest-numbered subtree reaching the maximum.  The budget applies to
    each subtree separately.
    """
    if candidates is None:
        candidates = (1 << len(adj)) - 1
    start = time.perf_counter()
    verts = bits_to_list(candidates)
    tasks = []
    for v in verts:
        later = candidates & ~((1 << (v + 1)) - 1)
        tasks.append((list(adj), v, later & adj[v], lower, upper, budget))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_subtree_job, tasks))
    best: list[int] = []
    complete = True
    nodes = 0
    for r in results:
        nodes += r.nodes
        complete = complete and r.complete
        if len(r.clique) > max(len(best), lower):
            best = r.clique
    return CliqueResult(best, complete, nodes, time.perf_counter() - start)
