"""Dense lookup tables over the full search space.

For dimensions up to ``TABLE_MAX_N`` the fitness, feasibility, best-improvement
successor and hill-climbing destination of every configuration fit in memory
and are computed with vectorised numpy passes.  Sampling, enumeration and
annealing use these tables; results are identical to the scalar routines in
:mod:`lonsim.problems` and :mod:`lonsim.sampling` (checked in the tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import BudgetError
from .problems import Kind, ProblemInstance, Sense

TABLE_MAX_N = 22


def _subset_sums(values) -> np.ndarray:
    """``out[x]`` = sum of ``values[i]`` over positions ``i`` whose bit is set in ``x``."""
    n = len(values)
    out = np.zeros(1, dtype=np.int64)
    for b in range(n):
        out = np.concatenate([out, out + np.int64(values[n - 1 - b])])
    return out


def fitness_table(instance: ProblemInstance) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(fitness, feasible)`` arrays indexed by configuration integer."""
    p = instance.payload
    n = instance.n
    size = 1 << n
    if instance.kind is Kind.NPP:
        s1 = _subset_sums(p.items)
        fit = np.abs(2 * s1 - np.int64(sum(p.items)))
        feas = np.ones(size, dtype=bool)
    elif instance.kind is Kind.MAXSAT:
        xs = np.arange(size, dtype=np.int64)
        fit = np.zeros(size, dtype=np.int64)
        for clause in p.clauses:
            sat = np.zeros(size, dtype=bool)
            for lit in clause:
                bit = (xs >> (n - abs(lit))) & 1
                sat |= bit == (1 if lit > 0 else 0)
            fit += sat
        feas = np.ones(size, dtype=bool)
    else:
        fit = _subset_sums(p.profits)
        feas = _subset_sums(p.weights) <= p.capacity
    return fit, feas


@dataclass(frozen=True, eq=False)
class Landscape:
    """Full-space tables for one instance.

    Attributes
    ----------
    fitness : ndarray of int64
    feasible : ndarray of bool
    successor : ndarray of int64
        Best strictly improving feasible neighbour (lowest index on ties), or
        the configuration itself at a local optimum; ``-1`` where infeasible.
    target : ndarray of int64
        Local optimum reached by best-improvement climbing; ``-1`` where infeasible.
    steps : ndarray of int32
        Number of climbing moves to ``target``.
    """

    instance: ProblemInstance
    fitness: np.ndarray
    feasible: np.ndarray
    successor: np.ndarray
    target: np.ndarray
    steps: np.ndarray

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def key(self) -> np.ndarray:
        """Fitness oriented so that smaller is better."""
        return self.fitness if self.instance.sense is Sense.MIN else -self.fitness

    def local_optima(self) -> np.ndarray:
        xs = np.arange(self.fitness.size, dtype=np.int64)
        return np.flatnonzero(self.feasible & (self.successor == xs))


def _build(instance: ProblemInstance) -> Landscape:
    n = instance.n
    if n > TABLE_MAX_N:
        raise BudgetError(f"n={n} exceeds the table limit of {TABLE_MAX_N}")
    fit, feas = fitness_table(instance)
    key = fit if instance.sense is Sense.MIN else -fit
    size = 1 << n
    xs = np.arange(size, dtype=np.int64)
    succ = xs.copy()
    best = key.copy()
    for i in range(n):
        nb = xs ^ (1 << (n - 1 - i))
        cand = key[nb]
        upd = feas[nb] & (cand < best)
        succ[upd] = nb[upd]
        best[upd] = cand[upd]
    succ[~feas] = -1

    target = succ.copy()
    steps = (succ != xs).astype(np.int32)
    steps[~feas] = 0
    live = np.flatnonzero(feas & (succ != xs))
    while live.size:
        nxt = succ[target[live]]
        moved = nxt != target[live]
        live = live[moved]
        target[live] = nxt[moved]
        steps[live] += 1
    return Landscape(instance, fit, feas, succ, target, steps)


@lru_cache(maxsize=16)
def build_landscape(instance: ProblemInstance) -> Landscape:
    """Cached table construction; raises :class:`BudgetError` above ``TABLE_MAX_N``."""
    return _build(instance)
