"""Problem classes: number partitioning, Max-3-SAT and 0-1 knapsack.

All three share the bit-string representation.  A configuration of length
``n`` is stored as an integer whose most significant bit is the leftmost
character of its text form, so integer order and text order coincide.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Union

from ._rng import Stream, as_stream, derive
from .exceptions import (
    DimensionError,
    GenerationInfeasibleError,
    InfeasibleSolutionError,
    InvalidDimensionError,
)

INT64_MAX = (1 << 63) - 1


class Kind(str, Enum):
    NPP = "npp"
    MAXSAT = "maxsat"
    KP = "kp"


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


SENSE_OF = {Kind.NPP: Sense.MIN, Kind.MAXSAT: Sense.MAX, Kind.KP: Sense.MAX}


def better(a: int, b: int, sense: Sense) -> bool:
    """True if fitness ``a`` is strictly better than ``b``."""
    return a < b if sense is Sense.MIN else a > b


def not_worse(a: int, b: int, sense: Sense) -> bool:
    return a <= b if sense is Sense.MIN else a >= b


@dataclass(frozen=True, order=True)
class BitString:
    """Fixed-length binary configuration.

    ``value`` holds the bits with position 0 (the leftmost character) as the
    most significant bit.
    """

    value: int
    n: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.value < (1 << self.n):
            raise DimensionError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = list(bits)
        value = 0
        for b in bits:
            value = (value << 1) | (1 if b else 0)
        return cls(value, len(bits))

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b") if self.n else ""

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.value >> (self.n - 1 - i)) & 1

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(self[i] for i in range(self.n))

    def flip(self, *indices: int) -> "BitString":
        v = self.value
        for i in indices:
            v ^= 1 << (self.n - 1 - i)
        return BitString(v, self.n)

    def complement(self) -> "BitString":
        return BitString(self.value ^ ((1 << self.n) - 1), self.n)

    def hamming(self, other: "BitString") -> int:
        return (self.value ^ other.value).bit_count()


# -- instance payloads ---------------------------------------------------------


@dataclass(frozen=True)
class NppInstance:
    items: tuple[int, ...]
    k: float

    @property
    def n(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class MaxSatInstance:
    """Clauses are triples of signed literals: ``+v`` or ``-v`` for variable ``v`` (1-based)."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]
    alpha: float

    @property
    def m(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class KpInstance:
    profits: tuple[int, ...]
    weights: tuple[int, ...]
    capacity: int
    R: int

    @property
    def n(self) -> int:
        return len(self.weights)


Payload = Union[NppInstance, MaxSatInstance, KpInstance]
_KIND_OF_PAYLOAD = {NppInstance: Kind.NPP, MaxSatInstance: Kind.MAXSAT, KpInstance: Kind.KP}


@dataclass(frozen=True)
class ProblemInstance:
    kind: Kind
    payload: Payload
    id: str

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if _KIND_OF_PAYLOAD[type(self.payload)] is not self.kind:
            raise ValueError(f"payload {type(self.payload).__name__} does not match kind {self.kind.value}")

    @property
    def sense(self) -> Sense:
        return SENSE_OF[self.kind]

    @property
    def n(self) -> int:
        return self.payload.n

    @property
    def params(self) -> dict:
        p = self.payload
        if self.kind is Kind.NPP:
            return {"k": p.k}
        if self.kind is Kind.MAXSAT:
            return {"alpha": p.alpha}
        return {"R": p.R}

    def to_dict(self) -> dict:
        p = self.payload
        if self.kind is Kind.NPP:
            data = {"items": list(p.items)}
        elif self.kind is Kind.MAXSAT:
            data = {"clauses": [list(c) for c in p.clauses]}
        else:
            data = {"profits": list(p.profits), "weights": list(p.weights), "capacity": p.capacity}
        return {
            "kind": self.kind.value,
            "id": self.id,
            "n": self.n,
            "sense": self.sense.value,
            "params": self.params,
            "data": data,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemInstance":
        kind = Kind(d["kind"])
        data, params = d["data"], d.get("params", {})
        if kind is Kind.NPP:
            payload = NppInstance(tuple(int(v) for v in data["items"]), float(params.get("k", 0.7)))
        elif kind is Kind.MAXSAT:
            clauses = tuple(tuple(int(l) for l in c) for c in data["clauses"])
            payload = MaxSatInstance(int(d["n"]), clauses, float(params.get("alpha", 8)))
        else:
            payload = KpInstance(
                tuple(int(v) for v in data["profits"]),
                tuple(int(v) for v in data["weights"]),
                int(data["capacity"]),
                int(params.get("R", 1000)),
            )
        inst = cls(kind, payload, str(d["id"]))
        if inst.n != int(d["n"]):
            raise ValueError(f"instance {inst.id}: n={d['n']} but data has dimension {inst.n}")
        if "sense" in d and Sense(d["sense"]) is not inst.sense:
            raise ValueError(f"instance {inst.id}: sense is fixed by kind")
        return inst


def save_instance(instance: ProblemInstance, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(instance.to_dict(), sort_keys=True, indent=1) + "\n")


def load_instance(path) -> ProblemInstance:
    return ProblemInstance.from_dict(json.loads(Path(path).read_text()))


# -- generators ----------------------------------------------------------------


def npp_upper_bound(n: int, k: float) -> int:
    """``floor(2**(n*k))`` computed exactly when ``n*k`` is an integer."""
    e = Fraction(str(k)) * n
    if e.denominator == 1:
        return 1 << int(e)
    return math.floor(2.0 ** float(e))


def generate_npp(n: int, k: float = 0.7, seed: int = 0, id: str | None = None) -> ProblemInstance:
    """Draw ``n`` items independently and uniformly from ``[0, floor(2**(n*k))]``."""
    if n < 2:
        raise InvalidDimensionError(f"NPP needs n >= 2, got {n}")
    if k <= 0:
        raise ValueError("k must be positive")
    hi = npp_upper_bound(n, k)
    if hi * n > INT64_MAX:
        raise OverflowError(f"item sums for n={n}, k={k} may exceed 64-bit range")
    rng = Stream(derive(seed, "npp"))
    items = tuple(rng.between(0, hi) for _ in range(n))
    return ProblemInstance(Kind.NPP, NppInstance(items, float(k)), id or f"npp-n{n}-s{seed}")


def generate_maxsat(n: int, alpha: float = 8.0, seed: int = 0, id: str | None = None) -> ProblemInstance:
    """Random Max-3-SAT with ``round(alpha*n)`` unique clauses over distinct variables."""
    if n < 3:
        raise InvalidDimensionError(f"Max-3-SAT needs n >= 3, got {n}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    m = int(round(alpha * n))
    if m > math.comb(n, 3) * 8:
        raise GenerationInfeasibleError(f"only {math.comb(n, 3) * 8} distinct clauses exist for n={n}, need {m}")
    rng = Stream(derive(seed, "maxsat"))
    seen: set[frozenset] = set()
    clauses = []
    attempts = 0
    cap = 1000 * m
    while len(clauses) < m:
        attempts += 1
        if attempts > cap:
            raise GenerationInfeasibleError(f"could not draw {m} unique clauses within {cap} attempts")
        pool = list(range(1, n + 1))
        lits = []
        for t in range(3):
            j = t + rng.below(n - t)
            pool[t], pool[j] = pool[j], pool[t]
            var = pool[t]
            lits.append(-var if rng.below(2) else var)
        key = frozenset(lits)
        if key in seen:
            continue
        seen.add(key)
        clauses.append(tuple(lits))
    return ProblemInstance(Kind.MAXSAT, MaxSatInstance(n, tuple(clauses), float(alpha)), id or f"maxsat-n{n}-s{seed}")


def generate_kp(n: int, R: int = 1000, seed: int = 0, id: str | None = None) -> ProblemInstance:
    """Weakly correlated 0-1 knapsack instance."""
    if n < 2:
        raise InvalidDimensionError(f"KP needs n >= 2, got {n}")
    if R < 10:
        raise ValueError("R must be at least 10")
    rng = Stream(derive(seed, "kp"))
    spread = R // 10
    weights, profits = [], []
    for _ in range(n):
        w = rng.between(1, R)
        p = rng.between(max(1, w - spread), w + spread)
        weights.append(w)
        profits.append(p)
    capacity = (55 * sum(weights)) // 100
    return ProblemInstance(Kind.KP, KpInstance(tuple(profits), tuple(weights), capacity, int(R)), id or f"kp-n{n}-s{seed}")


GENERATORS = {Kind.NPP: generate_npp, Kind.MAXSAT: generate_maxsat, Kind.KP: generate_kp}


def generate(kind, n: int, seed: int, id: str | None = None, **params) -> ProblemInstance:
    return GENERATORS[Kind(kind)](n, seed=seed, id=id, **params)


# -- evaluation ----------------------------------------------------------------


def _check_dim(instance: ProblemInstance, x: BitString) -> None:
    if len(x) != instance.n:
        raise DimensionError(f"bit string of length {len(x)} for instance of dimension {instance.n}")


def _selected(values, x: int, n: int) -> int:
    return sum(v for i, v in enumerate(values) if (x >> (n - 1 - i)) & 1)


def weight_of(instance: ProblemInstance, x: int) -> int:
    p = instance.payload
    return _selected(p.weights, x, p.n)


def feasible_int(instance: ProblemInstance, x: int) -> bool:
    if instance.kind is not Kind.KP:
        return True
    return weight_of(instance, x) <= instance.payload.capacity


def fitness_int(instance: ProblemInstance, x: int) -> int:
    """Objective of the configuration encoded by ``x`` (no feasibility check)."""
    p = instance.payload
    n = instance.n
    if instance.kind is Kind.NPP:
        s1 = _selected(p.items, x, n)
        return abs(2 * s1 - sum(p.items))
    if instance.kind is Kind.MAXSAT:
        sat = 0
        for clause in p.clauses:
            for lit in clause:
                bit = (x >> (n - abs(lit))) & 1
                if bit == (lit > 0):
                    sat += 1
                    break
        return sat
    return _selected(p.profits, x, n)


def evaluate(instance: ProblemInstance, x: BitString) -> int:
    _check_dim(instance, x)
    if not feasible_int(instance, x.value):
        raise InfeasibleSolutionError(f"{x} exceeds capacity {instance.payload.capacity}")
    return fitness_int(instance, x.value)


def is_feasible(instance: ProblemInstance, x: BitString) -> bool:
    _check_dim(instance, x)
    return feasible_int(instance, x.value)


def neighbors(instance: ProblemInstance, x: BitString) -> list[BitString]:
    """Feasible 1-bit-flip neighbours, by ascending flipped index."""
    _check_dim(instance, x)
    out = []
    for i in range(instance.n):
        y = x.flip(i)
        if feasible_int(instance, y.value):
            out.append(y)
    return out


def repair_int(instance: ProblemInstance, x: int, rng: Stream) -> int:
    """Clear uniformly chosen set bits until the knapsack constraint holds."""
    if instance.kind is not Kind.KP:
        return x
    n = instance.n
    weights = instance.payload.weights
    cap = instance.payload.capacity
    w = _selected(weights, x, n)
    while w > cap:
        ones = [i for i in range(n) if (x >> (n - 1 - i)) & 1]
        i = ones[rng.below(len(ones))]
        x &= ~(1 << (n - 1 - i))
        w -= weights[i]
    return x


def random_solution(instance: ProblemInstance, rng) -> BitString:
    rng = as_stream(rng)
    x = rng.bits(instance.n)
    return BitString(repair_int(instance, x, rng), instance.n)
