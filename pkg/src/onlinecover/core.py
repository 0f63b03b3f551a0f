"""Problem data model: covering rows, instances, sparsity tracking and file I/O.

An instance is ``min c.x  s.t.  sum_i a_ij x_i >= rhs_j`` with strictly
positive costs and coefficients, optionally with integral upper bounds
``0 <= x_i <= u_i``.  Rows are delivered to the online solvers in file
order, which is the arrival order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class InstanceError(ValueError):
    """Base class for invalid instance data."""


class MalformedRowError(InstanceError):
    pass


class SchemaError(InstanceError):
    pass


class NonPositiveCostError(InstanceError):
    pass


class NonIntegralBoundError(InstanceError):
    pass


class InfeasibleError(Exception):
    """The covering program has no feasible (integral) point."""


@dataclass(frozen=True)
class ConstraintRow:
    """Sparse covering row ``sum a_i x_i >= rhs``.

    ``entries`` holds ``(index, coefficient)`` pairs with strictly increasing
    indices and positive coefficients.
    """

    entries: tuple[tuple[int, float], ...]
    rhs: float = 1.0

    def __post_init__(self):
        entries = tuple((int(i), float(a)) for i, a in self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "rhs", float(self.rhs))
        if not entries:
            raise MalformedRowError("row has no entries")
        prev = -1
        for i, a in entries:
            if i <= prev:
                raise MalformedRowError(f"indices not strictly increasing at {i}")
            if i < 0:
                raise MalformedRowError(f"negative variable index {i}")
            if not a > 0 or not math.isfinite(a):
                raise MalformedRowError(f"coefficient {a!r} for x_{i} is not positive")
            prev = i
        if not self.rhs > 0 or not math.isfinite(self.rhs):
            raise MalformedRowError(f"rhs {self.rhs!r} is not positive")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def lhs(self, x) -> float:
        return math.fsum(a * float(x[i]) for i, a in self.entries)


def normalize_row(raw: ConstraintRow) -> ConstraintRow:
    """Rescale ``raw`` so its right-hand side is exactly 1."""
    if raw.rhs == 1.0:
        return raw
    return ConstraintRow(tuple((i, a / raw.rhs) for i, a in raw.entries), 1.0)


@dataclass(frozen=True)
class Instance:
    n: int
    costs: tuple[float, ...]
    rows: tuple[ConstraintRow, ...]
    upper_bounds: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "costs", tuple(float(c) for c in self.costs))
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.upper_bounds is not None:
            bounds = []
            for u in self.upper_bounds:
                if isinstance(u, bool) or float(u) != int(u):
                    raise NonIntegralBoundError(f"non-integral upper bound {u!r}")
                if int(u) < 1:
                    raise SchemaError(f"upper bound {u!r} must be at least 1")
                bounds.append(int(u))
            object.__setattr__(self, "upper_bounds", tuple(bounds))
        if self.n < 1:
            raise SchemaError("n must be positive")
        if len(self.costs) != self.n:
            raise SchemaError(f"expected {self.n} costs, got {len(self.costs)}")
        for c in self.costs:
            if not c > 0 or not math.isfinite(c):
                raise NonPositiveCostError(f"non-positive cost {c!r}")
        if self.upper_bounds is not None and len(self.upper_bounds) != self.n:
            raise SchemaError(f"expected {self.n} upper bounds")
        for j, row in enumerate(self.rows):
            if row.entries[-1][0] >= self.n:
                raise SchemaError(f"row {j} references variable {row.entries[-1][0]} >= n")

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def has_bounds(self) -> bool:
        return self.upper_bounds is not None

    def normalized_rows(self) -> list[ConstraintRow]:
        return [normalize_row(r) for r in self.rows]

    def prefix(self, m: int) -> "Instance":
        """The instance formed by the first ``m`` rows."""
        return Instance(self.n, self.costs, self.rows[:m], self.upper_bounds)

    def row_sparsity(self) -> int:
        return max((len(r) for r in self.rows), default=0)

    def column_sparsity(self) -> int:
        counts = [0] * self.n
        for r in self.rows:
            for i in r.support:
                counts[i] += 1
        return max(counts, default=0)


@dataclass
class SparsityTracker:
    """Running row-sparsity estimate ``k_est`` and column counts.

    ``k_est`` starts at 2 and is doubled whenever a wider row shows up, so
    ``log2(k_est)`` is always a positive integer.
    """

    n: int
    k_est: int = 2
    col_counts: list[int] = field(default_factory=list)
    ell_est: int = 0

    def __post_init__(self):
        if not self.col_counts:
            self.col_counts = [0] * self.n

    @property
    def log_k(self) -> int:
        return self.k_est.bit_length() - 1

    def observe_row(self, row: ConstraintRow) -> "SparsityTracker":
        while self.k_est < len(row):
            self.k_est *= 2
        for i in row.support:
            self.col_counts[i] += 1
            if self.col_counts[i] > self.ell_est:
                self.ell_est = self.col_counts[i]
        return self


def observe_row(tracker: SparsityTracker, row: ConstraintRow) -> SparsityTracker:
    return tracker.observe_row(row)


# -- serialization -----------------------------------------------------------

def _instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "c": list(inst.costs),
        "u": None if inst.upper_bounds is None else list(inst.upper_bounds),
        "rows": [
            {"entries": [[i, a] for i, a in r.entries], "rhs": r.rhs}
            for r in inst.rows
        ],
    }


def save_instance(inst: Instance) -> bytes:
    return json.dumps(_instance_to_dict(inst), indent=1).encode() + b"\n"


def _require(cond: bool, msg: str):
    if not cond:
        raise SchemaError(msg)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def instance_from_dict(doc: dict) -> Instance:
    _require(isinstance(doc, dict), "document must be an object")
    missing = {"n", "c", "rows"} - doc.keys()
    _require(not missing, f"missing keys: {sorted(missing)}")
    _require(isinstance(doc["n"], int) and not isinstance(doc["n"], bool), "n must be an integer")
    _require(isinstance(doc["c"], list) and all(_is_number(c) for c in doc["c"]),
             "c must be a list of numbers")
    u = doc.get("u")
    if u is not None:
        _require(isinstance(u, list) and all(_is_number(v) for v in u),
                 "u must be null or a list of numbers")
    _require(isinstance(doc["rows"], list), "rows must be a list")
    rows = []
    for j, r in enumerate(doc["rows"]):
        _require(isinstance(r, dict) and "entries" in r, f"row {j} lacks entries")
        ents = r["entries"]
        _require(isinstance(ents, list), f"row {j} entries must be a list")
        for e in ents:
            _require(isinstance(e, list) and len(e) == 2 and isinstance(e[0], int)
                     and _is_number(e[1]), f"row {j} has a malformed entry {e!r}")
        rhs = r.get("rhs", 1.0)
        _require(_is_number(rhs), f"row {j} rhs must be a number")
        rows.append(ConstraintRow(tuple((e[0], e[1]) for e in ents), rhs))
    return Instance(doc["n"], tuple(doc["c"]), tuple(rows),
                    None if u is None else tuple(u))


def load_instance(data: bytes | str) -> Instance:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not a JSON document: {exc}") from exc
    return instance_from_dict(doc)


def read_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return load_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_instance(inst))


def make_instance(costs: Sequence[float], rows: Iterable, upper_bounds=None) -> Instance:
    """Convenience constructor from ``rows = [([(i, a), ...], rhs), ...]``."""
    built = []
    for r in rows:
        if isinstance(r, ConstraintRow):
            built.append(r)
        else:
            entries, rhs = r
            built.append(ConstraintRow(tuple(entries), rhs))
    return Instance(len(costs), tuple(costs), tuple(built),
                    None if upper_bounds is None else tuple(upper_bounds))
