"""Metric-space modules with prefix-labeled cells, and their certifiers.

A module ``j`` maps every finite label prefix to a bounded set (a
:class:`SetDescriptor`); the empty prefix gives the whole module set. The
certifiers check nesting, the diameter condition and the separation
condition on finitely many prefixes and modules, and say so in their output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DepthExceeded,
    IncompatibleDescriptors,
    InvalidArgument,
)
from .symseq import TOL, Alphabet, as_alphabet

DEFAULT_BUDGET = 4096
SEPARATION_BUDGET = 256


class SetDescriptor:
    """A nonempty bounded set with computable diameter and inter-set distance."""

    def diameter(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FinitePoints(SetDescriptor):
    points: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.points:
            raise InvalidArgument("FinitePoints must be nonempty")
        if len({len(p) for p in self.points}) != 1:
            raise InvalidArgument("all points must share one dimension")

    @classmethod
    def of(cls, *points) -> FinitePoints:
        """Accepts scalars (1-d points) or coordinate sequences."""
        return cls(tuple(tuple(float(c) for c in np.atleast_1d(p)) for p in points))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def diameter(self) -> float:
        a = self.array
        return float(np.max(np.linalg.norm(a[:, None, :] - a[None, :, :], axis=-1)))

    def to_dict(self):
        pts = [p[0] if len(p) == 1 else list(p) for p in self.points]
        return {"type": "points", "points": pts}


@dataclass(frozen=True)
class Interval(SetDescriptor):
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidArgument(f"interval lo {self.lo} > hi {self.hi}")

    def diameter(self) -> float:
        return float(self.hi - self.lo)

    def to_dict(self):
        return {"type": "interval", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class GridFunction(SetDescriptor):
    """A finite set of functions sampled on a shared grid, with the sup metric.

    ``values`` holds one row per function; a single row is a singleton set.
    """

    grid: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.grid or not self.values:
            raise InvalidArgument("GridFunction needs a nonempty grid and at least one function")
        if any(len(row) != len(self.grid) for row in self.values):
            raise InvalidArgument("every function row must match the grid length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InvalidArgument("grid must be strictly increasing")

    @classmethod
    def of(cls, grid, *rows) -> GridFunction:
        return cls(tuple(float(t) for t in grid), tuple(tuple(float(v) for v in r) for r in rows))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def diameter(self) -> float:
        a = self.array
        return float(np.max(np.abs(a[:, None, :] - a[None, :, :])))

    def to_dict(self):
        return {"type": "grid-function", "grid": list(self.grid), "values": [list(r) for r in self.values]}


def _same_grid(a: GridFunction, b: GridFunction) -> bool:
    return len(a.grid) == len(b.grid) and np.allclose(a.grid, b.grid, rtol=0, atol=TOL)


def diameter(a: SetDescriptor) -> float:
    return a.diameter()


def set_distance(a: SetDescriptor, b: SetDescriptor) -> float:
    """Infimum of pairwise distances between the two sets."""
    if isinstance(a, Interval) and isinstance(b, Interval):
        return float(max(0.0, b.lo - a.hi, a.lo - b.hi))
    if isinstance(a, FinitePoints) and isinstance(b, FinitePoints):
        if a.dim != b.dim:
            raise IncompatibleDescriptors(f"point dimensions differ: {a.dim} vs {b.dim}")
        x, y = a.array, b.array
        return float(np.min(np.linalg.norm(x[:, None, :] - y[None, :, :], axis=-1)))
    if isinstance(a, Interval) and isinstance(b, FinitePoints):
        a, b = b, a
    if isinstance(a, FinitePoints) and isinstance(b, Interval):
        if a.dim != 1:
            raise IncompatibleDescriptors("intervals only live on the real line")
        x = a.array[:, 0]
        return float(np.min(np.maximum(0.0, np.maximum(b.lo - x, x - b.hi))))
    if isinstance(a, GridFunction) and isinstance(b, GridFunction):
        if not _same_grid(a, b):
            raise IncompatibleDescriptors("grid functions must share a grid")
        x, y = a.array, b.array
        return float(np.min(np.max(np.abs(x[:, None, :] - y[None, :, :]), axis=-1)))
    raise IncompatibleDescriptors(f"no distance between {type(a).__name__} and {type(b).__name__}")


def contains(parent: SetDescriptor, child: SetDescriptor, tol: float = TOL) -> bool:
    """Whether ``child`` is a subset of ``parent`` up to ``tol``."""
    if child == parent:
        return True
    if isinstance(parent, Interval):
        if isinstance(child, Interval):
            return parent.lo - tol <= child.lo and child.hi <= parent.hi + tol
        if isinstance(child, FinitePoints) and child.dim == 1:
            x = child.array[:, 0]
            return bool(np.all((x >= parent.lo - tol) & (x <= parent.hi + tol)))
    if isinstance(parent, FinitePoints):
        if isinstance(child, FinitePoints) and child.dim == parent.dim:
            d = np.linalg.norm(child.array[:, None, :] - parent.array[None, :, :], axis=-1)
            return bool(np.all(d.min(axis=1) <= tol))
        if isinstance(child, Interval) and parent.dim == 1 and child.diameter() <= tol:
            return bool(np.any(np.abs(parent.array[:, 0] - child.lo) <= tol))
    if isinstance(parent, GridFunction) and isinstance(child, GridFunction):
        if not _same_grid(parent, child):
            return False
        d = np.max(np.abs(child.array[:, None, :] - parent.array[None, :, :]), axis=-1)
        return bool(np.all(d.min(axis=1) <= tol))
    raise IncompatibleDescriptors(f"cannot test {type(child).__name__} inside {type(parent).__name__}")


@dataclass
class ModuleSpace:
    """One module: index ``j``, alphabet, and its cell map from label prefixes to sets."""

    index: int
    alphabet: Alphabet
    cell_map: Callable[[tuple[int, ...]], SetDescriptor]
    max_depth: int
    description: str = ""

    def __post_init__(self):
        self.alphabet = as_alphabet(self.alphabet)
        if self.index < 1:
            raise InvalidArgument(f"module index must be >= 1, got {self.index}")

    def cell(self, prefix: Sequence[int] = ()) -> SetDescriptor:
        prefix = self.alphabet.validate(prefix)
        if len(prefix) > self.max_depth:
            raise DepthExceeded(f"prefix length {len(prefix)} > max depth {self.max_depth} of module {self.index}")
        return self.cell_map(prefix)

    @property
    def whole(self) -> SetDescriptor:
        return self.cell(())


def cell(module: ModuleSpace, prefix: Sequence[int]) -> SetDescriptor:
    return module.cell(prefix)


class ModularStructure:
    """A countable family of modules sharing one alphabet.

    ``module_factory(j)`` must be pure. ``module_range`` is the contiguous
    range of indices the certifiers check by default; the factory itself may
    accept indices outside it.
    """

    def __init__(self, alphabet: Alphabet | int, module_factory: Callable[[int], ModuleSpace],
                 module_range: range, name: str = "structure"):
        self.alphabet = as_alphabet(alphabet)
        self.module_factory = module_factory
        self.module_range = module_range
        self.name = name
        self._cache: dict[int, ModuleSpace] = {}

    def module(self, j: int) -> ModuleSpace:
        mod = self._cache.get(j)
        if mod is None:
            mod = self.module_factory(j)
            if mod.index != j:
                raise InvalidArgument(f"factory returned module {mod.index} for index {j}")
            if mod.alphabet != self.alphabet:
                raise InvalidArgument(f"module {j} alphabet differs from the structure's")
            self._cache[j] = mod
        return mod

    def __repr__(self):
        r = self.module_range
        return f"ModularStructure({self.name!r}, m={self.alphabet.m}, j={r.start}..{r.stop - 1})"


def prefixes(m: int, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[tuple[int, ...]]:
    """All length-``n`` words over 1..m in lexicographic order."""
    if m**n > budget:
        raise BudgetExceeded(f"{m}^{n} = {m**n} prefixes exceeds budget {budget}")
    return itertools.product(range(1, m + 1), repeat=n)


@dataclass(frozen=True)
class NestingReport:
    module: int
    depth: int
    ok: bool
    violation: tuple[int, ...] | None = None

    def to_dict(self):
        return {"module": self.module, "depth": self.depth, "ok": self.ok,
                "violation": list(self.violation) if self.violation is not None else None}


def check_nesting(module: ModuleSpace, depth: int, tol: float = TOL, budget: int = DEFAULT_BUDGET) -> NestingReport:
    """Every child cell must lie inside its parent, for all prefixes up to ``depth``."""
    if depth > module.max_depth:
        raise DepthExceeded(f"depth {depth} > max depth {module.max_depth}")
    m = module.alphabet.m
    for n in range(depth):
        for parent in prefixes(m, n, budget):
            outer = module.cell(parent)
            for a in range(1, m + 1):
                child = parent + (a,)
                if not contains(outer, module.cell(child), tol):
                    return NestingReport(module.index, depth, False, child)
    return NestingReport(module.index, depth, True)


@dataclass(frozen=True)
class DiameterReport:
    module: int | None
    table: tuple[float, ...]
    threshold: float
    verdict: bool
    strong: bool | None = None

    def to_dict(self):
        return {"module": self.module, "table": list(self.table), "threshold": self.threshold,
                "verdict": self.verdict, "strong": self.strong}


def _nonincreasing(values: Sequence[float], tol: float = TOL) -> bool:
    return all(b <= a + tol for a, b in zip(values, values[1:]))


def max_diameter(module: ModuleSpace, depth: int, budget: int = DEFAULT_BUDGET) -> float:
    return max(module.cell(p).diameter() for p in prefixes(module.alphabet.m, depth, budget))


def diameter_report(module: ModuleSpace, max_depth_checked: int, threshold: float = TOL,
                    budget: int = DEFAULT_BUDGET) -> DiameterReport:
    """Max cell diameter per depth 0..max_depth_checked, and whether it has decayed."""
    if max_depth_checked > module.max_depth:
        raise DepthExceeded(f"depth {max_depth_checked} > max depth {module.max_depth}")
    table = tuple(max_diameter(module, n, budget) for n in range(max_depth_checked + 1))
    verdict = table[-1] <= threshold and _nonincreasing(table)
    return DiameterReport(module.index, table, threshold, verdict)


@dataclass(frozen=True)
class SeparationReport:
    module: int
    degree: int
    epsilon: float
    witnesses: dict[tuple[int, ...], tuple[int, ...]] = field(repr=False)

    def to_dict(self, with_witnesses: bool = False):
        out = {"module": self.module, "degree": self.degree, "epsilon": self.epsilon}
        if with_witnesses:
            out["witnesses"] = {"".join(map(str, i)) if i else "": "".join(map(str, w))
                                for i, w in self.witnesses.items()}
        return out


def separation_report(module: ModuleSpace, degree: int, budget: int = SEPARATION_BUDGET) -> SeparationReport:
    """epsilon = min over i of max over j of dist(cell(i), cell(j)), all length-``degree`` prefixes."""
    if degree > module.max_depth:
        raise DepthExceeded(f"degree {degree} > max depth {module.max_depth}")
    words = list(prefixes(module.alphabet.m, degree, budget))
    cells = [module.cell(w) for w in words]
    witnesses = {}
    epsilon = np.inf
    for wi, ci in zip(words, cells):
        # first maximiser in lexicographic order
        best, best_d = words[0], -1.0
        for wj, cj in zip(words, cells):
            d = set_distance(ci, cj)
            if d > best_d:
                best, best_d = wj, d
        witnesses[wi] = best
        epsilon = min(epsilon, best_d)
    return SeparationReport(module.index, degree, float(epsilon), witnesses)


@dataclass(frozen=True)
class Certificate:
    """Finite-range evidence for a (strong) modular chaotic structure."""

    kind: str
    structure: str
    modules: tuple[int, int]
    depths: tuple[int, ...]
    degree: int
    threshold: float
    epsilon0: float
    epsilon0_module: int
    nesting_ok: bool
    diameter_ok: bool
    verdict: bool
    per_module: tuple[dict, ...] = field(repr=False)
    sup_table: tuple[float, ...] | None = None

    @property
    def statement(self) -> str:
        lo, hi = self.modules
        cond = "strong diameter" if self.kind == "strong" else "diameter"
        return (f"checked modules j={lo}..{hi} at depths {list(self.depths)} and separation degree "
                f"{self.degree}: nesting, {cond} (<= {self.threshold:g} at the deepest level) and "
                f"min separation {self.epsilon0:.12g} > 0 are finite facts, not a proof for all j")

    def to_dict(self, per_module: bool = False):
        out = {
            "kind": self.kind, "structure": self.structure, "modules": list(self.modules),
            "depths": list(self.depths), "degree": self.degree, "threshold": self.threshold,
            "epsilon0": self.epsilon0, "epsilon0_module": self.epsilon0_module,
            "nesting_ok": self.nesting_ok, "diameter_ok": self.diameter_ok,
            "verdict": self.verdict, "statement": self.statement,
        }
        if self.sup_table is not None:
            out["sup_table"] = list(self.sup_table)
        if per_module:
            out["per_module"] = list(self.per_module)
        return out


def _resolve_range(structure: ModularStructure, j_range: Iterable[int] | None) -> list[int]:
    js = list(structure.module_range if j_range is None else j_range)
    if not js:
        raise InvalidArgument("empty module range")
    if any(b != a + 1 for a, b in zip(js, js[1:])):
        raise InvalidArgument("module range must be contiguous")
    return js


def modular_certificate(structure: ModularStructure, j_range: Iterable[int] | None = None, depth: int = 4,
                        degree: int = 1, threshold: float = TOL, budget: int = DEFAULT_BUDGET,
                        separation_budget: int = SEPARATION_BUDGET) -> Certificate:
    js = _resolve_range(structure, j_range)
    rows = []
    for j in js:
        mod = structure.module(j)
        nest = check_nesting(mod, depth, budget=budget)
        diam = diameter_report(mod, depth, threshold, budget)
        sep = separation_report(mod, degree, separation_budget)
        rows.append({"module": j, "nesting_ok": nest.ok, "violation": nest.to_dict()["violation"],
                     "diameters": list(diam.table), "diameter_ok": diam.verdict, "epsilon": sep.epsilon})
    return _assemble("modular", structure, js, tuple(range(depth + 1)), degree, threshold, rows)


def strong_certificate(structure: ModularStructure, j_range: Iterable[int] | None = None,
                       depths: Sequence[int] = (1, 2, 3, 4), threshold: float = TOL, degree: int = 1,
                       budget: int = DEFAULT_BUDGET, separation_budget: int = SEPARATION_BUDGET) -> Certificate:
    """Like :func:`modular_certificate`, but the diameter must decay uniformly in j."""
    depths = tuple(sorted(set(depths)))
    if not depths:
        raise InvalidArgument("depth list must be nonempty")
    js = _resolve_range(structure, j_range)
    rows = []
    for j in js:
        mod = structure.module(j)
        nest = check_nesting(mod, depths[-1], budget=budget)
        sep = separation_report(mod, degree, separation_budget)
        rows.append({"module": j, "nesting_ok": nest.ok, "violation": nest.to_dict()["violation"],
                     "diameters": [max_diameter(mod, n, budget) for n in depths], "epsilon": sep.epsilon})
    sup = tuple(max(r["diameters"][k] for r in rows) for k in range(len(depths)))
    diameter_ok = sup[-1] <= threshold and _nonincreasing(sup)
    return _assemble("strong", structure, js, depths, degree, threshold, rows, sup, diameter_ok)


def _assemble(kind, structure, js, depths, degree, threshold, rows, sup=None, diameter_ok=None) -> Certificate:
    nesting_ok = all(r["nesting_ok"] for r in rows)
    if diameter_ok is None:
        diameter_ok = all(r["diameter_ok"] for r in rows)
    best = min(rows, key=lambda r: (r["epsilon"], r["module"]))
    eps0 = best["epsilon"]
    return Certificate(
        kind=kind, structure=structure.name, modules=(js[0], js[-1]), depths=depths, degree=degree,
        threshold=threshold, epsilon0=eps0, epsilon0_module=best["module"], nesting_ok=nesting_ok,
        diameter_ok=diameter_ok, verdict=bool(nesting_ok and diameter_ok and eps0 > TOL),
        per_module=tuple(rows), sup_table=sup,
    )
