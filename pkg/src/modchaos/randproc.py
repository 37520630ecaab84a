"""Random processes whose realizations are trajectories of the similarity map.

A process picks, at each time of a grid, one of ``m`` labeled alternatives
with fixed probabilities. Reading the chosen symbols as a label sequence
turns a realization into a :class:`~modchaos.dynamics.ModularPoint`, and
iterating ``phi`` on that point walks through the realized states.

Sampling is seeded. :func:`equivalence_report` derives one child stream per
realization index from ``numpy.random.SeedSequence(seed).spawn``, so the
result does not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .dynamics import ModularPoint, phi_n, point_value
from .errors import BudgetExceeded, InvalidArgument, RangesOverlap
from .structure import (
    DEFAULT_BUDGET,
    FinitePoints,
    GridFunction,
    ModularStructure,
    ModuleSpace,
    SetDescriptor,
    contains,
)
from .symseq import TOL, Alphabet, FiniteSeq, as_alphabet

MAX_DEPTH = 64


@dataclass(frozen=True)
class TimeGrid:
    times: tuple[float, ...]

    def __post_init__(self):
        if not self.times:
            raise InvalidArgument("time grid must be nonempty")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InvalidArgument("time grid must be strictly increasing")

    @classmethod
    def of(cls, times) -> TimeGrid:
        return cls(tuple(float(t) for t in times))

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        return self.times[i]


@dataclass(frozen=True)
class RandomProcessSpec:
    """``state_at(i, a)`` is the state for symbol ``a`` at the i-th grid time (1-based)."""

    alphabet: Alphabet
    state_at: Callable[[int, int], SetDescriptor]
    probabilities: tuple[float, ...]
    grid: TimeGrid | None = None
    name: str = "process"

    def __post_init__(self):
        object.__setattr__(self, "alphabet", as_alphabet(self.alphabet))
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if len(probs) != self.alphabet.m:
            raise InvalidArgument(f"need {self.alphabet.m} probabilities, got {len(probs)}")
        if any(p <= 0 for p in probs):
            raise InvalidArgument("every alternative needs positive probability")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise InvalidArgument(f"probabilities sum to {math.fsum(probs)}, not 1")


@dataclass(frozen=True)
class Realization:
    grid: TimeGrid
    symbols: tuple[int, ...]
    values: tuple[SetDescriptor, ...] = field(repr=False)
    seed: int | None
    alphabet: Alphabet = Alphabet(2)

    def __len__(self):
        return len(self.symbols)


def _generator(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample_realization(spec: RandomProcessSpec, grid: TimeGrid | None = None, seed=0,
                       length: int | None = None) -> Realization:
    """Draw one symbol per grid time, independently, from the categorical law ``spec.probabilities``."""
    grid = grid if grid is not None else spec.grid
    if grid is None:
        raise InvalidArgument("no time grid given and the spec has none")
    length = len(grid) if length is None else length
    if not 0 <= length <= len(grid):
        raise InvalidArgument(f"length {length} outside 0..{len(grid)}")
    m = spec.alphabet.m
    draws = _generator(seed).choice(m, size=length, p=spec.probabilities) + 1
    symbols = tuple(int(s) for s in draws)
    values = tuple(spec.state_at(i + 1, s) for i, s in enumerate(symbols))
    seed_tag = seed if isinstance(seed, int) else None
    return Realization(TimeGrid(grid.times), symbols, values, seed_tag, spec.alphabet)


def realization_to_point(realization: Realization, start_module: int = 1) -> ModularPoint:
    return ModularPoint(start_module, FiniteSeq(realization.alphabet, realization.symbols))


def trajectory_matches(structure: ModularStructure, realization: Realization, start_module: int = 1) -> bool:
    """Whether iterating phi on the realization's label walks through its realized values."""
    point = ModularPoint(start_module, FiniteSeq(structure.alphabet, realization.symbols))
    for i, value in enumerate(realization.values):
        if not contains(point_value(structure, phi_n(point, i), 1), value):
            return False
    return True


@dataclass(frozen=True)
class EquivalenceReport:
    samples: int
    prefix_len: int
    valid_prefix_fraction: float
    coverage: int
    possible: int
    frequency_table: dict[int, float]
    seed: int
    expected_missing: float

    def to_dict(self):
        return {
            "samples": self.samples, "prefix_len": self.prefix_len,
            "valid_prefix_fraction": self.valid_prefix_fraction,
            "coverage": self.coverage, "possible": self.possible,
            "frequency_table": {str(k): v for k, v in self.frequency_table.items()},
            "seed": self.seed, "expected_missing": self.expected_missing,
        }


def expected_missing_prefixes(probabilities: Sequence[float], prefix_len: int, n_samples: int) -> float:
    """Exact expected number of length-``prefix_len`` words never observed in ``n_samples`` draws."""
    total = 0.0
    m = len(probabilities)
    for counts in _compositions(prefix_len, m):
        p_word = math.prod(p**c for p, c in zip(probabilities, counts))
        n_words = math.factorial(prefix_len) // math.prod(math.factorial(c) for c in counts)
        total += n_words * (1.0 - p_word) ** n_samples
    return total


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def equivalence_report(spec: RandomProcessSpec, structure: ModularStructure, n_samples: int, prefix_len: int,
                       seed: int = 0, grid: TimeGrid | None = None, budget: int = DEFAULT_BUDGET,
                       start_module: int = 1) -> EquivalenceReport:
    m = spec.alphabet.m
    possible = m**prefix_len
    if possible > budget:
        raise BudgetExceeded(f"{m}^{prefix_len} = {possible} prefixes exceeds budget {budget}")
    expected = expected_missing_prefixes(spec.probabilities, prefix_len, n_samples)
    if n_samples == 0:
        return EquivalenceReport(0, prefix_len, 0.0, 0, possible, {a: 0.0 for a in range(1, m + 1)}, seed, expected)
    counts = np.zeros(m + 1, dtype=np.int64)
    seen = set()
    valid = 0
    for child in np.random.SeedSequence(seed).spawn(n_samples):
        r = sample_realization(spec, grid, child, prefix_len)
        seen.add(r.symbols)
        counts += np.bincount(r.symbols, minlength=m + 1)
        valid += trajectory_matches(structure, r, start_module)
    total = n_samples * prefix_len
    freqs = {a: (float(counts[a]) / total if total else 0.0) for a in range(1, m + 1)}
    return EquivalenceReport(n_samples, prefix_len, valid / n_samples, len(seen), possible, freqs, seed, expected)


def _point_structure(alphabet: Alphabet, states: Callable[[int], Sequence[float]], module_range: range,
                     name: str) -> ModularStructure:
    """Modules whose depth >= 1 cells are the single point selected by the first label symbol."""

    def factory(j: int) -> ModuleSpace:
        pts = tuple(states(j))

        @lru_cache(maxsize=None)
        def cell_map(prefix):
            return FinitePoints.of(*pts) if not prefix else FinitePoints.of(pts[prefix[0] - 1])

        return ModuleSpace(j, alphabet, cell_map, MAX_DEPTH, f"{name} module {j}")

    return ModularStructure(alphabet, factory, module_range, name)


def example1_structure(functions: Sequence[Callable[[float], float]], probabilities: Sequence[float],
                       grid: TimeGrid | Sequence[float], min_gap: float = TOL):
    """Process taking the value f_a(t) with probability p_a; the label's first symbol picks a."""
    grid = grid if isinstance(grid, TimeGrid) else TimeGrid.of(grid)
    m = len(functions)
    alphabet = as_alphabet(m)
    values = np.array([[float(f(t)) for t in grid.times] for f in functions])
    gap = min(float(np.min(np.abs(values[a][:, None] - values[b][None, :])))
              for a in range(m) for b in range(a + 1, m))
    if gap <= min_gap:
        raise RangesOverlap(f"function ranges are {gap:g} apart on the grid, need > {min_gap:g}")

    def states(j):
        if not 1 <= j <= len(grid):
            raise InvalidArgument(f"module {j} outside the grid 1..{len(grid)}")
        return values[:, j - 1]

    structure = _point_structure(alphabet, states, range(1, len(grid) + 1), "function-family")

    @lru_cache(maxsize=None)
    def state_at(i, a):
        return FinitePoints.of(values[a - 1, i - 1])

    spec = RandomProcessSpec(alphabet, state_at, tuple(probabilities), grid, "function-family")
    return spec, structure


def example2_grid() -> TimeGrid:
    return TimeGrid(tuple(i / 100 for i in range(100, 401)))


def example2_structure():
    """X(t) = t or -t with probability 1/2 each, on t_i = i/100, i = 100..400.

    Module j sits at time t = (99 + j)/100, so the grid covers modules 1..301;
    the factory also accepts larger j (the state set grows with t).
    """
    alphabet = Alphabet(2)

    def t_of(j):
        return (99 + j) / 100

    structure = _point_structure(alphabet, lambda j: (t_of(j), -t_of(j)), range(1, 302), "plus-minus-t")

    @lru_cache(maxsize=None)
    def state_at(i, a):
        t = t_of(i)
        return FinitePoints.of(t if a == 1 else -t)

    grid = example2_grid()
    spec = RandomProcessSpec(alphabet, state_at, (0.5, 0.5), grid, "plus-minus-t")
    return spec, structure, grid


def example3_interval_grid(i: int, points: int = 101) -> tuple[float, ...]:
    """``points`` equally spaced times on [i/10, (i+1)/10), the right end excluded."""
    return tuple(float(t) for t in np.linspace(i / 10, (i + 1) / 10, points, endpoint=False))


def example3_structure(i_range: range = range(10, 40), points: int = 101):
    """Discrete-time process choosing f_i(t) = t or g_i(t) = -t on [i/10, (i+1)/10).

    Module j is interval i = i_range.start + j - 1; states are grid-sampled
    functions compared in the sup metric.
    """
    alphabet = Alphabet(2)
    i0 = i_range.start

    @lru_cache(maxsize=None)
    def functions(j):
        if j < 1:
            raise InvalidArgument("module index must be >= 1")
        grid = example3_interval_grid(i0 + j - 1, points)
        return grid, tuple(grid), tuple(-t for t in grid)

    def factory(j):
        grid, f, g = functions(j)

        @lru_cache(maxsize=None)
        def cell_map(prefix):
            if not prefix:
                return GridFunction(grid, (f, g))
            return GridFunction(grid, (f,) if prefix[0] == 1 else (g,))

        return ModuleSpace(j, alphabet, cell_map, MAX_DEPTH, f"interval-functions i={i0 + j - 1}")

    structure = ModularStructure(alphabet, factory, range(1, len(i_range) + 1), "interval-functions")

    @lru_cache(maxsize=None)
    def state_at(i, a):
        grid, f, g = functions(i)
        return GridFunction(grid, (f if a == 1 else g,))

    time_grid = TimeGrid(tuple(float(i) for i in i_range))
    spec = RandomProcessSpec(alphabet, state_at, (0.5, 0.5), time_grid, "interval-functions")
    return spec, structure


def _scalar(value: SetDescriptor) -> float:
    if isinstance(value, FinitePoints) and len(value.points) == 1 and value.dim == 1:
        return value.points[0][0]
    raise InvalidArgument(f"expected a single real point, got {value!r}")


def path_rows(realization: Realization, step_mode: str = "step") -> list[tuple[float, float]]:
    """Vertices (t, x) of the realized path.

    Point states: ``"step"`` holds x_i on [t_i, t_{i+1}) and gives two rows per
    segment; ``"points"`` gives one row per grid time. Function states are
    listed on their own grids in either mode.
    """
    if len(realization) == 0:
        raise InvalidArgument("empty realization")
    if step_mode not in ("step", "points"):
        raise InvalidArgument(f"unknown step mode {step_mode!r}")
    values = realization.values
    if all(isinstance(v, GridFunction) and len(v.values) == 1 for v in values):
        return [(t, x) for v in values for t, x in zip(v.grid, v.values[0])]
    xs = [_scalar(v) for v in values]
    ts = realization.grid.times[:len(xs)]
    if step_mode == "points":
        return list(zip(ts, xs))
    rows = []
    for i in range(len(xs) - 1):
        rows += [(ts[i], xs[i]), (ts[i + 1], xs[i])]
    return rows


def emit_path_csv(realization: Realization, step_mode: str = "step") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x"])
    writer.writerows((repr(t), repr(x)) for t, x in path_rows(realization, step_mode))
    return buf.getvalue()


def parse_path_csv(text: str) -> list[tuple[float, float]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["t", "x"]:
        raise InvalidArgument(f"bad CSV header {header}")
    return [(float(t), float(x)) for t, x in reader]
