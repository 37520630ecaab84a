"""The modular similarity map and constructive chaos witnesses.

A :class:`ModularPoint` is a module index together with a label sequence.
``phi`` drops the first label symbol and moves to the next module, so after
``n`` steps both the module index and the label have shifted by ``n``.

Distances between labeled points are never exact here: a point is only known
through the cell of its first ``depth`` symbols, so :func:`point_distance`
returns an interval. Separation claims use its lower end, proximity claims
its upper end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidArgument,
    InvalidOffset,
    ModuleMismatch,
    PreconditionError,
    WitnessNotFound,
)
from .structure import (
    DEFAULT_BUDGET,
    SEPARATION_BUDGET,
    ModularStructure,
    SetDescriptor,
    contains,
    prefixes,
    separation_report,
    set_distance,
)
from .symseq import (
    TOL,
    FiniteSeq,
    MetricInterval,
    PeriodicSeq,
    SymbolSeq,
    agreement_prefix_length,
    concat,
    contains_word,
)


@dataclass(frozen=True)
class ModularPoint:
    j: int
    seq: SymbolSeq

    def __post_init__(self):
        if self.j < 1:
            raise InvalidArgument(f"module index must be >= 1, got {self.j}")

    def describe(self, n: int = 16) -> dict:
        return {"module": self.j, "label_prefix": list(self.seq.prefix(self.seq.available(n)))}


def phi(p: ModularPoint) -> ModularPoint:
    return ModularPoint(p.j + 1, p.seq.shift(1))


def phi_n(p: ModularPoint, n: int) -> ModularPoint:
    if n < 0:
        raise InvalidArgument("iteration count must be >= 0")
    return ModularPoint(p.j + n, p.seq.shift(n))


def point_value(structure: ModularStructure, p: ModularPoint, depth: int) -> SetDescriptor:
    """Cell of module ``p.j`` at the first ``depth`` label symbols."""
    return structure.module(p.j).cell(p.seq.prefix(depth))


def point_distance(structure: ModularStructure, a: ModularPoint, b: ModularPoint, depth: int) -> MetricInterval:
    """[dist(A, B), dist(A, B) + diam A + diam B] for the depth-limited cells A, B."""
    if a.j != b.j:
        raise ModuleMismatch(f"points live in modules {a.j} and {b.j}")
    ca, cb = point_value(structure, a, depth), point_value(structure, b, depth)
    lo = set_distance(ca, cb)
    return MetricInterval(lo, lo + ca.diameter() + cb.diameter(), depth)


def in_km_neighborhood(a: ModularPoint, b: ModularPoint, k: int, length: int) -> bool:
    """a.j + k == b.j and a's symbols k+1..k+length equal b's first ``length``."""
    if length < 1:
        raise InvalidArgument("neighborhood length must be >= 1")
    if a.j + k != b.j:
        return False
    return a.seq.shift(k).prefix(length) == b.seq.prefix(length)


def _same_set(x: SetDescriptor, y: SetDescriptor, tol: float) -> bool:
    try:
        return contains(x, y, tol) and contains(y, x, tol)
    except Exception:  # incompatible descriptors cannot be equal
        return False


@dataclass(frozen=True)
class AffineReport:
    prefix: tuple[int, ...]
    j_start: int
    order: int
    extensions: int
    landing_modules: tuple[int, ...]
    covers: dict[int, bool]

    @property
    def computed_index(self) -> int:
        return self.j_start + self.order

    @property
    def stated_index(self) -> int:
        return self.j_start + self.order + 1

    def to_dict(self):
        return {
            "prefix": list(self.prefix), "j_start": self.j_start, "order": self.order,
            "extensions": self.extensions, "landing_modules": sorted(set(self.landing_modules)),
            "covers_j_plus_n": self.covers[self.computed_index],
            "covers_j_plus_n_plus_1": self.covers[self.stated_index],
        }


def verify_affine_similarity(structure: ModularStructure, prefix: Sequence[int], j_start: int,
                             budget: int = DEFAULT_BUDGET, tol: float = TOL) -> AffineReport:
    """Push every extension of ``prefix`` forward ``len(prefix)`` steps and compare with the target modules.

    For both candidate targets (module j+n and module j+n+1) the report says
    whether every depth-n cell there coincides with the cell reached by some
    pushed-forward point.
    """
    prefix = structure.alphabet.validate(prefix)
    n = len(prefix)
    m = structure.alphabet.m
    images, landing = [], []
    for w in prefixes(m, n, budget):
        q = phi_n(ModularPoint(j_start, FiniteSeq(structure.alphabet, prefix + w)), n)
        landing.append(q.j)
        images.append(point_value(structure, q, n))
    covers = {}
    for target in (j_start + n, j_start + n + 1):
        mod = structure.module(target)
        covers[target] = all(any(_same_set(mod.cell(w), img, tol) for img in images)
                             for w in prefixes(m, n, budget))
    return AffineReport(prefix, j_start, n, len(images), tuple(landing), covers)


@dataclass(frozen=True)
class SensitivityWitness:
    base: ModularPoint
    companion: ModularPoint
    shared_prefix_len: int
    iterate: int
    initial_distance_bound: float
    separated_distance: float
    kappa: float
    epsilon0: float
    degree: int = 1

    def to_dict(self):
        n = self.shared_prefix_len + 8
        return {
            "base": self.base.describe(n), "companion": self.companion.describe(n),
            "shared_prefix_len": self.shared_prefix_len, "iterate": self.iterate,
            "initial_distance_bound": self.initial_distance_bound,
            "separated_distance": self.separated_distance,
            "kappa": self.kappa, "epsilon0": self.epsilon0,
        }


def find_sensitivity_witness(structure: ModularStructure, p: ModularPoint, kappa: float, epsilon0: float,
                             max_shared: int = 64, degree: int = 1,
                             separation_budget: int = SEPARATION_BUDGET) -> SensitivityWitness:
    """Keep a shared prefix of length k, then switch to a separating word of the module reached after k steps.

    The smallest k whose shared cell is narrower than ``kappa`` and whose
    separated cells are at least ``epsilon0`` apart wins.
    """
    if epsilon0 <= TOL:
        raise PreconditionError(f"structure separation constant must be positive, got {epsilon0}")
    if kappa <= 0:
        raise InvalidArgument("kappa must be positive")
    home = structure.module(p.j)
    for k in range(0, min(max_shared, home.max_depth) + 1):
        shared = p.seq.prefix(k)
        bound = home.cell(shared).diameter()
        if bound >= kappa:
            continue
        later = phi_n(p, k)
        word = later.seq.prefix(degree)
        target = separation_report(structure.module(later.j), degree, separation_budget).witnesses[word]
        if target == word:
            continue
        q = ModularPoint(p.j, concat(shared + target, p.seq.shift(k + degree)))
        sep = point_distance(structure, later, phi_n(q, k), degree).lo
        if sep >= epsilon0 - TOL:
            return SensitivityWitness(p, q, agreement_prefix_length(p.seq, q.seq, k + degree), k,
                                      bound, sep, kappa, epsilon0, degree)
    raise WitnessNotFound(f"no sensitivity witness for module {p.j} with shared prefix <= {max_shared}")


def validate_sensitivity(structure: ModularStructure, w: SensitivityWitness, tol: float = TOL) -> bool:
    """Re-check a witness from scratch with fresh cell and distance lookups."""
    k = w.shared_prefix_len
    if w.base.j != w.companion.j or w.base.seq.prefix(k) != w.companion.seq.prefix(k):
        return False
    shared_cell = structure.module(w.base.j).cell(w.base.seq.prefix(k))
    a, b = phi_n(w.base, w.iterate), phi_n(w.companion, w.iterate)
    separated = point_distance(structure, a, b, w.degree).lo
    return shared_cell.diameter() < w.kappa and separated >= w.epsilon0 - tol


@dataclass(frozen=True)
class TransitivityWitness:
    source: ModularPoint
    target: tuple[int, ...]
    shift: int
    landing_module: int

    def target_point(self) -> ModularPoint:
        return ModularPoint(self.landing_module, FiniteSeq(self.source.seq.alphabet, self.target))

    def validate(self) -> bool:
        return in_km_neighborhood(self.source, self.target_point(), self.shift, len(self.target))

    def to_dict(self):
        return {"source_module": self.source.j, "target": list(self.target), "shift": self.shift,
                "landing_module": self.landing_module}


def find_transitivity_witness(structure: ModularStructure | None, source: ModularPoint,
                              target_prefix: Sequence[int], horizon: int = 100_000) -> TransitivityWitness:
    """Smallest shift after which the source label starts with ``target_prefix``."""
    alphabet = structure.alphabet if structure is not None else source.seq.alphabet
    target = alphabet.validate(target_prefix)
    pos = contains_word(source.seq, target, horizon)
    if pos is None:
        raise WitnessNotFound(f"word {target} not found within horizon {horizon}")
    return TransitivityWitness(source, target, pos - 1, source.j + pos - 1)


def periodic_point_in_neighborhood(target: ModularPoint, l: int, module_offset: int) -> ModularPoint:
    """A period-``l`` point in module ``target.j - module_offset`` that is (offset, l)-close to ``target``.

    Its block is the target's first ``l`` symbols rotated so that they are
    read at positions offset+1 .. offset+l.
    """
    if l < 1:
        raise InvalidArgument("l must be >= 1")
    if module_offset < 0 or target.j - module_offset < 1:
        raise InvalidOffset(f"offset {module_offset} from module {target.j} leaves the index range")
    word = target.seq.prefix(l)
    block = tuple(word[(r - module_offset) % l] for r in range(l))
    return ModularPoint(target.j - module_offset, PeriodicSeq(target.seq.alphabet, block))


@dataclass(frozen=True)
class UnpredictabilityEntry:
    l: int
    kappa: int
    zeta: int
    cell_distance: float | None = None

    def to_dict(self):
        return {"l": self.l, "kappa": self.kappa, "zeta": self.zeta, "cell_distance": self.cell_distance}


@dataclass(frozen=True)
class UnpredictabilityWitness:
    point: ModularPoint
    horizon: int
    entries: tuple[UnpredictabilityEntry, ...]
    missing: tuple[int, ...]

    @property
    def found(self) -> bool:
        return not self.missing

    def to_dict(self):
        return {"point": self.point.describe(), "horizon": self.horizon, "found": self.found,
                "entries": [e.to_dict() for e in self.entries], "missing": list(self.missing)}


def _first_mismatch(arr: np.ndarray, kappa: int, h: int) -> int | None:
    """Smallest zeta >= 1 with s[2k+zeta] != s[k+zeta] (1-based), both within h."""
    start, width = 0, 256
    span = h - 2 * kappa
    while start < span:
        stop = min(span, start + width)
        diff = np.flatnonzero(arr[2 * kappa + start:2 * kappa + stop] != arr[kappa + start:kappa + stop])
        if diff.size:
            return start + int(diff[0]) + 1
        start, width = stop, width * 4
    return None


def check_unpredictability(p: ModularPoint, l_schedule: Iterable[int], horizon: int,
                           structure: ModularStructure | None = None) -> UnpredictabilityWitness:
    """Finite-horizon search for recurrence shifts kappa_n and mismatch offsets zeta_n.

    For each l the smallest kappa (larger than the previous entry's) is taken
    such that the label shifted by kappa starts with the same l symbols and
    still differs from the unshifted label at position kappa + zeta.

    For an eventually periodic label one extra level, preperiod + period, is
    appended to the schedule: at that level the shift reproduces the whole
    label, so no mismatch can exist and the point is reported as predictable.
    """
    schedule = sorted(set(l_schedule))
    if not schedule or schedule[0] < 1:
        raise InvalidArgument("l schedule must contain positive integers")
    seq = p.seq
    periodic = isinstance(seq, PeriodicSeq)
    if periodic:
        decisive = len(seq.pre) + seq.period
        if schedule[-1] < decisive:
            schedule.append(decisive)
    h = seq.available(horizon)
    arr = seq.as_array(h)
    entries, missing = [], []
    prev = 0
    for l in schedule:
        if l >= h:
            missing.append(l)
            continue
        windows = np.lib.stride_tricks.sliding_window_view(arr, l)
        cand = np.flatnonzero((windows[1:] == arr[:l]).all(axis=1)) + 1
        cand = cand[(cand > prev) & (2 * cand + 1 <= h)]
        if periodic:
            # past the preperiod a multiple of the period reproduces the label
            cand = cand[(cand % seq.minimal_period != 0) | (cand < len(seq.pre))]
        hit = None
        for kappa in cand:
            zeta = _first_mismatch(arr, int(kappa), h)
            if zeta is not None:
                hit = (int(kappa), zeta)
                break
        if hit is None:
            missing.append(l)
            continue
        kappa, zeta = hit
        dist = None
        if structure is not None:
            mod = structure.module(p.j + kappa + zeta - 1)
            dist = set_distance(mod.cell((int(arr[2 * kappa + zeta - 1]),)), mod.cell((int(arr[kappa + zeta - 1]),)))
        entries.append(UnpredictabilityEntry(l, kappa, zeta, dist))
        prev = kappa
    return UnpredictabilityWitness(p, h, tuple(entries), tuple(missing))


@dataclass(frozen=True)
class LiYorkeReport:
    pair: tuple[ModularPoint, ModularPoint]
    horizon: int
    kappa: float
    eps: float
    depth: int
    proximal_events: tuple[tuple[int, float], ...] = field(repr=False)
    separated_events: tuple[tuple[int, float], ...] = field(repr=False)

    def to_dict(self, keep: int = 10):
        def head(ev):
            return [list(e) for e in ev[:keep]]

        return {
            "pair": [q.describe() for q in self.pair], "horizon": self.horizon, "kappa": self.kappa,
            "eps": self.eps, "depth": self.depth,
            "proximal_count": len(self.proximal_events), "separated_count": len(self.separated_events),
            "proximal_first": head(self.proximal_events), "separated_first": head(self.separated_events),
            "separated_iterates": [k for k, _ in self.separated_events][:keep * 10],
        }


def liyorke_report(structure: ModularStructure, pair: tuple[ModularPoint, ModularPoint], horizon: int,
                   kappa: float, eps: float, depth: int = 1) -> LiYorkeReport:
    """Scan iterates 1..horizon for proximal (upper bound < kappa) and separated (lower bound >= eps) events."""
    a, b = pair
    if a.j != b.j:
        raise ModuleMismatch("a Li-Yorke pair must start in one module")
    need = horizon + depth
    xs, ys = a.seq.prefix(a.seq.available(need)), b.seq.prefix(b.seq.available(need))
    proximal, separated = [], []
    for k in range(1, horizon + 1):
        wa, wb = xs[k:k + depth], ys[k:k + depth]
        if len(wa) < depth or len(wb) < depth:
            break
        mod = structure.module(a.j + k)
        ca, cb = mod.cell(wa), mod.cell(wb)
        lo = set_distance(ca, cb)
        hi = lo + ca.diameter() + cb.diameter()
        if hi < kappa:
            proximal.append((k, hi))
        if lo >= eps - TOL:
            separated.append((k, lo))
    return LiYorkeReport((a, b), horizon, kappa, eps, depth, tuple(proximal), tuple(separated))
