"""Symbol sequences over {1..m}, the shift, and the Sigma_m metric.

Infinite sequences are lazy. Three concrete kinds exist:

* :class:`PeriodicSeq` -- eventually periodic, ``prefix`` followed by endless
  repetitions of ``block``. Distances between two of these are exact.
* :class:`GeneratedSeq` -- backed by a memoized generator (universal sequence,
  scrambled pairs, seeded random draws).
* :class:`FiniteSeq` -- a known prefix with a hard horizon; reading past it
  raises :class:`~modchaos.errors.HorizonExceeded`.

Symbols are 1-based everywhere in the public interface.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import AlphabetMismatch, EmptyBlock, HorizonExceeded, InvalidArgument, SymbolOutOfRange

TOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise InvalidArgument(f"alphabet size must be an integer >= 2, got {self.m!r}")

    @property
    def symbols(self) -> range:
        return range(1, self.m + 1)

    def validate(self, symbols: Iterable[int]) -> tuple[int, ...]:
        out = tuple(int(s) for s in symbols)
        for s in out:
            if not 1 <= s <= self.m:
                raise SymbolOutOfRange(f"symbol {s} outside 1..{self.m}")
        return out


def as_alphabet(alphabet: Alphabet | int) -> Alphabet:
    return alphabet if isinstance(alphabet, Alphabet) else Alphabet(int(alphabet))


def flip(symbol: int, m: int) -> int:
    """Cyclic successor in 1..m; always differs from ``symbol``."""
    return symbol % m + 1


@dataclass(frozen=True)
class MetricInterval:
    """Bounds ``lo <= d <= hi`` on a distance; ``horizon`` is None when exact."""

    lo: float
    hi: float
    horizon: int | None = None

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise InvalidArgument(f"invalid metric interval [{self.lo}, {self.hi}]")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "horizon": self.horizon}


class SymbolSeq:
    """Common interface; subclasses implement ``_fetch`` and ``shift``."""

    alphabet: Alphabet

    @property
    def horizon(self) -> int | None:
        """Number of available symbols, or None for an infinite sequence."""
        return None

    def at(self, k: int) -> int:
        if k < 1:
            raise InvalidArgument(f"positions are 1-based, got {k}")
        h = self.horizon
        if h is not None and k > h:
            raise HorizonExceeded(f"position {k} beyond horizon {h}")
        return self._fetch(k, k)[0]

    def prefix(self, n: int) -> tuple[int, ...]:
        """The first ``n`` symbols."""
        if n < 0:
            raise InvalidArgument("prefix length must be >= 0")
        if n == 0:
            return ()
        h = self.horizon
        if h is not None and n > h:
            raise HorizonExceeded(f"prefix of length {n} beyond horizon {h}")
        return self._fetch(1, n)

    def as_array(self, n: int) -> np.ndarray:
        return np.fromiter(self.prefix(n), dtype=np.int64, count=n)

    def available(self, horizon: int) -> int:
        """``horizon`` capped by the sequence's own horizon."""
        h = self.horizon
        return horizon if h is None else min(horizon, h)

    def shift(self, n: int) -> SymbolSeq:
        raise NotImplementedError

    def _fetch(self, start: int, stop: int) -> tuple[int, ...]:
        raise NotImplementedError

    def __getitem__(self, k: int) -> int:
        return self.at(k)

    def __repr__(self):
        shown = self.prefix(self.available(8))
        tail = ",..." if self.horizon is None or self.horizon > 8 else ""
        return f"{type(self).__name__}({','.join(map(str, shown))}{tail})"


class PeriodicSeq(SymbolSeq):
    """``prefix`` followed by endless repetitions of ``block``."""

    def __init__(self, alphabet: Alphabet | int, block: Sequence[int], prefix: Sequence[int] = ()):
        self.alphabet = as_alphabet(alphabet)
        if len(block) == 0:
            raise EmptyBlock("periodic block must be nonempty")
        self.block = self.alphabet.validate(block)
        self.pre = self.alphabet.validate(prefix)

    def _fetch(self, start, stop):
        pre, block, p = self.pre, self.block, len(self.block)
        npre = len(pre)
        return tuple(pre[k - 1] if k <= npre else block[(k - npre - 1) % p] for k in range(start, stop + 1))

    def shift(self, n: int) -> PeriodicSeq:
        if n < 0:
            raise InvalidArgument("shift count must be >= 0")
        if n <= len(self.pre):
            return PeriodicSeq(self.alphabet, self.block, self.pre[n:])
        r = (n - len(self.pre)) % len(self.block)
        return PeriodicSeq(self.alphabet, self.block[r:] + self.block[:r])

    @property
    def period(self) -> int:
        return len(self.block)

    @property
    def minimal_period(self) -> int:
        b = self.block
        return next(q for q in range(1, len(b) + 1) if len(b) % q == 0 and b == b[q:] + b[:q])

    def __eq__(self, other):
        if not isinstance(other, PeriodicSeq) or other.alphabet != self.alphabet:
            return NotImplemented
        n = max(len(self.pre), len(other.pre)) + math.lcm(self.period, other.period)
        return self.prefix(n) == other.prefix(n)

    def __hash__(self):
        return hash((self.alphabet, self.shift(len(self.pre)).prefix(self.period)))


class _MemoSource:
    """Thread-safe memo of a generator's output (0-based storage)."""

    def __init__(self, factory: Callable[[], Iterator[int]], name: str):
        self.name = name
        self._it = factory()
        self._memo: list[int] = []
        self._lock = threading.Lock()

    def get(self, start: int, stop: int) -> tuple[int, ...]:
        if stop > len(self._memo):
            with self._lock:
                need = stop - len(self._memo)
                if need > 0:
                    self._memo.extend(itertools.islice(self._it, need))
                    if len(self._memo) < stop:
                        raise HorizonExceeded(f"generator {self.name!r} exhausted at {len(self._memo)}")
        return tuple(self._memo[start - 1:stop])


class GeneratedSeq(SymbolSeq):
    """Infinite sequence read lazily from a memoized generator."""

    def __init__(self, alphabet: Alphabet | int, source: _MemoSource, offset: int = 0):
        self.alphabet = as_alphabet(alphabet)
        self.source = source
        self.offset = offset

    @classmethod
    def from_factory(cls, alphabet, factory: Callable[[], Iterator[int]], name: str) -> GeneratedSeq:
        return cls(alphabet, _MemoSource(factory, name))

    @property
    def name(self) -> str:
        return self.source.name

    def _fetch(self, start, stop):
        return self.source.get(start + self.offset, stop + self.offset)

    def shift(self, n: int) -> GeneratedSeq:
        if n < 0:
            raise InvalidArgument("shift count must be >= 0")
        return GeneratedSeq(self.alphabet, self.source, self.offset + n)


class FiniteSeq(SymbolSeq):
    """A finite prefix; everything past ``horizon`` is unknown."""

    def __init__(self, alphabet: Alphabet | int, symbols: Sequence[int]):
        self.alphabet = as_alphabet(alphabet)
        self.symbols = self.alphabet.validate(symbols)

    @property
    def horizon(self) -> int:
        return len(self.symbols)

    def _fetch(self, start, stop):
        return self.symbols[start - 1:stop]

    def shift(self, n: int) -> FiniteSeq:
        if n < 0:
            raise InvalidArgument("shift count must be >= 0")
        if n > len(self.symbols):
            raise HorizonExceeded(f"cannot shift {n} past horizon {len(self.symbols)}")
        return FiniteSeq(self.alphabet, self.symbols[n:])


def symbol_at(seq: SymbolSeq, k: int) -> int:
    return seq.at(k)


def shift(seq: SymbolSeq, n: int) -> SymbolSeq:
    return seq.shift(n)


def make_periodic(block: Sequence[int], alphabet: Alphabet | int = 2, prefix: Sequence[int] = ()) -> PeriodicSeq:
    return PeriodicSeq(alphabet, block, prefix)


def concat(prefix: Sequence[int], tail: SymbolSeq) -> SymbolSeq:
    """``prefix`` followed by ``tail``, keeping the tail's kind where possible."""
    prefix = tail.alphabet.validate(prefix)
    if not prefix:
        return tail
    if isinstance(tail, PeriodicSeq):
        return PeriodicSeq(tail.alphabet, tail.block, prefix + tail.pre)
    if isinstance(tail, FiniteSeq):
        return FiniteSeq(tail.alphabet, prefix + tail.symbols)

    def gen():
        yield from prefix
        k = 1
        while True:
            chunk = tail._fetch(k, k + 255)
            yield from chunk
            k += len(chunk)

    return GeneratedSeq.from_factory(tail.alphabet, gen, f"concat({len(prefix)})")


def _universal_symbols(m: int) -> Iterator[int]:
    for length in itertools.count(1):
        for word in itertools.product(range(1, m + 1), repeat=length):
            yield from word


def universal_sequence(alphabet: Alphabet | int = 2) -> GeneratedSeq:
    """All words of length 1, 2, 3, ... over 1..m, concatenated in lexicographic order."""
    alphabet = as_alphabet(alphabet)
    return GeneratedSeq.from_factory(alphabet, lambda: _universal_symbols(alphabet.m), f"universal(m={alphabet.m})")


def universal_length(m: int, max_word: int) -> int:
    """Length of the universal sequence's segment covering all words up to ``max_word``."""
    return sum(L * m**L for L in range(1, max_word + 1))


def random_sequence(alphabet: Alphabet | int, seed: int) -> GeneratedSeq:
    """I.i.d. uniform symbols drawn from a seeded PCG64 stream."""
    alphabet = as_alphabet(alphabet)

    def gen():
        rng = np.random.default_rng(seed)
        while True:
            yield from (int(s) for s in rng.integers(1, alphabet.m + 1, size=1024))

    return GeneratedSeq.from_factory(alphabet, gen, f"random(seed={seed})")


def _doubling(n: int) -> int:
    return 2**n


def scrambled_pair(
    alphabet: Alphabet | int = 2,
    block_growth: Callable[[int], int] = _doubling,
) -> tuple[GeneratedSeq, GeneratedSeq]:
    """Two non-periodic sequences that agree on ever longer blocks.

    The first is the universal sequence. The second copies it, except that the
    symbol right after the n-th agreement block (of length ``block_growth(n)``,
    n = 0, 1, ...) is replaced by its cyclic successor.
    """
    alphabet = as_alphabet(alphabet)
    m = alphabet.m

    def partner():
        base = _universal_symbols(m)
        for n in itertools.count():
            yield from itertools.islice(base, block_growth(n))
            yield flip(next(base), m)

    a = universal_sequence(alphabet)
    b = GeneratedSeq.from_factory(alphabet, partner, f"scrambled-partner(m={m})")
    return a, b


def scrambled_disagreements(horizon: int, block_growth: Callable[[int], int] = _doubling) -> list[int]:
    """Positions (1-based, <= horizon) where a scrambled pair disagrees."""
    out, pos = [], 0
    for n in itertools.count():
        pos += block_growth(n) + 1
        if pos > horizon:
            return out
        out.append(pos)


def contains_word(seq: SymbolSeq, word: Sequence[int], horizon: int) -> int | None:
    """Smallest 1-based start of ``word`` within the first ``horizon`` symbols."""
    word = seq.alphabet.validate(word)
    if not word:
        raise InvalidArgument("word must be nonempty")
    h = seq.available(horizon)
    if h < len(word):
        return None
    arr = seq.as_array(h)
    windows = np.lib.stride_tricks.sliding_window_view(arr, len(word))
    hits = np.flatnonzero((windows == np.asarray(word)).all(axis=1))
    return int(hits[0]) + 1 if hits.size else None


def agreement_prefix_length(a: SymbolSeq, b: SymbolSeq, horizon: int) -> int:
    _check_same(a, b)
    h = b.available(a.available(horizon))
    diff = np.flatnonzero(a.as_array(h) != b.as_array(h))
    return int(diff[0]) if diff.size else h


def _check_same(a: SymbolSeq, b: SymbolSeq):
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"alphabets differ: m={a.alphabet.m} vs m={b.alphabet.m}")


def _exact_periodic_distance(a: PeriodicSeq, b: PeriodicSeq) -> Fraction:
    # Past the longer preperiod both are periodic with the lcm period,
    # so the tail is a geometric series in 2^-L.
    P = max(len(a.pre), len(b.pre))
    L = math.lcm(a.period, b.period)
    xs, ys = a.prefix(P + L), b.prefix(P + L)
    head = sum(Fraction(abs(x - y), 2 ** k) for k, (x, y) in enumerate(zip(xs[:P], ys[:P])))
    cycle = sum(Fraction(abs(x - y), 2 ** (P + k)) for k, (x, y) in enumerate(zip(xs[P:], ys[P:])))
    return head + cycle / (1 - Fraction(1, 2**L))


def sigma_distance(a: SymbolSeq, b: SymbolSeq, horizon: int = 64) -> MetricInterval:
    """Bounds on ``sum_k |a_k - b_k| / 2^(k-1)``.

    Exact (degenerate interval) when both inputs are eventually periodic;
    otherwise the first ``horizon`` terms plus the worst-case tail
    ``(m-1) * 2^-(horizon-1)``.
    """
    _check_same(a, b)
    if isinstance(a, PeriodicSeq) and isinstance(b, PeriodicSeq):
        d = float(_exact_periodic_distance(a, b))
        return MetricInterval(d, d, None)
    if horizon < 1:
        raise InvalidArgument("horizon must be >= 1")
    h = b.available(a.available(horizon))
    diffs = np.abs(a.as_array(h) - b.as_array(h))
    terms = [math.ldexp(float(d), -k) for k, d in enumerate(diffs) if d]
    tail = math.ldexp(float(a.alphabet.m - 1), -(h - 1))
    return MetricInterval(math.fsum(terms), math.fsum(terms + [tail]), h)
