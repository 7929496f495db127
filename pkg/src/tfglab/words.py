"""Finite and infinite words over a finite alphabet.

Provides the word sources (substitution fixed points, periodic test words,
nested limit words), factor languages with an explicit exactness protocol,
and the combinatorial functions built on them: complexity p(n), recurrence
R(n), entropy estimates and cylinder enumeration.

Exactness contract
------------------
Factor sets are *certified* only where a stabilization argument applies:
substitution sources certify by iterating the substitution until the factor
set is unchanged across one further iteration, and jlp-style limit sources
certify up to a structural length bound supplied by the constructor.  All
other sources report lower bounds, and the scalar functions raise
InexactResult (carrying the best bound) instead of returning an uncertified
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .errors import (
    BudgetError,
    ConstructionError,
    InexactResult,
    InternalConsistencyError,
    PreconditionError,
)
from .config import Budgets, DEFAULT_BUDGETS


class Alphabet:
    """Ordered finite set of distinct single-character symbols, size >= 2."""

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(symbols)
        if len(syms) < 2:
            raise ConstructionError("alphabet needs at least 2 symbols")
        if len(set(syms)) != len(syms):
            raise ConstructionError("alphabet symbols must be distinct")
        for s in syms:
            if not isinstance(s, str) or len(s) != 1:
                raise ConstructionError("alphabet symbols must be single characters")
        self.symbols = syms
        self._index = {s: i for i, s in enumerate(syms)}

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, s):
        return s in self._index

    def __iter__(self):
        return iter(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({''.join(self.symbols)!r})"

    def validate_word(self, w: str) -> str:
        for ch in w:
            if ch not in self._index:
                raise PreconditionError(f"letter {ch!r} not in alphabet")
        return w


@dataclass(frozen=True)
class FactorSet:
    """The set of length-n factors of some word; ``saturated`` means certified complete."""

    n: int
    words: frozenset
    saturated: bool = False

    def __len__(self):
        return len(self.words)

    def __contains__(self, w):
        return w in self.words

    def __iter__(self):
        return iter(sorted(self.words))


def factors(w: str, n: int) -> FactorSet:
    """All length-n factors of the finite word w, deduplicated."""
    if not 1 <= n <= len(w):
        raise PreconditionError(f"factor length {n} out of range for word of length {len(w)}")
    return FactorSet(n, frozenset(w[k:k + n] for k in range(len(w) - n + 1)), saturated=False)


def _ngrams(w: str, n: int) -> set:
    return {w[k:k + n] for k in range(len(w) - n + 1)}


class WordSource:
    """Deterministic oracle for windows x_i..x_j of a fixed two-sided word.

    Subclasses must implement _letters(i, j) for their valid span; windows
    are consistent by construction and memoized where that is profitable.
    """

    kind = "abstract"

    def __init__(self, alphabet: Alphabet, budgets: Budgets = DEFAULT_BUDGETS):
        self.alphabet = alphabet
        self.budgets = budgets

    # -- window oracle ------------------------------------------------------

    def window(self, i: int, j: int) -> str:
        if i > j:
            raise PreconditionError(f"window requires i <= j, got ({i}, {j})")
        if j - i + 1 > self.budgets.window_limit:
            raise BudgetError(f"window of length {j - i + 1} exceeds budget")
        return self._letters(i, j)

    def _letters(self, i: int, j: int) -> str:
        raise NotImplementedError

    def span(self) -> Optional[tuple]:
        """(lo, hi) limits of serviceable indices, or None if unbounded."""
        return None

    # -- factor language ----------------------------------------------------

    def exact_factor_limit(self) -> int:
        """Largest n for which factor_set(n) is certified complete (0 = never)."""
        return 0

    def factor_set(self, n: int) -> frozenset:
        """Certified-complete set of length-n factors; raises InexactResult otherwise."""
        if n < 1:
            raise PreconditionError("factor length must be >= 1")
        if n > self.exact_factor_limit():
            raise InexactResult(
                f"{self.kind} source cannot certify factors of length {n}",
                value=len(self.scan_factors(n)),
            )
        return self._exact_factors(n)

    def _exact_factors(self, n: int) -> frozenset:
        raise NotImplementedError

    def scan_factors(self, n: int, length: Optional[int] = None) -> frozenset:
        """Lower-bound factor set from a default (or given) window scan."""
        lo, hi = self._scan_range(length or max(64 * n, 4096))
        if hi - lo + 1 < n:
            raise PreconditionError("scan window shorter than factor length")
        return frozenset(_ngrams(self.window(lo, hi), n))

    def _scan_range(self, length: int) -> tuple:
        sp = self.span()
        if sp is None:
            return (1, length)
        lo, hi = sp
        return (lo, min(hi, lo + length - 1))

    def is_factor(self, w: str) -> bool:
        """Exact membership of w in the factor language where decidable."""
        return w in self.factor_set(len(w))


# ---------------------------------------------------------------------------
# substitution fixed points
# ---------------------------------------------------------------------------


def _primitive(rules: dict) -> bool:
    # incidence-closure test: letter a reaches letter b if b occurs in rules^k(a)
    letters = sorted(rules)
    reach = {a: set(rules[a]) for a in letters}
    for _ in range(len(letters) * 2):
        grown = False
        for a in letters:
            new = set().union(*(reach[b] for b in reach[a])) | reach[a]
            if new != reach[a]:
                reach[a] = new
                grown = True
        if not grown:
            break
    return all(reach[a] == set(letters) for a in letters)


class SubstitutionSource(WordSource):
    """One-sided fixed point of a primitive substitution, extended to two sides.

    The right side is the fixed point itself, materialized on demand.  The
    left side is the seam extension: pick the first letter l (alphabet
    order) that lies on a cycle, of length k, of the last-letter map
    c -> rules(c)[-1] and that precedes the seed somewhere in the language;
    then lim_j rules^{jk}(l) is a left-infinite word whose every junction
    window sits inside rules^{jk}(l + seed), a factor of the language.  Such
    an l always exists: the set of letters preceding the seed is nonempty
    and closed under the last-letter map, so it contains a cycle.
    """

    kind = "substitution"

    def __init__(self, rules: dict, seed: str, alphabet: Optional[Alphabet] = None,
                 budgets: Budgets = DEFAULT_BUDGETS):
        alphabet = alphabet or Alphabet(sorted(rules))
        super().__init__(alphabet, budgets)
        if set(rules) != set(alphabet.symbols):
            raise ConstructionError("substitution rules must cover the alphabet exactly")
        for a, img in rules.items():
            if not img:
                raise ConstructionError(f"empty image for letter {a!r}")
            alphabet.validate_word(img)
        if seed not in rules or not rules[seed].startswith(seed):
            raise ConstructionError("seed letter must begin its own image")
        if not _primitive(rules):
            raise ConstructionError("substitution is not primitive")
        self.rules = dict(rules)
        self.seed = seed
        self._prefix = rules[seed]
        self._factor_cache: dict = {}
        self._left_word = ""                 # rules^{jk}(seam); suffixes serve indices < 0
        self._seam = None                    # (letter, cycle length), resolved lazily

    # -- right side ---------------------------------------------------------

    def _image(self, w: str) -> str:
        return "".join(self.rules[c] for c in w)

    def _grow_prefix(self, length: int) -> str:
        while len(self._prefix) < length:
            if len(self._prefix) > self.budgets.window_limit:
                raise BudgetError("fixed-point prefix exceeds window budget")
            self._prefix = self._image(self._prefix)
        return self._prefix

    # -- factor language (stabilization protocol) ---------------------------

    def exact_factor_limit(self) -> int:
        return self.budgets.window_limit  # certified via stabilization at any feasible n

    def _exact_factors(self, n: int) -> frozenset:
        cached = self._factor_cache.get(n)
        if cached is not None:
            return cached
        w = self._grow_prefix(n + 1)
        cur = _ngrams(w, n)
        while True:
            w = self._image(w)
            if len(w) > self.budgets.window_limit:
                raise BudgetError(f"factor stabilization for n={n} exceeds window budget")
            nxt = _ngrams(w, n)
            if len(nxt) == len(cur):     # monotone, so equal cardinality means equal sets
                break
            cur = nxt
        if len(w) > len(self._prefix):
            self._prefix = w
        out = frozenset(cur)
        self._factor_cache[n] = out
        return out

    def is_factor(self, w: str) -> bool:
        # fast path: occurrence in a comfortably long prefix
        probe = self._grow_prefix(max(8 * len(w) + 256, len(self._prefix)))
        if w in probe:
            return True
        return w in self._exact_factors(len(w))

    # -- left side ----------------------------------------------------------

    def _pick_seam(self) -> tuple:
        last = {c: self.rules[c][-1] for c in self.alphabet}
        for cand in self.alphabet:
            cur, k = last[cand], 1
            while cur != cand and k <= len(self.alphabet):
                cur, k = last[cur], k + 1
            if cur == cand and self.is_factor(cand + self.seed):
                return cand, k
        raise InternalConsistencyError(
            "no seam letter found; contradicts closure of seed predecessors")

    def _grow_left(self, depth: int):
        if self._seam is None:
            self._seam = self._pick_seam()
            self._left_word = self._seam[0]
        while len(self._left_word) < depth:
            if len(self._left_word) > self.budgets.window_limit:
                raise BudgetError("left extension exceeds window budget")
            w = self._left_word
            for _ in range(self._seam[1]):
                w = self._image(w)
            if not w.endswith(self._left_word):
                raise InternalConsistencyError("seam suffixes failed to nest")
            self._left_word = w

    def _letters(self, i: int, j: int) -> str:
        if i >= 0:
            return self._grow_prefix(j + 1)[i:j + 1]
        self._grow_left(-i)
        left = self._left_word[len(self._left_word) + i:]       # window(i, -1)
        if j < 0:
            return left[: j - i + 1]
        return left + self._grow_prefix(j + 1)[: j + 1]


# ---------------------------------------------------------------------------
# periodic test words
# ---------------------------------------------------------------------------


class PeriodicSource(WordSource):
    """Two-sided periodic word, for negative tests only.

    Periodic words are not uniformly recurrent non-periodic, so complexity
    and recurrence stay flagged as lower bounds; factor membership itself is
    decidable from the pattern and is answered exactly.
    """

    kind = "explicit-periodic-test"

    def __init__(self, pattern: str, alphabet: Optional[Alphabet] = None,
                 budgets: Budgets = DEFAULT_BUDGETS):
        if not pattern:
            raise ConstructionError("pattern must be nonempty")
        alphabet = alphabet or Alphabet(sorted(set(pattern)))
        super().__init__(alphabet, budgets)
        alphabet.validate_word(pattern)
        self.pattern = pattern

    def _letters(self, i: int, j: int) -> str:
        p = len(self.pattern)
        return "".join(self.pattern[(k % p + p) % p] for k in range(i, j + 1))

    def is_factor(self, w: str) -> bool:
        p = len(self.pattern)
        reps = self.pattern * (len(w) // p + 2)
        return w in reps


# ---------------------------------------------------------------------------
# nested limit words (Lemma-style tower of anchored finite words)
# ---------------------------------------------------------------------------


class LimitWordSource(WordSource):
    """The unique point in a nested tower of anchored cylinder sets.

    Level j contributes a word of length L_j whose M_j-th letter sits at
    index 0; levels agree on overlaps because each level occurs at a
    verified position inside the next.  Windows are answered from the least
    level whose span covers them.
    """

    kind = "limit"

    def __init__(self, level_letter: Sequence[Callable[[int], str]],
                 lengths: Sequence[int], anchors: Sequence[int],
                 alphabet: Alphabet, budgets: Budgets = DEFAULT_BUDGETS,
                 exact_limit: int = 0):
        super().__init__(alphabet, budgets)
        self._letter = list(level_letter)
        self.lengths = list(lengths)
        self.anchors = list(anchors)        # M_j per level
        self._exact_limit = exact_limit
        self._factor_cache: dict = {}

    def span(self):
        m = self.anchors[-1]
        return (1 - m, self.lengths[-1] - m)

    def _letters(self, i: int, j: int) -> str:
        for lvl, (length, m) in enumerate(zip(self.lengths, self.anchors)):
            if 1 - m <= i and j <= length - m:
                get = self._letter[lvl]
                return "".join(get(m + k) for k in range(i, j + 1))
        lo, hi = self.span()
        raise BudgetError(
            f"window [{i}, {j}] outside materialized span [{lo}, {hi}]; build more levels")

    def exact_factor_limit(self) -> int:
        return self._exact_limit

    def _exact_factors(self, n: int) -> frozenset:
        cached = self._factor_cache.get(n)
        if cached is None:
            lo, hi = self.span()
            cached = frozenset(_ngrams(self.window(lo, hi), n))
            self._factor_cache[n] = cached
        return cached


def limit_word(levels: Sequence[tuple], m0: int,
               alphabet: Optional[Alphabet] = None,
               budgets: Budgets = DEFAULT_BUDGETS) -> LimitWordSource:
    """Word source for the point pinned down by nested anchored level words.

    ``levels`` is a list of (word, k) pairs: word j must occur as the k_j-th
    factor of word j+1 (1-based, with 2 <= k_j <= L_{j+1} - L_j).  The final
    level's k is ignored and may be None.  m0 anchors level 0.
    """
    if len(levels) < 2:
        raise PreconditionError("limit word needs at least two levels")
    words = [w for w, _ in levels]
    ks = [k for _, k in levels]
    lengths = [len(w) for w in words]
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise PreconditionError("level lengths must be strictly increasing")
    if not 1 <= m0 <= lengths[0]:
        raise PreconditionError(f"anchor M0={m0} outside level 0")
    alphabet = alphabet or Alphabet(sorted(set("".join(words))))
    for w in words:
        alphabet.validate_word(w)
    anchors = [m0]
    for j in range(len(words) - 1):
        k = ks[j]
        if k is None or not 2 <= k <= lengths[j + 1] - lengths[j]:
            raise ConstructionError(f"level {j}: anchor index K={k} out of range")
        if words[j + 1][k - 1: k - 1 + lengths[j]] != words[j]:
            raise ConstructionError(
                f"level {j}: word is not the K_j-th factor of level {j + 1}")
        anchors.append(anchors[-1] + k - 1)
    getters = [(lambda w: (lambda p: w[p - 1]))(w) for w in words]
    return LimitWordSource(getters, lengths, anchors, alphabet, budgets)


# ---------------------------------------------------------------------------
# complexity / recurrence / entropy / cylinders
# ---------------------------------------------------------------------------


def substitution_source(rules: dict, seed: str,
                        budgets: Budgets = DEFAULT_BUDGETS) -> SubstitutionSource:
    """Fixed-point source for a primitive substitution (seed begins its image)."""
    return SubstitutionSource(rules, seed, budgets=budgets)


def fibonacci_source(budgets: Budgets = DEFAULT_BUDGETS) -> SubstitutionSource:
    return substitution_source({"a": "ab", "b": "a"}, "a", budgets=budgets)


def complexity(src: WordSource, n: int) -> int:
    """p(n) = number of length-n factors; certified, else InexactResult."""
    if n < 1:
        raise PreconditionError("complexity requires n >= 1")
    return len(src.factor_set(n))


def complexity_flagged(src: WordSource, n: int) -> tuple:
    """(value, exact) convenience wrapper around complexity()."""
    try:
        return complexity(src, n), True
    except InexactResult as exc:
        return int(exc.value), False


def _occurrence_gaps(window: str, n: int) -> dict:
    """Max gap between successive start positions, per length-n factor."""
    last: dict = {}
    gaps: dict = {}
    for k in range(len(window) - n + 1):
        w = window[k:k + n]
        if w in last:
            g = k - last[w]
            if g > gaps.get(w, 0):
                gaps[w] = g
        else:
            gaps.setdefault(w, 0)
        last[w] = k
    return gaps


def recurrence(src: WordSource, n: int) -> int:
    """R(n) via the occurrence-gap scan, with doubling certification.

    R(n) = max over length-n factors of (max gap between successive
    occurrence starts) + n - 1.  The estimate is certified once the scan
    window holds every factor, is at least twice the estimate plus n, and
    the estimate survives a doubling of the window; otherwise InexactResult
    carries the best lower bound.
    """
    if n < 1:
        raise PreconditionError("recurrence requires n >= 1")
    try:
        full = src.factor_set(n)
    except InexactResult:
        full = None

    sp = src.span()

    def scan_range(length):
        if sp is None:
            return 1, length, length >= src.budgets.window_limit
        lo, hi = sp
        hi2 = min(hi, lo + length - 1)
        return lo, hi2, hi2 == hi or length >= src.budgets.window_limit

    if full is None:
        # saturation not certifiable for this source: one scan, flagged bound
        lo, hi, _ = scan_range(max(64 * n, 4096))
        gaps = _occurrence_gaps(src.window(lo, hi), n)
        best = (max(gaps.values()) + n - 1) if gaps else 0
        raise InexactResult(
            f"{src.kind} source cannot certify recurrence at n={n}", value=best)

    length = max(8 * n, 512)
    prev = None
    while True:
        length = min(length, src.budgets.window_limit)
        lo, hi, at_cap = scan_range(length)
        gaps = _occurrence_gaps(src.window(lo, hi), n)
        estimate = (max(gaps.values()) + n - 1) if gaps else None
        seen_all = len(gaps) == len(full)
        stable = prev is not None and estimate == prev
        if (estimate is not None and seen_all and stable
                and hi - lo + 1 >= 2 * estimate + n):
            return estimate
        if at_cap:
            raise InexactResult(
                f"recurrence scan for n={n} exhausted its window",
                value=estimate or 0)
        prev = estimate
        length *= 2


def recurrence_flagged(src: WordSource, n: int) -> tuple:
    try:
        return recurrence(src, n), True
    except InexactResult as exc:
        return int(exc.value), False


@dataclass
class EntropyEstimate:
    n_max: int
    value: float                       # log p(n_max) / n_max
    rows: list = field(default_factory=list)   # (n, log p(n)/n, exact)
    exact: bool = True


def entropy_estimate(src: WordSource, n_max: int) -> EntropyEstimate:
    """log p(n)/n for n = 1..n_max; per-row exactness propagated from complexity."""
    if n_max < 2:
        raise PreconditionError("entropy estimate requires n_max >= 2")
    rows = []
    all_exact = True
    for n in range(1, n_max + 1):
        p, exact = complexity_flagged(src, n)
        rows.append((n, math.log(p) / n, exact))
        all_exact = all_exact and exact
    return EntropyEstimate(n_max, rows[-1][1], rows, all_exact)


def cylinders(src: WordSource, m: int) -> list:
    """All m-cylinders of X as centered words of length 2m+1, in lex order.

    The defining word of an m-cylinder has its center at 1-based index m+1.
    """
    if m < 0:
        raise PreconditionError("cylinder radius must be >= 0")
    return sorted(src.factor_set(2 * m + 1))
