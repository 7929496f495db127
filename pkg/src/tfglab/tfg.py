"""Exact algebra of full-group elements as cylinder-partition cocycles.

An element g of the topological full group of a subshift is stored as a
total map from the m-cylinders of X to integer shifts: on the cylinder of
the centered word u, g acts as the a-th shift power, a = table[u].  Elements
are kept in canonical form (the least precision at which the cocycle is
constant on cylinders), which makes equality a tuple comparison and keeps
compositions cheap.

All operations are pure; elements are immutable and hashable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    BudgetError,
    CertificateError,
    InexactResult,
    InternalConsistencyError,
    PreconditionError,
)
from .words import WordSource, cylinders


# ---------------------------------------------------------------------------
# cylinder tables per (source, precision), cached on the source object
# ---------------------------------------------------------------------------


def cylinder_index(src: WordSource, m: int) -> tuple:
    """(sorted cylinder words, word -> position dict) at precision m, cached."""
    cache = getattr(src, "_tfg_cyl_cache", None)
    if cache is None:
        cache = {}
        src._tfg_cyl_cache = cache
    hit = cache.get(m)
    if hit is None:
        words = tuple(cylinders(src, m))
        hit = (words, {w: k for k, w in enumerate(words)})
        cache[m] = hit
    return hit


@dataclass(frozen=True)
class TfgElement:
    """A full-group element at its canonical cylinder precision.

    shifts[k] is the cocycle value on the k-th cylinder (lex order) at
    ``precision``; ``bound`` is the maximum absolute shift.
    """

    source: WordSource
    precision: int
    shifts: tuple
    bound: int

    def __repr__(self):
        return f"TfgElement(m={self.precision}, bound={self.bound})"

    def is_identity(self) -> bool:
        return all(a == 0 for a in self.shifts)

    def shift_on(self, word: str) -> int:
        """Cocycle value on the cylinder of a centered word at this precision."""
        words, index = cylinder_index(self.source, self.precision)
        return self.shifts[index[word]]

    def table(self) -> dict:
        words, _ = cylinder_index(self.source, self.precision)
        return dict(zip(words, self.shifts))

    def to_json(self) -> str:
        entries = [{"word": w, "shift": a} for w, a in sorted(self.table().items())]
        return json.dumps({"precision": self.precision, "entries": entries},
                          indent=2, sort_keys=True) + "\n"


def _canonical(src: WordSource, m: int, shifts: Sequence) -> TfgElement:
    """Reduce to the least precision at which the cocycle is constant."""
    shifts = tuple(shifts)
    words, _ = cylinder_index(src, m)
    while m > 0:
        coarse_words, coarse_index = cylinder_index(src, m - 1)
        merged = [None] * len(coarse_words)
        ok = True
        for w, a in zip(words, shifts):
            k = coarse_index[w[1:-1]]
            if merged[k] is None:
                merged[k] = a
            elif merged[k] != a:
                ok = False
                break
        if not ok or any(v is None for v in merged):
            break
        m, words, shifts = m - 1, coarse_words, tuple(merged)
    return TfgElement(src, m, shifts, max((abs(a) for a in shifts), default=0))


def element_from_table(src: WordSource, m: int, table: dict,
                       check: bool = True) -> TfgElement:
    """Element from a raw cylinder -> shift map; domain must be exact."""
    words, _ = cylinder_index(src, m)
    if set(table) != set(words):
        raise PreconditionError("table domain must be exactly the m-cylinders of X")
    elem = _canonical(src, m, [table[w] for w in words])
    if check:
        ok, cert = is_valid(src, elem.precision, elem.table())
        if not ok:
            raise CertificateError(f"table does not define a bijection: {cert.witness}",
                                   witnesses=[cert.witness])
    return elem


def element_from_json(src: WordSource, text: str) -> TfgElement:
    data = json.loads(text)
    table = {e["word"]: int(e["shift"]) for e in data["entries"]}
    return element_from_table(src, int(data["precision"]), table)


def identity(src: WordSource) -> TfgElement:
    words, _ = cylinder_index(src, 0)
    return TfgElement(src, 0, (0,) * len(words), 0)


# ---------------------------------------------------------------------------
# evaluation, composition, inversion
# ---------------------------------------------------------------------------


def evaluate(g: TfgElement, n: int) -> int:
    """Orbit action: the image of position n under g, i.e. n + f_g(sigma^n x)."""
    m = g.precision
    w = g.source.window(n - m, n + m)
    words, index = cylinder_index(g.source, m)
    k = index.get(w)
    if k is None:
        raise InternalConsistencyError(f"window at {n} is not a known {m}-cylinder")
    return n + g.shifts[k]


def compose(g: TfgElement, h: TfgElement) -> TfgElement:
    """g after h; cocycle f(y) = f_h(y) + f_g(sigma^{f_h(y)} y)."""
    if g.source is not h.source:
        raise PreconditionError("elements must share one source")
    src = g.source
    mg, mh = g.precision, h.precision
    m = max(mh, mg + h.bound)
    words, _ = cylinder_index(src, m)
    _, ih = cylinder_index(src, mh)
    _, ig = cylinder_index(src, mg)
    hs, gs = h.shifts, g.shifts
    out = []
    for u in words:
        a = hs[ih[u[m - mh: m + mh + 1]]]
        b = gs[ig[u[m + a - mg: m + a + mg + 1]]]
        out.append(a + b)
    return _canonical(src, m, out)


def compose_all(elements: Iterable[TfgElement]) -> TfgElement:
    result = None
    for e in elements:
        result = e if result is None else compose(result, e)
    if result is None:
        raise PreconditionError("empty product")
    return result


def inverse(g: TfgElement) -> TfgElement:
    """g^{-1}: on the image of each piece the cocycle negates."""
    src = g.source
    m, lam = g.precision, g.bound
    big = m + lam
    words, _ = cylinder_index(src, big)
    _, ig = cylinder_index(src, m)
    out = []
    for v in words:
        hit = None
        for b in range(-lam, lam + 1):
            a = g.shifts[ig[v[big + b - m: big + b + m + 1]]]
            if a == -b:
                if hit is not None:
                    raise InternalConsistencyError("non-injective element in inverse()")
                hit = b
        if hit is None:
            raise InternalConsistencyError("non-surjective element in inverse()")
        out.append(hit)
    return _canonical(src, big, out)


def conjugate(t: TfgElement, g: TfgElement) -> TfgElement:
    """t g t^{-1}."""
    return compose(compose(t, g), inverse(t))


def commutator(a: TfgElement, b: TfgElement) -> TfgElement:
    """a b a^{-1} b^{-1}."""
    return compose(compose(a, b), compose(inverse(a), inverse(b)))


# ---------------------------------------------------------------------------
# validity: does a cylinder -> shift table define a homeomorphism in [[sigma]]?
# ---------------------------------------------------------------------------


@dataclass
class ValidityCertificate:
    valid: bool
    interval: tuple
    cylinders_checked: int
    witness: Optional[str] = None


def is_valid(src: WordSource, m: int, table: dict) -> tuple:
    """Check that n -> n + f(sigma^n x) is a bijection, with a scan certificate.

    The scan interval grows until every (m+2*lambda)-cylinder of X occurs
    with margin 2*lambda; constancy of the cocycle on cylinders then
    transfers injectivity and surjectivity from the scanned interval to the
    whole orbit, hence to X.  Collisions n, n+d have |d| <= 2*lambda and are
    patterns of (m+2*lambda)-cylinders, which is why the margin is 2*lambda
    rather than lambda.
    """
    words, index = cylinder_index(src, m)
    if set(table) != set(words):
        raise PreconditionError("table domain must be exactly the m-cylinders of X")
    lam = max((abs(a) for a in table.values()), default=0)
    big = m + 2 * lam
    try:
        needed = set(cylinders(src, big))
    except InexactResult as exc:
        raise InexactResult(
            f"validity scan needs exact {big}-cylinders", value=exc.value)

    lo = 0
    hi = max(4 * (big + 1), 64)
    while True:
        text = src.window(lo - big, hi + big)
        offset = big - lo

        def wide_window(n):
            return text[n + offset - big: n + offset + big + 1]

        seen = {wide_window(n) for n in range(lo + 2 * lam, hi - 2 * lam + 1)}
        if needed <= seen:
            break
        if hi - lo > src.budgets.window_limit:
            raise BudgetError("validity scan exhausted the window budget")
        hi *= 2

    images = {}
    for n in range(lo, hi + 1):
        w = wide_window(n)[big - m: big + m + 1]
        img = n + table[w]
        if img in images:
            cert = ValidityCertificate(False, (lo, hi), len(needed),
                                       witness=f"positions {images[img]} and {n} collide at {img}")
            return False, cert
        images[img] = n
    for k in range(lo + lam, hi - lam + 1):
        if k not in images:
            cert = ValidityCertificate(False, (lo, hi), len(needed),
                                       witness=f"value {k} is never attained")
            return False, cert
    return True, ValidityCertificate(True, (lo, hi), len(needed))


# ---------------------------------------------------------------------------
# overlap / intersection tests for shifted cylinders
# ---------------------------------------------------------------------------


def self_overlap(src: WordSource, u: str, k: int) -> bool:
    """Does X meet sigma^0(U) and sigma^k(U) simultaneously (k >= 1)?"""
    if k < 1:
        raise PreconditionError("overlap offset must be >= 1")
    if k > len(u):
        raise PreconditionError("overlap offset beyond cylinder width")
    if u[k:] != u[: len(u) - k]:
        return False
    return src.is_factor(u + u[len(u) - k:])


def shifted_cylinders_disjoint(src: WordSource, u: str, offsets: Iterable[int]) -> bool:
    """Are the sigma^i(U), i in offsets, pairwise disjoint?"""
    offs = sorted(set(offsets))
    gaps = {b - a for a in offs for b in offs if b > a}
    return not any(self_overlap(src, u, k) for k in gaps)


def cylinder_meet_word(u: str, s: int, v: str, t: int) -> Optional[tuple]:
    """Merged constraint of sigma^s(U) and sigma^t(V) as (word, left_position).

    Returns None if the constraints conflict.  Requires the two constraint
    windows to overlap or touch, which holds for all callers here.
    """
    au, bu = -(len(u) // 2) - s, len(u) // 2 - s
    av, bv = -(len(v) // 2) - t, len(v) // 2 - t
    lo, hi = min(au, av), max(bu, bv)
    if max(au, av) > min(bu, bv) + 1:
        raise PreconditionError("gapped cylinder constraints are not supported")
    merged = [None] * (hi - lo + 1)
    for word, a in ((u, au), (v, av)):
        for k, ch in enumerate(word):
            pos = a + k - lo
            if merged[pos] is None:
                merged[pos] = ch
            elif merged[pos] != ch:
                return None
    return "".join(merged), lo


def shifted_cylinders_intersect(src: WordSource, u: str, s: int, v: str, t: int) -> bool:
    """Does sigma^s(U) meet sigma^t(V) inside X?"""
    meet = cylinder_meet_word(u, s, v, t)
    if meet is None:
        return False
    return src.is_factor(meet[0])


# ---------------------------------------------------------------------------
# the special generators f_U, h_U, tau_V and the commutator identity
# ---------------------------------------------------------------------------


def _membership_shift(word: str, big: int, u: str, s: int) -> bool:
    """Is the big-cylinder of `word` contained in sigma^s(U)?"""
    m = len(u) // 2
    return word[big - m - s: big + m - s + 1] == u


def make_fU(src: WordSource, u: str, shift: int = 0) -> TfgElement:
    """The 3-cycle-like element f_{sigma^shift(U)} for an m-cylinder word u.

    Acts as sigma on sigma^{shift-1}(U) and sigma^shift(U), as sigma^{-2} on
    sigma^{shift+1}(U), and fixes everything else.
    """
    if shift not in (-1, 0, 1):
        raise PreconditionError("shift selects f_{sigma^i(U)} for i in {-1, 0, 1}")
    if len(u) % 2 != 1:
        raise PreconditionError("cylinder word must have odd length")
    if not src.is_factor(u):
        raise PreconditionError("word is not a factor of the subshift")
    if not shifted_cylinders_disjoint(src, u, (-1, 0, 1)):
        raise PreconditionError(
            f"sigma^i(U) for |i| <= 1 are not pairwise disjoint for u={u!r}")
    m = len(u) // 2
    big = m + abs(shift) + 1
    words, _ = cylinder_index(src, big)
    out = []
    for w in words:
        if _membership_shift(w, big, u, shift - 1) or _membership_shift(w, big, u, shift):
            out.append(1)
        elif _membership_shift(w, big, u, shift + 1):
            out.append(-2)
        else:
            out.append(0)
    elem = _canonical(src, big, out)
    ok, cert = is_valid(src, elem.precision, elem.table())
    if not ok:
        raise InternalConsistencyError(f"f_U failed validity: {cert.witness}")
    return elem


def make_hU(src: WordSource, u: str) -> TfgElement:
    """The involution swapping sigma^{-1}(U) and U."""
    if len(u) % 2 != 1:
        raise PreconditionError("cylinder word must have odd length")
    if not src.is_factor(u):
        raise PreconditionError("word is not a factor of the subshift")
    if self_overlap(src, u, 1):
        raise PreconditionError(f"sigma^{{-1}}(U) and U are not disjoint for u={u!r}")
    m = len(u) // 2
    big = m + 1
    words, _ = cylinder_index(src, big)
    out = []
    for w in words:
        if _membership_shift(w, big, u, -1):
            out.append(1)
        elif _membership_shift(w, big, u, 0):
            out.append(-1)
        else:
            out.append(0)
    elem = _canonical(src, big, out)
    ok, cert = is_valid(src, elem.precision, elem.table())
    if not ok:
        raise InternalConsistencyError(f"h_U failed validity: {cert.witness}")
    return elem


def make_tau(src: WordSource, v: str) -> TfgElement:
    """tau_V = f_{sigma^{-1}(V)} f_{sigma(V)}; the +1 block rotation on V's orbit."""
    if not shifted_cylinders_disjoint(src, v, (-2, -1, 0, 1, 2)):
        raise PreconditionError(
            f"sigma^i(V) for |i| <= 2 are not pairwise disjoint for v={v!r}")
    return compose(make_fU(src, v, -1), make_fU(src, v, +1))


def commutator_fW(src: WordSource, u: str, v: str) -> tuple:
    """f_V f_U^{-1} f_V^{-1} f_U, asserted equal to f on sigma(U) cap sigma^{-1}(V).

    Returns (element, intersection_word_or_None); the second slot is None
    when the intersection is empty, in which case the element is the
    identity.  u and v must be cylinder words of equal radius.
    """
    if len(u) != len(v):
        raise PreconditionError("equal cylinder radii required")
    for k in (1, 2):
        if self_overlap(src, u, k) or self_overlap(src, v, k):
            raise PreconditionError("sigma-shift disjointness fails for u or v")
    for c in (-1, 0, 1, 2):
        if shifted_cylinders_intersect(src, u, 0, v, c):
            raise PreconditionError(
                f"cross-disjointness fails: U meets sigma^{c}(V)")
    fu = make_fU(src, u, 0)
    fv = make_fU(src, v, 0)
    elem = compose_all([fv, inverse(fu), inverse(fv), fu])
    if u[2:] == v[:-2]:
        w = u + v[-2:]
        if src.is_factor(w):
            target = make_fU(src, w, 0)
            if elem != target:
                raise InternalConsistencyError(
                    "commutator does not equal f on the intersection cylinder")
            return elem, w
    if not elem.is_identity():
        raise InternalConsistencyError(
            "empty intersection but commutator is not the identity")
    return elem, None


# ---------------------------------------------------------------------------
# supports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportSet:
    precision: int
    cylinders: frozenset

    def refine(self, src: WordSource, m: int) -> "SupportSet":
        if m < self.precision:
            raise PreconditionError("refinement precision must not decrease")
        if m == self.precision:
            return self
        fine, _ = cylinder_index(src, m)
        d = m - self.precision
        keep = frozenset(w for w in fine if w[d:-d] in self.cylinders)
        return SupportSet(m, keep)


def support(g: TfgElement) -> SupportSet:
    words, _ = cylinder_index(g.source, g.precision)
    moved = frozenset(w for w, a in zip(words, g.shifts) if a != 0)
    return SupportSet(g.precision, moved)


def supports_disjoint(src: WordSource, a: SupportSet, b: SupportSet) -> bool:
    m = max(a.precision, b.precision)
    return not (set(a.refine(src, m).cylinders) & set(b.refine(src, m).cylinders))


# ---------------------------------------------------------------------------
# generator sets, words in the generators, word-length balls
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorWord:
    """A word in named generators: tuple of (name, sign) letters."""

    letters: tuple

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord(tuple((n, -s) for n, s in reversed(self.letters)))

    def __mul__(self, other: "GeneratorWord") -> "GeneratorWord":
        return GeneratorWord(self.letters + other.letters)

    def as_strings(self) -> list:
        return [n if s > 0 else n + "^-1" for n, s in self.letters]


class GeneratorSet:
    """Ordered tuple of named elements over one source; colours follow order."""

    def __init__(self, source: WordSource, named_elements: Sequence):
        names = [n for n, _ in named_elements]
        if len(set(names)) != len(names):
            raise PreconditionError("generator names must be distinct")
        for _, e in named_elements:
            if e.source is not source:
                raise PreconditionError("all generators must share one source")
        self.source = source
        self.names = tuple(names)
        self.elements = {n: e for n, e in named_elements}
        self._inverses: dict = {}

    def __len__(self):
        return len(self.names)

    def element(self, name: str) -> TfgElement:
        return self.elements[name]

    def inverse_element(self, name: str) -> TfgElement:
        inv = self._inverses.get(name)
        if inv is None:
            inv = inverse(self.elements[name])
            self._inverses[name] = inv
        return inv

    @property
    def symmetric(self) -> bool:
        values = set(self.elements.values())
        return all(self.inverse_element(n) in values for n in self.names)

    def letter_element(self, name: str, sign: int) -> TfgElement:
        return self.elements[name] if sign > 0 else self.inverse_element(name)

    def max_bound(self) -> int:
        return max(e.bound for e in self.elements.values())

    def max_precision(self) -> int:
        return max(e.precision for e in self.elements.values())


def evaluate_word(gens: GeneratorSet, word: GeneratorWord) -> TfgElement:
    if not word.letters:
        return identity(gens.source)
    return compose_all([gens.letter_element(n, s) for n, s in word.letters])


@dataclass
class Ball:
    """Word-length ball: elements with their lengths and witness words."""

    radius: int
    entries: list            # (TfgElement, length, GeneratorWord), BFS order
    complete: bool = True

    def __len__(self):
        return len(self.entries)

    def index(self) -> dict:
        return {e: k for k, (e, _, _) in enumerate(self.entries)}


def word_length_ball(gens: GeneratorSet, radius: int, ball_limit: int = 10 ** 6) -> Ball:
    """Breadth-first closure of {id} under S and S^{-1}, deduplicated canonically."""
    if radius < 0:
        raise PreconditionError("radius must be >= 0")
    letters = [(n, +1) for n in gens.names] + [(n, -1) for n in gens.names]
    ident = identity(gens.source)
    entries = [(ident, 0, GeneratorWord(()))]
    known = {ident: 0}
    frontier = [(ident, GeneratorWord(()))]
    for dist in range(1, radius + 1):
        nxt = []
        for elem, word in frontier:
            for name, sign in letters:
                cand = compose(elem, gens.letter_element(name, sign))
                if cand in known:
                    continue
                known[cand] = dist
                cword = GeneratorWord(word.letters + ((name, sign),))
                entries.append((cand, dist, cword))
                nxt.append((cand, cword))
                if len(entries) > ball_limit:
                    raise BudgetError(
                        f"ball exceeded {ball_limit} elements at radius {dist}",
                        partial=Ball(dist, entries, complete=False))
        frontier = nxt
    return Ball(radius, entries)
