"""Permutation quotients of generator balls and their certificates.

Given a finite generator set S inside the full group, the orbit action
phi(g)[n] = n + f_g(sigma^n x) is faithful on the integers.  For a radius r
one finds a modulus M so that reduction mod M of the interval action gives
permutations sbar_c of Z/MZ which are locally indistinguishable from the
integer action out to radius r; a ball of the group then embeds into
Sym(M).  This module computes the constant C1, searches for M, builds and
checks the permutations, compares Schreier balls, and certifies local
embeddings directly on enumerated balls.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BudgetError,
    CertificateError,
    InexactResult,
    InternalConsistencyError,
    PreconditionError,
)
from .tables import GrowthTable
from .tfg import (
    Ball,
    GeneratorSet,
    TfgElement,
    cylinder_index,
    evaluate,
    inverse,
    word_length_ball,
)
from .words import WordSource, cylinders, recurrence


def compute_C1(gens: GeneratorSet) -> int:
    """C1 = max(1, shift bounds, canonical precisions) over S and S^{-1}.

    For every g in B_S(r): |f_g| <= C1*r, and f_g is constant on m-cylinders
    for m >= C1*r.  Inverses are included so both clauses hold for words in
    S cup S^{-1}.
    """
    vals = [1]
    for name in gens.names:
        for e in (gens.element(name), gens.inverse_element(name)):
            vals.append(e.bound)
            vals.append(e.precision)
    return max(vals)


def phi_values(src: WordSource, elem: TfgElement, lo: int, hi: int) -> np.ndarray:
    """phi(elem)[k] for k in [lo, hi], as an int64 array."""
    m = elem.precision
    text = src.window(lo - m, hi + m)
    _, index = cylinder_index(src, m)
    shifts = elem.shifts
    width = 2 * m + 1
    out = np.empty(hi - lo + 1, dtype=np.int64)
    for t in range(hi - lo + 1):
        out[t] = lo + t + shifts[index[text[t: t + width]]]
    return out


# ---------------------------------------------------------------------------
# modulus search (interval construction)
# ---------------------------------------------------------------------------


def find_M(src: WordSource, gens: GeneratorSet, r: int) -> int:
    """Least M in [10*C1*r, 2*R(10*C1*r)] satisfying the interval conditions.

    (i) the orbit points sigma^i(x), 1 <= i <= M, meet every C1(r+1)-cylinder;
    (ii) x and sigma^M(x) agree on the central window of radius C1(2r+1).
    """
    if r < 1:
        raise PreconditionError("radius must be >= 1")
    c1 = compute_C1(gens)
    lo_M = 10 * c1 * r
    hi_M = 2 * recurrence(src, 10 * c1 * r)
    c_cyl = c1 * (r + 1)
    c_win = c1 * (2 * r + 1)
    needed = set(cylinders(src, c_cyl))

    # least M0 with condition (i): scan centered windows at positions 1..
    text = src.window(1 - c_cyl, hi_M + c_cyl)
    width = 2 * c_cyl + 1
    seen = set()
    m0 = None
    for n in range(1, hi_M + 1):
        seen.add(text[n - 1: n - 1 + width])
        if len(seen) == len(needed):
            m0 = n
            break
    if m0 is None:
        raise InternalConsistencyError(
            "scanned interval never covered all cylinders; contradicts recurrence")

    center = src.window(-c_win, c_win)
    for M in range(max(lo_M, m0), hi_M + 1):
        if src.window(M - c_win, M + c_win) == center:
            return M
    raise InternalConsistencyError(
        f"no valid M in [{lo_M}, {hi_M}]; contradicts the interval lemma")


# ---------------------------------------------------------------------------
# the quotient: one permutation of Z/MZ per generator
# ---------------------------------------------------------------------------


@dataclass
class PermutationQuotient:
    M: int
    r: int
    C1: int
    names: tuple
    perms: dict                       # name -> np.ndarray, perm[k] = image of residue k
    source_digest: str = ""

    def perm(self, name: str) -> np.ndarray:
        return self.perms[name]

    def inverse_perm(self, name: str) -> np.ndarray:
        p = self.perms[name]
        out = np.empty_like(p)
        out[p] = np.arange(len(p))
        return out

    def letter_perm(self, name: str, sign: int) -> np.ndarray:
        return self.perms[name] if sign > 0 else self.inverse_perm(name)

    def word_perm(self, word) -> np.ndarray:
        # the word l1 l2 ... denotes l1 o l2 o ...; the rightmost letter acts first
        out = np.arange(self.M)
        for name, sign in reversed(word.letters):
            out = self.letter_perm(name, sign)[out]
        return out

    def to_json(self) -> str:
        payload = {
            "M": self.M,
            "r": self.r,
            "C1": self.C1,
            "names": list(self.names),
            "perms": [self.perms[n].tolist() for n in self.names],
            "source_digest": self.source_digest,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PermutationQuotient":
        data = json.loads(text)
        names = tuple(data["names"])
        perms = {n: np.asarray(p, dtype=np.int64)
                 for n, p in zip(names, data["perms"])}
        return cls(int(data["M"]), int(data["r"]), int(data["C1"]),
                   names, perms, data.get("source_digest", ""))


def source_digest(src: WordSource) -> str:
    tag = f"{src.kind}|{''.join(src.alphabet.symbols)}|{src.window(0, 64)}"
    return hashlib.sha256(tag.encode()).hexdigest()[:16]


def _residue_rep(k: int, M: int) -> int:
    """Representative in [1, M] of the residue class k."""
    return M if k % M == 0 else k % M


def build_quotient(src: WordSource, gens: GeneratorSet, r: int,
                   M: Optional[int] = None) -> PermutationQuotient:
    """sbar_c(n mod M) = phi(s_c)[n] mod M for n = 1..M, checked to be bijections.

    Also checks that the quotient of each inverse generator is the inverse
    permutation, so words over S cup S^{-1} map consistently.
    """
    if M is None:
        M = find_M(src, gens, r)
    c1 = compute_C1(gens)
    perms = {}
    for name in gens.names:
        vals = phi_values(src, gens.element(name), 1, M)
        perm = np.empty(M, dtype=np.int64)
        for k in range(M):
            n = _residue_rep(k, M)
            perm[k] = vals[n - 1] % M
        if sorted(perm.tolist()) != list(range(M)):
            raise InternalConsistencyError(
                f"quotient of generator {name!r} is not a bijection; invalid M")
        perms[name] = perm
    quotient = PermutationQuotient(M, r, c1, gens.names, perms, source_digest(src))
    for name in gens.names:
        vals = phi_values(src, gens.inverse_element(name), 1, M)
        inv = np.empty(M, dtype=np.int64)
        for k in range(M):
            n = _residue_rep(k, M)
            inv[k] = vals[n - 1] % M
        if not np.array_equal(inv, quotient.inverse_perm(name)):
            raise InternalConsistencyError(
                f"quotient of {name!r}^-1 is not the inverse permutation")
    return quotient


# ---------------------------------------------------------------------------
# Schreier balls
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchreierBall:
    base: int
    radius: int
    vertices: frozenset
    edges: frozenset          # (tail, head, colour) with colour = 1..d

    def signature(self) -> tuple:
        vs = tuple(sorted(v - self.base for v in self.vertices))
        es = tuple(sorted((a - self.base, b - self.base, c) for a, b, c in self.edges))
        return (vs, es)


def schreier_ball(src: WordSource, gens: GeneratorSet, n: int, r: int) -> SchreierBall:
    """B_G(n, r) in the Schreier graph of the orbit action, edge colours = tuple order."""
    if r < 0:
        raise PreconditionError("radius must be >= 0")
    frontier = {n}
    vertices = {n}
    for _ in range(r):
        nxt = set()
        for v in frontier:
            for name in gens.names:
                for e in (gens.element(name), gens.inverse_element(name)):
                    w = evaluate(e, v)
                    if w not in vertices:
                        nxt.add(w)
        vertices |= nxt
        frontier = nxt
    edges = set()
    for v in vertices:
        for c, name in enumerate(gens.names, start=1):
            w = evaluate(gens.element(name), v)
            if w in vertices:
                edges.add((v, w, c))
    return SchreierBall(n, r, frozenset(vertices), frozenset(edges))


def quotient_ball(quotient: PermutationQuotient, base: int, r: int) -> SchreierBall:
    """B(base, r) in the Schreier graph on Z/MZ with the quotient permutations."""
    inv = {n: quotient.inverse_perm(n) for n in quotient.names}
    frontier = {base}
    vertices = {base}
    for _ in range(r):
        nxt = set()
        for v in frontier:
            for name in quotient.names:
                for w in (int(quotient.perms[name][v]), int(inv[name][v])):
                    if w not in vertices:
                        nxt.add(w)
        vertices |= nxt
        frontier = nxt
    edges = set()
    for v in vertices:
        for c, name in enumerate(quotient.names, start=1):
            w = int(quotient.perms[name][v])
            if w in vertices:
                edges.add((v, w, c))
    return SchreierBall(base, r, frozenset(vertices), frozenset(edges))


# ---------------------------------------------------------------------------
# local colour isomorphism of the integer and quotient Schreier graphs
# ---------------------------------------------------------------------------


@dataclass
class ColourIsoReport:
    ok: bool
    radius: int
    positions_checked: int
    distinct_types: int
    failures: list = field(default_factory=list)


def local_colour_iso_check(src: WordSource, gens: GeneratorSet,
                           quotient: PermutationQuotient, r: int) -> ColourIsoReport:
    """Do reduction-mod-M balls of radius r match between Z and Z/MZ?

    Checks pi_M(phi(s_c)[k]) = sbar_c(pi_M(k)) for every k in
    [1 - C1*r, M + C1*r] and every colour (which carries each based ball of
    the integer graph isomorphically onto its quotient image and, since
    n = 1..M covers all residues, conversely), then rebuilds based balls for
    one representative of each C1(r+1)-cylinder type and compares them
    explicitly through pi_M.
    """
    M, c1 = quotient.M, quotient.C1
    if 2 * c1 * r >= M:
        raise PreconditionError("need 2*C1*r < M for injective interval reduction")
    lo, hi = 1 - c1 * r, M + c1 * r
    failures = []
    ks = np.arange(lo, hi + 1, dtype=np.int64)
    fwd = {}
    bwd = {}
    for name in gens.names:
        phis = phi_values(src, gens.element(name), lo, hi)
        fwd[name] = phis
        bwd[name] = phi_values(src, gens.inverse_element(name), lo, hi)
        lhs = phis % M
        rhs = quotient.perms[name][ks % M]
        bad = np.nonzero(lhs != rhs)[0]
        for t in bad[:4]:
            failures.append(
                f"colour {name!r}: pi(phi[{int(ks[t])}]) = {int(lhs[t])} "
                f"but sbar(pi({int(ks[t])})) = {int(rhs[t])}")

    def integer_ball(base):
        frontier, vertices = {base}, {base}
        for _ in range(r):
            nxt = set()
            for v in frontier:
                for name in gens.names:
                    for arr in (fwd[name], bwd[name]):
                        w = int(arr[v - lo])
                        if w not in vertices:
                            nxt.add(w)
            vertices |= nxt
            frontier = nxt
        edges = {(v, int(fwd[name][v - lo]), c)
                 for v in vertices
                 for c, name in enumerate(gens.names, start=1)
                 if int(fwd[name][v - lo]) in vertices}
        return vertices, edges

    width = 2 * c1 * (r + 1) + 1
    text = src.window(1 - c1 * (r + 1), M + c1 * (r + 1))
    reps = {}
    for n in range(1, M + 1):
        reps.setdefault(text[n - 1: n - 1 + width], n)
    for n in reps.values():
        vertices, edges = integer_ball(n)
        qball = quotient_ball(quotient, n % M, r)
        mapped_vertices = frozenset(v % M for v in vertices)
        mapped_edges = frozenset((a % M, b % M, c) for a, b, c in edges)
        if len(mapped_vertices) != len(vertices):
            failures.append(f"pi_M not injective on the ball at {n}")
        elif (mapped_vertices, mapped_edges) != (qball.vertices, qball.edges):
            failures.append(f"based balls at {n} and {n % M} differ under pi_M")
    return ColourIsoReport(not failures, r, hi - lo + 1, len(reps), failures)


# ---------------------------------------------------------------------------
# direct certification of a local embedding on an enumerated ball
# ---------------------------------------------------------------------------


@dataclass
class LocalEmbeddingCertificate:
    radius: int
    ball_size: int
    pairs_checked: int
    multiplicative: bool
    injective: bool
    witness: list = field(default_factory=list)    # (element index, perm digest)
    from_colour_iso: bool = False

    def to_json(self) -> str:
        payload = {
            "ball_radius": self.radius,
            "ball_size": self.ball_size,
            "pairs_checked": self.pairs_checked,
            "multiplicative": self.multiplicative,
            "injective": self.injective,
            "from_colour_iso": self.from_colour_iso,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _covering_interval(src: WordSource, radius: int, margin: int) -> int:
    """Length L so that [0, L] sees every `radius`-cylinder with the margin."""
    width = 2 * radius + 1
    needed = set(cylinders(src, radius))
    L = max(4 * (width + 2 * margin), 256)
    while True:
        text = src.window(-radius, L + radius)
        seen = set()
        for n in range(margin, L - margin + 1):
            seen.add(text[n: n + width])
        if needed <= seen:
            return L
        if L > src.budgets.window_limit:
            raise BudgetError("covering interval search exhausted window budget")
        L *= 2


def _action_matrix(src: WordSource, elements: Sequence[TfgElement], L: int) -> np.ndarray:
    """Row e = (phi(e)[0..L]) for each ball element, computed per distinct precision."""
    out = np.empty((len(elements), L + 1), dtype=np.int64)
    base = np.arange(L + 1, dtype=np.int64)
    by_prec = {}
    for i, e in enumerate(elements):
        by_prec.setdefault(e.precision, []).append(i)
    for m, rows in by_prec.items():
        text = src.window(-m, L + m)
        _, index = cylinder_index(src, m)
        width = 2 * m + 1
        cyl_at = np.fromiter((index[text[t: t + width]] for t in range(L + 1)),
                             dtype=np.int64, count=L + 1)
        for i in rows:
            shifts = np.asarray(elements[i].shifts, dtype=np.int64)
            out[i] = base + shifts[cyl_at]
    return out


def certify_local_embedding(src: WordSource, gens: GeneratorSet,
                            quotient: PermutationQuotient, n: int,
                            ball_limit: int = 10 ** 5) -> LocalEmbeddingCertificate:
    """Enumerate B_S(n), push words through the quotient, and check everything.

    (a) well-definedness along every in-ball generator edge, (b)
    multiplicativity on all composable pairs inside the ball, (c) injectivity.
    Pair products are identified by their integer action over a covering
    interval (which determines the element exactly); the permutation side is
    verified with vectorized compositions.
    """
    if n < 0:
        raise PreconditionError("ball radius must be >= 0")
    if n > (2 * quotient.r) // 3:
        raise PreconditionError(
            f"ball radius {n} exceeds floor(2r/3) for quotient radius {quotient.r}")
    ball = word_length_ball(gens, n, ball_limit)
    elements = [e for e, _, _ in ball.entries]
    M = quotient.M
    perms = np.empty((len(elements), M), dtype=np.int64)
    for i, (_, _, word) in enumerate(ball.entries):
        perms[i] = quotient.word_perm(word)

    witness = []
    for i, (_, _, _) in enumerate(ball.entries[:64]):
        witness.append((i, hashlib.sha256(perms[i].tobytes()).hexdigest()[:12]))

    # (c) injectivity
    seen = {}
    for i in range(len(elements)):
        key = perms[i].tobytes()
        if key in seen:
            raise CertificateError(
                "distinct ball elements share a permutation image",
                witnesses=[(seen[key], i)])
        seen[key] = i

    if n == 0:
        return LocalEmbeddingCertificate(0, 1, 0, True, True, witness)

    # identity-resolving action matrix over a covering interval
    lam = max(e.bound for e in elements)
    prec = max(e.precision for e in elements)
    pair_prec = prec + lam                     # precision bound for any pair product
    margin = 2 * (2 * lam)                     # pair bound is <= 2*lam, need 2x margin
    L = _covering_interval(src, pair_prec, margin) + 2 * margin
    av = _action_matrix(src, elements, L)
    b = 2 * lam
    cols = np.arange(b, L + 1 - b, dtype=np.int64)
    key_of = {}
    for i in range(len(elements)):
        key_of[av[i, cols].tobytes()] = i

    # probe fingerprints: equal rows have equal fingerprints, so candidate
    # pairs survive the probe and are then verified exactly on the full row
    rng = np.random.default_rng(0)
    probe = rng.integers(0, len(cols), size=min(8, len(cols)))
    weights = rng.integers(1, 2 ** 62, size=len(probe), dtype=np.int64)
    ball_fps = av[:, cols[probe]] @ weights
    fp_sorted = np.sort(ball_fps)

    pairs_checked = 0
    bad = []
    for j in range(len(elements)):             # j = right factor h
        avh = av[j, cols]
        fps = av[:, avh[probe]] @ weights      # fingerprint of each g_i h_j
        pos = np.searchsorted(fp_sorted, fps)
        pos = np.minimum(pos, len(fp_sorted) - 1)
        candidates = np.nonzero(fp_sorted[pos] == fps)[0]
        permj = perms[j]
        for i in candidates:
            row = av[i, avh]                   # full action row of g_i h_j
            e = key_of.get(row.tobytes())
            if e is None:
                continue
            pairs_checked += 1
            if not np.array_equal(perms[i][permj], perms[e]):
                bad.append((int(i), j, e))
    if bad:
        raise CertificateError(
            f"multiplicativity failed on {len(bad)} composable pairs",
            witnesses=bad[:8])
    return LocalEmbeddingCertificate(
        n, len(elements), pairs_checked, True, True, witness)


def certificate_from_colour_iso(report: ColourIsoReport,
                                quotient: PermutationQuotient) -> LocalEmbeddingCertificate:
    """Embedding certificate implied by a colour-iso pass at the quotient radius.

    Local colour isomorphism at radius r yields a local embedding of
    B(floor(2r/3)) extending the generator assignment.
    """
    if not report.ok:
        raise CertificateError("colour-iso report records failures",
                               witnesses=report.failures)
    radius = (2 * report.radius) // 3
    witness = [(k, hashlib.sha256(quotient.perms[name].tobytes()).hexdigest()[:12])
               for k, name in enumerate(quotient.names)]
    return LocalEmbeddingCertificate(
        radius, -1, report.positions_checked, True, True, witness,
        from_colour_iso=True)


# ---------------------------------------------------------------------------
# upper growth datapoints
# ---------------------------------------------------------------------------


@dataclass
class UpperGrowthPoint:
    radius: int          # certified ball radius floor(2r/3)
    quotient_r: int
    degree: int          # M
    log_order: float     # log(M!)
    exact: bool = True


def growth_upper_datapoints(src: WordSource, gens: GeneratorSet,
                            r_list: Sequence[int]) -> list:
    """One quotient per requested r; duplicate certified radii keep the least M."""
    if not r_list:
        raise PreconditionError("radii list must be nonempty")
    points = {}
    for r in sorted(set(r_list)):
        M = find_M(src, gens, r)
        radius = (2 * r) // 3
        log_order = float(sum(math.log(k) for k in range(2, M + 1)))
        point = UpperGrowthPoint(radius, r, M, log_order)
        if radius not in points or M < points[radius].degree:
            points[radius] = point
    return [points[k] for k in sorted(points)]


def upper_table(points: Sequence[UpperGrowthPoint]) -> GrowthTable:
    table = GrowthTable("quotient-degree")
    for p in points:
        table.add(p.radius, p.degree, p.exact)
    return table
