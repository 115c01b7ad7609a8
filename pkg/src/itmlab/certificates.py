"""Computational verification of the combinatorial lemmas.

Everything here is exact integer arithmetic on the cocycle matrices plus
high-precision post-processing: transition-graph path weights, the loop-sum
identity, the eventual entrywise domination of the positive-cone product over
the original one, finite-time Lyapunov data, the four-state growth machine,
and the telescoped lattice-distance inequality.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from .errors import DomainError, InvariantViolation
from .kseq import KSeqSpec
from .numkernel import (
    DEFAULT_PRECISION,
    HighFloat,
    Mat3,
    cubic_real_roots,
    frac_dist,
    make_matrix,
    mat_product,
    to_mpf,
)
from .sadic import telescope_blocks

# transition graph: edge -> (source, target); weights are position-dependent
_EDGES = {"a": (3, 2), "b": (2, 1), "c": (1, 3), "d": (3, 3), "e": (1, 2)}


@dataclass(frozen=True)
class EdgeWord:
    word: str
    start: int  # absolute 1-based position of the first edge

    def __post_init__(self):
        if any(ch not in _EDGES for ch in self.word):
            raise DomainError("edge word must use letters a..e")
        if self.start < 1:
            raise DomainError("start position must be >= 1")
        for x, y in zip(self.word, self.word[1:]):
            if _EDGES[x][1] != _EDGES[y][0]:
                raise DomainError(f"edges {x}{y} do not compose in the graph")


def _edge_weight(edge: str, k: int, version: str) -> int:
    if edge in ("a", "b"):
        return 1
    if edge == "c":
        return k - 1
    if edge == "d":
        return 1 if version == "A" else k
    if edge == "e":
        return k if version == "A" else 1
    raise DomainError(f"unknown edge {edge!r}")  # pragma: no cover


def path_weight(w: EdgeWord, version: str, spec: KSeqSpec) -> int:
    """Product of position-dependent edge weights along a composable word."""
    if version not in ("A", "B"):
        raise DomainError("version must be 'A' or 'B'")
    if spec.horizon is not None and w.start + len(w.word) - 1 > spec.horizon:
        raise DomainError("edge word extends past the spec horizon")
    total = 1
    for offset, edge in enumerate(w.word):
        total *= _edge_weight(edge, spec.k(w.start + offset), version)
    return total


@dataclass(frozen=True)
class LoopSumCheck:
    lhs_A: int
    closed_form: int
    rhs_B: int
    strict: bool


def loop_sum_check(spec: KSeqSpec, n: int) -> LoopSumCheck:
    """The loop-sum identity over the words (be)^j bc d^(2(n-j-1)).

    The A-weighted sum telescopes to k_2 k_4 ... k_2n - 1 exactly; the
    B-weighted sum dominates it, strictly as soon as an odd position in
    [3, 2n-1] carries k >= 2 (those are the positions the d-edges occupy).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if spec.horizon is not None and 2 * n > spec.horizon:
        raise DomainError("need 2n positions")
    lhs = rhs = 0
    for j in range(n):
        word = EdgeWord("be" * j + "bc" + "d" * (2 * (n - j - 1)), 1)
        lhs += path_weight(word, "A", spec)
        rhs += path_weight(word, "B", spec)
    closed = 1
    for i in range(1, n + 1):
        closed *= spec.k(2 * i)
    closed -= 1
    if lhs != closed:  # pragma: no cover - identity proved in tests
        raise InvariantViolation("loop-sum identity failed", data={"lhs": lhs, "closed": closed})
    return LoopSumCheck(lhs_A=lhs, closed_form=closed, rhs_B=rhs, strict=rhs > lhs)


@dataclass(frozen=True)
class ABDomination:
    n_star: Optional[int]
    persists_to: Optional[int]
    n_max: int
    history: tuple  # (n, sup_A, inf_B) triples


def ab_domination(spec: KSeqSpec, n_max: int) -> ABDomination:
    """First n at which every entry of the B-product (later factors on the
    left) strictly exceeds every entry of the A-product, with persistence
    verified to ``n_max``."""
    if n_max < 10:
        raise DomainError("n_max must be >= 10")
    if spec.satisfies_k2() is False:
        raise DomainError("spec fails the two-parity condition")
    a_prod = Mat3.identity()
    b_prod = Mat3.identity()
    n_star = None
    persists_to = None
    history = []
    for n in range(1, n_max + 1):
        k = spec.k(n)
        a_prod = a_prod @ make_matrix("A", k=k)
        b_prod = make_matrix("B", k=k) @ b_prod
        sup_a = a_prod.max_entry()
        inf_b = b_prod.min_entry()
        history.append((n, sup_a, inf_b))
        dominated = sup_a < inf_b
        if dominated and n_star is None:
            n_star = n
            persists_to = n
        elif n_star is not None:
            persists_to = n if dominated and persists_to == n - 1 else persists_to
    return ABDomination(n_star, persists_to, n_max, tuple(history))


@dataclass(frozen=True)
class LyapReport:
    n: int
    exponents: tuple  # three HighFloat, descending
    sign_pattern: tuple
    exponent_sum: HighFloat
    sup_A: int
    inf_B: int
    first_full_block_end: Optional[int]


def lyapunov_report(spec: KSeqSpec, n: int,
                    precision: int = DEFAULT_PRECISION) -> LyapReport:
    """Finite-time exponents of the cocycle: log singular values over n.

    Singular values come from the exact characteristic cubic of the Gram
    matrix M M^T (integer entries, determinant 1), isolated by Sturm
    bisection, so there is no floating-point linear algebra drift; the
    exponent sum vanishes up to root-refinement error.
    """
    if n < 10:
        raise DomainError("n must be >= 10")
    mats = [make_matrix("A", k=spec.k(i)) for i in range(1, n + 1)]
    prod = mat_product(mats)
    gram = prod @ prod.transpose()
    roots = cubic_real_roots(gram.charpoly(), precision)
    values = []
    for root, mult in roots:
        values.extend([root.value] * mult)
    with mp.workprec(precision + 16):
        exps = sorted((mpmath.log(v) / (2 * n) for v in values), reverse=True)
        total = +sum(exps)
    b_prod = mat_product([make_matrix("B", k=spec.k(i)) for i in range(n, 0, -1)])
    blocks = telescope_blocks(spec, n)
    first_full = next((b.end for b in blocks if b.full), None)
    return LyapReport(
        n=n,
        exponents=tuple(HighFloat(e, precision) for e in exps),
        sign_pattern=tuple(1 if e > 0 else -1 for e in exps),
        exponent_sum=HighFloat(total, precision),
        sup_A=prod.max_entry(),
        inf_B=b_prod.min_entry(),
        first_full_block_end=first_full,
    )


# ---------------------------------------------------------------------------
# the four-state growth machine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateTag:
    state: str  # "S1" | "S2" | "S3" | "S4"
    position: int  # leftmost consumed index (absolute, 1-based)
    matrix: Mat3
    bound: int
    r: Optional[int] = None  # S1 ones-pair counter
    q: Optional[int] = None  # S3 branch bit
    absorbed: bool = False
    checks: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "step": self.position,
                "state": self.state,
                "matrix": self.matrix.as_lists(),
                "checks": self.checks,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class StateMachineRun:
    trace: tuple
    final_ok: bool


def _row_ratios(m: Mat3) -> tuple:
    return tuple(max(m.rows[i]) / min(m.rows[i]) if min(m.rows[i]) else None
                 for i in range(3))


def _col_ratios(m: Mat3) -> tuple:
    return tuple(
        max(m.column(j)) / min(m.column(j)) if min(m.column(j)) else None
        for j in range(3)
    )


def _check_state(tag: str, m: Mat3, kn: int, C: int,
                 r: Optional[int], q: Optional[int], position: int) -> dict:
    """Assert the state template; returns the recorded check data.

    The fullness bound in state S4 is the within-row comparison
    ``M[u][v] <= 4C * M[u][v']`` (the image-length comparison across source
    letters); it is preserved by any further left multiplication because rows
    of a product are positive combinations of rows.  Per-column ratios are
    recorded alongside for reporting.
    """
    def fail(msg):
        raise InvariantViolation(
            f"state {tag} invariant failed at position {position}: {msg}",
            step=position,
            data=m.as_lists(),
        )

    checks = {"state": tag}
    if tag == "S1":
        template = Mat3(((0, kn, kn - 1), (1, 0, 0),
                         (r, r * kn + 1, r * (kn - 1) + 1)))
        if m.rows != template.rows:
            fail("template mismatch")
        checks["r"] = r
    elif tag == "S2":
        if m.rows[0] != (0, kn, kn - 1):
            fail("first row is not the entry row")
        for name, row in (("Q", m.rows[1]), ("R", m.rows[2])):
            if min(row) < 1:
                fail(f"{name} row not strictly positive")
            if not max(row) < 3 * C * min(row) - C:
                fail(f"{name} row violates max < 3C*min - C")
            checks[name] = list(row)
    elif tag == "S3":
        if m.rows[1] != (q, 1 - q, 0):
            fail("middle row is not (q, 1-q, 0)")
        for name, row in (("P", m.rows[0]), ("R", m.rows[2])):
            if min(row) < 1:
                fail(f"{name} row not strictly positive")
            if not max(row) < 3 * C * min(row):
                fail(f"{name} row violates max < 3C*min")
            checks[name] = list(row)
        checks["q"] = q
    elif tag == "S4":
        if not m.is_positive():
            fail("matrix not full")
        for i in range(3):
            if max(m.rows[i]) > 4 * C * min(m.rows[i]):
                fail(f"row {i} ratio exceeds 4C")
        checks["row_ratios"] = [str(x) for x in _row_ratios(m)]
        checks["col_ratios"] = [str(x) for x in _col_ratios(m)]
    return checks


def state_machine_run(spec: KSeqSpec, C: int, m: int, n: int) -> StateMachineRun:
    """Build A_{k_m} ... A_{k_n} by left multiplication with consecutive
    pairs, classifying every intermediate matrix into the four states and
    asserting each state's inequalities.

    Entry consumes k_n alone when k_n >= 2 (state S1 with r=0), or the pair
    (k_{n-1}, k_n) when k_n = 1 < k_{n-1} (state S3 with q=0).  A single
    leftover index at the left end is absorbed by one extra multiplication,
    flagged in the trace.
    """
    if not (1 <= m < n):
        raise DomainError("need a span m < n")
    if spec.horizon is not None and n > spec.horizon:
        raise DomainError("span exceeds the spec horizon")
    ks = {i: spec.k(i) for i in range(m, n + 1)}
    if any(k > C for k in ks.values()):
        raise DomainError("span contains k > C")
    kn = ks[n]
    trace = []
    if kn >= 2:
        cur = make_matrix("A", k=kn)
        pos = n
        state, r, q = "S1", 0, None
    elif kn == 1 and ks[n - 1] >= 2:
        cur = make_matrix("A", k=ks[n - 1]) @ make_matrix("A", k=kn)
        pos = n - 1
        state, r, q = "S3", None, 0
    else:
        raise DomainError("entry needs k_n >= 2, or k_n = 1 with k_{n-1} >= 2")
    checks = _check_state(state, cur, kn, C, r, q, pos)
    trace.append(StateTag(state, pos, cur, C, r=r, q=q, checks=checks))

    while pos - 2 >= m:
        km2, km1 = ks[pos - 2], ks[pos - 1]
        pair = make_matrix("A", k=km2) @ make_matrix("A", k=km1)
        cur = pair @ cur
        pos -= 2
        if state == "S1":
            if km2 == 1 and km1 == 1:
                r += 1
            elif km2 == 1 and km1 > 1:
                state, r = "S2", None
            elif km2 > 1 and km1 == 1:
                state, r, q = "S3", None, 1
            else:
                state, r = "S4", None
        elif state == "S2":
            state = "S2" if km2 == 1 else "S4"
        elif state == "S3":
            state = "S3" if km1 == 1 else "S4"
        checks = _check_state(state, cur, kn, C, r, q, pos)
        trace.append(StateTag(state, pos, cur, C, r=r, q=q, checks=checks))

    if pos - 1 == m:
        cur = make_matrix("A", k=ks[m]) @ cur
        pos = m
        if state == "S4":
            # provably preserved: rows of the product are positive
            # combinations of rows, so within-row ratios cannot grow
            checks = _check_state("S4", cur, kn, C, None, None, pos)
        else:
            checks = {"state": state, "unclassified_absorb": True}
        trace.append(StateTag(state, pos, cur, C, absorbed=True, checks=checks))

    final = trace[-1]
    final_ok = (
        final.state == "S4"
        and final.matrix.is_positive()
        and all(max(final.matrix.rows[i]) <= 4 * C * min(final.matrix.rows[i])
                for i in range(3))
    )
    return StateMachineRun(tuple(trace), final_ok)


# ---------------------------------------------------------------------------
# telescoped lattice-distance inequality
# ---------------------------------------------------------------------------


def _reachable_residues(terms, cap: int = 200_000):
    """All values of sum_j r_j * t_j mod 1 with r_j in {0..k_j}.

    ``terms`` is a list of (t_j, k_j); Fractions stay exact, floats are
    deduplicated on a 2^-96 grid.  Returns (residues, exact_flag).
    """
    exact = all(isinstance(t, Fraction) for t, _ in terms)
    residues = {Fraction(0)} if exact else {mpmath.mpf(0)}
    for t, k in terms:
        nxt = set() if exact else {}
        for base in residues:
            for rj in range(k + 1):
                val = base + rj * t
                val -= mpmath.floor(val) if not exact else (val.numerator // val.denominator)
                if exact:
                    nxt.add(val)
                else:
                    nxt[int(val * 2 ** 96)] = val
        residues = nxt if exact else set(nxt.values())
        if len(residues) > cap:
            raise DomainError("residue set exploded; reduce the horizon")
    return residues


@dataclass(frozen=True)
class HostTelescopeCheck:
    raw_sum_partial: object
    telescoped_sum_partial: object
    ok: bool
    groups: tuple  # (start, end, raw_group, telescoped_term)
    skipped_tail: Optional[tuple]


def host_telescope_inequality(spec: KSeqSpec, xi, N: int,
                              precision: int = DEFAULT_PRECISION) -> HostTelescopeCheck:
    """Group-wise comparison of the raw and telescoped lattice-distance sums.

    Raw term j: max over r in {0..k_j} of the distance of xi*r*h_j(1) to the
    integers.  The telescoped term of a block maximizes the distance of the
    block's combined sum, which the triangle inequality bounds by the raw
    group sum; both sides are reported and the inequality asserted per block.
    """
    if isinstance(xi, int):
        xi = Fraction(xi)
    exact = isinstance(xi, Fraction)
    if not exact:
        xi = to_mpf(xi, precision)
    blocks = [b for b in telescope_blocks(spec, N)]
    full = [b for b in blocks if b.full]
    tail = next(((b.start, b.end) for b in blocks if not b.full), None)
    h = (1, 1, 1)
    h1 = {}
    for j in range(1, N + 1):
        h = make_matrix("A", k=spec.k(j)).apply_row(h)
        h1[j] = h[0]
    raw_total = Fraction(0) if exact else mpmath.mpf(0)
    tel_total = Fraction(0) if exact else mpmath.mpf(0)
    groups = []
    ok = True
    with mp.workprec(precision):
        for b in full:
            terms = []
            raw_group = Fraction(0) if exact else mpmath.mpf(0)
            for j in range(b.start, b.end + 1):
                t = xi * h1[j]
                k = spec.k(j)
                raw_group += max(frac_dist(t * rj) for rj in range(k + 1))
                terms.append((t, k))
            tel_term = max(min(v, 1 - v) for v in _reachable_residues(terms))
            slack = Fraction(0) if exact else mpmath.ldexp(1, -(precision // 2))
            if tel_term > raw_group + slack:
                ok = False
            raw_total += raw_group
            tel_total += tel_term
            groups.append((b.start, b.end, raw_group, tel_term))
    return HostTelescopeCheck(raw_total, tel_total, ok, tuple(groups), tail)


# ---------------------------------------------------------------------------
# the non-summable monitor sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CexStage:
    index: int
    r: int
    xi_proxy: object
    triple: tuple
    term: object
    window: tuple
    ok: bool


@dataclass(frozen=True)
class CexReport:
    spec: KSeqSpec
    stages: tuple
    failures: tuple


def _best_small_triple(u, v, bound: int = 8):
    """Integer triple whose eigenvalue line passes closest to (u, v), with an
    admissible xi strictly inside (0, 1)."""
    best = None
    X, Y, Z = 1 - v, u - 1, v - u
    for p in range(-bound, bound + 1):
        for q in range(-bound, bound + 1):
            for r in range(-bound, bound + 1):
                if p == q == r:
                    continue
                denom = 1 - u
                if denom == 0:
                    continue
                xi = (r - p) / denom + p + q - r
                if not (0.02 < xi < 0.98):
                    continue
                res = abs(p * X + q * Y + r * Z)
                if best is None or res < best[0]:
                    best = (res, (p, q, r), xi)
    if best is None:
        raise DomainError("no admissible proxy triple found")
    return best[1], best[2]


def cex_sequence(i_max: int, force_r: Optional[int] = None,
                 precision: int = DEFAULT_PRECISION,
                 r_cap: int = 10 ** 6) -> CexReport:
    """Emit a block sequence whose monitored lattice-distance terms stay in
    [1/(i+2), 1/2], the executable skeleton of the no-continuous-eigenvalue
    construction: blocks are ones^r followed by three index-2 factors, with r
    searched so that the term lands in its window.

    The window's lower edge is 1/(i+2) rather than the nominal 1/i: distances
    to the integers never exceed 1/2, so the first two nominal windows would
    be empty.  The harmonic lower bound, which is all the construction needs,
    survives.  ``force_r`` pins r for control runs.
    """
    if i_max < 2:
        raise DomainError("i_max must be >= 2")
    seq = []
    prod = Mat3.identity()
    b_prod = Mat3.identity()
    stages = []
    failures = []
    with mp.workprec(precision):
        for i in range(1, i_max + 1):
            hvec = prod.apply_row((1, 1, 1))
            h1 = hvec[0]
            total = mpmath.mpf(sum(b_prod.apply_row((1, 1, 1))))
            if total > 0 and b_prod.min_entry() >= 0:
                uvw = [mpmath.mpf(x) / total for x in b_prod.apply_row((1, 1, 1))]
            else:  # pragma: no cover
                uvw = [mp.mpf(1) / 3] * 3
            triple, xi = _best_small_triple(uvw[0], uvw[1])
            target = mp.mpf(1) / (i + 2)
            budget_head = 2  # the leading index-2 factor contributes ones too
            if force_r is not None:
                r_used = force_r
                best = mpmath.mpf(0)
                for rr in range(1, r_used + budget_head + 1):
                    best = max(best, frac_dist(xi * rr * h1))
                term = best
                ok = term >= target
            else:
                best = mpmath.mpf(0)
                r_used = None
                for rr in range(1, r_cap + budget_head + 1):
                    best = max(best, frac_dist(xi * rr * h1))
                    if best >= target:
                        r_used = max(rr - budget_head, 0)
                        break
                term = best
                ok = r_used is not None
                if r_used is None:
                    r_used = r_cap
                    failures.append(i)
            stages.append(CexStage(i, r_used, +xi, triple, +term,
                                   (+target, mp.mpf(1) / 2), ok))
            block = [1] * r_used + [2, 2, 2]
            seq.extend(block)
            ones = make_matrix("A1_pow", r=r_used) if r_used else Mat3.identity()
            prod = prod @ ones @ mat_product([make_matrix("A", k=2)] * 3)
            b_ones = make_matrix("A1_pow", r=r_used) if r_used else Mat3.identity()
            b_prod = mat_product([make_matrix("B", k=2)] * 3) @ b_ones @ b_prod
    return CexReport(KSeqSpec.explicit(seq), tuple(stages), tuple(failures))
