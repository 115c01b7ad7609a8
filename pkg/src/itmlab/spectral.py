"""Stable directions, simplex dynamics, eigenvalue lines, and the weak-mixing
verdict engine.

The contracting direction of the matrix cocycle is found through the positive
conjugate cocycle: iterating the conjugated matrices on a positive seed
contracts the positive cone in the Hilbert metric, and the per-block
contraction factors multiply into an explicit certificate for the returned
direction.  The projective action on the unit simplex, its inverse branches,
and the integer-translate lines through (1,1) turn candidate Koopman
eigenvalues into a bounded, checkable search.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import mpmath
from mpmath import mp

from .errors import DomainError, InvariantViolation
from .kseq import KSeqSpec, EXPLICIT, PERIODIC
from .numkernel import (
    DEFAULT_PRECISION,
    HighFloat,
    Mat3,
    frac_dist,
    hilbert_rho,
    make_matrix,
    mat_product,
    matrix_invariants,
    real_root_in_unit,
    to_mpf,
)
from .sadic import lr_verdict, LR


# ---------------------------------------------------------------------------
# the unit simplex and the projective maps
# ---------------------------------------------------------------------------


def in_simplex(u, v) -> bool:
    return u >= 0 and v >= 0 and u + v <= 1


def is_interior(u, v) -> bool:
    return u > 0 and v > 0 and u + v < 1


def h_forward(k: int, s: tuple) -> tuple:
    """The simplex self-map of index k: (u,v) -> (v, 1-v)/(k(1-v)+1-u)."""
    if k < 1:
        raise DomainError("index k must be >= 1")
    u, v = s
    if not in_simplex(u, v):
        raise DomainError(f"point {s} outside the simplex")
    d = k * (1 - v) + 1 - u
    return (v / d, (1 - v) / d)


def h_inverse(k: int, s: tuple) -> tuple:
    """Inverse branch on the k-th subtriangle:
    (x,y) -> ((x+(k+1)y-1)/(x+y), x/(x+y))."""
    if k < 1:
        raise DomainError("index k must be >= 1")
    x, y = s
    loc = locate_delta_k(s)
    if loc.k is None or (not loc.boundary and loc.k != k) or (
            loc.boundary and k not in loc.candidates):
        raise DomainError(f"point {s} not in subtriangle {k}")
    t = x + y
    return ((x + (k + 1) * y - 1) / t, x / t)


class LocateResult(NamedTuple):
    k: Optional[int]
    boundary: bool
    candidates: tuple


def locate_delta_k(s: tuple, tol=None) -> LocateResult:
    """Which subtriangle holds the point: the fan coordinate v/(1-u) falls in
    [1/(k+1), 1/k].  Ties (shared fan edges) report boundary with both
    candidates; the bottom edge v=0 and the apex u=1 belong to no finite k.
    """
    u, v = s
    if not in_simplex(u, v):
        raise DomainError(f"point {s} outside the simplex")
    exact = isinstance(u, (int, Fraction)) and isinstance(v, (int, Fraction))
    if tol is None:
        tol = Fraction(0) if exact else mpmath.ldexp(1, -(mp.prec // 2))
    if v <= tol or 1 - u <= tol:
        return LocateResult(None, True, ())
    inv_t = (1 - u) / v  # = 1/t >= 1 on the simplex
    if inv_t < 1:
        inv_t = 1  # u+v=1 edge: top of the first subtriangle
    if exact:
        kf = math.floor(inv_t)
        if inv_t == kf:  # exactly on a fan line
            if kf == 1:
                return LocateResult(1, True, (1,))
            return LocateResult(kf, True, (kf, kf - 1))
        return LocateResult(kf, False, (kf,))
    kf = int(mpmath.floor(inv_t))
    if inv_t - kf <= tol and kf >= 2:
        return LocateResult(kf, True, (kf, kf - 1))
    if (kf + 1) - inv_t <= tol:
        return LocateResult(kf + 1, True, (kf + 1, kf))
    if kf < 1:
        kf = 1
    return LocateResult(kf, False, (kf,))


def simplex_itinerary(s: tuple, n: int,
                      precision: int = DEFAULT_PRECISION) -> tuple:
    """Repeated locate-and-invert; halts at a boundary hit.

    Returns (k-list, status) with status "ok" or "boundary" (terminated at a
    shared edge or on the simplex boundary).  Inverse branches expand, so
    float points are pushed through at the stated working precision.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    ks = []
    pt = s
    with mp.workprec(precision):
        for _ in range(n):
            if not is_interior(*pt):
                return (tuple(ks), "boundary")
            loc = locate_delta_k(pt)
            if loc.boundary or loc.k is None:
                return (tuple(ks), "boundary")
            ks.append(loc.k)
            pt = h_inverse(loc.k, pt)
    return (tuple(ks), "ok")


@dataclass(frozen=True)
class DescentStep:
    k: int
    point: tuple
    common_denominator: int


@dataclass(frozen=True)
class DescentTrace:
    start: tuple
    steps: tuple
    terminal: tuple


def rational_descent(x: Fraction, y: Fraction) -> DescentTrace:
    """Exact inverse descent of a rational simplex point.

    Each inverse branch keeps the coordinates rational with strictly smaller
    common denominator, so the descent reaches the simplex boundary in fewer
    steps than the starting denominator.
    """
    x, y = Fraction(x), Fraction(y)
    if not in_simplex(x, y):
        raise DomainError("point outside the simplex")
    steps = []
    pt = (x, y)

    def common_den(p) -> int:
        return math.lcm(p[0].denominator, p[1].denominator)

    prev_den = common_den(pt)
    start_den = prev_den
    while is_interior(*pt):
        loc = locate_delta_k(pt)
        if loc.k is None:
            break  # pragma: no cover - interior points always locate
        pt = h_inverse(loc.k, pt)
        den = common_den(pt)
        if steps and den >= prev_den:
            raise InvariantViolation(
                "descent denominator failed to decrease", data={"point": pt})
        steps.append(DescentStep(loc.k, pt, den))
        prev_den = den
        if len(steps) >= start_den:
            raise InvariantViolation(
                "descent exceeded the denominator bound", data={"start": (x, y)})
    return DescentTrace((x, y), tuple(steps), pt)


# ---------------------------------------------------------------------------
# eigenvalue lines
# ---------------------------------------------------------------------------


def _check_triple(t: tuple) -> tuple:
    p, q, r = t
    if p == q == r:
        raise DomainError("degenerate triple p = q = r")
    return (int(p), int(q), int(r))


def line_residual(s: tuple, t: tuple):
    """|u(q-r) - v(p-r) - (q-p)|: zero exactly on the (p,q,r) line."""
    p, q, r = _check_triple(t)
    u, v = s
    return abs(u * (q - r) - v * (p - r) - (q - p))


def xi_from_line(t: tuple, s: tuple):
    """The candidate eigenvalue cut out by the line through the point."""
    p, q, r = _check_triple(t)
    u, _v = s
    if u == 1:
        raise DomainError("xi undefined at u = 1")
    return (r - p) / (1 - u) + p + q - r


def uv_from_xi(t: tuple, xi) -> tuple:
    """The simplex point on the (p,q,r) line with the given eigenvalue."""
    p, q, r = _check_triple(t)
    den = xi + r - p - q
    if den == 0:
        raise DomainError("degenerate denominator xi + r - p - q = 0")
    return ((xi - q) / den, (xi - p) / den)


@dataclass(frozen=True)
class LineHit:
    triple: tuple
    xi: object
    residual: object


def line_search(s: tuple, certified_diameter, bound: int, tol,
                precision: int = DEFAULT_PRECISION) -> list:
    """All integer triples |p|,|q|,|r| <= bound whose line passes within
    tolerance of the point, with an admissible eigenvalue in (0,1).

    The effective tolerance is tol + 3*bound*certified_diameter, so the
    verdict is honest about the uncertainty of the located point.  An empty
    list certifies "no eigenvalue line up to the bound".
    """
    if bound < 0:
        raise DomainError("bound must be >= 0")
    u, v = s
    exact = isinstance(u, (int, Fraction)) and isinstance(v, (int, Fraction))
    # float64 prefilter: with |p|,|q|,|r| <= bound and coordinates in [0,1],
    # the double-precision residual is within ~1e-12 of the true one, so a
    # double residual above 1e-8 safely exceeds any tolerance below 1e-9
    prefilter = float(tol) < 1e-9 and float(certified_diameter) * 3 * bound < 1e-9
    Xf, Yf, Zf = float(1 - v), float(u - 1), float(v - u)
    with mp.workprec(precision):
        if exact:
            tol_eff = Fraction(tol) + 3 * bound * Fraction(certified_diameter)
        else:
            tol_eff = to_mpf(tol, precision) + 3 * bound * to_mpf(
                certified_diameter, precision)
        X, Y, Z = 1 - v, u - 1, v - u
        hits = []
        seen = set()
        for p in range(-bound, bound + 1):
            for q in range(-bound, bound + 1):
                if prefilter and abs(Zf) > 1e-6:
                    centerf = -(p * Xf + q * Yf) / Zf
                    rf = round(centerf)
                    if abs(p * Xf + q * Yf + rf * Zf) > 1e-8:
                        continue
                base = p * X + q * Y
                if abs(Z) > tol_eff:
                    center = -base / Z
                    r_candidates = set()
                    for rr in (mpmath.floor(center), mpmath.ceil(center)):
                        rr = int(rr)
                        for shift in (-1, 0, 1):
                            r_candidates.add(rr + shift)
                else:
                    if abs(base) > tol_eff:
                        continue
                    r_candidates = range(-bound, bound + 1)
                for r in r_candidates:
                    if not -bound <= r <= bound:
                        continue
                    if p == q == r:
                        continue
                    if (p, q, r) in seen:
                        continue
                    res = abs(base + r * Z)
                    if res > tol_eff:
                        continue
                    if u == 1:
                        continue
                    xi = (r - p) / (1 - u) + p + q - r
                    if not (0 < xi < 1):
                        continue
                    pt = uv_from_xi((p, q, r), xi)
                    if not in_simplex(pt[0] if exact else +pt[0],
                                      pt[1] if exact else +pt[1]):
                        continue
                    seen.add((p, q, r))
                    hits.append(LineHit((p, q, r), xi, res))
    hits.sort(key=lambda h: (h.residual, h.triple))
    return hits


# ---------------------------------------------------------------------------
# stable directions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StableDir:
    u: HighFloat
    v: HighFloat
    w: HighFloat
    certified_diameter: object  # Hilbert-metric diameter bound (mpf)
    n_matrices: int
    blocks_used: int
    flags: tuple = ()

    def point(self) -> tuple:
        return (self.u.value, self.v.value)

    def stable_vector(self) -> tuple:
        """Direction contracted by the forward cocycle: (v, u, u+v-1)."""
        return (self.v.value, self.u.value, self.u.value + self.v.value - 1)

    def to_dict(self) -> dict:
        return {
            "u": self.u.tagged(),
            "v": self.v.tagged(),
            "w": self.w.tagged(),
            "certified_diameter": mpmath.nstr(mpmath.mpf(self.certified_diameter), 8),
        }


def _b_positive_blocks(spec: KSeqSpec, horizon: int) -> list:
    """Greedy segmentation into ranges whose conjugate products (later index
    on the left) are strictly positive.

    Extending a positive product by another factor keeps it positive (no
    factor has a zero row or column), so the smallest positive range is a
    sound greedy choice; an unfinished tail is simply dropped and the caller
    extends the horizon.
    """
    blocks = []
    pos = 1
    while pos <= horizon:
        prod = make_matrix("B", k=spec.k(pos))
        end = pos
        while not prod.is_positive() and end < horizon:
            end += 1
            prod = make_matrix("B", k=spec.k(end)) @ prod
        if not prod.is_positive():
            break
        blocks.append((pos, end, prod))
        pos = end + 1
    return blocks


def stable_direction(spec: KSeqSpec, target_diam=Fraction(1, 10 ** 30),
                     n_max: int = 4096,
                     precision: int = DEFAULT_PRECISION,
                     seed: tuple = (1, 1, 1)) -> StableDir:
    """Certified stable direction via the positive conjugate cocycle.

    Multiplies positivity-certified blocks of conjugate matrices (later
    blocks on the left), tracking the Hilbert diameter of the row cone: the
    bound is twice the log-oscillation of the newest block times the product
    of the earlier blocks' contraction factors.  Stops when the bound drops
    under ``target_diam``; if ``n_max`` matrices are exhausted first, the
    best direction is returned with its larger certified diameter and a flag.
    """
    if spec.satisfies_k2() is False:
        raise DomainError("spec fails the two-parity condition")
    horizon = min(n_max, 64) if spec.horizon is None else min(spec.horizon, n_max)
    target = to_mpf(target_diam, precision)
    best = None
    while True:
        blocks = _b_positive_blocks(spec, horizon)
        prod = Mat3.identity()
        contraction_prefix = mpmath.mpf(1)
        diam = mpmath.inf
        used = 0
        with mp.workprec(precision + 16):
            for start, end, bmat in blocks:
                hr = hilbert_rho(bmat, precision)
                prod = bmat @ prod
                used = end
                diam = 2 * mpmath.log(hr.rho.value) * contraction_prefix
                contraction_prefix *= hr.contraction.value
                if diam < target:
                    break
            vec = prod.apply_row(tuple(seed))
            total = mpmath.mpf(vec[0] + vec[1] + vec[2])
            uvw = [to_mpf(x, precision + 16) / total for x in vec]
            result = StableDir(
                u=HighFloat(+uvw[0], precision),
                v=HighFloat(+uvw[1], precision),
                w=HighFloat(+uvw[2], precision),
                certified_diameter=+diam,
                n_matrices=used,
                blocks_used=len(blocks),
            )
        if diam < target:
            return result
        best = result
        if horizon >= n_max or (spec.horizon is not None and horizon >= spec.horizon):
            return StableDir(best.u, best.v, best.w, best.certified_diameter,
                             best.n_matrices, best.blocks_used,
                             flags=("target_not_reached",))
        horizon = min(n_max, horizon * 2)


def stable_dir_periodic_exact(period, precision: int = DEFAULT_PRECISION) -> StableDir:
    """Stable direction of a periodic spec from the exact eigendata of the
    period product: the root of the characteristic cubic inside (0,1) and the
    row eigenvector solved as a 2x2 linear system at high precision.

    A reducible characteristic polynomial is flagged, not fatal.
    """
    period = tuple(int(k) for k in period)
    if not period or any(k < 1 for k in period):
        raise DomainError("period must be non-empty with k >= 1")
    if all(k == 1 for k in period):
        raise DomainError("all-ones period fails the two-parity condition")
    spec = KSeqSpec.eventually_periodic((), period)
    prod = mat_product([make_matrix("A", k=k) for k in period])
    inv = matrix_invariants(prod)
    flags = []
    if not inv.irreducible_over_Q:
        flags.append("reducible_charpoly")
    if spec.satisfies_k2() is not True:
        flags.append("k2_violated")
    lam = real_root_in_unit(inv.charpoly, precision + 32).value
    P = prod.rows
    with mp.workprec(precision + 32):
        a = P[0][0] - lam
        b = P[1][0]
        c = P[0][1]
        d = P[1][1] - lam
        det = a * d - b * c
        if det == 0:
            raise DomainError("degenerate eigenvector system")
        u1 = (P[2][0] * d - b * P[2][1]) / det
        u2 = (a * P[2][1] - P[2][0] * c) / det
        residual = abs(u1 * P[0][2] + u2 * P[1][2] - (P[2][2] - lam))
        tol = mpmath.ldexp(1, -(precision - 24))
        if residual > tol:
            raise InvariantViolation("eigenvector residual too large",
                                     data={"residual": mpmath.nstr(residual, 8)})
        if not (u1 > 0 and u2 > 0):
            raise InvariantViolation("stable eigenvector left the cone",
                                     data={"u1": str(u1), "u2": str(u2)})
        s = 1 / (1 + u1 + u2)
        u = +(u2 * s)
        v = +(u1 * s)
        w = +(1 - u - v)
    return StableDir(
        u=HighFloat(u, precision),
        v=HighFloat(v, precision),
        w=HighFloat(w, precision),
        certified_diameter=mpmath.ldexp(1, -(precision - 24)),
        n_matrices=len(period),
        blocks_used=0,
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# path-count vectors and the lattice-distance sums
# ---------------------------------------------------------------------------


def h_vector(spec: KSeqSpec, n: int) -> tuple:
    """Path counts (1,1,1) A_{k_1} ... A_{k_n}; exact integers."""
    if n < 0:
        raise DomainError("n must be >= 0")
    h = (1, 1, 1)
    for i in range(1, n + 1):
        h = make_matrix("A", k=spec.k(i)).apply_row(h)
    return h


@dataclass(frozen=True)
class HostReport:
    xi: object
    horizon: int
    terms_raw: tuple        # sup-norm lattice distance of xi * h_n
    terms_simplified: tuple  # max_{r<=k_n} distance of xi * r * h_n(1)
    partial_raw: tuple
    partial_simplified: tuple
    growth_class: str
    fitted_slope: float
    norm: str = "sup"

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "partial_sums": [float(x) for x in self.partial_raw],
            "partial_sums_simplified": [float(x) for x in self.partial_simplified],
            "growth_class": self.growth_class,
            "fitted_slope": self.fitted_slope,
            "norm": self.norm,
        }


def _fit_growth(partials) -> tuple:
    n = len(partials)
    if n < 4:
        return ("short", 0.0)
    xs = range(n // 2, n)
    ys = [float(partials[i]) for i in xs]
    xbar = sum(xs) / len(ys)
    ybar = sum(ys) / len(ys)
    denom = sum((x - xbar) ** 2 for x in xs)
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / denom if denom else 0.0
    if float(partials[-1]) - float(partials[(3 * n) // 4]) == 0.0:
        return ("bounded", slope)
    if slope >= 0.02:
        return ("linear", slope)
    return ("log", slope)


def host_sums(spec: KSeqSpec, xi, n: int,
              precision: int = DEFAULT_PRECISION) -> HostReport:
    """Lattice-distance terms of the eigenvalue condition, raw and in the
    simplified single-coordinate form, with non-decreasing partial sums.

    Only a growth class over the finite horizon is reported; convergence of
    the infinite sum is never asserted.
    """
    if isinstance(xi, int):
        xi = Fraction(xi)
    exact = isinstance(xi, Fraction)
    if not exact:
        xi = to_mpf(xi, precision)
    if not 0 <= xi <= 1:
        raise DomainError("xi must lie in [0, 1]")
    if n < 1:
        raise DomainError("horizon must be >= 1")
    terms_raw = []
    terms_simp = []
    partial_raw = []
    partial_simp = []
    h = (1, 1, 1)
    with mp.workprec(precision):
        for i in range(1, n + 1):
            h = make_matrix("A", k=spec.k(i)).apply_row(h)
            terms_raw.append(max(frac_dist(xi * c) for c in h))
            k = spec.k(i)
            terms_simp.append(max(frac_dist(xi * r * h[0]) for r in range(k + 1)))
        acc_r = acc_s = Fraction(0) if exact else mpmath.mpf(0)
        for a, b in zip(terms_raw, terms_simp):
            acc_r += a
            acc_s += b
            partial_raw.append(acc_r)
            partial_simp.append(acc_s)
    growth, slope = _fit_growth(partial_raw)
    return HostReport(xi, n, tuple(terms_raw), tuple(terms_simp),
                      tuple(partial_raw), tuple(partial_simp), growth, slope)


def slope_check(spec: KSeqSpec, n: int) -> bool:
    """The composed images of the simplex have sides of negative slope.

    n = 0 passes by convention.  At n = 1 the image triangle keeps one
    vertical side on the v-axis (the image of the bottom edge); from n = 2 on
    all three sides must have strictly negative finite slope.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > 12:
        raise DomainError("vertex denominators blow up past n = 12")
    if n == 0:
        return True
    corners = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
               (Fraction(0), Fraction(1))]
    images = []
    ks = spec.terms(n)
    for c in corners:
        pt = c
        for k in reversed(ks):
            pt = h_forward(k, pt)
        images.append(pt)
    verticals = 0
    for i in range(3):
        for j in range(i + 1, 3):
            (x1, y1), (x2, y2) = images[i], images[j]
            if x1 == x2:
                verticals += 1
                # only the image of the bottom edge may stay vertical, and
                # only at the first level
                if n > 1 or {i, j} != {0, 1}:
                    return False
                continue
            slope = (y2 - y1) / (x2 - x1)
            if slope >= 0:
                return False
    if n == 1 and verticals != 1:
        return False
    return True


# ---------------------------------------------------------------------------
# the verdict engine
# ---------------------------------------------------------------------------

WM_PERIODIC = "WeakMixingPeriodic"
WM_CERTIFIED = "WeakMixingCertified"
EV_CANDIDATE = "EigenvalueCandidate"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class WMVerdict:
    status: str
    spec: KSeqSpec
    bound: int
    tol: object
    evidence: dict
    stable: Optional[StableDir]
    reason: Optional[str] = None

    def to_json(self) -> str:
        payload = {
            "spec": self.spec.describe(),
            "status": self.status,
            "evidence": self.evidence,
            "stable_dir": self.stable.to_dict() if self.stable else None,
        }
        if self.reason:
            payload["reason"] = self.reason
        return json.dumps(payload, sort_keys=True)


def _hits_payload(hits) -> list:
    return [
        {"triple": list(h.triple), "xi": float(h.xi), "residual": float(h.residual)}
        for h in hits
    ]


def wm_verdict(spec: KSeqSpec, bound: int = 50, horizon: int = 40,
               tol=Fraction(1, 10 ** 25),
               precision: int = DEFAULT_PRECISION) -> WMVerdict:
    """Decision tree for the weak-mixing question.

    Eventually periodic specs satisfying the two-parity condition are weakly
    mixing (with irreducibility of the period product and an empty line
    search recorded as supporting evidence).  Otherwise a declared finite
    liminf plus an empty line search certifies weak mixing up to the bound; a
    line hit yields an eigenvalue candidate with its lattice-distance summary
    and linear-recurrence flag; anything else is inconclusive.
    """
    if spec.kind == EXPLICIT:
        return WMVerdict(INCONCLUSIVE, spec, bound, tol,
                         {"line_search": None}, None,
                         reason="undeclared tail: explicit prefix only")
    if spec.kind == PERIODIC:
        if spec.satisfies_k2() is not True:
            return WMVerdict(INCONCLUSIVE, spec, bound, tol,
                             {"line_search": None}, None,
                             reason="period fails the two-parity condition")
        if spec.prefix:
            stable = stable_direction(spec, target_diam=Fraction(1, 10 ** 35),
                                      precision=precision)
        else:
            stable = stable_dir_periodic_exact(spec.period, precision=precision)
        period_prod = mat_product([make_matrix("A", k=k) for k in spec.period])
        irreducible = matrix_invariants(period_prod).irreducible_over_Q
        hits = line_search(stable.point(), stable.certified_diameter, bound,
                           tol, precision)
        evidence = {
            "line_search": {"P": bound, "tol": float(Fraction(tol) if isinstance(tol, (int, Fraction)) else tol),
                            "hits": _hits_payload(hits)},
            "irreducible": irreducible,
        }
        return WMVerdict(WM_PERIODIC, spec, bound, tol, evidence, stable)
    # generator specs: decidable when the rule's bound is declared
    if spec.liminf_finite() is True:
        stable = stable_direction(spec, target_diam=Fraction(1, 10 ** 35),
                                  precision=precision)
        hits = line_search(stable.point(), stable.certified_diameter, bound,
                           tol, precision)
        evidence = {
            "line_search": {"P": bound, "tol": float(Fraction(tol) if isinstance(tol, (int, Fraction)) else tol),
                            "hits": _hits_payload(hits)},
        }
        if not hits:
            return WMVerdict(WM_CERTIFIED, spec, bound, tol, evidence, stable)
        best = hits[0]
        host = host_sums(spec, best.xi if isinstance(best.xi, Fraction)
                         else to_mpf(best.xi, precision), horizon, precision)
        evidence["host"] = host.to_dict()
        evidence["linearly_recurrent"] = lr_verdict(spec).status == LR
        return WMVerdict(EV_CANDIDATE, spec, bound, tol, evidence, stable)
    return WMVerdict(INCONCLUSIVE, spec, bound, tol, {"line_search": None}, None,
                     reason="tail behaviour undeclared or unbounded")
