"""Substitution engine over the alphabet {1,2,3}.

Words are plain Python strings over "123".  The generating substitution for
index k maps 1 -> 2, 2 -> 3 1^k, 3 -> 3 1^(k-1); its abelianization (entry
(i,j) counts symbol i in the image of j) is the cocycle matrix A_k, and that
consistency is asserted wherever both sides are available.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, NamedTuple

from .errors import DomainError, InvariantViolation, ParseError
from .kseq import KSeqSpec, EXPLICIT, PERIODIC, GENERATOR
from .numkernel import (
    DEFAULT_PRECISION,
    HighFloat,
    Mat3,
    make_matrix,
    mat_product,
    to_mpf,
)

ALPHABET = "123"
_MAX_IMAGE_LENGTH = 10 ** 7


def _check_word(w: str) -> str:
    if any(ch not in ALPHABET for ch in w):
        raise ParseError("words must use symbols 1, 2, 3 only")
    return w


@dataclass(frozen=True)
class Substitution:
    """Images of the three letters, with the abelianization kept consistent."""

    images: tuple  # (image of 1, image of 2, image of 3)

    def __post_init__(self):
        if len(self.images) != 3 or any(not im for im in self.images):
            raise DomainError("a substitution needs non-empty images for 1, 2, 3")
        for im in self.images:
            _check_word(im)

    def image(self, symbol: str) -> str:
        return self.images[int(symbol) - 1]

    def apply(self, word: str) -> str:
        _check_word(word)
        out = "".join(self.images[int(ch) - 1] for ch in word)
        if len(out) > _MAX_IMAGE_LENGTH:
            raise DomainError("substitution image exceeds the size guard")
        return out

    def compose(self, other: "Substitution") -> "Substitution":
        """Functional composition self o other (apply ``other`` first)."""
        return Substitution(tuple(self.apply(im) for im in other.images))

    @property
    def abelianization(self) -> Mat3:
        return Mat3(
            tuple(
                tuple(self.images[j].count(ALPHABET[i]) for j in range(3))
                for i in range(3)
            )
        )

    def is_left_proper(self) -> bool:
        heads = {im[0] for im in self.images}
        return len(heads) == 1

    def dump(self) -> str:
        return "\n".join(f"{i + 1} -> {im}" for i, im in enumerate(self.images))


def chi(k: int) -> Substitution:
    """The renormalization substitution 1 -> 2, 2 -> 3 1^k, 3 -> 3 1^(k-1)."""
    if k < 1:
        raise DomainError("chi requires k >= 1 (no substitution at k=0)")
    return Substitution(("2", "3" + "1" * k, "3" + "1" * (k - 1)))


def compose_chain(spec: KSeqSpec, i: int, j: int) -> Substitution:
    """chi_{k_i} o chi_{k_{i+1}} o ... o chi_{k_j}."""
    if not (1 <= i <= j):
        raise DomainError("need 1 <= i <= j")
    if spec.horizon is not None and j > spec.horizon:
        raise DomainError("chain range exceeds the spec horizon")
    s = chi(spec.k(i))
    for t in range(i + 1, j + 1):
        s = s.compose(chi(spec.k(t)))
    return s


def rho_prefix(spec: KSeqSpec, length: int) -> str:
    """First ``length`` symbols of the one-sided fixed word.

    The nested images of "3" under lengthening chains are nested prefixes, so
    the word is built inside-out with each intermediate truncated to ``length``
    (a prefix of the image depends only on a prefix of the preimage).
    """
    if length < 1:
        raise DomainError("length must be >= 1")
    if length == 1:
        return "3"
    # exact image lengths via the abelianization, to pick the chain depth
    h = (1, 1, 1)
    depth = None
    limit = spec.horizon if spec.horizon is not None else 10 ** 6
    for i in range(1, limit + 1):
        h = make_matrix("A", k=spec.k(i)).apply_row(h)
        if h[2] >= length:
            depth = i
            break
    if depth is None:
        raise DomainError("chain too short: image of 3 never reaches the requested length")
    w = "3"
    for t in range(depth, 0, -1):
        w = chi(spec.k(t)).apply(w)[:length]
    if len(w) < length:  # pragma: no cover - guarded by the length computation
        raise DomainError("insufficient growth while building the fixed word")
    return w


class Desubstitution(NamedTuple):
    preimage: str
    complete: bool


def desubstitute(w: str, k: int) -> Desubstitution:
    """Invert chi_k on a factor by the 2/3-anchored block parse.

    Blocks are "2" -> 1 and "3" followed by j ones -> 2 if j = k, 3 if
    j = k-1.  A leading run of ones (the tail of a cut block) is dropped and
    reported via ``complete=False``; a trailing "3 1^j" with j < k-1 is a cut
    block and is dropped the same way.  Any other run of ones cannot occur in
    a chi_k-image and is a parse error.
    """
    _check_word(w)
    if k < 1:
        raise DomainError("desubstitute requires k >= 1")
    if not w:
        return Desubstitution("", True)
    out = []
    complete = True
    i = 0
    lead = 0
    while i < len(w) and w[i] == "1":
        lead += 1
        i += 1
    if lead:
        if lead > k:
            raise ParseError(f"illegal run of {lead} ones for k={k}")
        complete = False
    while i < len(w):
        ch = w[i]
        if ch == "2":
            out.append("1")
            i += 1
            continue
        # ch == "3": count the following ones
        j = 0
        i += 1
        while i < len(w) and w[i] == "1":
            j += 1
            i += 1
        at_end = i >= len(w)
        if j == k:
            out.append("2")
        elif j == k - 1:
            out.append("3")
        elif j < k - 1 and at_end:
            complete = False  # cut block at the right edge, dropped
        else:
            raise ParseError(f"illegal run of {j} ones for k={k}")
    return Desubstitution("".join(out), complete)


# ---------------------------------------------------------------------------
# telescoping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TelescopeBlock:
    start: int  # 1-based, inclusive
    end: int
    matrix: Mat3
    full: bool


def telescope_blocks(spec: KSeqSpec, horizon: int) -> list:
    """Greedy segmentation into blocks whose matrices are strictly positive.

    Pattern per block: optional leading ones, a first index >= 2, interior
    runs of ones of odd length each followed by an index >= 2, a final run of
    ones of even length, one more index >= 2, and then exactly one extra
    factor.  A tail that cannot be closed inside the horizon is returned with
    ``full=False``.
    """
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    if spec.horizon is not None and horizon > spec.horizon:
        raise DomainError("horizon exceeds the spec's defined range")
    ks = spec.terms(horizon)

    def block_matrix(a: int, b: int) -> Mat3:
        return mat_product([make_matrix("A", k=ks[t - 1]) for t in range(a, b + 1)])

    def partial_tail(start: int) -> TelescopeBlock:
        return TelescopeBlock(start, horizon, block_matrix(start, horizon), False)

    blocks = []
    pos = 1
    while pos <= horizon:
        start = pos
        while pos <= horizon and ks[pos - 1] == 1:
            pos += 1
        if pos > horizon:
            blocks.append(partial_tail(start))
            break
        pos += 1  # consumed the first index >= 2
        end = None
        while end is None:
            gap_start = pos
            while pos <= horizon and ks[pos - 1] == 1:
                pos += 1
            if pos > horizon:
                break
            gap = pos - gap_start
            if gap % 2 == 0:
                if pos + 1 > horizon:
                    break
                end = pos + 1
            else:
                pos += 1  # interior index >= 2 after an odd run
        if end is None:
            blocks.append(partial_tail(start))
            break
        m = block_matrix(start, end)
        if not m.is_positive():
            raise InvariantViolation(
                "telescoped block matrix is not strictly positive",
                step=start,
                data=m.as_lists(),
            )
        blocks.append(TelescopeBlock(start, end, m, True))
        pos = end + 1
    return blocks


# ---------------------------------------------------------------------------
# linear recurrence
# ---------------------------------------------------------------------------

LR = "LinearlyRecurrent"
NOT_LR = "NotLR"
UNDECIDED = "UndecidedPrefix"

REASON_UNBOUNDED_K = "unbounded k"
REASON_EVEN_GAPS = "unbounded even-parity gaps"
REASON_ODD_GAPS = "unbounded odd-parity gaps"


@dataclass(frozen=True)
class LRVerdict:
    status: str
    reason: Optional[str] = None
    witness: Optional[dict] = None


def _parity_gap_ok(spec: KSeqSpec, parity: int) -> bool:
    """Whether {i : k at indices of the given parity > 1} has bounded gaps.

    parity 0 means even indices k_{2i}, parity 1 means odd indices k_{2i-1}.
    Decidable for periodic specs: with an odd period any k>1 slot feeds both
    parities; with an even period the slot parities are frozen.
    """
    q = len(spec.period)
    if all(k == 1 for k in spec.period):
        return False
    if q % 2 == 1:
        return True
    offset = len(spec.prefix)
    return any(
        k > 1 and (offset + j) % 2 == parity for j, k in enumerate(spec.period, start=1)
    )


def _prefix_stats(ks) -> dict:
    hits = {0: [], 1: []}
    for pos, k in enumerate(ks, start=1):
        if k > 1:
            hits[pos % 2].append((pos + 1) // 2)
    out = {"prefix_max_k": max(ks) if ks else 0, "length": len(ks)}
    names = {0: "max_even_parity_gap", 1: "max_odd_parity_gap"}
    for parity in (0, 1):
        idx = hits[parity]
        if len(idx) >= 2:
            out[names[parity]] = max(b - a for a, b in zip(idx, idx[1:]))
        else:
            out[names[parity]] = None  # no recurrence evidence in the prefix
    return out


def lr_verdict(spec: KSeqSpec) -> LRVerdict:
    """Linear recurrence verdict: bounded k plus bounded parity gaps.

    Fully decidable for eventually periodic specs; explicit prefixes get an
    undecided verdict with prefix statistics; generators are decided when the
    rule's boundedness is known.
    """
    if spec.kind == PERIODIC:
        if not _parity_gap_ok(spec, 0):
            return LRVerdict(NOT_LR, REASON_EVEN_GAPS, {"period": spec.period})
        if not _parity_gap_ok(spec, 1):
            return LRVerdict(NOT_LR, REASON_ODD_GAPS, {"period": spec.period})
        return LRVerdict(
            LR,
            witness={"max_k": max((*spec.prefix, *spec.period)), "period": spec.period},
        )
    if spec.kind == GENERATOR:
        if spec.is_bounded() is False:
            return LRVerdict(NOT_LR, REASON_UNBOUNDED_K, {"rule": spec.rule_name})
        return LRVerdict(UNDECIDED, witness=_prefix_stats(spec.terms(64)))
    return LRVerdict(UNDECIDED, witness=_prefix_stats(spec.prefix))


# ---------------------------------------------------------------------------
# word statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapStats:
    rows: tuple  # per subword length: dict(length, distinct, max_gap, normalized)
    empirical_L: float


def return_gap_stats(w: str, max_len: int) -> GapStats:
    """Per-length maximal return gaps of factors, normalized by the length.

    For each factor length l <= max_len, scans every factor occurring at least
    twice and records the largest distance between consecutive occurrence
    starts; ``empirical_L`` is the upper envelope max(gap)/l.  Exact counts by
    direct scanning.
    """
    _check_word(w)
    if max_len < 1:
        raise DomainError("max_len must be >= 1")
    if len(w) < 100 * max_len:
        raise DomainError("word too short: need |w| >= 100 * max_len")
    rows = []
    envelope = 0.0
    for ell in range(1, max_len + 1):
        last: dict = {}
        max_gap = 0
        for i in range(len(w) - ell + 1):
            f = w[i : i + ell]
            prev = last.get(f)
            if prev is not None and i - prev > max_gap:
                max_gap = i - prev
            last[f] = i
        normalized = max_gap / ell
        envelope = max(envelope, normalized)
        rows.append(
            {
                "length": ell,
                "distinct_factors": len(last),
                "max_gap": max_gap,
                "normalized": normalized,
            }
        )
    return GapStats(tuple(rows), envelope)


def frequency_ratio(s: Substitution, precision: int = DEFAULT_PRECISION) -> HighFloat:
    """Worst ratio of per-symbol frequencies across images, for a strictly
    positive abelianization; equals 1 only for equal-frequency columns."""
    m = s.abelianization
    if not m.is_positive():
        raise DomainError("zero frequency: abelianization is not strictly positive")
    colsums = [sum(m.column(j)) for j in range(3)]
    worst = Fraction(1)
    for v in range(3):
        freqs = [Fraction(m.rows[v][j], colsums[j]) for j in range(3)]
        worst = max(worst, max(freqs) / min(freqs))
    return HighFloat(to_mpf(worst, precision), precision)


def aperiodicity_scan(w: str, p_max: int) -> bool:
    """Desk-scale aperiodicity evidence (not a proof).

    Returns False when some period p <= p_max makes the word eventually
    p-periodic over its full length, where "eventually" tolerates a
    non-periodic head of at most half the word; True otherwise.
    """
    _check_word(w)
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    if len(w) < 4 * p_max:
        raise DomainError("word too short: need |w| >= 4 * p_max")
    n = len(w)
    for p in range(1, p_max + 1):
        mismatch = -1
        for i in range(n - p - 1, -1, -1):
            if w[i] != w[i + p]:
                mismatch = i
                break
        if mismatch + 1 <= n // 2:
            return False
    return True
