"""k-page drawings of K_n and the DDS matching construction.

The construction splits the n "modular matchings" M_i (edges whose
endpoint sum is i mod n) into k runs of consecutive matchings, one run
per page.  Closed forms count the crossings this produces exactly, in
rational arithmetic; the number for (n, k) is exposed as
`dds_crossing_count` together with its generating function and the
identities it satisfies.  Reference lower/upper bound formulas from the
earlier literature live here too.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import TextIO

import numpy as np

from .chordgraph import InputError

__all__ = [
    "Drawing",
    "BoundRecord",
    "PriorLowerBound",
    "matching",
    "dds_drawing",
    "count_crossings",
    "matching_gap_crossings",
    "matching_run_crossings",
    "matching_pair_crossings",
    "collection_crossings",
    "dds_crossing_count",
    "generating_series_coeffs",
    "three_page_count",
    "divisible_case_count",
    "odd_even_identity",
    "two_page_count",
    "prior_lower_bound",
    "prior_upper_bound",
    "write_drawing",
    "parse_drawing",
]

Edge = tuple[int, int]


@dataclass(frozen=True)
class Drawing:
    """A k-page drawing of K_n: one page index in 0..k-1 per edge."""

    n: int
    k: int
    page_of: dict[Edge, int]

    def __post_init__(self):
        expected = comb(self.n, 2)
        if len(self.page_of) != expected:
            raise InputError(f"drawing must assign all {expected} edges, got {len(self.page_of)}")
        bad = [p for p in self.page_of.values() if not 0 <= p < self.k]
        if bad:
            raise InputError(f"page index out of range: {bad[0]}")

    def page_edges(self, page: int) -> list[Edge]:
        return sorted(e for e, p in self.page_of.items() if p == page)


@dataclass
class BoundRecord:
    """Best known sandwich for one (k, n): lower <= nu_k(K_n) <= upper."""

    k: int
    n: int
    lower: int
    upper: int
    exact: bool
    lower_source: str
    upper_source: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise InputError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.exact and self.lower != self.upper:
            raise InputError("exact records need lower == upper")


def matching(i: int, n: int) -> set[Edge]:
    """M_i: edges {a, b} of K_n with a + b = i (mod n).  Partitions E(K_n) over i."""
    if not 0 <= i <= n - 1:
        raise InputError(f"matching index {i} outside 0..{n - 1}")
    out = set()
    for a in range(n):
        b = (i - a) % n
        if a < b:
            out.add((a, b))
    return out


def _dds_page_spans(n: int, k: int) -> list[tuple[int, int]]:
    """Inclusive matching-index interval (s, t) per page; t < s means empty."""
    p, q = divmod(n, k)
    spans = []
    for page in range(k):
        if page < q:
            s = page * (p + 1)
            t = s + p
        else:
            s = page * p + q
            t = s + p - 1
        spans.append((s, t))
    return spans


def dds_drawing(n: int, k: int) -> Drawing:
    """Distribute the n modular matchings into k pages of consecutive runs.

    With p = floor(n/k), q = n mod k, the first q pages take p+1 matchings
    each and the rest take p.  k > n leaves the trailing pages empty.
    """
    if n < 1 or k < 1:
        raise InputError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    page_of: dict[Edge, int] = {}
    for page, (s, t) in enumerate(_dds_page_spans(n, k)):
        for i in range(s, t + 1):
            for e in matching(i % n, n):
                page_of[e] = page
    return Drawing(n=n, k=k, page_of=page_of)


def count_crossings(dr: Drawing) -> int:
    """Crossings of the drawing: same-page edge pairs whose chords interleave."""
    total = 0
    for page in range(dr.k):
        edges = dr.page_edges(page)
        if len(edges) < 2:
            continue
        a = np.array([e[0] for e in edges])
        b = np.array([e[1] for e in edges])
        iu, ju = np.triu_indices(len(edges), k=1)
        a1, b1, a2, b2 = a[iu], b[iu], a[ju], b[ju]
        inside_lo = (a1 < a2) & (a2 < b1)
        inside_hi = (a1 < b2) & (b2 < b1)
        shared = (a1 == a2) | (a1 == b2) | (b1 == a2) | (b1 == b2)
        total += int(((inside_lo != inside_hi) & ~shared).sum())
    return total


def matching_gap_crossings(r: int, n: int) -> Fraction:
    """Crossing polynomial f(r) = rn/2 - r^2/2 - n/2 + 1/2 for matchings r apart."""
    if r < 0:
        raise InputError(f"need r >= 0, got {r}")
    r_, n_ = Fraction(r), Fraction(n)
    return r_ * n_ / 2 - r_ * r_ / 2 - n_ / 2 + Fraction(1, 2)


def matching_run_crossings(r: int, n: int) -> Fraction:
    """Degree-4 closed form for the crossings of r consecutive matchings.

    Equals sum_{l=1}^{r-1} (r-l) f(l); see tests for the check that the
    closed form is the l >= 1 sum.
    """
    if r < 0:
        raise InputError(f"need r >= 0, got {r}")
    r_, n_ = Fraction(r), Fraction(n)
    return (
        -(r_**4) / 24
        + n_ * r_**3 / 12
        - n_ * r_**2 / 4
        + 7 * r_**2 / 24
        + n_ * r_ / 6
        - r_ / 4
    )


def _check_pair_domain(lo: int, hi: int, n: int) -> None:
    if not 0 <= lo < hi <= n - 1:
        raise InputError(f"need 0 <= {lo} < {hi} <= {n - 1}")
    if 2 * (hi - lo) > n:
        raise InputError(f"span {hi - lo} exceeds n/2 = {n / 2}; formula not valid there")


def matching_pair_crossings(i: int, j: int, n: int) -> Fraction:
    """Crossings between M_i and M_j on one page, 0 <= i < j, j - i <= n/2.

    f(j-i) for odd n; for even n shifted by -1/2 (i, j both odd) or +1/2
    (both even).
    """
    _check_pair_domain(i, j, n)
    base = matching_gap_crossings(j - i, n)
    if n % 2 == 1:
        return base
    if i % 2 == 1 and j % 2 == 1:
        return base - Fraction(1, 2)
    if i % 2 == 0 and j % 2 == 0:
        return base + Fraction(1, 2)
    return base


def collection_crossings(s: int, t: int, n: int) -> Fraction:
    """Crossings among all edges of M_s u ... u M_t on one page, t - s <= n/2."""
    _check_pair_domain(s, t, n)
    base = matching_run_crossings(t - s + 1, n)
    if n % 2 == 1:
        return base
    if s % 2 == 0 and t % 2 == 0:
        return base + Fraction(t - s, 4)
    if s % 2 == 1 and t % 2 == 1:
        return base - Fraction(t - s, 4)
    return base


def dds_crossing_count(n: int, k: int) -> int:
    """Closed-form crossing count of the k-page matching construction on K_n.

    (n mod k) * F(floor(n/k)+1, n) + (k - n mod k) * F(floor(n/k), n),
    evaluated exactly; the result is asserted integral.
    """
    if n < 0 or k < 1:
        raise InputError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    p, q = divmod(n, k)
    total = q * matching_run_crossings(p + 1, n) + (k - q) * matching_run_crossings(p, n)
    if total.denominator != 1:
        raise AssertionError(f"crossing count came out non-integral: {total} (n={n}, k={k})")
    if total < 0:
        raise AssertionError(f"negative crossing count {total} (n={n}, k={k})")
    return int(total)


def _inv_cube_series(step: int, n_max: int) -> list[int]:
    """Coefficients of (1 - z^step)^-3 up to degree n_max."""
    out = [0] * (n_max + 1)
    j = 0
    while j * step <= n_max:
        out[j * step] = (j + 1) * (j + 2) // 2
        j += 1
    return out


def _poly_mul(a: list[int], b: list[int], n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > n_max:
            continue
        for j, bj in enumerate(b):
            if i + j > n_max:
                break
            out[i + j] += ai * bj
    return out


def generating_series_coeffs(k: int, n_max: int) -> list[int]:
    """Coefficients 0..n_max of the crossing-count generating function.

    z^(2k+1) * ((k-2)(1-z) + 1 - z^(k+1)) / ((1-z)^3 (1-z^k)^3),
    computed by exact integer series multiplication.
    """
    if k < 1 or n_max < 0:
        raise InputError(f"need k >= 1 and n_max >= 0, got k={k}, n_max={n_max}")
    num = [0] * (n_max + 1)
    # (k-2)(1-z) + 1 - z^(k+1), then shift by 2k+1
    for deg, coef in ((0, k - 2 + 1), (1, -(k - 2)), (k + 1, -1)):
        if 0 <= deg + 2 * k + 1 <= n_max:
            num[deg + 2 * k + 1] += coef
    series = _poly_mul(num, _inv_cube_series(1, n_max), n_max)
    series = _poly_mul(series, _inv_cube_series(k, n_max), n_max)
    return series


def three_page_count(n: int) -> int:
    """Quartic case split (by n mod 3) for the 3-page crossing count."""
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    if n % 3 == 0:
        num = (n - 6) * (n - 3) * n * (5 * n - 9)
    elif n % 3 == 1:
        num = (n - 4) * (n - 1) * (5 * n * n - 29 * n + 30)
    else:
        num = (n - 2) * (n - 3) * (n - 5) * (5 * n - 4)
    q, r = divmod(num, 648)
    assert r == 0, f"three-page closed form not divisible by 648 at n={n}"
    return q


def divisible_case_count(n: int, k: int) -> int:
    """Quartic polynomial for the crossing count when k divides n."""
    if k < 1 or n % k != 0:
        raise InputError(f"need k | n, got n={n}, k={k}")
    n_, k_ = Fraction(n), Fraction(k)
    val = (
        Fraction(1, 12 * k * k) * (1 - Fraction(1, 2 * k)) * n_**4
        - n_**3 / (4 * k_)
        + (Fraction(7, 24 * k) + Fraction(1, 6)) * n_**2
        - n_ / 4
    )
    assert val.denominator == 1
    return int(val)


def odd_even_identity(k: int, r: int) -> bool:
    """Check k*r*Z(kr-1) == (kr-4)*Z(kr) in exact arithmetic."""
    if k < 1 or r < 1:
        raise InputError(f"need k >= 1 and r >= 1, got k={k}, r={r}")
    return k * r * dds_crossing_count(k * r - 1, k) == (k * r - 4) * dds_crossing_count(k * r, k)


def two_page_count(n: int) -> int:
    """Floor-product closed form (1/4)*prod floor((n-i)/2), i = 0..3."""
    if n < 0:
        raise InputError(f"need n >= 0, got {n}")
    prod = (n // 2) * ((n - 1) // 2) * ((n - 2) // 2) * ((n - 3) // 2)
    q, r = divmod(prod, 4)
    assert r == 0
    return q


@dataclass(frozen=True)
class PriorLowerBound:
    """A pre-existing lower bound on nu_k(K_n) with a caveat note, if any."""

    value: Fraction
    note: str | None = None


def prior_lower_bound(k: int, n: int, quartic_variant: bool = False) -> PriorLowerBound:
    """Best previously published lower bound on nu_k(K_n), k >= 3.

    k = 4 uses the biplanar constant 3/119 on C(n,4) (an O(n^3) term is
    dropped and flagged); `quartic_variant` switches to the exact form
    n^4/952 instead.  Even k > 4 and odd k use 2/(3k-2)^2 and 2/(3k+1)^2
    times C(n,4) inside their stated n-ranges.  Out of range returns 0
    with a "range" note.
    """
    if k < 3:
        raise InputError(f"prior lower bound formula needs k >= 3, got {k}")
    c4 = Fraction(comb(n, 4))
    if k == 4:
        if quartic_variant:
            return PriorLowerBound(Fraction(n**4, 952), note="k=4: n^4/952 form")
        return PriorLowerBound(Fraction(3, 119) * c4, note="k=4: O(n^3) correction dropped")
    if k % 2 == 0:
        if n >= k * k / 2 + 3 * k - 1:
            return PriorLowerBound(Fraction(2, (3 * k - 2) ** 2) * c4)
        return PriorLowerBound(Fraction(0), note="range")
    if n >= k * k / 2 + 2 * k - 3.5:
        return PriorLowerBound(Fraction(2, (3 * k + 1) ** 2) * c4)
    return PriorLowerBound(Fraction(0), note="range")


def prior_lower_ratio(k: int) -> Fraction:
    """Asymptotic coefficient of the prior lower bound relative to C(n,4)."""
    if k < 3:
        raise InputError(f"need k >= 3, got {k}")
    if k == 4:
        return Fraction(3, 119)
    if k % 2 == 0:
        return Fraction(2, (3 * k - 2) ** 2)
    return Fraction(2, (3 * k + 1) ** 2)


def prior_upper_bound(k: int, n: int) -> Fraction:
    """General construction upper bound (2/k^2)(1 - 1/(2k)) C(n,4) + n^3/(2k)."""
    if k < 1:
        raise InputError(f"need k >= 1, got {k}")
    return Fraction(2, k * k) * (1 - Fraction(1, 2 * k)) * comb(n, 4) + Fraction(n**3, 2 * k)


def dds_limit_ratio(k: int) -> Fraction:
    """Leading coefficient (2/k^2)(1 - 1/(2k)) of the construction count."""
    return Fraction(2, k * k) * (1 - Fraction(1, 2 * k))


def write_drawing(dr: Drawing, out: TextIO) -> None:
    """Serialize: header "drawing n=<n> k=<k>", then "page <l>: a-b a-b ..."."""
    out.write(f"drawing n={dr.n} k={dr.k}\n")
    for page in range(dr.k):
        edges = " ".join(f"{a}-{b}" for a, b in dr.page_edges(page))
        out.write(f"page {page}:{' ' if edges else ''}{edges}\n")


def parse_drawing(text: str) -> Drawing:
    """Inverse of write_drawing; raises InputError on malformed input."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty drawing text")
    m = re.fullmatch(r"drawing n=(\d+) k=(\d+)", lines[0].strip())
    if not m:
        raise InputError(f"bad drawing header: {lines[0]!r}")
    n, k = int(m.group(1)), int(m.group(2))
    page_of: dict[Edge, int] = {}
    for ln in lines[1:]:
        pm = re.fullmatch(r"page (\d+):\s*(.*)", ln.strip())
        if not pm:
            raise InputError(f"bad page line: {ln!r}")
        page = int(pm.group(1))
        for tok in pm.group(2).split():
            a, b = tok.split("-")
            e = (int(a), int(b))
            if e in page_of:
                raise InputError(f"edge {e} listed twice")
            page_of[e] = page
    return Drawing(n=n, k=k, page_of=page_of)
