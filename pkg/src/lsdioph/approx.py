"""Badly-approximable machinery: truncated badness constants by exhaustive
search, Dirichlet witnesses, the hat-matrix reformulation, and continued
fractions for a single linear form.

A system of m linear forms in n variables is a matrix A; the quantity of
interest for a nonzero polynomial vector q is the score
``height(q)^m * dist(qA)^n`` where dist is the distance to the polynomial
lattice.  A is badly approximable when the scores are bounded away from
zero; here we compute the exact minimum over a finite height window
instead (a truncated certificate, never a membership proof).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import PrecisionExhausted, SearchBudgetExceeded, WitnessNotFound
from .field import FieldSpec, Magnitude, Poly
from .series import (
    LaurentSeries,
    RationalFn,
    SeriesMatrix,
    lift_poly,
    mat_vec_mul,
    scalar_one,
    scalar_zero,
    vec_height,
)

DEFAULT_SEARCH_BUDGET = 2_000_000


@dataclass(frozen=True)
class LinearFormSystem:
    """An m x n matrix of series (or exact rational) entries."""

    matrix: SeriesMatrix

    @property
    def m(self) -> int:
        return self.matrix.rows

    @property
    def n(self) -> int:
        return self.matrix.cols

    @property
    def spec(self) -> FieldSpec:
        return self.matrix.spec

    @classmethod
    def single(cls, x) -> "LinearFormSystem":
        return cls(SeriesMatrix(x.spec, [[x]]))


@dataclass(frozen=True)
class HatMatrices:
    """The two (m+n) x (m+n) block matrices [[A, I],[I, 0]] built from a
    system and from its transpose; their columns turn lattice distances into
    plain norms of dot products."""

    hat: SeriesMatrix
    hat_star: SeriesMatrix


def build_hat(sys: LinearFormSystem) -> HatMatrices:
    A = sys.matrix
    m, n = sys.m, sys.n
    like = A.entry(0, 0)
    one = scalar_one(A.spec, like)
    zero = scalar_zero(A.spec, like)

    def ident(i, j):
        return one if i == j else zero

    hat_rows = []
    for i in range(m):
        hat_rows.append([A.entry(i, j) for j in range(n)] + [ident(i, j) for j in range(m)])
    for i in range(n):
        hat_rows.append([ident(i, j) for j in range(n)] + [zero] * m)

    star_rows = []
    for i in range(n):
        star_rows.append([A.entry(j, i) for j in range(m)] + [ident(i, j) for j in range(n)])
    for i in range(m):
        star_rows.append([ident(i, j) for j in range(m)] + [zero] * n)

    return HatMatrices(
        SeriesMatrix(A.spec, hat_rows), SeriesMatrix(A.spec, star_rows)
    )


@dataclass(frozen=True)
class ApproxWitness:
    q: tuple
    height: Magnitude
    dist: Magnitude
    score: Magnitude

    def to_json(self):
        return {
            "q": [str(p) for p in self.q],
            "height_exp": _exp_or_none(self.height),
            "dist_exp": _exp_or_none(self.dist),
            "score_exp": _exp_or_none(self.score),
        }


def _exp_or_none(mag: Magnitude):
    if mag.is_zero:
        return None
    e = mag.exponent()
    return int(e) if e.denominator == 1 else str(e)


# ---------------------------------------------------------------------------
# Enumeration of polynomial vectors
# ---------------------------------------------------------------------------


def iter_polys(spec: FieldSpec, max_deg: int):
    """All polynomials of degree <= max_deg, zero first, then by degree."""
    yield Poly.zero(spec)
    for d in range(max_deg + 1):
        for lead in range(1, spec.k):
            for lower in itertools.product(spec.elements(), repeat=d):
                yield Poly(spec, list(lower) + [lead])


def iter_height_class(spec: FieldSpec, m: int, h: int):
    """Vectors in F_q[X]^m whose height is exactly k^h."""
    pool = list(iter_polys(spec, h))
    for q in itertools.product(pool, repeat=m):
        if max(p.degree for p in q) == h:
            yield q


def badness_constant(
    sys: LinearFormSystem,
    height_bound: Magnitude,
    budget: int = DEFAULT_SEARCH_BUDGET,
):
    """Exact min of height(q)^m * dist(qA)^n over 0 < height(q) <= bound.

    Enumerates by increasing height; inside a class, coordinates of qA whose
    fractional norm already meets the running minimum's requirement are
    dropped early (the height factor grows monotonically, so the required
    distance only shrinks).
    """
    if height_bound.is_zero:
        raise ValueError("height bound must be positive")
    m, n = sys.m, sys.n
    A = sys.matrix
    k = sys.spec.k
    h_max = _floor_int_exponent(height_bound)
    best = None
    best_witness = None
    seen = 0
    for h in range(h_max + 1):
        class_height = Magnitude.power(k, h)
        need_below = None
        if best is not None:
            # dist must satisfy k^{hm} * dist^n < best
            need_below = (best / class_height**m).root(n)
        for q in iter_height_class(sys.spec, m, h):
            seen += 1
            if seen > budget:
                raise SearchBudgetExceeded(
                    f"badness search enumerated more than {budget} vectors"
                )
            dist = _dist_with_cutoff(q, A, need_below)
            if dist is None:
                continue
            score = class_height**m * dist**n
            if best is None or score < best:
                best = score
                best_witness = ApproxWitness(q, class_height, dist, score)
                if best.is_zero:
                    return best, best_witness
                need_below = (best / class_height**m).root(n)
    return best, best_witness


def _dist_with_cutoff(q, A: SeriesMatrix, cutoff):
    """dist(qA), or None as soon as some coordinate's fractional norm shows
    the score cannot beat the running minimum."""
    dist = Magnitude.zero(A.spec.k)
    for j in range(A.cols):
        coord = None
        for qi, a in zip(q, A.col(j)):
            if qi.is_zero:
                continue
            term = a * qi
            coord = term if coord is None else coord + term
        fn = Magnitude.zero(A.spec.k) if coord is None else coord.frac_norm()
        if cutoff is not None and fn >= cutoff:
            return None
        if fn > dist:
            dist = fn
    return dist


def _floor_int_exponent(mag: Magnitude) -> int:
    e = mag.exponent()
    return int(e) if e.denominator == 1 else int(e.__floor__())


# ---------------------------------------------------------------------------
# Dirichlet witnesses
# ---------------------------------------------------------------------------


def default_dirichlet_constant(m: int, n: int) -> int:
    """Pigeonhole exponent margin; empirical for general (m, n), verified by
    the calibration oracle (ceil((t+1)m/n) - ceil(tm/n) minimised over t)."""
    return 1 if m >= n else 0


def dirichlet_witness(sys: LinearFormSystem, t: int, c0: int | None = None) -> ApproxWitness:
    """A nonzero q with height <= k^t and dist(qA) <= k^(-ceil(tm/n) - c0).

    Existence is guaranteed for every A; failure to find one signals a
    miscalibrated c0 and raises WitnessNotFound.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    m, n = sys.m, sys.n
    if c0 is None:
        c0 = default_dirichlet_constant(m, n)
    k = sys.spec.k
    required = Magnitude.power(k, -((t * m + n - 1) // n) - c0)
    if m == 1 and n == 1:
        witness = _dirichlet_cf(sys, t)
    else:
        witness = _dirichlet_pigeonhole(sys, t)
    if witness.dist > required:
        raise WitnessNotFound(
            f"best distance {witness.dist} exceeds required {required}; "
            "c0 calibration bug"
        )
    return witness


def _dirichlet_cf(sys: LinearFormSystem, t: int) -> ApproxWitness:
    """Largest convergent denominator of height <= k^t is the witness."""
    x = sys.matrix.entry(0, 0)
    spec = sys.spec
    if isinstance(x, LaurentSeries) and x.is_exact and not x.is_zero:
        low = min(x.coeffs)
        if low < 0:
            x = RationalFn(x.shift(-low).polynomial_part(), Poly.monomial(spec, 1, -low))
        else:
            x = RationalFn.from_poly(x.polynomial_part())
    q_prev, q_cur = Poly.zero(spec), Poly.one(spec)  # q_{-1}, q_0
    rem = x
    consumed_a0 = False
    while True:
        try:
            a = rem.polynomial_part()
        except PrecisionExhausted:
            break
        if consumed_a0:
            q_next = a * q_cur + q_prev
            if q_next.degree > t:
                break
            q_prev, q_cur = q_cur, q_next
        consumed_a0 = True
        frac = rem - lift_poly(a, rem)
        if frac.is_zero:
            break
        rem = scalar_one(spec, frac) / frac
    q = (q_cur,)
    dist = _exact_dist(q, sys.matrix)
    h = vec_height(q)
    return ApproxWitness(q, h, dist, h * dist)


def _exact_dist(q, A: SeriesMatrix) -> Magnitude:
    vec = mat_vec_mul(q, A)
    out = Magnitude.zero(A.spec.k)
    for v in vec:
        out = max(out, v.frac_norm())
    return out


def _dirichlet_pigeonhole(
    sys: LinearFormSystem, t: int, budget: int = DEFAULT_SEARCH_BUDGET
) -> ApproxWitness:
    m, n = sys.m, sys.n
    spec = sys.spec
    u = -(-(t + 1) * m // n) - 1  # ceil((t+1)m/n) - 1
    buckets = {}
    best = None
    pool = list(iter_polys(spec, t))
    count = 0
    for q in itertools.product(pool, repeat=m):
        count += 1
        if count > budget:
            raise SearchBudgetExceeded("dirichlet enumeration exceeded budget")
        key = _frac_window_key(q, sys.matrix, u)
        if key in buckets:
            other = buckets[key]
            diff = tuple(a - b for a, b in zip(q, other))
            if any(not p.is_zero for p in diff):
                dist = _exact_dist(diff, sys.matrix)
                h = vec_height(diff)
                wit = ApproxWitness(diff, h, dist, h**m * dist**n)
                if best is None or wit.dist < best.dist:
                    best = wit
        else:
            buckets[key] = q
        if any(not p.is_zero for p in q):
            dist = _exact_dist(q, sys.matrix)
            hq = vec_height(q)
            wit = ApproxWitness(q, hq, dist, hq**m * dist**n)
            if best is None or wit.dist < best.dist:
                best = wit
    if best is None:
        raise WitnessNotFound("no nonzero vector enumerated")
    return best


def _frac_window_key(q, A: SeriesMatrix, u: int):
    out = []
    for j in range(A.cols):
        coord = None
        for qi, a in zip(q, A.col(j)):
            if qi.is_zero:
                continue
            term = a * qi
            coord = term if coord is None else coord + term
        if coord is None:
            out.append((0,) * u)
            continue
        out.append(_frac_digits(coord, u))
    return tuple(out)


def _frac_digits(x, u: int):
    if isinstance(x, RationalFn):
        r = x.num % x.den
        series = RationalFn(r, x.den).to_series(precision=u + 2) if not r.is_zero else None
        coeffs = {} if series is None else series.coeffs
    else:
        coeffs = x.coeffs
        if x.known_below is not None and x.known_below > -u:
            raise PrecisionExhausted(f"need coefficients down to X^-{u}")
    return tuple(coeffs.get(-i, 0) for i in range(1, u + 1))


# ---------------------------------------------------------------------------
# Continued fractions (single linear form)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients [a_0; a_1, a_2, ...]; deg a_i >= 1 for i >= 1."""

    quotients: tuple
    exact: bool

    def __post_init__(self):
        for a in self.quotients[1:]:
            if a.degree < 1:
                raise ValueError("partial quotients after a_0 must have degree >= 1")

    @property
    def max_partial_degree(self) -> int:
        if len(self.quotients) < 2:
            return 0
        return max(a.degree for a in self.quotients[1:])


def cf_expand(x, max_terms: int) -> ContinuedFraction:
    """Continued fraction of a series or rational function.

    Exact inputs (finite support or rational) run the Euclidean algorithm and
    detect termination; truncated series consume roughly 2*deg(a_i)
    coefficients of precision per step and raise PrecisionExhausted (carrying
    the number of quotients produced) when the next one is undeterminable.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    if isinstance(x, RationalFn):
        return _cf_rational(x.num, x.den, max_terms)
    if x.is_exact:
        low = 0 if x.is_zero else min(x.coeffs)
        if low >= 0:
            return ContinuedFraction((x.polynomial_part(),), True)
        num = x.shift(-low).polynomial_part()
        den = Poly.monomial(x.spec, 1, -low)
        return _cf_rational(num, den, max_terms)
    return _cf_series(x, max_terms)


def cf_expand_rational(num: Poly, den: Poly, max_terms: int = 10**9) -> ContinuedFraction:
    return _cf_rational(num, den, max_terms)


def _cf_rational(num: Poly, den: Poly, max_terms: int) -> ContinuedFraction:
    quotients = []
    a, b = num, den
    while len(quotients) < max_terms:
        q, r = divmod(a, b)
        quotients.append(q)
        if r.is_zero:
            return ContinuedFraction(tuple(quotients), True)
        a, b = b, r
    return ContinuedFraction(tuple(quotients), False)


def _cf_series(x: LaurentSeries, max_terms: int) -> ContinuedFraction:
    quotients = []
    rem = x
    while len(quotients) < max_terms:
        try:
            a = rem.polynomial_part()
            quotients.append(a)
            frac = rem - LaurentSeries.from_poly(a)
        except PrecisionExhausted as exc:
            raise PrecisionExhausted(
                f"precision exhausted after {len(quotients)} quotients",
                count=len(quotients),
            ) from exc
        if frac.is_zero:
            return ContinuedFraction(tuple(quotients), True)
        rem = LaurentSeries.one(x.spec).divide(frac, precision=2 * frac._rel_precision())
    return ContinuedFraction(tuple(quotients), False)


def cf_convergents(cf: ContinuedFraction):
    """Convergents (p_j, q_j) by the standard recurrence; each pair coprime,
    deg q_j = sum of the partial-quotient degrees."""
    if not cf.quotients:
        raise ValueError("empty continued fraction")
    spec = cf.quotients[0].spec
    out = []
    p_prev, p_cur = Poly.one(spec), cf.quotients[0]
    q_prev, q_cur = Poly.zero(spec), Poly.one(spec)
    out.append((p_cur, q_cur))
    for a in cf.quotients[1:]:
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append((p_cur, q_cur))
    return out


def is_bad_cf(x, depth: int):
    """Truncated badness verdict from the partial quotients.

    Returns (verdict, max_deg) where max_deg is the largest partial-quotient
    degree among a_1..a_depth.  The verdict is False when the expansion
    terminates strictly before ``depth`` quotients (rational x: the badness
    constant hits zero); otherwise the value is badly approximable as far as
    this depth can tell, with truncated constant k^(-max_deg).
    """
    cf = cf_expand(x, depth + 1)
    produced = len(cf.quotients) - 1  # partial quotients beyond a_0
    if cf.exact and produced < depth:
        return False, cf.max_partial_degree
    return True, cf.max_partial_degree
