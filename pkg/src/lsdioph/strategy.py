"""White's play in the ball game: marker schedules, the two families of
height-window inequalities the strategy keeps unsolvable, danger-set
enumeration over canonicalized balls, minor vectors with their discrete
gradients, the literal gradient-anchored move rule, a practical avoidance
strategy, and truncated badness certification of the game's limit point.

Level structure, for a scale constant R = k^w > 1 and tau = m/(m+n):

* k-type level i: no lattice vector may combine a first-block height in
  (0, delta * R^(n(tau+i))) with all hat-column values below
  delta * R^(-m(tau+i)-n), where delta = R^(-m(m+n)^2).
* h-type level j: the transposed analogue, with delta* = R^(-n(m+n)^2)
  and the hat matrix of the transpose.

Keeping every k-type level clean forces a positive lower bound on
height(q)^m * dist(qA)^n for every q up to the certification cap, which is
exactly what :func:`certify_bad` checks on the limit point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .approx import LinearFormSystem, build_hat, iter_height_class, iter_polys
from .errors import CounterexampleFound, NoLegalCenter, SearchBudgetExceeded
from .field import FieldSpec, Magnitude, Poly, floor_log
from .game import FormalBall, GameTranscript, canonicalize, legal_center_shift_exponent
from .linalg import det_entries, poly_rank, series_vec_rank_at_zero
from .series import LaurentSeries, SeriesMatrix, vec_dot

DANGER_BUDGET = 200_000


@dataclass(frozen=True)
class StrategyConfig:
    """Game-scale constants.  delta, delta*, and tau are derived, never
    stored; K4..K7 are empirical slots fixed by ``calibrate_constants``
    (the theory only asserts such constants exist)."""

    spec: FieldSpec
    m: int
    n: int
    R_exp: int = 2
    sigma_exp: int = 0
    rho1: Fraction = Fraction(1)
    height_cap_exp: int = 4
    mode: str = "avoidance"
    # worst cases of `lsdioph calibrate constants` sweeps over
    # (m, n) in {(1,1),(2,1),(1,2)} x k in {2,3}, seed 0
    K4: Fraction = Fraction(1)
    K5: Fraction = Fraction(1, 8)
    K6: Fraction = Fraction(1, 4096)
    K7: Fraction = Fraction(4)

    def __post_init__(self):
        if self.R_exp < 1:
            raise ValueError("R must be a k-power > 1")
        if self.mode not in ("literal", "avoidance"):
            raise ValueError("mode must be 'literal' or 'avoidance'")

    @property
    def d(self) -> int:
        return self.m + self.n

    @property
    def tau(self) -> Fraction:
        return Fraction(self.m, self.d)

    @property
    def delta_exp(self) -> int:
        return -self.R_exp * self.m * self.d**2

    @property
    def delta_star_exp(self) -> int:
        return -self.R_exp * self.n * self.d**2

    def marker_exponent(self, kind: str, i: int) -> int:
        """Radius threshold exponent for B_{k_i} / B_{h_i}; the k-type
        exponent -R_exp*(m+n)*(tau+i) is an integer because (m+n)*tau = m."""
        if kind == "k":
            return -self.R_exp * (self.m + self.d * i)
        return -self.R_exp * self.d * (1 + i)

    def window_exponent(self, kind: str, i: int) -> Fraction:
        if kind == "k":
            return self.delta_exp + self.R_exp * self.n * (self.tau + i)
        return Fraction(self.delta_star_exp + self.R_exp * self.m * (1 + i))

    def threshold_exponent(self, kind: str, i: int) -> Fraction:
        if kind == "k":
            return self.delta_exp - self.R_exp * (self.m * (self.tau + i) + self.n)
        return Fraction(self.delta_star_exp - self.R_exp * (self.n * (1 + i) + self.m))

    def first_block(self, kind: str) -> int:
        """Coordinates constrained by the height window (they multiply the
        matrix block; the remaining ones play the lattice role)."""
        return self.m if kind == "k" else self.n

    @property
    def certify_K_exponent(self) -> int:
        """Strictly inside the guaranteed interval: one k below
        delta^(m+n) * R^(-n^2 - mn)."""
        return self.d * self.delta_exp - self.R_exp * (self.n**2 + self.m * self.n) - 1


@dataclass(frozen=True)
class MarkerSchedule:
    """Transcript indices of the first Black balls below each level's radius
    threshold, per kind, consecutive levels from 0."""

    k_indices: tuple
    h_indices: tuple


def schedule_markers(t: GameTranscript, cfg: StrategyConfig) -> MarkerSchedule:
    k = cfg.spec.k
    black = [(i, b) for i, b in enumerate(t.balls) if i % 2 == 0]
    out = {}
    for kind in ("k", "h"):
        found = []
        level = 0
        while True:
            thr = Magnitude.power(k, cfg.marker_exponent(kind, level)).as_fraction()
            idx = next((i for i, b in black if b.radius < thr), None)
            if idx is None:
                break
            found.append(idx)
            level += 1
        out[kind] = tuple(found)
    return MarkerSchedule(out["k"], out["h"])


def _block_values(center: SeriesMatrix, kind: str, q_first):
    """Matrix-block part of the hat-column dot products: one series per
    tail column."""
    if kind == "k":
        cols = center.cols
        out = []
        for l in range(cols):
            acc = None
            for i, qi in enumerate(q_first):
                if qi.is_zero:
                    continue
                term = center.entry(i, l) * qi
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else LaurentSeries.zero(center.spec))
        return out
    rows = center.rows
    out = []
    for l in range(rows):
        acc = None
        for i, qi in enumerate(q_first):
            if qi.is_zero:
                continue
            term = center.entry(l, i) * qi
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else LaurentSeries.zero(center.spec))
    return out


def check_inequalities(
    A: SeriesMatrix, q, i: int, kind: str, cfg: StrategyConfig
) -> bool:
    """Do both level-i inequalities of the given kind hold at A for the full
    (m+n)-vector q?  All comparisons exact on magnitudes."""
    spec = cfg.spec
    first = cfg.first_block(kind)
    q = tuple(q)
    if len(q) != cfg.d:
        raise ValueError("q must have m + n coordinates")
    head = q[:first]
    if all(p.is_zero for p in head):
        return False
    height = max((p.degree for p in head if not p.is_zero), default=-1)
    if not Fraction(height) < cfg.window_exponent(kind, i):
        return False
    hats = build_hat(LinearFormSystem(A))
    hat = hats.hat if kind == "k" else hats.hat_star
    thr = Magnitude(spec.k, cfg.threshold_exponent(kind, i))
    for l in range(cfg.d - first):
        acc = None
        for qi, a in zip(q, hat.col(l)):
            if qi.is_zero:
                continue
            term = a * qi
            acc = term if acc is None else acc + term
        val = Magnitude.zero(spec.k) if acc is None else acc.norm()
        if not val < thr:
            return False
    return True


@dataclass(frozen=True)
class DangerReport:
    level: int
    kind: str
    solutions: tuple
    rank: int

    @property
    def empty(self) -> bool:
        return not self.solutions


def danger_set(
    ball: FormalBall,
    i: int,
    kind: str,
    cfg: StrategyConfig,
    height_cap: Magnitude | None = None,
    budget: int = DANGER_BUDGET,
    tail_variant_budget: int = 64,
) -> DangerReport:
    """All lattice vectors in the level-i height window for which some matrix
    in the (canonicalized) ball satisfies the value inequality.

    Decidable exactly: the ball is ``center + perturbation`` with
    perturbation norm <= k^e, and a perturbation can cancel a block value
    precisely when the value's norm is at most height(q) * k^e.
    """
    spec = cfg.spec
    k = spec.k
    canonical = canonicalize(ball)
    e = canonical.effective_exponent()
    C = canonical.center
    first = cfg.first_block(kind)
    window = cfg.window_exponent(kind, i)
    thr = Magnitude(k, cfg.threshold_exponent(kind, i))
    max_deg = _ceil_minus_one(window)
    if height_cap is not None:
        max_deg = min(max_deg, int(height_cap.exponent().__floor__()))
    solutions = []
    count = 0
    for h in range(0, max_deg + 1):
        pert = Magnitude.power(k, h + e)
        for q_first in iter_height_class(spec, first, h):
            count += 1
            if count > budget:
                raise SearchBudgetExceeded("danger enumeration exceeded budget")
            values = _block_values(C, kind, q_first)
            fractional = [v.frac_norm() for v in values]
            reachable = [
                Magnitude.zero(k) if f <= pert else f for f in fractional
            ]
            if not all(r < thr for r in reachable):
                continue
            tails = [(-v.polynomial_part()) for v in values]
            solutions.append(tuple(q_first) + tuple(tails))
            if pert >= Magnitude.power(k, 0):
                solutions.extend(
                    _tail_variants(
                        q_first, values, tails, pert, thr, spec, tail_variant_budget
                    )
                )
    rank = poly_rank(solutions, spec) if solutions else 0
    return DangerReport(i, kind, tuple(solutions), rank)


def _tail_variants(q_first, values, tails, pert, thr, spec, budget):
    """When the perturbation allowance reaches height 1, nearby lattice tails
    also solve the inequality; enumerate them within a budget."""
    out = []
    deg_cap = int(pert.exponent().__floor__())
    shifts = [s for s in iter_polys(spec, deg_cap) if not s.is_zero]
    combos = itertools.product(shifts + [Poly.zero(spec)], repeat=len(values))
    for combo in combos:
        if all(s.is_zero for s in combo):
            continue
        ok = True
        for s, v in zip(combo, values):
            if s.is_zero:
                continue
            # residual norm after the shift is max(||s||, frac) >= ||s||
            residual = max(Magnitude.power(spec.k, s.degree), v.frac_norm())
            reach = Magnitude.zero(spec.k) if residual <= pert else residual
            if not reach < thr:
                ok = False
                break
        if ok:
            out.append(tuple(q_first) + tuple(t + s for t, s in zip(tails, combo)))
        if len(out) >= budget:
            break
    return out


def _ceil_minus_one(x: Fraction) -> int:
    """Largest integer strictly below x."""
    from math import ceil

    c = ceil(x)
    return c - 1


# ---------------------------------------------------------------------------
# Orthonormal bases, minors, gradients
# ---------------------------------------------------------------------------


def orthonormalize(vectors, spec: FieldSpec, dim: int, count: int):
    """Reduce a family of vectors to an ultrametric-orthonormal basis of its
    span, padding with coordinate vectors up to ``count``.

    A family is orthonormal iff every vector has sup norm 1 and the residue
    vectors (coefficients at exponent 0) are independent over F_q; this is
    verified at the end, never assumed.
    """
    out = []

    def residue_ok(cands):
        return series_vec_rank_at_zero(cands, spec) == len(cands)

    for vec in vectors:
        v = list(_as_series_vec(vec, spec, dim))
        while True:
            norms = [x.norm() for x in v]
            top = max(norms)
            if top.is_zero:
                break
            shift = -int(top.exponent())
            v = [x.shift(shift) for x in v]
            if residue_ok(out + [tuple(v)]):
                out.append(tuple(v))
                break
            combo = _residue_combination(out, v, spec)
            if combo is None:
                break
            v = [x - c for x, c in zip(v, combo)]
            if all(x.is_zero for x in v):
                break
        if len(out) == count:
            break
    basis_units = _unit_vectors(spec, dim)
    for u in basis_units:
        if len(out) == count:
            break
        if residue_ok(out + [u]):
            out.append(u)
    if len(out) != count or not residue_ok(out):
        raise ValueError("could not build an orthonormal basis")
    return tuple(out)


def _as_series_vec(vec, spec, dim):
    out = []
    for x in vec:
        if isinstance(x, Poly):
            out.append(LaurentSeries.from_poly(x))
        else:
            out.append(x)
    if len(out) != dim:
        raise ValueError("vector dimension mismatch")
    return tuple(out)


def _unit_vectors(spec, dim):
    out = []
    for i in range(dim):
        vec = [LaurentSeries.zero(spec) for _ in range(dim)]
        vec[i] = LaurentSeries.one(spec)
        out.append(tuple(vec))
    return out


def _residue_combination(basis, v, spec):
    """Solve residue(v) = sum c_i residue(basis_i) over F_q; return the
    combination vectors c_i * basis_i summed coordinatewise, or None."""
    from .linalg import fq_nullspace

    if not basis:
        return None
    dim = len(v)
    ncols = len(basis) + 1
    rows = []
    for coord in range(dim):
        rows.append(
            [b[coord].coeffs.get(0, 0) for b in basis] + [v[coord].coeffs.get(0, 0)]
        )
    for sol in fq_nullspace(rows, ncols, spec):
        if sol[-1] != 0:
            inv = spec.inv(spec.neg(sol[-1]))
            coeffs = [spec.mul(inv, c) for c in sol[:-1]]
            combo = []
            for coord in range(dim):
                acc = LaurentSeries.zero(spec)
                for c, b in zip(coeffs, basis):
                    acc = acc + b[coord].scale(c)
                combo.append(acc)
            return combo
    return None


def is_orthonormal(basis, spec: FieldSpec) -> bool:
    for vec in basis:
        norms = [x.norm() for x in vec]
        if max(norms) != Magnitude.power(spec.k, 0):
            return False
    return series_vec_rank_at_zero(list(basis), spec) == len(basis)


@dataclass(frozen=True)
class MinorVector:
    """All v x v determinants of basis-row against hat-column dot products,
    in lexicographic (row subset, column subset) order."""

    v: int
    entries: tuple

    def height(self) -> Magnitude:
        out = None
        for x in self.entries:
            n = x.norm()
            out = n if out is None else max(out, n)
        return out


def _gram(A: SeriesMatrix, basis):
    hat_star = build_hat(LinearFormSystem(A)).hat_star
    m = A.rows
    return [[vec_dot(y, hat_star.col(l)) for l in range(m)] for y in basis]


def minors(A: SeriesMatrix, basis, v: int) -> MinorVector:
    spec = A.spec
    if v <= 0:
        return MinorVector(v, (LaurentSeries.one(spec),))
    m = A.rows
    if v > len(basis) or v > m:
        raise ValueError("minor level exceeds basis or matrix size")
    G = _gram(A, basis)
    entries = []
    for rows in itertools.combinations(range(len(basis)), v):
        for cols in itertools.combinations(range(m), v):
            sub = [[G[r][c] for c in cols] for r in rows]
            entries.append(det_entries(sub, spec))
    return MinorVector(v, tuple(entries))


def principal_minor(A: SeriesMatrix, basis, v: int) -> LaurentSeries:
    """Determinant over the first v basis rows and first v hat columns."""
    spec = A.spec
    if v <= 0:
        return LaurentSeries.one(spec)
    G = _gram(A, basis)
    sub = [[G[r][c] for c in range(v)] for r in range(v)]
    return det_entries(sub, spec)


def _unit_matrix_shift(A: SeriesMatrix, i: int, j: int) -> SeriesMatrix:
    rows = [list(r) for r in A.entries]
    rows[i][j] = rows[i][j] + LaurentSeries.one(A.spec)
    return SeriesMatrix(A.spec, rows)


def discrete_gradient(A: SeriesMatrix, basis, v: int):
    """Unit-perturbation differences of the principal minor, one coordinate
    per matrix entry (row-major); each is a linear combination of the
    next-lower minor vector's coordinates."""
    base = principal_minor(A, basis, v)
    out = []
    for i in range(A.rows):
        for j in range(A.cols):
            shifted = principal_minor(_unit_matrix_shift(A, i, j), basis, v)
            out.append(shifted - base)
    return tuple(out)


def phi(z, A: SeriesMatrix, basis, v: int) -> Magnitude:
    """Norm of the last-column cofactor pairing: expanding the v x v
    determinant difference along its last column leaves
    ||(sum_h (-1)^(h+1) d_h y_h) . z||, homogeneous of degree 1 in z."""
    spec = A.spec
    if v < 1:
        raise ValueError("phi needs v >= 1")
    G = _gram(A, basis)
    terms = None
    for h in range(v):
        rows = [r for r in range(v) if r != h]
        cols = list(range(v - 1))
        if rows and cols:
            sub = [[G[r][c] for c in cols] for r in rows]
            d_h = det_entries(sub, spec)
        else:
            d_h = LaurentSeries.one(spec)
        if h % 2 == 1:
            d_h = -d_h
        contrib = tuple(d_h * y for y in basis[h])
        terms = contrib if terms is None else tuple(a + b for a, b in zip(terms, contrib))
    return vec_dot(terms, tuple(z)).norm()


def minor_sup(ball: FormalBall, basis, v: int) -> Magnitude:
    """Sup of the minor-vector height over a ball, by enumerating the grid
    of representatives at the ball's own resolution."""
    canonical = canonicalize(ball)
    e = canonical.effective_exponent()
    C = canonical.center
    spec = C.spec
    cells = C.rows * C.cols
    best = minors(C, basis, v).height()
    if spec.k**cells <= 256:
        patterns = itertools.product(spec.elements(), repeat=cells)
    else:
        patterns = _single_entry_patterns(spec, cells)
    for pat in patterns:
        if all(c == 0 for c in pat):
            continue
        rows = []
        idx = 0
        for i in range(C.rows):
            row = []
            for j in range(C.cols):
                x = C.entry(i, j)
                if pat[idx]:
                    x = x + LaurentSeries.monomial(spec, pat[idx], e)
                row.append(x)
                idx += 1
            rows.append(row)
        best = max(best, minors(SeriesMatrix(spec, rows), basis, v).height())
    return best


def _single_entry_patterns(spec, cells):
    for idx in range(cells):
        for c in range(1, spec.k):
            pat = [0] * cells
            pat[idx] = c
            yield tuple(pat)


# ---------------------------------------------------------------------------
# White strategies
# ---------------------------------------------------------------------------


class AvoidanceWhite:
    """Dodge every danger vector visible under the height cap: among the
    legal sub-ball centers on the k-grid, pick the one maximizing the worst
    violation margin of the level inequalities.  Empty danger set means a
    concentric shrink."""

    name = "white-avoid"

    def __init__(self, cfg: StrategyConfig, lookahead: int = 2):
        self.cfg = cfg
        self.lookahead = lookahead
        self._values = {}  # (kind, q-key) -> list of block-value series
        self._qvecs = {}
        self._safe_from = {}  # (kind, q-key) -> level pinned safe
        self._last_center = None
        self.dodges = 0

    def active_dangers(self, t: GameTranscript):
        """Danger vectors visible from the current ball (advances the
        incremental value cache)."""
        prev = t.last()
        canonical = canonicalize(prev)
        self._advance_cache(canonical.center)
        e_sub = floor_log(t.params.alpha * prev.radius, self.cfg.spec.k)
        return canonical, e_sub, self._collect_dangers(t, canonical, e_sub)

    def propose(self, t: GameTranscript) -> FormalBall:
        cfg = self.cfg
        prev = t.last()
        alpha = t.params.alpha
        spec = cfg.spec
        canonical, e_sub, dangers = self.active_dangers(t)
        if not dangers:
            return FormalBall(prev.center, alpha * prev.radius)
        g = legal_center_shift_exponent(prev, alpha)
        # the true proposal keeps center coefficients the canonical form drops
        residual = prev.center - canonical.center
        res_shifts = {}
        for kind, _level, key, _thr in dangers:
            if (kind, key) not in res_shifts:
                res_shifts[(kind, key)] = _block_values(
                    residual, kind, self._qvecs[(kind, key)]
                )
        best = None
        for delta_pat in self._candidate_patterns():
            margin = None
            for kind, level, key, thr_exp in dangers:
                m_d = self._margin(
                    kind, key, delta_pat, g, e_sub, thr_exp, res_shifts[(kind, key)]
                )
                margin = m_d if margin is None else min(margin, m_d)
            if best is None or margin > best[0]:
                best = (margin, delta_pat)
        _, pat = best
        if any(pat):
            self.dodges += 1
        center = self._apply_pattern(prev.center, pat, g)
        return FormalBall(center, alpha * prev.radius)

    # -- candidate grid ------------------------------------------------------

    def _candidate_patterns(self):
        spec = self.cfg.spec
        cells = self.cfg.m * self.cfg.n
        if spec.k**cells <= 81:
            return list(itertools.product(spec.elements(), repeat=cells))
        pats = [tuple([0] * cells)]
        pats.extend(_single_entry_patterns(spec, cells))
        return pats

    def _apply_pattern(self, center: SeriesMatrix, pat, g: int) -> SeriesMatrix:
        spec = self.cfg.spec
        rows = []
        idx = 0
        for i in range(center.rows):
            row = []
            for j in range(center.cols):
                x = center.entry(i, j)
                if pat[idx]:
                    x = x + LaurentSeries.monomial(spec, pat[idx], g)
                row.append(x)
                idx += 1
            rows.append(row)
        return SeriesMatrix(spec, rows)

    # -- danger bookkeeping ---------------------------------------------------

    def _advance_cache(self, center: SeriesMatrix):
        if self._last_center is None:
            self._last_center = center
            return
        if center == self._last_center:
            return
        delta = center - self._last_center
        if any(not x.is_zero for row in delta.entries for x in row):
            for (kind, key), values in self._values.items():
                q_first = self._qvecs[(kind, key)]
                shift = _block_values(delta, kind, q_first)
                self._values[(kind, key)] = [a + b for a, b in zip(values, shift)]
        self._last_center = center

    def _next_level(self, t: GameTranscript, kind: str) -> int:
        k = self.cfg.spec.k
        radii = [b.radius for b in t.black_balls()]
        i = 0
        while any(
            r < Magnitude.power(k, self.cfg.marker_exponent(kind, i)).as_fraction()
            for r in radii
        ):
            i += 1
            if i > 128:
                break
        return i

    def _collect_dangers(self, t, canonical: FormalBall, e_sub: int):
        cfg = self.cfg
        spec = cfg.spec
        k = spec.k
        e = canonical.effective_exponent()
        out = []
        for kind in ("k", "h"):
            hi = self._next_level(t, kind) + self.lookahead
            for i in range(hi + 1):
                window = cfg.window_exponent(kind, i)
                max_deg = _ceil_minus_one(window)
                max_deg = min(max_deg, cfg.height_cap_exp)
                if max_deg < 0:
                    continue
                thr_exp = cfg.threshold_exponent(kind, i)
                thr = Magnitude(k, thr_exp)
                for h in range(0, max_deg + 1):
                    pert = Magnitude.power(k, h + e)
                    for q_first in iter_height_class(spec, cfg.first_block(kind), h):
                        key = tuple(p.coeffs for p in q_first)
                        pinned = self._safe_from.get((kind, key))
                        if pinned is not None and i >= pinned:
                            continue
                        values = self._value_of(kind, key, q_first, canonical.center)
                        fracs = [v.frac_norm() for v in values]
                        if any(f > pert and f >= thr for f in fracs):
                            # value pinned above every later threshold: the
                            # perturbation allowance only shrinks from here
                            if pinned is None or pinned > i:
                                self._safe_from[(kind, key)] = i
                            continue
                        if all(f <= pert or f < thr for f in fracs):
                            out.append((kind, i, key, thr_exp))
        return out

    def _value_of(self, kind, key, q_first, center):
        cached = self._values.get((kind, key))
        if cached is None:
            cached = _block_values(center, kind, q_first)
            self._values[(kind, key)] = cached
            self._qvecs[(kind, key)] = q_first
        return cached

    def _margin(self, kind, key, pat, g, e_sub, thr_exp, res_shift):
        """Worst-case violation margin of the danger on the candidate
        sub-ball (in k-exponents; higher is safer, None-like floor is
        represented by a large negative number)."""
        cfg = self.cfg
        spec = cfg.spec
        q_first = self._qvecs[(kind, key)]
        h = max(p.degree for p in q_first if not p.is_zero)
        pert = Magnitude.power(spec.k, h + e_sub)
        base_values = self._values[(kind, key)]
        shift = self._pattern_shift(kind, q_first, pat, g)
        best = Fraction(-(10**9))
        for v, s, r in zip(base_values, shift, res_shift):
            val = v + r
            if s is not None:
                val = val + s
            f = val.frac_norm()
            reach = Magnitude.zero(spec.k) if f <= pert else f
            if reach.is_zero:
                continue
            best = max(best, reach.exponent() - thr_exp)
        return best

    def _pattern_shift(self, kind, q_first, pat, g):
        cfg = self.cfg
        spec = cfg.spec
        m, n = cfg.m, cfg.n
        tails = n if kind == "k" else m
        out = []
        for l in range(tails):
            acc = None
            for idx_first in range(len(q_first)):
                if kind == "k":
                    cell = idx_first * n + l
                else:
                    cell = l * n + idx_first
                c = pat[cell]
                if c and not q_first[idx_first].is_zero:
                    term = LaurentSeries.monomial(spec, c, g) * q_first[idx_first]
                    acc = term if acc is None else acc + term
            out.append(acc)
        return out


class LiteralWhite:
    """The gradient-anchored move rule: hold a direction anchor for t0
    rounds, recentering so the move's projection on the anchor is at least
    (1-alpha)/k of the ball radius times the anchor height; the anchor is
    the discrete gradient of the top principal minor at the current center.
    Falls back to avoidance play when the gradient vanishes."""

    name = "white-literal"

    def __init__(self, cfg: StrategyConfig, lookahead: int = 2):
        self.cfg = cfg
        self.anchor = None
        self.hold = 0
        self._avoid = AvoidanceWhite(cfg, lookahead)

    @staticmethod
    def anchor_rounds(params) -> int:
        """Smallest t0 with (alpha*beta)^t0 <= gamma/2 (then also
        (alpha*beta)^t0 > alpha*beta*gamma/2)."""
        gamma = params.gamma
        if gamma <= 0:
            raise ValueError("gamma must be positive for the literal rule")
        step = params.alpha * params.beta
        t0 = 1
        cur = step
        while cur > gamma / 2:
            cur *= step
            t0 += 1
        return t0

    def propose(self, t: GameTranscript) -> FormalBall:
        cfg = self.cfg
        prev = t.last()
        alpha = t.params.alpha
        spec = cfg.spec
        canonical, _e_sub, dangers = self._avoid.active_dangers(t)
        if not dangers:
            # no hypothetical bad matrix to refute: the anchored maneuver is
            # only engaged inside a danger episode
            self.anchor = None
            self.hold = 0
            return FormalBall(prev.center, alpha * prev.radius)
        if self.anchor is None or self.hold <= 0:
            self.anchor = self._compute_anchor(t, canonical)
            self.hold = self.anchor_rounds(t.params)
        if self.anchor is None:
            return self._avoid.propose(t)
        self.hold -= 1
        norms = [x.norm() for x in self.anchor]
        top = max(norms)
        if top.is_zero:
            self.anchor = None
            return self._avoid.propose(t)
        cell = norms.index(top)
        i, j = divmod(cell, cfg.n)
        g = legal_center_shift_exponent(prev, alpha)
        rows = [list(r) for r in prev.center.entries]
        rows[i][j] = rows[i][j] + LaurentSeries.monomial(spec, 1, g)
        ball = FormalBall(SeriesMatrix(spec, rows), alpha * prev.radius)
        # the anchored-projection bound: k^g >= (1 - alpha) * radius / k
        if Fraction(spec.k**g if g >= 0 else Fraction(1, spec.k**-g)) * spec.k < (
            1 - alpha
        ) * prev.radius:
            raise NoLegalCenter("k-grid exhausted below the projection bound")
        return ball

    def _compute_anchor(self, t: GameTranscript, canonical: FormalBall):
        cfg = self.cfg
        basis = self._danger_basis(t, canonical)
        grad = discrete_gradient(canonical.center, basis, cfg.m)
        if all(x.is_zero for x in grad):
            return None
        return grad

    def _danger_basis(self, t, canonical):
        cfg = self.cfg
        level = self._avoid._next_level(t, "h")
        report = danger_set(
            canonical,
            level,
            "h",
            cfg,
            height_cap=Magnitude.power(cfg.spec.k, cfg.height_cap_exp),
        )
        vecs = list(report.solutions[: cfg.m])
        return orthonormalize(vecs, cfg.spec, cfg.d, cfg.m)


def make_white(name: str, cfg: StrategyConfig):
    if name == "white-avoid":
        return AvoidanceWhite(cfg)
    if name == "white-literal":
        return LiteralWhite(cfg)
    raise ValueError(f"unknown white strategy {name!r}")


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BadnessCertificate:
    K_exponent: int
    cap_exponent: int
    min_margin_exponent: int
    witnesses_checked: int

    def to_json(self):
        return {
            "K_exponent": self.K_exponent,
            "cap_exponent": self.cap_exponent,
            "min_margin_exponent": self.min_margin_exponent,
            "witnesses_checked": self.witnesses_checked,
        }


def certify_bad(
    point: SeriesMatrix,
    cfg: StrategyConfig,
    height_cap: Magnitude,
    known_below: int | None = None,
) -> BadnessCertificate:
    """Verify dist(q.point)^n > K / height(q)^m for all nonzero q up to the
    cap, with K one k-power inside the guaranteed interval; returns the
    minimal observed margin, or raises CounterexampleFound.

    ``known_below`` declares the truncation depth of a limit point; a passing
    distance is only accepted if its leading exponent is pinned above the
    depth that the products q.point can still see."""
    from .errors import PrecisionExhausted

    spec = cfg.spec
    k = spec.k
    m, n = cfg.m, cfg.n
    K_exp = cfg.certify_K_exponent
    cap = int(height_cap.exponent().__floor__())
    checked = 0
    margin = None
    for h in range(0, cap + 1):
        for q in iter_height_class(spec, m, h):
            checked += 1
            dist = _point_dist(q, point)
            score = Magnitude.power(k, h * m) * dist**n
            if score <= Magnitude.power(k, K_exp):
                raise CounterexampleFound(
                    f"q = ({', '.join(str(p) for p in q)}) scores {score} <= k^{K_exp}",
                    q,
                )
            if known_below is not None and int(dist.exponent()) <= known_below + h:
                raise PrecisionExhausted(
                    f"distance for q = ({', '.join(str(p) for p in q)}) is not "
                    f"pinned above the truncation depth {known_below}"
                )
            mg = int(score.exponent()) - K_exp
            margin = mg if margin is None else min(margin, mg)
    return BadnessCertificate(K_exp, cap, margin, checked)


def _point_dist(q, point: SeriesMatrix) -> Magnitude:
    out = Magnitude.zero(point.spec.k)
    for j in range(point.cols):
        acc = None
        for qi, a in zip(q, point.col(j)):
            if qi.is_zero:
                continue
            term = a * qi
            acc = term if acc is None else acc + term
        if acc is not None:
            out = max(out, acc.frac_norm())
    return out


# ---------------------------------------------------------------------------
# Calibration of the empirical constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationReport:
    field: str
    m: int
    n: int
    samples: int
    seed: int
    alpha: Fraction
    beta: Fraction
    K4: Fraction
    K5: Fraction
    K6: Fraction
    K7: Fraction

    def to_json(self):
        return {
            "field": self.field,
            "m": self.m,
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "K4": str(self.K4),
            "K5": str(self.K5),
            "K6": str(self.K6),
            "K7": str(self.K7),
            "provenance": "empirical sweep; existence-only constants",
        }


def calibrate_constants(
    spec: FieldSpec,
    m: int,
    n: int,
    samples: int = 200,
    seed: int = 0,
    alpha: Fraction = Fraction(1, 4),
    beta: Fraction = Fraction(1, 2),
) -> CalibrationReport:
    """Fix K4..K7 from sampled instances: K4 and K7 as the largest observed
    ratios of their inequalities' sides, K5 as the smallest gradient ratio
    over instances satisfying the hypotheses, K6 from the one-round
    overshoot of the marker rule."""
    import random

    from .game import GameParams
    from .sampling import random_ball, random_orthonormal_basis

    rng = random.Random(seed)
    k = spec.k
    k4_max = None
    k5_min = None
    k7_max = None
    for _ in range(samples):
        v = rng.randint(1, m)
        basis = random_orthonormal_basis(rng, spec, m, m + n)
        ball = random_ball(rng, spec, m, n, -rng.randint(2, 5), rng.randint(2, 4))
        e = ball.effective_exponent()
        A1 = ball.center
        A2 = _perturb(A1, rng, e)
        g1 = discrete_gradient(A1, basis, v)
        g2 = discrete_gradient(A2, basis, v)
        m1 = minors(A1, basis, v - 1)
        m2 = minors(A2, basis, v - 1)
        dg = _vec_height_of([a - b for a, b in zip(g1, g2)], k)
        dm = _vec_height_of([a - b for a, b in zip(m1.entries, m2.entries)], k)
        if not dm.is_zero and not dg.is_zero:
            ratio = dg / dm
            k4_max = ratio if k4_max is None or ratio > k4_max else k4_max
        sup_prev = minor_sup(ball, basis, v - 1)
        mv = minors(A1, basis, v).height()
        if (
            not sup_prev.is_zero
            and mv < Magnitude.power(k, -3) * sup_prev
            and _principal_attains_max(A1, basis, v)
        ):
            grad = _vec_height_of(list(g1), k)
            if not grad.is_zero:
                ratio = grad / sup_prev
                k5_min = ratio if k5_min is None or ratio < k5_min else k5_min
        dv = principal_minor(A1, basis, v)
        if not dv.is_zero:
            lhs = _anchored_projection(A1, ball, g1, k)
            if not lhs.is_zero:
                ratio = lhs / dv.norm()
                k7_max = ratio if k7_max is None or ratio > k7_max else k7_max
    params = GameParams(alpha, beta, spec)
    k4 = k4_max.as_fraction() if k4_max is not None else Fraction(1)
    k5 = k5_min.as_fraction() if k5_min is not None else Fraction(1, 8)
    k7 = k7_max.as_fraction() if k7_max is not None else Fraction(1)
    eps = params.gamma / 8 * k5 / k4
    k6 = alpha * beta * min(Fraction(1, 2), eps)
    return CalibrationReport(
        field=str(spec.p) if spec.r == 1 else f"{spec.p}^{spec.r}",
        m=m,
        n=n,
        samples=samples,
        seed=seed,
        alpha=alpha,
        beta=beta,
        K4=k4,
        K5=k5,
        K6=k6,
        K7=k7,
    )


def _perturb(A: SeriesMatrix, rng, e: int) -> SeriesMatrix:
    spec = A.spec
    rows = []
    for row in A.entries:
        out = []
        for x in row:
            c = rng.randrange(spec.k)
            if c:
                x = x + LaurentSeries.monomial(spec, c, e)
            out.append(x)
        rows.append(out)
    return SeriesMatrix(spec, rows)


def _vec_height_of(xs, k: int) -> Magnitude:
    out = Magnitude.zero(k)
    for x in xs:
        out = max(out, x.norm())
    return out


def _principal_attains_max(A, basis, v) -> bool:
    mv = minors(A, basis, v - 1)
    top = mv.height()
    if top.is_zero:
        return False
    principal = principal_minor(A, basis, v - 1)
    return principal.norm() == top


def _anchored_projection(A, ball, grad, k) -> Magnitude:
    """||(A - C) . grad|| for A on the ball's grid; here A is the center so
    the projection uses the ball radius as the displacement height."""
    e = ball.effective_exponent()
    disp = Magnitude.power(k, e)
    g = _vec_height_of(list(grad), k)
    return disp * g
