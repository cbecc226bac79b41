"""Seeded random generators for series, matrices, balls, and orthonormal
bases.  Everything takes an explicit ``random.Random`` so runs are
reproducible from a single seed."""

from __future__ import annotations

from fractions import Fraction

from .field import FieldSpec, Magnitude, Poly
from .game import FormalBall
from .linalg import det, series_vec_rank_at_zero
from .series import LaurentSeries, SeriesMatrix


def random_poly(rng, spec: FieldSpec, max_deg: int, nonzero: bool = False) -> Poly:
    while True:
        coeffs = [rng.randrange(spec.k) for _ in range(max_deg + 1)]
        p = Poly(spec, coeffs)
        if not nonzero or not p.is_zero:
            return p


def random_series(
    rng, spec: FieldSpec, lead_hi: int, depth: int, truncated: bool = False
) -> LaurentSeries:
    """Exact finite-support series with exponents in (lead_hi - depth, lead_hi];
    with ``truncated`` the precision floor is declared at the support floor."""
    floor = lead_hi - depth + 1
    coeffs = {e: rng.randrange(spec.k) for e in range(floor, lead_hi + 1)}
    if all(c == 0 for c in coeffs.values()):
        coeffs[lead_hi] = rng.randrange(1, spec.k)
    if truncated:
        return LaurentSeries(spec, coeffs, known_below=floor)
    return LaurentSeries(spec, coeffs)


def random_matrix(
    rng, spec: FieldSpec, rows: int, cols: int, lead_hi: int, depth: int
) -> SeriesMatrix:
    return SeriesMatrix(
        spec,
        [
            [random_series(rng, spec, lead_hi, depth) for _ in range(cols)]
            for _ in range(rows)
        ],
    )


def random_poly_matrix(rng, spec: FieldSpec, d: int, max_deg: int) -> SeriesMatrix:
    return SeriesMatrix(
        spec,
        [
            [LaurentSeries.from_poly(random_poly(rng, spec, max_deg)) for _ in range(d)]
            for _ in range(d)
        ],
    )


def random_invertible_poly_matrix(rng, spec: FieldSpec, d: int, max_deg: int) -> SeriesMatrix:
    while True:
        m = random_poly_matrix(rng, spec, d, max_deg)
        if not det(m).is_zero:
            return m


def random_ball(
    rng, spec: FieldSpec, m: int, n: int, radius_exp: int, center_depth: int
) -> FormalBall:
    """Ball of radius k^radius_exp whose center carries coefficients down to
    the ball's own resolution (deeper ones would be invisible)."""
    center = SeriesMatrix(
        spec,
        [
            [
                _centered_series(rng, spec, radius_exp, center_depth)
                for _ in range(n)
            ]
            for _ in range(m)
        ],
    )
    return FormalBall(center, Magnitude.power(spec.k, radius_exp).as_fraction())


def _centered_series(rng, spec, radius_exp, depth):
    coeffs = {}
    for e in range(radius_exp + 1, radius_exp + 1 + depth):
        coeffs[e] = rng.randrange(spec.k)
    return LaurentSeries(spec, coeffs)


def random_orthonormal_basis(rng, spec: FieldSpec, count: int, dim: int, depth: int = 3):
    """``count`` vectors in L^dim, entry norms <= 1, residues at exponent 0
    linearly independent over F_q (that is exactly ultrametric
    orthonormality)."""
    while True:
        vecs = []
        for _ in range(count):
            vec = []
            for _ in range(dim):
                coeffs = {-e: rng.randrange(spec.k) for e in range(depth)}
                vec.append(LaurentSeries(spec, coeffs))
            vecs.append(tuple(vec))
        if series_vec_rank_at_zero(vecs, spec) == count:
            return tuple(vecs)


def random_fraction_in_unit(rng, denominator_bound: int = 64) -> Fraction:
    den = rng.randrange(2, denominator_bound)
    num = rng.randrange(1, den)
    return Fraction(num, den)
