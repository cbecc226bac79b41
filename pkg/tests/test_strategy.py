import random
from fractions import Fraction

import pytest

from lsdioph.approx import LinearFormSystem
from lsdioph.errors import CounterexampleFound
from lsdioph.field import FieldSpec, Magnitude, Poly, floor_log
from lsdioph.game import (
    ConcentricStrategy,
    FormalBall,
    GameParams,
    RandomBlack,
    StopRule,
    formal_contains,
    play,
    unit_ball,
)
from lsdioph.sampling import random_ball, random_orthonormal_basis
from lsdioph.series import (
    LaurentSeries,
    RationalFn,
    SeriesMatrix,
    parse_poly,
    parse_series,
    vec_dot,
)
from lsdioph.strategy import (
    AvoidanceWhite,
    LiteralWhite,
    StrategyConfig,
    calibrate_constants,
    certify_bad,
    check_inequalities,
    danger_set,
    discrete_gradient,
    is_orthonormal,
    minor_sup,
    minors,
    orthonormalize,
    phi,
    principal_minor,
    schedule_markers,
)

F2 = FieldSpec(2)
CFG = StrategyConfig(F2, 1, 1, R_exp=2, height_cap_exp=4)


def test_config_derived_exponents():
    assert CFG.tau == Fraction(1, 2)
    assert CFG.delta_exp == -8
    assert CFG.delta_star_exp == -8
    assert CFG.certify_K_exponent == -21
    assert [CFG.marker_exponent("k", i) for i in range(3)] == [-2, -6, -10]
    assert [CFG.marker_exponent("h", i) for i in range(3)] == [-4, -8, -12]
    assert CFG.window_exponent("k", 4) == 1
    assert CFG.threshold_exponent("k", 4) == -19
    assert CFG.window_exponent("h", 4) == 2
    assert CFG.threshold_exponent("h", 4) == -20
    # non-integer window exponents for asymmetric shapes compare exactly
    cfg21 = StrategyConfig(F2, 2, 1, R_exp=1)
    assert cfg21.window_exponent("k", 0) == Fraction(2, 3) - 18


def test_marker_schedule_example():
    # R = 2, m = n = 1: k-thresholds 2^(-1-2i); alpha = beta = 1/2
    cfg = StrategyConfig(F2, 1, 1, R_exp=1)
    params = GameParams(Fraction(1, 2), Fraction(1, 2), F2)
    t = play(
        ConcentricStrategy("alpha"),
        ConcentricStrategy("beta"),
        unit_ball(F2, 1, 1),
        params,
        StopRule(max_rounds=6),
    )
    ms = schedule_markers(t, cfg)
    # B_1 = 1, B_2 = 1/4 < 1/2: the first threshold is crossed at index 2
    assert ms.k_indices[0] == 2
    # radii 4^-i: threshold 2^(-1-2i) crossed at black ball i+1 (index 2i+2)
    assert list(ms.k_indices) == [2 * i + 2 for i in range(len(ms.k_indices))]
    assert len(ms.k_indices) >= 3


def test_marker_schedule_empty_and_interleaving():
    params = GameParams(Fraction(1, 2), Fraction(1, 2), F2)
    t = play(
        ConcentricStrategy("alpha"),
        ConcentricStrategy("beta"),
        unit_ball(F2, 1, 1),
        params,
        StopRule(max_rounds=1),
    )
    ms = schedule_markers(t, CFG)
    assert ms.k_indices == () and ms.h_indices == ()
    rng = random.Random(1)
    for seed in range(60):
        t = play(
            ConcentricStrategy("alpha"),
            RandomBlack(seed),
            unit_ball(F2, 1, 1),
            GameParams(Fraction(1, rng.randint(2, 4)), Fraction(1, rng.randint(2, 4)), F2),
            StopRule(max_rounds=14),
        )
        ms = schedule_markers(t, CFG)
        assert list(ms.k_indices) == sorted(ms.k_indices)
        assert list(ms.h_indices) == sorted(ms.h_indices)
        # interleaving: k_0 <= h_0 <= k_1 <= h_1 <= ...
        merged = []
        for a, b in zip(ms.k_indices, ms.h_indices):
            merged.extend([a, b])
        assert merged == sorted(merged)


def test_check_inequalities_level0_empty():
    rng = random.Random(2)
    for _ in range(50):
        A = SeriesMatrix(
            F2, [[LaurentSeries(F2, {-e: rng.randrange(2) for e in range(1, 6)})]]
        )
        for qa in range(4):
            for qb in range(4):
                q = (Poly(F2, [qa & 1, qa >> 1]), Poly(F2, [qb & 1, qb >> 1]))
                assert not check_inequalities(A, q, 0, "k", CFG)


def test_check_inequalities_zero_head_false():
    A = SeriesMatrix(F2, [[parse_series("X^-1", F2)]])
    q = (Poly.zero(F2), Poly.one(F2))
    assert not check_inequalities(A, q, 5, "k", CFG)


def test_check_inequalities_planted_solution():
    # rational entry p/q0 with q = (q0, -p) zeroes the hat column exactly
    q0 = parse_poly("X + 1", F2)
    p = Poly.one(F2)
    A = SeriesMatrix(F2, [[RationalFn(p, q0)]])
    q = (q0, -p)
    assert check_inequalities(A, q, 5, "k", CFG)
    assert not check_inequalities(A, q, 0, "k", CFG)  # window shut at level 0


def test_danger_level0_always_empty():
    rng = random.Random(3)
    for _ in range(40):
        ball = random_ball(rng, F2, 1, 1, -rng.randint(1, 24), 6)
        assert danger_set(ball, 0, "k", CFG).empty


def test_danger_monotone_under_shrinking():
    rng = random.Random(5)
    for _ in range(20):
        level = rng.choice([4, 5])
        e = CFG.marker_exponent("k", level) - rng.randint(0, 3)
        big = random_ball(rng, F2, 1, 1, e, 26)
        small = FormalBall(big.center, big.radius / 4)
        d_big = danger_set(big, level, "k", CFG, height_cap=Magnitude.power(2, 4))
        d_small = danger_set(small, level, "k", CFG, height_cap=Magnitude.power(2, 4))
        assert set(d_small.solutions) <= set(d_big.solutions)


def test_danger_set_planted_solution_and_rank():
    # center = deep truncation of 1/(X+1): the true rational sits in the ball
    q0 = parse_poly("X + 1", F2)
    series = RationalFn(Poly.one(F2), q0).to_series(precision=40)
    level = 5
    e = CFG.marker_exponent("k", level) - 1  # radius below the level marker
    center = SeriesMatrix(F2, [[series.truncate_below(e + 1)]])
    ball = FormalBall(center, Magnitude.power(2, e).as_fraction())
    report = danger_set(ball, level, "k", CFG, height_cap=Magnitude.power(2, 4))
    assert not report.empty
    assert any(sol[0] == q0 for sol in report.solutions)
    assert report.rank <= CFG.n


def test_danger_rank_bounds_sampled():
    # the rank bounds presuppose that the complementary family has no
    # solutions on the ball; random balls are filtered for that hypothesis
    rng = random.Random(7)
    cap = Magnitude.power(2, 3)
    for (m, n) in ((1, 1), (2, 1), (1, 2)):
        cfg = StrategyConfig(F2, m, n, R_exp=1, height_cap_exp=3)
        k_level = next(i for i in range(60) if cfg.window_exponent("k", i) > 0)
        h_level = next(i for i in range(60) if cfg.window_exponent("h", i) > 0)
        done = 0
        while done < 20:
            ek = cfg.marker_exponent("k", k_level) - rng.randint(0, 2)
            ball = random_ball(rng, F2, m, n, ek, -ek)
            if k_level >= 1 and not danger_set(
                ball, k_level - 1, "h", cfg, height_cap=cap
            ).empty:
                continue
            rep = danger_set(ball, k_level, "k", cfg, height_cap=cap)
            assert rep.rank <= n
            eh = cfg.marker_exponent("h", h_level) - rng.randint(0, 2)
            ball_h = random_ball(rng, F2, m, n, eh, -eh)
            if not danger_set(ball_h, h_level, "k", cfg, height_cap=cap).empty:
                continue
            rep_h = danger_set(ball_h, h_level, "h", cfg, height_cap=cap)
            assert rep_h.rank <= m
            done += 1


def _oracle_danger_heads(ball, level, cfg):
    """Independent existential check for the single-form case: a head q is
    dangerous iff some matrix of the ball (enumerated over every coefficient
    that can influence the comparison) beats the value threshold with the
    best lattice tail."""
    import itertools
    from math import ceil

    from lsdioph.approx import iter_polys
    from lsdioph.game import canonicalize

    canonical = canonicalize(ball)
    e = canonical.effective_exponent()
    C = canonical.center.entry(0, 0)
    thr_exp = cfg.threshold_exponent("k", level)
    window_exp = cfg.window_exponent("k", level)
    thr = Magnitude(2, thr_exp)
    max_deg = min(ceil(window_exp) - 1, cfg.height_cap_exp)
    out = set()
    if max_deg < 0:
        return out
    thr_floor = int(thr_exp.__floor__())
    for q in iter_polys(F2, max_deg):
        if q.is_zero:
            continue
        span = list(range(thr_floor - q.degree, e + 1))
        for bits in itertools.product(range(2), repeat=len(span)):
            delta = LaurentSeries(F2, {x: b for x, b in zip(span, bits) if b})
            if ((C + delta) * q).frac_norm() < thr:
                out.add(q.coeffs)
                break
    return out


def test_danger_set_matches_existential_oracle():
    rng = random.Random(0)
    cap = Magnitude.power(2, 4)
    for trial in range(25):
        level = rng.choice([4, 5])
        e = CFG.marker_exponent("k", level) - rng.randint(0, 2)
        ball = random_ball(rng, F2, 1, 1, e, -e)
        rep = danger_set(ball, level, "k", CFG, height_cap=cap)
        got = {sol[0].coeffs for sol in rep.solutions}
        assert got == _oracle_danger_heads(ball, level, CFG)
    # planted rational center: three dangerous heads, all found
    q0 = parse_poly("X + 1", F2)
    series = RationalFn(Poly.one(F2), q0).to_series(precision=40)
    e = CFG.marker_exponent("k", 5) - 1
    center = SeriesMatrix(F2, [[series.truncate_below(e + 1)]])
    ball = FormalBall(center, Magnitude.power(2, e).as_fraction())
    rep = danger_set(ball, 5, "k", CFG, height_cap=cap)
    got = {sol[0].coeffs for sol in rep.solutions}
    assert got == _oracle_danger_heads(ball, 5, CFG)
    assert len(got) == 3


def test_orthonormalize_and_verify():
    rng = random.Random(9)
    for (m, n) in ((1, 1), (2, 1), (2, 2)):
        basis = random_orthonormal_basis(rng, F2, m, m + n)
        assert is_orthonormal(basis, F2)
        # combination norms equal the max coefficient norm
        for _ in range(50):
            ts = [
                Poly(F2, [rng.randrange(2) for _ in range(rng.randint(1, 4))])
                for _ in range(m)
            ]
            if all(t.is_zero for t in ts):
                continue
            combo = None
            for t, y in zip(ts, basis):
                term = tuple(x * t for x in y)
                combo = term if combo is None else tuple(
                    a + b for a, b in zip(combo, term)
                )
            expect = max((t.norm() for t in ts if not t.is_zero))
            got = None
            for x in combo:
                nx = x.norm()
                got = nx if got is None else max(got, nx)
            assert got == expect


def test_orthonormalize_from_polynomial_span():
    vecs = [
        (parse_poly("X^2", F2), parse_poly("X", F2), Poly.one(F2)),
        (parse_poly("X^2 + X", F2), parse_poly("X", F2), Poly.zero(F2)),
    ]
    basis = orthonormalize(vecs, F2, 3, 2)
    assert len(basis) == 2
    assert is_orthonormal(basis, F2)


def test_minor_examples():
    rng = random.Random(11)
    basis = random_orthonormal_basis(rng, F2, 1, 2)
    A = SeriesMatrix(F2, [[parse_series("X^-1 + X^-2", F2)]])
    m0 = minors(A, basis, 0)
    assert m0.entries == (LaurentSeries.one(F2),)
    m1 = minors(A, basis, 1)
    assert len(m1.entries) == 1
    from lsdioph.approx import build_hat

    col = build_hat(LinearFormSystem(A)).hat_star.col(0)
    assert m1.entries[0] == vec_dot(basis[0], col)
    # count for m = 3: C(3,2)^2 = 9
    basis3 = random_orthonormal_basis(rng, F2, 3, 4)
    A3 = SeriesMatrix(
        F2, [[LaurentSeries(F2, {-1: rng.randrange(2), -2: 1})] for _ in range(3)]
    )
    assert len(minors(A3, basis3, 2).entries) == 9


def test_gradient_single_form_constant():
    rng = random.Random(13)
    basis = random_orthonormal_basis(rng, F2, 1, 2)
    for _ in range(10):
        A = SeriesMatrix(
            F2, [[LaurentSeries(F2, {-e: rng.randrange(2) for e in range(1, 5)})]]
        )
        grad = discrete_gradient(A, basis, 1)
        assert len(grad) == 1
        # D_1(A) = y_1 a + y_2 is affine in the entry: gradient = y_1
        assert grad[0] == basis[0][0]
    zero = SeriesMatrix.zero(F2, 1, 1)
    assert discrete_gradient(zero, basis, 1)[0] == basis[0][0]


def test_minor_perturbation_bound():
    """Unit-entry perturbations move the minor vector by at most the entry
    norm times the next-lower minor sup over the ball."""
    rng = random.Random(17)
    for (m, n) in ((2, 1), (2, 2)):
        for _ in range(10):
            basis = random_orthonormal_basis(rng, F2, m, m + n)
            ball = random_ball(rng, F2, m, n, -rng.randint(1, 3), 3)
            A = ball.center
            v = m
            i, j = rng.randrange(m), rng.randrange(n)
            x = LaurentSeries.monomial(F2, 1, -rng.randint(0, 2))
            rows = [list(r) for r in A.entries]
            rows[i][j] = rows[i][j] + x
            A2 = SeriesMatrix(F2, rows)
            m1 = minors(A, basis, v - 1)
            m2 = minors(A2, basis, v - 1)
            diff = None
            for a, b in zip(m1.entries, m2.entries):
                nd = (a - b).norm()
                diff = nd if diff is None else max(diff, nd)
            bound = x.norm() * minor_sup(ball, basis, v - 2)
            assert diff <= bound


def test_phi_examples():
    rng = random.Random(19)
    basis = random_orthonormal_basis(rng, F2, 1, 2)
    A = SeriesMatrix(F2, [[parse_series("X^-1", F2)]])
    z0 = (LaurentSeries.zero(F2), LaurentSeries.zero(F2))
    assert phi(z0, A, basis, 1).is_zero
    for _ in range(20):
        z = tuple(
            LaurentSeries(F2, {rng.randint(-3, 1): 1, -5: rng.randrange(2)})
            for _ in range(2)
        )
        val = phi(z, A, basis, 1)
        xz = tuple(x.shift(1) for x in z)
        assert phi(xz, A, basis, 1) == Magnitude.power(2, 1) * val
        # v = 1: phi(z) = ||d_1|| * ||y_1 . z|| with d_1 = 1
        assert val == vec_dot(basis[0], z).norm()


def test_principal_minor_and_phi_cofactors():
    rng = random.Random(23)
    basis = random_orthonormal_basis(rng, F2, 2, 3)
    A = SeriesMatrix(
        F2,
        [[LaurentSeries(F2, {-1: 1})], [LaurentSeries(F2, {-2: 1})]],
    )
    assert principal_minor(A, basis, 0) == LaurentSeries.one(F2)
    # phi at v=2 expands the last column: difference of determinants
    from lsdioph.approx import build_hat

    hat_star = build_hat(LinearFormSystem(A)).hat_star
    z = (LaurentSeries.one(F2), LaurentSeries.zero(F2), LaurentSeries(F2, {-1: 1}))
    from lsdioph.linalg import det_entries

    G = [[vec_dot(y, hat_star.col(l)) for l in range(2)] for y in basis]
    shifted = [
        [G[r][0], vec_dot(basis[r], tuple(a + b for a, b in zip(hat_star.col(1), z)))]
        for r in range(2)
    ]
    direct = (det_entries(shifted, F2) - det_entries(G, F2)).norm()
    assert phi(z, A, basis, 2) == direct


def test_literal_white_moves_satisfy_projection_bound():
    cfg = StrategyConfig(F2, 1, 1, R_exp=2, height_cap_exp=4, mode="literal")
    params = GameParams(Fraction(1, 4), Fraction(1, 2), F2)
    white = LiteralWhite(cfg)
    t = play(white, RandomBlack(3), unit_ball(F2, 1, 1), params, StopRule(max_rounds=16))
    assert t.forfeit is None
    # gamma = 1/4, step alpha*beta = 1/8: one round already meets gamma/2
    assert LiteralWhite.anchor_rounds(params) == 1
    for i in range(1, len(t.balls), 2):
        prev, here = t.balls[i - 1], t.balls[i]
        assert formal_contains(here, prev)
        shift = (here.center - prev.center).height()
        if not shift.is_zero:
            # on-grid move: a single coefficient at the floor exponent of
            # (1 - alpha) * radius, which meets the k^-1(1-alpha) bound
            g = floor_log((1 - params.alpha) * prev.radius, 2)
            assert shift == Magnitude.power(2, g)
            assert Fraction(2) ** g >= (1 - params.alpha) * prev.radius / 2


def test_anchor_rounds_window():
    params = GameParams(Fraction(1, 4), Fraction(1, 2), F2)
    t0 = LiteralWhite.anchor_rounds(params)
    step = params.alpha * params.beta
    gamma = params.gamma
    assert step**t0 <= gamma / 2 < step ** (t0 - 1)


def test_black_reply_projection_bound():
    """No matter how Black recenters, the move projects on any anchor by at
    most (1 - beta) * radius * anchor height."""
    rng = random.Random(29)
    params = GameParams(Fraction(1, 4), Fraction(1, 2), F2)
    t = play(
        ConcentricStrategy("alpha"),
        RandomBlack(11),
        unit_ball(F2, 1, 1),
        params,
        StopRule(max_rounds=10),
    )
    for i in range(2, len(t.balls), 2):
        w_ball, b_ball = t.balls[i - 1], t.balls[i]
        move = (b_ball.center - w_ball.center).entry(0, 0)
        for _ in range(5):
            anchor = LaurentSeries(F2, {rng.randint(-3, 3): 1})
            proj = (move * anchor).norm() if not move.is_zero else Magnitude.zero(2)
            bound = (1 - params.beta) * w_ball.radius * anchor.norm().as_fraction()
            if not proj.is_zero:
                assert proj.as_fraction() <= bound


def test_avoidance_concentric_when_no_danger():
    cfg = StrategyConfig(F2, 1, 1, R_exp=2, height_cap_exp=4)
    params = GameParams(Fraction(1, 4), Fraction(1, 2), F2)
    white = AvoidanceWhite(cfg)
    b1 = unit_ball(F2, 1, 1)
    t = play(white, ConcentricStrategy("beta"), b1, params, StopRule(max_rounds=2))
    # zero center has no fractional part to defend this early
    assert all(b.center == b1.center for b in t.balls[:3])


def test_certify_bad_counterexample_on_rational():
    q0 = parse_poly("X^2 + X + 1", F2)
    point = SeriesMatrix(F2, [[RationalFn(Poly.one(F2), q0)]])
    with pytest.raises(CounterexampleFound) as err:
        certify_bad(point, CFG, Magnitude.power(2, 2))
    assert err.value.q[0] == q0


def test_certify_bad_passes_on_bounded_quotients():
    # [0; X, X, X, ...] to depth 20: all partial quotients degree 1, so every
    # vector under the cap keeps score >= k^-2 > K
    from lsdioph.approx import ContinuedFraction, cf_convergents

    quotients = (Poly.zero(F2),) + (Poly.x(F2),) * 20
    p, q = cf_convergents(ContinuedFraction(quotients, True))[-1]
    point = SeriesMatrix(F2, [[RationalFn(p, q)]])
    cert = certify_bad(point, CFG, Magnitude.power(2, 4))
    assert cert.min_margin_exponent > 0
    assert cert.witnesses_checked == 31


def test_minor_change_bound_small_shrink():
    """Inside a ball much smaller than the anchor ball, the minor vector is
    nearly constant: the stated difference bound holds exactly."""
    rng = random.Random(31)
    for _ in range(20):
        m, n = 2, 1
        basis = random_orthonormal_basis(rng, F2, m, m + n)
        anchor = random_ball(rng, F2, m, n, -2, 3)
        v = 2
        sup_prev = minor_sup(anchor, basis, v - 2)
        mu = Fraction(1, 4)
        eps = Fraction(1, 2)
        rho_small = eps * mu * anchor.radius / 2
        e_small = floor_log(rho_small, 2)
        small = FormalBall(anchor.center, Magnitude.power(2, e_small).as_fraction())
        A1 = small.center
        rows = [list(r) for r in A1.entries]
        rows[0][0] = rows[0][0] + LaurentSeries.monomial(F2, 1, e_small)
        A2 = SeriesMatrix(F2, rows)
        m1, m2 = minors(A1, basis, v - 1), minors(A2, basis, v - 1)
        diff = None
        for a, b in zip(m1.entries, m2.entries):
            nd = (a - b).norm()
            diff = nd if diff is None else max(diff, nd)
        bound = eps * anchor.radius * mu * _as_fraction_or_zero(sup_prev)
        if not diff.is_zero:
            assert diff.as_fraction() < bound


def _as_fraction_or_zero(mag):
    return mag.as_fraction() if not mag.is_zero else Fraction(0)


def test_gradient_lower_bound_with_shipped_K5():
    """Under the smallness and maximality hypotheses, the gradient height
    clears K5 times the minor sup; violations are build failures."""
    rng = random.Random(37)
    cfg = StrategyConfig(F2, 2, 1)
    hits = 0
    for _ in range(900):
        basis = random_orthonormal_basis(rng, F2, 2, 3)
        ball = random_ball(rng, F2, 2, 1, -rng.randint(2, 4), 3)
        A = ball.center
        v = 2
        sup_prev = minor_sup(ball, basis, v - 1)
        if sup_prev.is_zero:
            continue
        mv = minors(A, basis, v).height()
        if not mv < Magnitude.power(2, -3) * sup_prev:
            continue
        principal = principal_minor(A, basis, v - 1)
        if principal.norm() != minors(A, basis, v - 1).height():
            continue
        grad = discrete_gradient(A, basis, v)
        gh = None
        for x in grad:
            nx = x.norm()
            gh = nx if gh is None else max(gh, nx)
        hits += 1
        assert gh.as_fraction() > cfg.K5 * sup_prev.as_fraction()
    assert hits >= 5  # the hypotheses are rarely met by chance


class TargetingBlack:
    """Steers play toward a fixed rational point; rational limits are
    maximally well approximable, so this is the hardest scripted adversary."""

    def __init__(self, target_series):
        self.target = target_series

    def propose(self, t):
        from lsdioph.game import legal_center_shift_exponent, validate_move

        prev = t.last()
        beta = t.params.beta
        g = legal_center_shift_exponent(prev, beta)
        cur = prev.center.entry(0, 0)
        delta = {}
        for e in range(g, g - 2, -1):
            delta[e] = (self.target.coeffs.get(e, 0) - cur.coeffs.get(e, 0)) % 2
        cand = cur + LaurentSeries(F2, delta)
        ball = FormalBall(SeriesMatrix(F2, [[cand]]), beta * prev.radius)
        if validate_move(prev, ball, beta):
            return ball
        return FormalBall(prev.center, beta * prev.radius)


def test_avoidance_beats_rational_targeting_adversary():
    params = GameParams(Fraction(1, 4), Fraction(1, 2), F2)
    checked = 0
    for dq in range(1, 4):
        for bits in range(2**dq):
            q0 = Poly(F2, [(bits >> b) & 1 for b in range(dq)] + [1])
            for pbits in range(1, 2**dq):
                p = Poly(F2, [(pbits >> b) & 1 for b in range(dq)])
                if p.is_zero or p.gcd(q0).degree != 0 or p.degree >= q0.degree:
                    continue
                target = RationalFn(p, q0).to_series(precision=80)
                white = AvoidanceWhite(CFG)
                t = play(
                    white,
                    TargetingBlack(target),
                    unit_ball(F2, 1, 1),
                    params,
                    StopRule(max_rounds=24),
                )
                assert t.forfeit is None
                from lsdioph.game import limit_point

                point = limit_point(t, 30)
                cert = certify_bad(
                    point, CFG, Magnitude.power(2, 4), known_below=-30
                )
                assert cert.min_margin_exponent > 0
                checked += 1
    assert checked == 42


def test_avoidance_nonsquare_shape_runs_legally():
    cfg = StrategyConfig(F2, 2, 1, R_exp=1, height_cap_exp=2)
    params = GameParams(Fraction(1, 4), Fraction(1, 2), F2)
    white = AvoidanceWhite(cfg)
    t = play(white, RandomBlack(3), unit_ball(F2, 2, 1), params, StopRule(max_rounds=24))
    assert t.forfeit is None
    from lsdioph.game import limit_point

    point = limit_point(t, 30)
    cert = certify_bad(point, cfg, Magnitude.power(2, 2), known_below=-30)
    assert cert.min_margin_exponent > 0
    ms = schedule_markers(t, cfg)
    assert ms.k_indices and ms.h_indices


def test_calibrate_constants_reports():
    report = calibrate_constants(F2, 1, 1, samples=40, seed=1)
    assert report.K4 > 0 and report.K5 > 0 and report.K6 > 0 and report.K7 > 0
    js = report.to_json()
    assert js["provenance"].startswith("empirical")
