"""The Schmidt (alpha, beta)-game engine on matrix space.

A formal ball is a pair (center, radius) with a finite-support matrix center
and an exact rational radius; the geometric ball it denotes is
``{x : ||x - c|| <= rho}``.  The map from formal balls to sets is not
injective: only the radius's k-power floor and the center coefficients above
that exponent matter, which is what :func:`canonicalize` extracts.

Play alternates: White shrinks by alpha, Black by beta, both subject to the
formal containment rule ``rho_in + ||c_in - c_out|| <= rho_out``.  An illegal
proposal forfeits for the proposing player and is recorded in the
transcript; the engine itself never guesses moves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InsufficientDepth
from .field import FieldSpec, Magnitude, floor_log
from .series import (
    LaurentSeries,
    SeriesMatrix,
    format_series,
    parse_field,
    parse_series,
)


@dataclass(frozen=True)
class FormalBall:
    center: SeriesMatrix
    radius: Fraction

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "radius", Fraction(self.radius))

    @property
    def spec(self) -> FieldSpec:
        return self.center.spec

    def effective_exponent(self) -> int:
        """Exponent of the largest k-power <= radius (the real resolution)."""
        return floor_log(self.radius, self.spec.k)


@dataclass(frozen=True)
class GameParams:
    alpha: Fraction
    beta: Fraction
    spec: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("alpha and beta must lie in (0, 1)")

    @property
    def gamma(self) -> Fraction:
        """k^-1 + alpha*beta - (k^-1 + 1)*alpha; positive iff White's moves
        can outrun Black's recentering along a fixed direction."""
        kinv = Fraction(1, self.spec.k)
        return kinv + self.alpha * self.beta - (kinv + 1) * self.alpha


def formal_contains(inner: FormalBall, outer: FormalBall) -> bool:
    """Exact test of rho_in + ||c_in - c_out|| <= rho_out."""
    if inner.center.shape != outer.center.shape:
        raise ValueError("dimension mismatch")
    delta = inner.center - outer.center
    gap = delta.height()
    return inner.radius + gap.as_fraction() <= outer.radius


def ball_contains_point(ball: FormalBall, point: SeriesMatrix) -> bool:
    """Membership of an exact matrix in the geometric ball."""
    return (point - ball.center).height().as_fraction() <= ball.radius


def canonicalize(ball: FormalBall) -> FormalBall:
    """Normal form with the same geometric ball: radius becomes its k-power
    floor, the center drops all coefficients at or below that exponent."""
    e = ball.effective_exponent()
    radius = Magnitude.power(ball.spec.k, e).as_fraction()
    center = ball.center.map(lambda x: x.truncate_below(e + 1))
    return FormalBall(center, radius)


def validate_move(prev: FormalBall, proposal: FormalBall, ratio: Fraction) -> bool:
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    if proposal.radius != ratio * prev.radius:
        return False
    return formal_contains(proposal, prev)


@dataclass(frozen=True)
class IllegalMove:
    player: str
    index: int


@dataclass
class GameTranscript:
    """B_1, W_1, B_2, W_2, ... (index parity: even = Black, odd = White)."""

    params: GameParams
    balls: list = field(default_factory=list)
    forfeit: IllegalMove | None = None

    @property
    def shape(self):
        return self.balls[0].center.shape

    def last(self) -> FormalBall:
        return self.balls[-1]

    def player_at(self, index: int) -> str:
        return "black" if index % 2 == 0 else "white"

    def black_balls(self):
        return self.balls[0::2]

    def white_balls(self):
        return self.balls[1::2]

    def full_rounds(self) -> int:
        """Completed (W_i, B_i+1) rounds."""
        return (len(self.balls) - 1) // 2

    def to_jsonl(self) -> str:
        p = self.params
        lines = [
            json.dumps(
                {
                    "type": "header",
                    "field": _field_flag(p.spec),
                    "alpha": str(p.alpha),
                    "beta": str(p.beta),
                    "shape": list(self.shape),
                },
                sort_keys=True,
            )
        ]
        for i, b in enumerate(self.balls):
            lines.append(
                json.dumps(
                    {
                        "player": self.player_at(i),
                        "center": [
                            [format_series(x) for x in row] for row in b.center.entries
                        ],
                        "radius": str(b.radius),
                    },
                    sort_keys=True,
                )
            )
        if self.forfeit is not None:
            lines.append(
                json.dumps(
                    {
                        "type": "forfeit",
                        "player": self.forfeit.player,
                        "index": self.forfeit.index,
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, validate: bool = True) -> "GameTranscript":
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        header = lines[0]
        spec = parse_field(header["field"])
        params = GameParams(
            Fraction(header["alpha"]), Fraction(header["beta"]), spec
        )
        t = cls(params)
        for rec in lines[1:]:
            if rec.get("type") == "forfeit":
                t.forfeit = IllegalMove(rec["player"], rec["index"])
                continue
            center = SeriesMatrix(
                spec, [[parse_series(s, spec) for s in row] for row in rec["center"]]
            )
            ball = FormalBall(center, Fraction(rec["radius"]))
            if validate and t.balls:
                ratio = params.alpha if t.player_at(len(t.balls)) == "white" else params.beta
                if not validate_move(t.balls[-1], ball, ratio):
                    raise ValueError(f"replay: illegal move at index {len(t.balls)}")
            t.balls.append(ball)
        return t


def _field_flag(spec: FieldSpec) -> str:
    if spec.r == 1:
        return str(spec.p)
    mod = "+".join(
        _mod_term(c, i)
        for i, c in reversed(list(enumerate(spec.modulus)))
        if c
    )
    return f"{spec.p}^{spec.r}:{mod}"


def _mod_term(c: int, i: int) -> str:
    if i == 0:
        return str(c)
    xs = "X" if i == 1 else f"X^{i}"
    return xs if c == 1 else f"{c}*{xs}"


@dataclass(frozen=True)
class StopRule:
    """Stop once either bound is met (checked after each of Black's moves)."""

    max_rounds: int | None = None
    radius_below: Fraction | None = None

    def met(self, transcript: GameTranscript) -> bool:
        if self.max_rounds is not None and transcript.full_rounds() >= self.max_rounds:
            return True
        if (
            self.radius_below is not None
            and transcript.last().radius < self.radius_below
        ):
            return True
        return False


def play(white, black, initial: FormalBall, params: GameParams, stop: StopRule) -> GameTranscript:
    """Run the alternating game; illegal proposals forfeit and end play.

    Strategies are objects with ``propose(transcript) -> FormalBall``; they
    see the full transcript (perfect information) and must be instantiated
    per game if they keep state.
    """
    t = GameTranscript(params, [initial])
    while not stop.met(t):
        w = white.propose(t)
        if not validate_move(t.last(), w, params.alpha):
            t.forfeit = IllegalMove("white", len(t.balls))
            return t
        t.balls.append(w)
        b = black.propose(t)
        if not validate_move(t.last(), b, params.beta):
            t.forfeit = IllegalMove("black", len(t.balls))
            return t
        t.balls.append(b)
    return t


def limit_point(t: GameTranscript, precision: int) -> SeriesMatrix:
    """The unique point of the intersection, truncated at exponent
    -precision; every returned coefficient is final."""
    last = canonicalize(t.last())
    e = last.effective_exponent()
    if e >= -precision:
        # one full round shrinks the radius by alpha*beta
        shrink = t.params.alpha * t.params.beta
        r = last.radius
        extra = 0
        while floor_log(r, t.params.spec.k) >= -precision:
            r *= shrink
            extra += 1
        raise InsufficientDepth(
            f"effective radius k^{e} is too coarse for precision {precision}",
            extra,
        )
    return last.center.map(lambda x: x.truncate_below(-precision))


# ---------------------------------------------------------------------------
# Basic strategies
# ---------------------------------------------------------------------------


class ConcentricStrategy:
    """Shrink in place; always legal, for either player."""

    name = "concentric"

    def __init__(self, ratio_key: str):
        self.ratio_key = ratio_key  # "alpha" or "beta"

    def propose(self, t: GameTranscript) -> FormalBall:
        prev = t.last()
        ratio = getattr(t.params, self.ratio_key)
        return FormalBall(prev.center, ratio * prev.radius)


def legal_center_shift_exponent(prev: FormalBall, ratio: Fraction) -> int:
    """Largest exponent g with k^g <= (1 - ratio) * radius: shifts of that
    norm keep the shrunken ball inside ``prev``."""
    return floor_log((1 - ratio) * prev.radius, prev.spec.k)


class RandomBlack:
    """Recenter by random coefficients on the legal k-grid."""

    name = "black-random"

    def __init__(self, seed: int, depth: int = 2):
        import random

        self.rng = random.Random(seed)
        self.depth = depth

    def propose(self, t: GameTranscript) -> FormalBall:
        prev = t.last()
        beta = t.params.beta
        spec = prev.spec
        g = legal_center_shift_exponent(prev, beta)
        rows = []
        for row in prev.center.entries:
            out = []
            for x in row:
                delta = {
                    g - i: self.rng.randrange(spec.k) for i in range(self.depth)
                }
                out.append(x + LaurentSeries(spec, delta))
            rows.append(out)
        ball = FormalBall(SeriesMatrix(spec, rows), beta * prev.radius)
        if not validate_move(prev, ball, beta):
            return FormalBall(prev.center, beta * prev.radius)
        return ball


class GreedyBlack:
    """Steer the limit toward a polynomial (a trivially well-approximable
    point) by zeroing the deepest coefficients it may legally touch."""

    name = "black-greedy"

    def propose(self, t: GameTranscript) -> FormalBall:
        prev = t.last()
        beta = t.params.beta
        g = legal_center_shift_exponent(prev, beta)
        center = prev.center.map(lambda x: x.truncate_below(g + 1))
        ball = FormalBall(center, beta * prev.radius)
        if not validate_move(prev, ball, beta):
            return FormalBall(prev.center, beta * prev.radius)
        return ball


class StdinBlack:
    """Debug aid: reads one center per move (matrix rows separated by ';',
    entries by ',') in the series grammar from a stream."""

    name = "black-stdin"

    def __init__(self, stream=None, echo=None):
        import sys

        self.stream = stream if stream is not None else sys.stdin
        self.echo = echo if echo is not None else sys.stderr

    def propose(self, t: GameTranscript) -> FormalBall:
        from .series import parse_matrix

        prev = t.last()
        beta = t.params.beta
        print(
            f"move {len(t.balls)}: radius {beta * prev.radius}; enter center",
            file=self.echo,
        )
        line = self.stream.readline()
        if not line.strip():
            return FormalBall(prev.center, beta * prev.radius)
        center = parse_matrix(line.strip(), prev.spec)
        return FormalBall(center, beta * prev.radius)


def unit_ball(spec: FieldSpec, m: int, n: int, radius: Fraction = Fraction(1)) -> FormalBall:
    return FormalBall(SeriesMatrix.zero(spec, m, n), radius)
