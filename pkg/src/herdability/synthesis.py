"""Discrete-time herding inputs, ``x(t+1) = A x(t) + B u(t)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix import InvalidInputError, SystemPair, Vector, controllability_matrix, to_rational, vec
from .positivity import HerdabilityVerdict, strictly_positive_in_image


class NotHerdableError(Exception):
    """Raised instead of a plan; ``verdict`` holds the dual certificate."""

    def __init__(self, verdict: HerdabilityVerdict):
        super().__init__("pair is not herdable")
        self.verdict = verdict


@dataclass(frozen=True)
class HerdingPlan:
    horizon: int
    inputs: tuple  # inputs[t] is the m-vector applied at time t
    threshold: Fraction
    predicted_final_state: Vector
    scale: Fraction


def simulate(pair: SystemPair, x0: Sequence, inputs: Sequence[Sequence]) -> list[Vector]:
    x = vec(x0)
    if len(x) != pair.n:
        raise InvalidInputError(f"x0 has length {len(x)}, expected {pair.n}")
    trajectory = [x]
    for t, u in enumerate(inputs):
        u = vec(u)
        if len(u) != pair.m:
            raise InvalidInputError(f"input {t} has length {len(u)}, expected {pair.m}")
        x = tuple(a + b for a, b in zip(pair.A.matvec(x), pair.B.matvec(u)))
        trajectory.append(x)
    return trajectory


def herding_input(pair: SystemPair, x0: Sequence, h) -> HerdingPlan:
    """Inputs over n steps driving ``x(n) >= h·1``.

    With ``R u = p >= 1`` from the positivity certificate, the stacked
    input ``α u`` gives ``x(n) = Aⁿ x0 + α p``; α is the smallest
    nonnegative scale that clears the threshold.  Block k of the stacked
    vector multiplies ``A^k B`` and is therefore applied at time n-1-k.
    """
    h = to_rational(h)
    if h <= 0:
        raise InvalidInputError("threshold must be positive")
    x0 = vec(x0)
    n, m = pair.n, pair.m
    if len(x0) != n:
        raise InvalidInputError(f"x0 has length {len(x0)}, expected {n}")
    R = controllability_matrix(pair)
    verdict = strictly_positive_in_image(R)
    if not verdict.herdable:
        raise NotHerdableError(verdict)
    u = verdict.primal_certificate
    p = R.matvec(u)

    free = x0
    for _ in range(n):
        free = pair.A.matvec(free)
    alpha = max([Fraction(0)] + [(h - f) / pi for f, pi in zip(free, p)])

    inputs = [None] * n
    for k in range(n):
        inputs[n - 1 - k] = tuple(alpha * x for x in u[k * m:(k + 1) * m])
    final = tuple(f + alpha * pi for f, pi in zip(free, p))
    return HerdingPlan(n, tuple(inputs), h, final, alpha)
