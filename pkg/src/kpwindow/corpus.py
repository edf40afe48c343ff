"""Named windowed subspaces and seeded random ones.

These are the subspaces ``kpwindow selfcheck`` runs the cohomology identities
on. Tail thresholds are written for whole lines ``d(n) = slope n + intercept``
and copied onto the box levels, so the boundary modes continue them.
"""
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from kpwindow.subspace import (
    FULL,
    AffineMode,
    BoundaryMode,
    Empty,
    Full,
    MonomialBox,
    Threshold,
    WindowedSubspace,
)

DEFAULT_BOX = MonomialBox(-3, 3, -4, 4)


def _levels(box: MonomialBox, rule: Callable[[int], Threshold]) -> Dict[int, Threshold]:
    return {n: rule(n) for n in box.levels() if rule(n) is not None}


def projective_plane(box: MonomialBox = DEFAULT_BOX) -> WindowedSubspace:
    """u^a t^n with a + n <= 0: one global section and nothing else."""
    mode = AffineMode(-1, 0)
    return WindowedSubspace(box, (), [_levels(box, lambda n: -n)], mode, mode)


def first_cohomology_algebra(box: MonomialBox = DEFAULT_BOX) -> WindowedSubspace:
    """span{1, u^-1 + t^-1} + {a <= -n - 2}: an algebra with h1 = 1."""
    mode = AffineMode(-1, -2)
    generators = [{(0, 0, 0): Fraction(1)}, {(0, -1, 0): Fraction(1), (-1, 0, 0): Fraction(1)}]
    return WindowedSubspace(box, generators, [_levels(box, lambda n: -n - 2)], mode, mode)


def _brauer_threshold(n: int) -> int:
    if n <= -2:
        return -n
    if n == -1:
        return -2
    return -4 * n


def brauer_algebra(box: MonomialBox = DEFAULT_BOX) -> WindowedSubspace:
    """A monomial algebra missing u^-1 t^-1 from O1 + O2: h2 = 1."""
    return WindowedSubspace(
        box, (), [_levels(box, _brauer_threshold)], AffineMode(-1, 0), AffineMode(-4, 0)
    )


def single_generator(box: MonomialBox = DEFAULT_BOX) -> WindowedSubspace:
    """span{u^-1 + t^-1} without tails."""
    return WindowedSubspace(box, [{(0, -1, 0): Fraction(1), (-1, 0, 0): Fraction(1)}])


def field_window(box: MonomialBox = DEFAULT_BOX) -> WindowedSubspace:
    """Every monomial of the box levels and below."""
    return WindowedSubspace(box, (), [{n: FULL for n in box.levels()}], Full, Empty)


def zero_subspace(box: MonomialBox = DEFAULT_BOX) -> WindowedSubspace:
    return WindowedSubspace(box)


def named_subspaces() -> Dict[str, WindowedSubspace]:
    return {
        "projective_plane": projective_plane(),
        "first_cohomology_algebra": first_cohomology_algebra(),
        "brauer_algebra": brauer_algebra(),
        "single_generator": single_generator(),
        "zero": zero_subspace(),
    }


def _random_box(rng: random.Random, rank: int) -> MonomialBox:
    return MonomialBox(-rng.randint(1, 3), rng.randint(1, 3), -rng.randint(1, 3), rng.randint(1, 3), rank)


def _random_modes(rng: random.Random, certified: bool) -> Tuple[BoundaryMode, BoundaryMode]:
    low_choices: List[BoundaryMode] = [Full, AffineMode(-1, rng.randint(-2, 1))]
    high_choices: List[BoundaryMode] = [Empty, AffineMode(-1, rng.randint(-3, 1))]
    if not certified:
        low_choices.append(Empty)
        high_choices.append(AffineMode(0, rng.randint(-1, 1)))
    return rng.choice(low_choices), rng.choice(high_choices)


def random_subspace(
    rng: random.Random,
    rank: int = 1,
    certified: bool = True,
    monomial_generators: bool = False,
    max_generators: int = 3,
) -> WindowedSubspace:
    """A small random subspace; ``certified`` keeps every dimension finite."""
    box = _random_box(rng, rank)
    thresholds = []
    low_modes, high_modes = [], []
    for _ in range(rank):
        levels: Dict[int, Optional[int]] = {}
        for n in box.levels():
            if n < 0 and certified:
                levels[n] = rng.randint(box.u_lo - 2, box.u_hi)
            elif rng.random() < 0.3:
                levels[n] = None
            else:
                levels[n] = rng.randint(box.u_lo - 2, box.u_hi + 1)
        thresholds.append(levels)
        low, high = _random_modes(rng, certified)
        low_modes.append(low)
        high_modes.append(high)

    monomials = box.monomials()
    generators = []
    for _ in range(rng.randint(0, max_generators)):
        size = 1 if monomial_generators else rng.randint(1, 3)
        vector = {}
        for m in rng.sample(monomials, size):
            vector[m] = Fraction(rng.choice([-2, -1, 1, 2, 3]))
        generators.append(vector)
    return WindowedSubspace(box, generators, thresholds, tuple(low_modes), tuple(high_modes))


def random_corpus(seed: int, size: int, certified: bool = True) -> List[WindowedSubspace]:
    rng = random.Random(seed)
    return [random_subspace(rng, rank=rng.choice([1, 1, 2]), certified=certified) for _ in range(size)]
