"""Shared fixtures and random generators for the test suite."""

from __future__ import annotations

import random

from loomcode.model import (
    Palette,
    ParticipantRecord,
    Questionnaire,
    YarnColor,
    question,
    squared_distance,
)

CRIMSON = YarnColor("Crimson", (220, 50, 47))
GOLD = YarnColor("Gold", (240, 200, 60))
AZURE = YarnColor("Azure", (38, 100, 200))
FERN = YarnColor("Fern", (60, 170, 70))
PLUM = YarnColor("Plum", (120, 40, 160))
STONE = YarnColor("Stone", (128, 128, 128))
NATURAL = YarnColor("Natural", (242, 238, 230))


def desk_questionnaire() -> Questionnaire:
    labels = ["Low", "Medium", "High"]
    return Questionnaire("desk", "Desk check-in", [
        question("q1", "How connected do you feel today?", labels),
        question("q2", "How rested do you feel?", labels),
        question("q3", "How hopeful are you about this week?", labels),
    ])


def desk_palette() -> Palette:
    return Palette(option_colors=[CRIMSON, GOLD, AZURE], boundary=STONE, warp=NATURAL)


def desk_records() -> list[ParticipantRecord]:
    return [ParticipantRecord("A", [0, 1, 2]), ParticipantRecord("B", [2, 2, 0])]


def group_questionnaire() -> Questionnaire:
    labels = ["Never", "Rarely", "Sometimes", "Often", "Always"]
    questions = [question(f"q{i + 1}", f"Well-being prompt {i + 1}", labels) for i in range(8)]
    return Questionnaire("group28", "Group well-being check-in", questions)


def group_palette() -> Palette:
    return Palette(option_colors=[CRIMSON, GOLD, AZURE, FERN, PLUM], boundary=STONE, warp=NATURAL)


def group_records(rng: random.Random | None = None) -> list[ParticipantRecord]:
    rng = rng or random.Random(28)
    return [ParticipantRecord(f"r{i + 1}", [rng.randrange(5) for _ in range(8)])
            for i in range(28)]


def random_separated_colors(rng: random.Random, count: int, min_distance: float = 64.0) -> list[tuple[int, int, int]]:
    """Rejection-sample RGB colors with pairwise Euclidean distance >= min_distance."""
    min_sq = min_distance * min_distance
    colors: list[tuple[int, int, int]] = []
    attempts = 0
    while len(colors) < count:
        candidate = (rng.randrange(256), rng.randrange(256), rng.randrange(256))
        attempts += 1
        if attempts > 20000:
            raise RuntimeError("could not place separated colors")
        if all(squared_distance(candidate, c) >= min_sq and candidate != c for c in colors):
            colors.append(candidate)
    return colors


def random_palette(rng: random.Random, n_options: int, min_distance: float = 64.0) -> Palette:
    rgbs = random_separated_colors(rng, n_options + 1, min_distance)
    return Palette(
        option_colors=[YarnColor(f"yarn{i}", rgb) for i, rgb in enumerate(rgbs[:-1])],
        boundary=YarnColor("Boundary", rgbs[-1]),
        warp=YarnColor("Warp", (rng.randrange(256), rng.randrange(256), rng.randrange(256))),
    )


def random_session(
    rng: random.Random,
    p_range: tuple[int, int] = (0, 40),
    q_range: tuple[int, int] = (1, 12),
    opt_range: tuple[int, int] = (2, 6),
    min_distance: float = 64.0,
) -> tuple[Questionnaire, Palette, list[ParticipantRecord]]:
    n_questions = rng.randint(*q_range)
    option_counts = [rng.randint(*opt_range) for _ in range(n_questions)]
    questionnaire = Questionnaire("rand", "Randomized session", [
        question(f"q{i + 1}", f"Prompt {i + 1}", [f"opt{k}" for k in range(count)])
        for i, count in enumerate(option_counts)
    ])
    palette = random_palette(rng, max(option_counts), min_distance)
    n_participants = rng.randint(*p_range)
    records = [
        ParticipantRecord(f"part{i + 1}", [rng.randrange(count) for count in option_counts])
        for i in range(n_participants)
    ]
    return questionnaire, palette, records
