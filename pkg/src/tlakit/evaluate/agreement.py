"""Free-marginal multirater kappa for categorical judgments."""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from ..corpus import InputError, _read_lines


@dataclass(frozen=True)
class JudgmentMatrix:
    """Items x raters labels drawn from ``categories``."""

    labels: tuple[tuple[str, ...], ...]
    categories: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.categories)) != len(self.categories):
            raise ValueError("duplicate category names")
        if len(self.categories) < 2:
            raise ValueError("need at least 2 categories")
        if not self.labels:
            raise ValueError("no judged items")
        n = len(self.labels[0])
        if n < 2:
            raise ValueError("need at least 2 raters")
        allowed = set(self.categories)
        for k, row in enumerate(self.labels):
            if len(row) != n:
                raise ValueError(f"item {k} has {len(row)} labels, expected {n}")
            bad = [x for x in row if x not in allowed]
            if bad:
                raise ValueError(f"item {k}: label {bad[0]!r} not in the declared categories")

    @property
    def n_raters(self) -> int:
        return len(self.labels[0])


def free_marginal_kappa(matrix: JudgmentMatrix) -> float:
    k = len(matrix.categories)
    n = matrix.n_raters
    per_item = []
    for row in matrix.labels:
        counts = Counter(row)
        per_item.append(sum(c * (c - 1) for c in counts.values()) / (n * (n - 1)))
    observed = sum(per_item) / len(per_item)
    chance = 1.0 / k
    return (observed - chance) / (1.0 - chance)


def parse_judgments(lines: Sequence[str], source: str = "<judgments>") -> JudgmentMatrix:
    categories = None
    rows = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            if key.strip() == "categories":
                categories = tuple(c.strip() for c in value.split(",") if c.strip())
            continue
        if not line.strip():
            continue
        rows.append(tuple(c.strip() for c in line.split("\t")))
    if categories is None:
        raise InputError(f"{source}: missing '#categories:' header")
    try:
        return JudgmentMatrix(tuple(rows), categories)
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_judgments(path: str | Path) -> JudgmentMatrix:
    return parse_judgments(_read_lines(path), str(path))
