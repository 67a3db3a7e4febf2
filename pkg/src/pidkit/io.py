"""Plain-text and JSON serialisation of joint distributions.

Text format::

    # comment
    vars 3
    cards 2 2 2
    target 3        # optional, 1-based; defaults to the last variable
    0 0 0 0.5
    1 1 1 0.5

One row per outcome: ``k`` values then a probability. Omitted outcomes have
probability zero.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .dist import DistributionError, JointDistribution

PathLike = Union[str, Path]


class DistributionFileError(DistributionError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _ints(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DistributionFileError(f"{what} must be integers", lineno) from None


def parse_distribution(text: str) -> JointDistribution:
    nvars = cards = target = None
    rows: dict[tuple[int, ...], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0].lower()
        if key == "vars":
            if nvars is not None or len(tokens) != 2:
                raise DistributionFileError("expected a single 'vars k' line", lineno)
            (nvars,) = _ints(tokens[1:], lineno, "vars")
            if nvars < 1:
                raise DistributionFileError("vars must be >= 1", lineno)
        elif key == "cards":
            if nvars is None:
                raise DistributionFileError("'cards' must follow 'vars'", lineno)
            cards = _ints(tokens[1:], lineno, "cards")
            if len(cards) != nvars or any(c < 1 for c in cards):
                raise DistributionFileError(f"expected {nvars} positive cardinalities", lineno)
        elif key == "target":
            if cards is None or len(tokens) != 2:
                raise DistributionFileError("'target j' must follow 'cards' and name one variable", lineno)
            (target,) = _ints(tokens[1:], lineno, "target")
            if not 1 <= target <= nvars:
                raise DistributionFileError(f"target must be in 1..{nvars}", lineno)
        else:
            if cards is None:
                raise DistributionFileError("outcome rows must follow 'vars' and 'cards'", lineno)
            if len(tokens) != nvars + 1:
                raise DistributionFileError(f"expected {nvars} values and a probability", lineno)
            values = tuple(_ints(tokens[:-1], lineno, "outcome values"))
            for v, c in zip(values, cards):
                if not 0 <= v < c:
                    raise DistributionFileError(f"value {v} outside alphabet 0..{c - 1}", lineno)
            try:
                p = float(tokens[-1])
            except ValueError:
                raise DistributionFileError(f"bad probability {tokens[-1]!r}", lineno) from None
            if not np.isfinite(p) or p < 0:
                raise DistributionFileError("probabilities must be finite and non-negative", lineno)
            if values in rows:
                raise DistributionFileError(f"duplicate outcome {values}", lineno)
            rows[values] = p
    if cards is None:
        raise DistributionFileError("missing 'vars' / 'cards' header")
    if not rows:
        raise DistributionFileError("no outcome rows")
    table = np.zeros(cards)
    for values, p in rows.items():
        table[values] = p
    target_index = (target - 1) if target is not None else nvars - 1
    try:
        return JointDistribution(table, target_index=target_index)
    except DistributionError as exc:
        raise DistributionFileError(str(exc)) from None


def load_distribution(path: PathLike) -> JointDistribution:
    """Read a distribution file; a ``.json`` suffix selects the JSON format."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return distribution_from_json(text)
    return parse_distribution(text)


def format_distribution(d: JointDistribution) -> str:
    lines = [f"vars {d.ndim}", "cards " + " ".join(str(c) for c in d.cardinalities)]
    if d.target_index is not None and d.target_index != d.ndim - 1:
        lines.append(f"target {d.target_index + 1}")
    for outcome in d.support():
        lines.append(" ".join(str(v) for v in outcome) + " " + format(float(d.probs[outcome]), ".17g"))
    return "\n".join(lines) + "\n"


def save_distribution(d: JointDistribution, path: PathLike) -> None:
    path = Path(path)
    text = distribution_to_json(d) if path.suffix.lower() == ".json" else format_distribution(d)
    path.write_text(text, encoding="utf-8")


def distribution_to_json(d: JointDistribution) -> str:
    doc = {
        "vars": d.ndim,
        "cards": list(d.cardinalities),
        "target": None if d.target_index is None else d.target_index + 1,
        "labels": list(d.labels),
        "rows": [list(o) + [float(d.probs[o])] for o in d.support()],
    }
    return json.dumps(doc, indent=2) + "\n"


def distribution_from_json(text: str) -> JointDistribution:
    try:
        doc = json.loads(text)
        cards = [int(c) for c in doc["cards"]]
        rows = doc["rows"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DistributionFileError(f"invalid JSON distribution: {exc}") from None
    if int(doc.get("vars", len(cards))) != len(cards):
        raise DistributionFileError("'vars' does not match the number of cardinalities")
    table = np.zeros(cards)
    seen = set()
    for i, row in enumerate(rows):
        if len(row) != len(cards) + 1:
            raise DistributionFileError(f"row {i} has the wrong length")
        values = tuple(int(v) for v in row[:-1])
        if any(not 0 <= v < c for v, c in zip(values, cards)):
            raise DistributionFileError(f"row {i}: value outside the alphabet")
        if values in seen:
            raise DistributionFileError(f"duplicate outcome {values}")
        seen.add(values)
        table[values] = float(row[-1])
    target = doc.get("target", len(cards))
    return JointDistribution(table, target_index=None if target is None else int(target) - 1,
                             labels=doc.get("labels"))
