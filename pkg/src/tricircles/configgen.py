"""Deterministic configuration generators and exact JSON serialization."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .counting import Configuration
from .geometry import Point
from .polys import InvalidInputError

__all__ = ["GeneratorSpec", "KINDS", "ParseError", "dumps", "generate", "load", "save"]

KINDS = (
    "random-uniform",
    "golden",
    "golden-replicated",
    "tangent-circles",
    "grid-orientations",
    "from-file",
)

SCHEMA_VERSION = 1
_DENOM = 1024

GOLDEN_CENTERS = (
    Point(Fraction(1), Fraction(1)),
    Point(Fraction(-1), Fraction(1)),
    Point(Fraction(0), Fraction(2)),
)
GOLDEN_THETAS = (
    (Fraction(-1), Fraction(1, 2)),
    (Fraction(-1), Fraction(1, 2)),
    (Fraction(-1),),
)

# C1 and C3 exactly tangent (center distance 2); C2 close enough to interact
TANGENT_CENTERS = (
    Point(Fraction(0), Fraction(0)),
    Point(Fraction(1), Fraction(3, 2)),
    Point(Fraction(2), Fraction(0)),
)


class ParseError(ValueError):
    """A configuration file failed to parse or validate."""


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int = 8
    seed: int = 0
    centers: Optional[tuple[Point, Point, Point]] = None
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown generator kind {self.kind!r}")
        if self.n < 0:
            raise InvalidInputError("n must be >= 0")


def _check_centers(centers) -> tuple[Point, Point, Point]:
    c1, c2, c3 = centers
    for a, b in ((c1, c2), (c1, c3), (c2, c3)):
        if (a - b).norm2() >= 16:
            raise InvalidInputError(
                "infeasible center placement: pairwise distance must stay below 4"
            )
    return (c1, c2, c3)


def _distinct_uniform(rng: random.Random, n: int, taken=()) -> tuple[Fraction, ...]:
    seen = set(taken)
    out = list(taken)
    while len(out) < n:
        t = Fraction(rng.randint(-_DENOM, _DENOM), _DENOM)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return tuple(out)


def generate(spec: GeneratorSpec) -> Configuration:
    """Deterministic per (kind, n, seed); see KINDS for the menu."""
    if spec.kind == "from-file":
        if not spec.path:
            raise InvalidInputError("from-file generator needs a path")
        return load(spec.path)
    if spec.kind == "golden":
        c1, c2, c3 = _check_centers(GOLDEN_CENTERS)
        th1, th2, th3 = GOLDEN_THETAS
        return Configuration(c1, c2, c3, th1, th2, th3)

    centers = _check_centers(spec.centers or _default_centers(spec.kind))
    rng = random.Random(spec.seed)
    if spec.kind in ("random-uniform", "tangent-circles"):
        thetas = tuple(_distinct_uniform(rng, spec.n) for _ in range(3))
    elif spec.kind == "golden-replicated":
        thetas = tuple(
            _distinct_uniform(rng, max(spec.n, len(base)), taken=base)
            for base in GOLDEN_THETAS
        )
    elif spec.kind == "grid-orientations":
        # deterministic per-circle spacings; no randomness involved
        thetas = tuple(
            tuple(Fraction(2 * k - spec.n - 1, spec.n + 1 + idx) for k in range(1, spec.n + 1))
            for idx in range(3)
        )
    else:  # pragma: no cover
        raise InvalidInputError(f"unhandled kind {spec.kind!r}")
    c1, c2, c3 = centers
    return Configuration(c1, c2, c3, *thetas)


def _default_centers(kind: str):
    if kind == "tangent-circles":
        return TANGENT_CENTERS
    if kind == "golden-replicated":
        return GOLDEN_CENTERS
    return GOLDEN_CENTERS


def _rat_str(v: Fraction) -> str:
    return str(Fraction(v))


def _parse_rat(text, where: str) -> Fraction:
    if not isinstance(text, str):
        raise ParseError(f"{where}: expected a rational string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: invalid rational {text!r} ({exc})") from None


def dumps(cfg: Configuration) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "c1": [_rat_str(cfg.c1.x), _rat_str(cfg.c1.y)],
        "c2": [_rat_str(cfg.c2.x), _rat_str(cfg.c2.y)],
        "c3": [_rat_str(cfg.c3.x), _rat_str(cfg.c3.y)],
        "theta1": [_rat_str(t) for t in cfg.theta1],
        "theta2": [_rat_str(t) for t in cfg.theta2],
        "theta3": [_rat_str(t) for t in cfg.theta3],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save(cfg: Configuration, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cfg))


def load(path: str) -> Configuration:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    if doc.get("version") != SCHEMA_VERSION:
        raise ParseError(f"{path}: unsupported version {doc.get('version')!r}")
    for key in ("c1", "c2", "c3", "theta1", "theta2", "theta3"):
        if key not in doc:
            raise ParseError(f"{path}: missing field {key!r}")
    centers = []
    for key in ("c1", "c2", "c3"):
        pair = doc[key]
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{path}: {key} must be a [x, y] pair")
        centers.append(
            Point(_parse_rat(pair[0], f"{key}[0]"), _parse_rat(pair[1], f"{key}[1]"))
        )
    thetas = []
    for key in ("theta1", "theta2", "theta3"):
        vals = doc[key]
        if not isinstance(vals, list):
            raise ParseError(f"{path}: {key} must be a list")
        thetas.append(tuple(_parse_rat(v, f"{key}[{i}]") for i, v in enumerate(vals)))
    try:
        return Configuration(centers[0], centers[1], centers[2], *thetas)
    except InvalidInputError as exc:
        raise ParseError(f"{path}: {exc}") from None
