"""Exact Dempster-Shafer kernel over small finite frames.

Mass functions are kept normalized: no mass on the empty set, masses
summing to one. Subsets of the frame are plain integer bitmasks, which
keeps set algebra exact and cheap for frames up to 30 elements. All
mass accumulation goes through math.fsum so that combination results
do not depend on operand order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

MAX_FRAME = 30
MASS_TOL = 1e-12
PRUNE_EPS = 1e-15
_CLAMP_SLACK = 1e-9


class EvidenceError(ValueError):
    """Invalid evidence operation: bad masses, frame mismatch, bad subset."""


class TotalConflictError(EvidenceError):
    """Combination left no surviving mass (conflict k = 1)."""


@dataclass(frozen=True)
class Frame:
    """Ordered frame of discernment; element i maps to bit (1 << i)."""

    elements: tuple[str, ...]

    def __init__(self, elements: Iterable[str]):
        object.__setattr__(self, "elements", tuple(elements))
        if not self.elements:
            raise EvidenceError("frame must not be empty")
        if len(self.elements) > MAX_FRAME:
            raise EvidenceError(
                f"frame has {len(self.elements)} elements, limit is {MAX_FRAME}"
            )
        if len(set(self.elements)) != len(self.elements):
            raise EvidenceError("frame elements must be unique")

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def full(self) -> int:
        """Bitmask of the whole frame."""
        return (1 << len(self.elements)) - 1

    def subset(self, labels: Iterable[str]) -> int:
        """Bitmask for a collection of element labels."""
        mask = 0
        for label in labels:
            try:
                mask |= 1 << self.elements.index(label)
            except ValueError:
                raise EvidenceError(f"unknown frame element {label!r}") from None
        return mask

    def labels(self, mask: int) -> tuple[str, ...]:
        """Element labels present in a bitmask."""
        self._check_mask(mask)
        return tuple(
            e for i, e in enumerate(self.elements) if mask & (1 << i)
        )

    def _check_mask(self, mask: int) -> None:
        if not isinstance(mask, int) or mask < 0 or mask > self.full:
            raise EvidenceError(f"subset mask {mask!r} outside frame")


@dataclass(frozen=True)
class EvidenceInterval:
    """Support / plausibility pair with 0 <= support <= plausibility <= 1."""

    support: float
    plausibility: float

    def __post_init__(self):
        s = _clamp_unit(self.support, "support")
        p = _clamp_unit(self.plausibility, "plausibility")
        if s > p + _CLAMP_SLACK:
            raise EvidenceError(f"support {s} exceeds plausibility {p}")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "plausibility", min(p, 1.0) if s <= p else s)

    @property
    def uncertainty(self) -> float:
        return self.plausibility - self.support


def _clamp_unit(x: float, name: str) -> float:
    if not math.isfinite(x):
        raise EvidenceError(f"{name} must be finite, got {x}")
    if -_CLAMP_SLACK <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + _CLAMP_SLACK:
        return 1.0
    if x < 0.0 or x > 1.0:
        raise EvidenceError(f"{name} {x} outside [0, 1]")
    return x


class MassFunction:
    """Normalized basic mass assignment over a Frame.

    Treated as an immutable value: operations return new instances.
    """

    __slots__ = ("frame", "masses")

    def __init__(self, frame: Frame, masses: Mapping[int, float]):
        cleaned: dict[int, float] = {}
        for subset, mass in masses.items():
            frame._check_mask(subset)
            if subset == 0:
                raise EvidenceError("mass on the empty set is not allowed")
            if mass < 0.0:
                raise EvidenceError(f"negative mass {mass} on subset {subset}")
            if mass == 0.0:
                continue
            cleaned[subset] = cleaned.get(subset, 0.0) + mass
        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > MASS_TOL:
            raise EvidenceError(f"masses sum to {total}, expected 1")
        self.frame = frame
        self.masses = cleaned

    @classmethod
    def vacuous(cls, frame: Frame) -> "MassFunction":
        return cls(frame, {frame.full: 1.0})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MassFunction)
            and self.frame == other.frame
            and self.masses == other.masses
        )

    def __repr__(self) -> str:
        cells = ", ".join(
            f"{{{','.join(self.frame.labels(s))}}}: {m:.6g}"
            for s, m in sorted(self.masses.items())
        )
        return f"MassFunction({cells})"

    def focal_sets(self) -> list[int]:
        return sorted(self.masses)

    def bel(self, hypothesis: int) -> float:
        """Total mass of focal sets contained in the hypothesis."""
        self.frame._check_mask(hypothesis)
        if hypothesis == 0:
            raise EvidenceError("hypothesis must be non-empty")
        return _clamp_unit(
            math.fsum(m for s, m in self.masses.items() if s & ~hypothesis == 0),
            "support",
        )

    def pl(self, hypothesis: int) -> float:
        """Total mass of focal sets intersecting the hypothesis."""
        self.frame._check_mask(hypothesis)
        if hypothesis == 0:
            raise EvidenceError("hypothesis must be non-empty")
        return _clamp_unit(
            math.fsum(m for s, m in self.masses.items() if s & hypothesis),
            "plausibility",
        )

    def prune(self, eps: float = PRUNE_EPS) -> "MassFunction":
        """Drop focal masses below eps and renormalize."""
        kept = {s: m for s, m in self.masses.items() if m >= eps}
        if not kept:
            raise TotalConflictError("pruning removed all mass")
        total = math.fsum(kept.values())
        return MassFunction(
            self.frame, {s: m / total for s, m in kept.items()}
        )

    def to_debug_dict(self) -> dict[str, float]:
        return {
            ",".join(self.frame.labels(s)): m
            for s, m in sorted(self.masses.items())
        }


def simple_support(frame: Frame, focal: int | Iterable[str], p: float) -> MassFunction:
    """Mass p on one focal subset, remainder on the whole frame."""
    if not isinstance(focal, int):
        focal = frame.subset(focal)
    frame._check_mask(focal)
    if focal == 0:
        raise EvidenceError("focal subset must be non-empty")
    if not 0.0 <= p <= 1.0:
        raise EvidenceError(f"support value {p} outside [0, 1]")
    if p == 0.0 or focal == frame.full:
        return MassFunction.vacuous(frame)
    if p == 1.0:
        return MassFunction(frame, {focal: 1.0})
    return MassFunction(frame, {focal: p, frame.full: 1.0 - p})


def combine(a: MassFunction, b: MassFunction) -> tuple[MassFunction, float]:
    """Dempster's rule: product-intersection, renormalized.

    Returns the combined mass function and the conflict k (the product
    mass that fell on the empty set). Per-cell sums use fsum over the
    collected products, so the result is independent of operand order.
    """
    if a.frame != b.frame:
        raise EvidenceError("cannot combine mass functions over different frames")
    buckets: dict[int, list[float]] = {}
    for sa, ma in a.masses.items():
        for sb, mb in b.masses.items():
            buckets.setdefault(sa & sb, []).append(ma * mb)
    conflict = math.fsum(buckets.pop(0, ()))
    surviving = {s: math.fsum(chunk) for s, chunk in buckets.items()}
    total = math.fsum(surviving.values())
    if total <= 0.0:
        raise TotalConflictError("combination is totally conflicting (k = 1)")
    combined = MassFunction(
        a.frame, {s: m / total for s, m in surviving.items()}
    )
    if any(m < PRUNE_EPS for m in combined.masses.values()):
        combined = combined.prune()
    return combined, conflict


def combine_all(ms: Sequence[MassFunction]) -> tuple[MassFunction, float]:
    """Fold combine over a sequence; cumulative conflict against the raw
    product measure, k = 1 - prod(1 - k_step)."""
    if not ms:
        raise EvidenceError("combine_all needs at least one mass function")
    acc = ms[0]
    survival = 1.0
    for m in ms[1:]:
        acc, k = combine(acc, m)
        survival *= 1.0 - k
    return acc, 1.0 - survival


def interval(m: MassFunction, hypothesis: int | Iterable[str]) -> EvidenceInterval:
    """Evidence interval [support, plausibility] for a hypothesis subset."""
    if not isinstance(hypothesis, int):
        hypothesis = m.frame.subset(hypothesis)
    return EvidenceInterval(m.bel(hypothesis), m.pl(hypothesis))
