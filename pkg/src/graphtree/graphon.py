"""Step graphons on [0,1]: block partitions, refinements, and measure preserving relabelings.

A step graphon is constant on the products of finitely many interval blocks.
Blocks follow a single convention: block i is [b_i, b_{i+1}), except the last
block which is closed at 1. Breakpoints are plain 64-bit floats and all
comparisons are exact, so callers should supply exactly representable
breakpoints where boundary behavior matters; points falling on a block
boundary are a null set and never affect measure-level quantities.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError

__all__ = [
    "BlockPartition",
    "StepGraphon",
    "MeasurePreservingMap",
    "step_graphon_from_dict",
    "step_graphon_to_dict",
    "load_step_graphon",
    "save_step_graphon",
]


@dataclass(frozen=True)
class BlockPartition:
    """Interval partition of [0,1] given by breakpoints 0 = b_0 < b_1 < ... < b_k = 1."""

    breakpoints: tuple

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if len(bps) < 2:
            raise ValidationError("partition needs at least two breakpoints")
        if bps[0] != 0.0 or bps[-1] != 1.0:
            raise ValidationError(f"breakpoints must start at 0 and end at 1, got {bps[0]} .. {bps[-1]}")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ValidationError(f"breakpoints not strictly increasing at {a} >= {b}")

    @property
    def k(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints))

    def midpoints(self) -> np.ndarray:
        bp = np.asarray(self.breakpoints)
        return 0.5 * (bp[:-1] + bp[1:])

    def locate(self, x: float) -> int:
        """Index of the block containing x.

        Blocks are half open [b_i, b_{i+1}); x = 1 belongs to the last block.
        """
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"point {x!r} outside [0, 1]")
        if x == 1.0:
            return self.k - 1
        return bisect.bisect_right(self.breakpoints, x) - 1

    def locate_many(self, xs) -> np.ndarray:
        """Vectorized locate; must agree with locate elementwise."""
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise ValueError("points outside [0, 1]")
        idx = np.searchsorted(self.breakpoints, xs, side="right") - 1
        return np.where(xs == 1.0, self.k - 1, idx).astype(int)

    def refine(self, delta: float) -> "BlockPartition":
        """Split every block into equal pieces of length between delta and 2*delta.

        Each block of length L is cut into m = max(1, ceil(L / (2*delta)))
        equal pieces; every piece then lies inside exactly one original block.
        Infeasible when some block is already shorter than delta.
        """
        if delta <= 0:
            raise ValueError("delta must be positive")
        new = [0.0]
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            length = b - a
            if length < delta:
                raise ValueError(
                    f"block [{a}, {b}) has length {length} < delta={delta}; refinement infeasible"
                )
            m = max(1, math.ceil(length / (2.0 * delta)))
            for t in range(1, m):
                new.append(a + t * length / m)
            new.append(b)
        return BlockPartition(tuple(new))


@dataclass(frozen=True, eq=False)
class StepGraphon:
    """Piecewise constant symmetric function [0,1]^2 -> [0,1] on a block partition."""

    partition: BlockPartition
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        k = self.partition.k
        if vals.shape != (k, k):
            raise ValidationError(f"values must be {k}x{k}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("values must be finite")
        if vals.min() < 0.0 or vals.max() > 1.0:
            raise ValidationError("values must lie in [0, 1]")
        if not np.array_equal(vals, vals.T):
            raise ValidationError("values must be symmetric")
        vals.setflags(write=False)

    @property
    def k(self) -> int:
        return self.partition.k

    def eval(self, x: float, y: float) -> float:
        return float(self.values[self.partition.locate(x), self.partition.locate(y)])

    def eval_many(self, xs, ys) -> np.ndarray:
        ix = self.partition.locate_many(xs)
        iy = self.partition.locate_many(ys)
        return self.values[ix, iy]

    def pullback(self, phi: "MeasurePreservingMap") -> "StepGraphon":
        """The relabeled graphon W^phi with W^phi(x, y) = W(phi(x), phi(y)).

        For stretch_mod(m) the new partition is the common refinement of the
        phi-preimages of the original breakpoints; each new block takes the
        value of the original block its image falls in. The identity map
        returns self unchanged.
        """
        if phi.kind == "identity":
            return self
        m = phi.multiplier
        pre = {(b + t) / m for b in self.partition.breakpoints[:-1] for t in range(m)}
        pre.add(1.0)
        part = BlockPartition(tuple(sorted(pre)))
        orig = self.partition.locate_many(phi.apply_many(part.midpoints()))
        return StepGraphon(part, self.values[np.ix_(orig, orig)])


@dataclass(frozen=True)
class MeasurePreservingMap:
    """A measure preserving transformation of [0,1].

    Supported kinds: "identity" and "stretch_mod" (x -> (m*x) mod 1). The tag
    is extensible; every kind must preserve interval measure exactly.
    """

    kind: str
    multiplier: int = 1

    def __post_init__(self):
        if self.kind not in ("identity", "stretch_mod"):
            raise ValidationError(f"unknown map kind {self.kind!r}")
        if not isinstance(self.multiplier, int) or self.multiplier < 1:
            raise ValidationError("multiplier must be a positive integer")
        if self.kind == "identity" and self.multiplier != 1:
            raise ValidationError("identity map has no multiplier")

    @classmethod
    def identity(cls) -> "MeasurePreservingMap":
        return cls("identity")

    @classmethod
    def stretch_mod(cls, m: int) -> "MeasurePreservingMap":
        return cls("stretch_mod", m)

    def apply(self, x: float) -> float:
        # x = 1 maps to 1, not 0: the point 1 belongs to the last block
        # everywhere in this package, and the wrap would break the pointwise
        # pullback identity there (a null set, but cheap to get right)
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"point {x!r} outside [0, 1]")
        if self.kind == "identity" or x == 1.0:
            return x
        return (self.multiplier * x) % 1.0

    def apply_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == "identity":
            return xs
        return np.where(xs == 1.0, 1.0, np.mod(self.multiplier * xs, 1.0))

    def preimage_intervals(self, a, b):
        """Preimage of [a, b) as a list of disjoint (lo, hi) Fractions.

        Exact rational arithmetic; the total preimage length equals b - a,
        which is the measure preservation property tests rely on.
        """
        a, b = Fraction(a), Fraction(b)
        if not 0 <= a < b <= 1:
            raise ValueError("need 0 <= a < b <= 1")
        if self.kind == "identity":
            return [(a, b)]
        m = self.multiplier
        return [((a + t) / m, (b + t) / m) for t in range(m)]


def step_graphon_to_dict(w: StepGraphon) -> dict:
    return {
        "breakpoints": list(w.partition.breakpoints),
        "values": [[float(v) for v in row] for row in w.values],
    }


def step_graphon_from_dict(d) -> StepGraphon:
    """Build a step graphon from {"breakpoints": [...], "values": [[...]]}; strict validation."""
    if not isinstance(d, dict):
        raise ValidationError("graphon document must be a JSON object")
    extra = set(d) - {"breakpoints", "values"}
    if extra:
        raise ValidationError(f"unknown keys in graphon document: {sorted(extra)}")
    if "breakpoints" not in d or "values" not in d:
        raise ValidationError('graphon document needs "breakpoints" and "values"')
    bps = d["breakpoints"]
    vals = d["values"]
    if not isinstance(bps, list) or not all(isinstance(b, (int, float)) for b in bps):
        raise ValidationError("breakpoints must be a list of numbers")
    if not isinstance(vals, list) or not all(isinstance(row, list) for row in vals):
        raise ValidationError("values must be a list of rows")
    k = len(bps) - 1
    if any(len(row) != k for row in vals) or len(vals) != k:
        raise ValidationError(f"values must be a {k}x{k} matrix")
    for row in vals:
        if not all(isinstance(v, (int, float)) for v in row):
            raise ValidationError("values must be numbers")
    return StepGraphon(BlockPartition(tuple(bps)), np.asarray(vals, dtype=float))


def load_step_graphon(path) -> StepGraphon:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON: {e}") from e
    return step_graphon_from_dict(doc)


def save_step_graphon(w: StepGraphon, path) -> None:
    with open(path, "w") as fh:
        json.dump(step_graphon_to_dict(w), fh, indent=2, sort_keys=True)
        fh.write("\n")
