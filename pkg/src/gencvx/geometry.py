"""Convex sampling regions, points, and segment geometry.

A region is an axis-aligned bounding box (the sampling window) intersected
with affine halfspace constraints ``<a, x> REL c`` where ``REL`` is ``<`` or
``<=``.  Open faces are handled through a positive sampling margin: every
sampled point satisfies each constraint, and each box face, with slack at
least ``margin``.  This keeps all evaluations inside an open neighbourhood
where the analysed functions are locally Lipschitz, away from boundary
singularities.
"""

from __future__ import annotations

from dataclasses import dataclass
import re

import numpy as np

__all__ = [
    "RegionError",
    "RegionTooThinError",
    "AffineConstraint",
    "Region",
    "Segment",
    "as_point",
    "segment_point",
    "sample_region",
    "parse_region",
]

# Default sampling margin, as a fraction of the bounding-box diagonal.
DEFAULT_MARGIN_FRACTION = 0.05

# Rejection-sampling failure rule: below this acceptance rate after at least
# _MIN_ATTEMPTS draws the region is declared too thin to sample.
_MIN_ACCEPT_RATE = 1e-3
_MIN_ATTEMPTS = 1_000_000
_BATCH = 8192

# Budget for the construction-time feasibility probe.
_PROBE_ATTEMPTS = 262_144
_PROBE_SEED = 0x5EED_0F_0D


class RegionError(ValueError):
    """Malformed region description."""


class RegionTooThinError(RegionError):
    """The region admits (almost) no interior points at the margin."""


def as_point(coords) -> np.ndarray:
    """Validate and freeze a coordinate vector.

    Returns a read-only 1-D float64 array.  Rejects empty vectors and any
    non-finite coordinate.
    """
    arr = np.array(coords, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("point must have dimension > 0")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite coordinates: {arr}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class AffineConstraint:
    """Halfspace ``<coeffs, x> REL bound`` with REL in {'<', '<='}."""

    coeffs: np.ndarray
    relation: str
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_point(self.coeffs))
        if self.relation not in ("<", "<="):
            raise RegionError(f"constraint relation must be '<' or '<=', got {self.relation!r}")
        if not np.isfinite(self.bound):
            raise RegionError("constraint bound must be finite")
        if float(np.max(np.abs(self.coeffs))) == 0.0:
            raise RegionError("constraint coefficients are all zero")

    def slack(self, x: np.ndarray) -> float:
        return self.bound - float(np.dot(self.coeffs, x))

    def satisfied(self, x: np.ndarray, margin: float = 0.0) -> bool:
        s = self.slack(x)
        return s > margin if self.relation == "<" else s >= margin

    def text(self, names: list[str] | None = None) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            name = names[i] if names else f"x{i + 1}"
            if c == 1.0:
                terms.append(f"+ {name}")
            elif c == -1.0:
                terms.append(f"- {name}")
            else:
                terms.append(f"{'+' if c > 0 else '-'} {abs(c):g}*{name}")
        lhs = " ".join(terms).lstrip("+ ").strip()
        return f"{lhs} {self.relation} {self.bound:g}"


@dataclass(frozen=True, eq=False)
class Region:
    """Sampling box intersected with affine constraints.

    ``margin=None`` resolves to DEFAULT_MARGIN_FRACTION of the box diagonal.
    Construction runs a cheap rejection probe; a region with no interior
    point at the margin raises RegionTooThinError immediately.
    """

    lower: np.ndarray
    upper: np.ndarray
    constraints: tuple[AffineConstraint, ...] = ()
    margin: float | None = None

    def __post_init__(self):
        lo = as_point(self.lower)
        hi = as_point(self.upper)
        if lo.shape != hi.shape:
            raise RegionError("bounding box lower/upper dimension mismatch")
        if not np.all(lo < hi):
            raise RegionError("bounding box must have lower < upper in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if c.coeffs.shape != lo.shape:
                raise RegionError("constraint dimension does not match bounding box")
        if self.margin is None:
            diag = float(np.linalg.norm(hi - lo))
            object.__setattr__(self, "margin", DEFAULT_MARGIN_FRACTION * diag)
        if not (self.margin > 0 and np.isfinite(self.margin)):
            raise RegionError("margin must be a positive finite real")
        if 2.0 * self.margin >= float(np.min(hi - lo)):
            raise RegionTooThinError("margin leaves no interior of the bounding box")
        _feasibility_probe(self)

    @property
    def dimension(self) -> int:
        return self.lower.size

    def contains(self, x, margin: float = 0.0) -> bool:
        """Membership test: inside the box and every constraint, with slack."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dimension:
            return False
        if np.any(x < self.lower + margin) or np.any(x > self.upper - margin):
            return False
        return all(c.satisfied(x, margin) for c in self.constraints)

    def interior_slack(self, x) -> float:
        """Largest r such that the euclidean ball B(x, r) stays inside."""
        x = np.asarray(x, dtype=float).reshape(-1)
        r = float(min(np.min(x - self.lower), np.min(self.upper - x)))
        for c in self.constraints:
            r = min(r, c.slack(x) / float(np.linalg.norm(c.coeffs)))
        return r

    def text(self) -> str:
        parts = [c.text() for c in self.constraints]
        ranges = ", ".join(f"{lo:g}..{hi:g}" for lo, hi in zip(self.lower, self.upper))
        parts.append(f"box({ranges})")
        parts.append(f"margin({self.margin:g})")
        return ", ".join(parts)


def _accept_mask(region: Region, pts: np.ndarray) -> np.ndarray:
    """Acceptance mask for a (k, n) batch: margin-deep inside box and constraints."""
    m = region.margin
    ok = np.all(pts >= region.lower + m, axis=1) & np.all(pts <= region.upper - m, axis=1)
    for c in region.constraints:
        ok &= (c.bound - pts @ c.coeffs) >= m
    return ok


def _feasibility_probe(region: Region) -> None:
    rng = np.random.default_rng(_PROBE_SEED)
    attempts = 0
    while attempts < _PROBE_ATTEMPTS:
        pts = rng.uniform(region.lower, region.upper, size=(_BATCH, region.dimension))
        attempts += _BATCH
        if np.any(_accept_mask(region, pts)):
            return
    raise RegionTooThinError(
        f"region too thin: no point found at margin {region.margin:g} "
        f"after {attempts} attempts"
    )


def sample_region(region: Region, count: int, seed: int) -> list[np.ndarray]:
    """Draw `count` interior points by rejection over the bounding box.

    Deterministic for a fixed (region, count, seed).  Every returned point
    satisfies the box and all constraints with slack >= region.margin.
    Raises RegionTooThinError when the acceptance rate stays below
    1e-3 over a million attempts.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out: list[np.ndarray] = []
    attempts = 0
    accepted = 0
    while len(out) < count:
        pts = rng.uniform(region.lower, region.upper, size=(_BATCH, region.dimension))
        attempts += _BATCH
        good = pts[_accept_mask(region, pts)]
        accepted += good.shape[0]
        for row in good[: count - len(out)]:
            out.append(as_point(row))
        if attempts >= _MIN_ATTEMPTS and accepted / attempts < _MIN_ACCEPT_RATE:
            raise RegionTooThinError(
                f"region too thin: acceptance rate {accepted / attempts:.2e} "
                f"after {attempts} attempts"
            )
    return out


@dataclass(frozen=True, eq=False)
class Segment:
    """Closed segment z(t) = x + t*(y - x), t in [0, 1], with x != y."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", as_point(self.x))
        object.__setattr__(self, "y", as_point(self.y))
        if self.x.shape != self.y.shape:
            raise ValueError("segment endpoints have different dimensions")
        if np.array_equal(self.x, self.y):
            raise ValueError("degenerate segment: x == y")

    def point_at(self, lam: float) -> np.ndarray:
        return segment_point(self, lam)


def segment_point(seg: Segment, lam: float) -> np.ndarray:
    """Point x + lam*(y - x); lam must lie in [0, 1]."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"lambda outside [0, 1]: {lam}")
    return as_point(seg.x + lam * (seg.y - seg.x))


# --------------------------------------------------------------------------
# Textual region form, e.g.  "x1 > 0.05, box(0..2, -1..1), margin(0.05)"
# --------------------------------------------------------------------------

_RANGE_RE = re.compile(
    r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*\.\.\s*"
    r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*$"
)
_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:"
    r"(?P<coeff>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(?:\*\s*(?P<var1>x\d+))?"
    r"|(?P<var2>x\d+)"
    r")\s*"
)


def _split_items(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    items, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise RegionError("unbalanced ')' in region text")
        if ch == "," and depth == 0:
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise RegionError("unbalanced '(' in region text")
    items.append("".join(cur))
    return [it.strip() for it in items if it.strip()]


def _parse_linear_side(side: str, dimension: int) -> tuple[np.ndarray, float]:
    """Parse a sum of terms `c`, `xk`, `c*xk` into (coeffs, constant)."""
    coeffs = np.zeros(dimension)
    const = 0.0
    pos = 0
    first = True
    while pos < len(side):
        m = _TERM_RE.match(side, pos)
        if not m or m.end() == pos:
            raise RegionError(f"cannot parse linear term at {side[pos:]!r}")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        if m.group("sign") is None and not first:
            raise RegionError(f"missing '+'/'-' before term in {side!r}")
        var = m.group("var1") or m.group("var2")
        if var is not None:
            idx = int(var[1:])
            if not (1 <= idx <= dimension):
                raise RegionError(f"variable {var} exceeds dimension {dimension}")
            c = float(m.group("coeff")) if m.group("coeff") else 1.0
            coeffs[idx - 1] += sign * c
        else:
            const += sign * float(m.group("coeff"))
        pos = m.end()
        first = False
    return coeffs, const


def _parse_constraint(item: str, dimension: int) -> AffineConstraint:
    for rel in ("<=", ">=", "<", ">"):
        if rel in item:
            lhs_text, rhs_text = item.split(rel, 1)
            lc, lk = _parse_linear_side(lhs_text, dimension)
            rc, rk = _parse_linear_side(rhs_text, dimension)
            coeffs = lc - rc
            bound = rk - lk
            if rel in (">", ">="):
                coeffs, bound = -coeffs, -bound
                rel = "<" if rel == ">" else "<="
            return AffineConstraint(coeffs, rel, bound)
    raise RegionError(f"constraint without relation: {item!r}")


def parse_region(text: str, dimension: int) -> Region:
    """Parse the comma-separated textual region form.

    Exactly one ``box(a..b, ...)`` item is required and fixes the sampling
    bounds; remaining items are affine constraints ``<linexpr> REL <linexpr>``
    or an optional ``margin(value)`` override.
    """
    if not text.strip():
        raise RegionError("empty region text")
    box: tuple[np.ndarray, np.ndarray] | None = None
    margin: float | None = None
    constraints: list[AffineConstraint] = []
    for item in _split_items(text):
        low = item.lower()
        if low.startswith("box(") and low.endswith(")"):
            if box is not None:
                raise RegionError("duplicate box(...) item")
            ranges = _split_items(item[4:-1])
            if len(ranges) != dimension:
                raise RegionError(
                    f"box has {len(ranges)} ranges but dimension is {dimension}"
                )
            lo, hi = [], []
            for r in ranges:
                m = _RANGE_RE.match(r)
                if not m:
                    raise RegionError(f"bad range {r!r}, expected a..b")
                lo.append(float(m.group(1)))
                hi.append(float(m.group(2)))
            box = (np.array(lo), np.array(hi))
        elif low.startswith("margin(") and low.endswith(")"):
            margin = float(item[7:-1])
        else:
            constraints.append(_parse_constraint(item, dimension))
    if box is None:
        raise RegionError("region text must contain a box(...) item")
    return Region(box[0], box[1], tuple(constraints), margin)
