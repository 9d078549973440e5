"""Self-similar iterated function systems with an open-set-condition witness,
their attractors, and the natural measure (normalized restriction of the
delta-dimensional Hausdorff measure).

Ball and slab masses are evaluated by recursive cylinder subdivision with a
certified enclosure per cylinder, so every evaluation returns an interval
guaranteed to contain the true mass.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import Ball, Box, Slab

__all__ = [
    "SimilarityMap",
    "IFSystem",
    "CylinderWord",
    "ConvexPolygon",
    "MassInterval",
    "OpenSetConditionError",
    "IrreducibilityWarning",
    "similarity_dimension",
    "measure_of_ball",
    "measure_of_slab_in_ball",
    "sample_measure",
    "cantor_middle_thirds",
    "sierpinski_gasket",
    "four_corner_dust",
    "koch_curve",
    "bundled_system",
    "load_system",
    "dump_system",
    "BUNDLED_SYSTEMS",
]

_ORTHO_TOL = 1e-12
MAX_SUBDIVISION_DEPTH = 64


class OpenSetConditionError(ValueError):
    """The supplied open-set witness fails the OSC check."""


class IrreducibilityWarning(UserWarning):
    """Fixed points of the maps do not affinely span R^d.

    The affine-span test is only a sufficient condition for the system to
    avoid invariant families of proper affine subspaces; failing it does not
    prove reducibility, hence a warning rather than an error.
    """


@dataclass(frozen=True)
class SimilarityMap:
    """x -> ratio * rotation @ x + translation with ratio in (0,1)."""

    ratio: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float)
        tr = np.asarray(self.translation, dtype=float)
        if tr.ndim != 1:
            raise ValueError("translation must be a vector")
        d = tr.shape[0]
        if rot.shape != (d, d):
            raise ValueError(f"rotation must be {d}x{d}, got {rot.shape}")
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"contraction ratio must lie in (0,1), got {self.ratio}")
        if np.max(np.abs(rot @ rot.T - np.eye(d))) > _ORTHO_TOL:
            raise ValueError("rotation matrix is not orthogonal within 1e-12")
        rot.flags.writeable = False
        tr.flags.writeable = False
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tr)

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.ratio * (x @ self.rotation.T) + self.translation

    def fixed_point(self) -> np.ndarray:
        d = self.dim
        return np.linalg.solve(np.eye(d) - self.ratio * self.rotation, self.translation)

    def is_identity_rotation(self) -> bool:
        return bool(np.max(np.abs(self.rotation - np.eye(self.dim))) < 1e-14)


@dataclass(frozen=True)
class ConvexPolygon:
    """Closed convex polygon in R^2, vertices stored counterclockwise.

    Exists as an OSC witness shape: the von Koch curve admits no axis-aligned
    box or ball witness, but the classical triangle works.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 vertices in R^2")
        area2 = _signed_area2(v)
        if area2 < 0:
            v = v[::-1].copy()
            area2 = -area2
        if area2 <= 0:
            raise ValueError("polygon is degenerate")
        edges = np.roll(v, -1, axis=0) - v
        cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(
            edges, -1, axis=0
        )[:, 0]
        if np.any(cross < -1e-12 * np.max(np.abs(v))):
            raise ValueError("polygon is not convex")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return 2

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        w = x[None, :] - v
        cross = e[:, 0] * w[:, 1] - e[:, 1] * w[:, 0]
        return bool(np.all(cross >= -tol))

    def bounding_ball(self) -> Ball:
        c = self.vertices.mean(axis=0)
        r = float(np.max(np.linalg.norm(self.vertices - c, axis=1)))
        return Ball(c, r)


def _signed_area2(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True)
class CylinderWord:
    """Finite composition address over the map indices 1..k."""

    digits: tuple

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(i) for i in self.digits))
        if any(i < 1 for i in self.digits):
            raise ValueError("cylinder digits are 1-based map indices")

    def contraction(self, sys: "IFSystem") -> float:
        r = 1.0
        for i in self.digits:
            r *= sys.maps[i - 1].ratio
        return r

    def weight(self, sys: "IFSystem") -> float:
        """Natural-measure mass of the cylinder: product of ratio^delta."""
        return self.contraction(sys) ** sys.delta

    def diameter(self, sys: "IFSystem") -> float:
        return self.contraction(sys) * sys.diameter

    def apply(self, sys: "IFSystem", x: np.ndarray) -> np.ndarray:
        y = np.asarray(x, dtype=float)
        for i in reversed(self.digits):
            y = sys.maps[i - 1].apply(y)
        return y

    def enclosure(self, sys: "IFSystem") -> Ball:
        """Ball certified to contain the cylinder set."""
        b = sys.bounding_ball
        return Ball(self.apply(sys, b.center), self.contraction(sys) * b.radius)


def similarity_dimension(maps: list, ambient_dim: int | None = None) -> float:
    """Unique root of sum(ratio_i^s) = 1, by bisection on [0, d].

    `maps` may hold SimilarityMap objects or bare ratios.  Rejects systems
    with fewer than two maps and systems whose root would exceed the ambient
    dimension (they cannot satisfy the open set condition in R^d).
    """
    ratios = [m.ratio if isinstance(m, SimilarityMap) else float(m) for m in maps]
    if len(ratios) < 2:
        raise ValueError("need at least two maps (k >= 2)")
    if any(not (0.0 < r < 1.0) for r in ratios):
        raise ValueError("all contraction ratios must lie in (0,1)")
    if ambient_dim is None:
        ambient_dim = (
            maps[0].dim if isinstance(maps[0], SimilarityMap) else len(ratios)
        )

    def moran(s: float) -> float:
        return sum(r**s for r in ratios) - 1.0

    hi = float(ambient_dim)
    if moran(hi) > 0.0:
        raise ValueError(
            f"Moran root exceeds ambient dimension {ambient_dim}; "
            "system cannot satisfy the OSC in R^d"
        )
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-13:
            break
        if moran(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class IFSystem:
    """A validated self-similar system with OSC witness and natural measure.

    Construct with IFSystem.create(maps, open_set); the constructor itself
    performs no checks so that validated instances stay cheap to copy.
    """

    maps: tuple
    open_set: object
    delta: float
    bounding_ball: Ball = field(repr=False)
    anchor: np.ndarray = field(repr=False)

    @classmethod
    def create(cls, maps, open_set) -> "IFSystem":
        maps = tuple(maps)
        if len(maps) < 2:
            raise ValueError("an IFS needs k >= 2 maps")
        d = maps[0].dim
        if any(m.dim != d for m in maps):
            raise ValueError("all maps must act on the same R^d")
        if open_set.dim != d:
            raise ValueError("open set dimension does not match the maps")
        delta = similarity_dimension(list(maps), d)
        _check_open_set_condition(maps, open_set)
        bball = open_set.bounding_ball() if not isinstance(open_set, Ball) else open_set
        anchor = maps[0].fixed_point()
        sys = cls(maps=maps, open_set=open_set, delta=delta,
                  bounding_ball=bball, anchor=anchor)
        _check_attractor_in_closure(sys)
        if not _fixed_points_span(maps):
            warnings.warn(
                "map fixed points do not affinely span R^d; the sufficient "
                "irreducibility check failed",
                IrreducibilityWarning,
                stacklevel=2,
            )
        return sys

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def k(self) -> int:
        return len(self.maps)

    @property
    def diameter(self) -> float:
        return 2.0 * self.bounding_ball.radius

    @property
    def ratios(self) -> np.ndarray:
        return np.array([m.ratio for m in self.maps])

    @property
    def weights(self) -> np.ndarray:
        """First-level cylinder masses ratio_i^delta; they sum to 1."""
        return self.ratios**self.delta

    @property
    def has_rotations(self) -> bool:
        return not all(m.is_identity_rotation() for m in self.maps)

    def moran_residual(self) -> float:
        return abs(float(np.sum(self.weights)) - 1.0)


def _fixed_points_span(maps) -> bool:
    pts = np.array([m.fixed_point() for m in maps])
    d = maps[0].dim
    if len(pts) < d + 1:
        return False
    diffs = pts[1:] - pts[0]
    return int(np.linalg.matrix_rank(diffs, tol=1e-9)) == d


def _check_attractor_in_closure(sys: "IFSystem", samples: int = 512) -> None:
    pts = sample_measure(sys, samples, seed=0)
    tol = 1e-9 * max(sys.diameter, 1.0)
    ok = all(_region_contains(sys.open_set, p, tol) for p in pts)
    if not ok:
        raise OpenSetConditionError(
            "sampled attractor points escape the closure of the open set"
        )


def _region_contains(region, x, tol) -> bool:
    if isinstance(region, Ball):
        return float(np.linalg.norm(np.asarray(x) - region.center)) <= region.radius + tol
    return region.contains(x, tol) if isinstance(region, (Box, ConvexPolygon)) else False


# ---------------------------------------------------------------------------
# open set condition
# ---------------------------------------------------------------------------


def _box_corners(box: Box) -> np.ndarray:
    d = box.dim
    corners = np.array(
        [[box.lo[i] if (m >> i) & 1 == 0 else box.hi[i] for i in range(d)]
         for m in range(2**d)]
    )
    return corners


def _project(vertices: np.ndarray, axis: np.ndarray) -> tuple:
    p = vertices @ axis
    return float(p.min()), float(p.max())


def _polygons_open_disjoint(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Separating-axis test: True iff the open interiors do not meet.

    Convex polygons; candidate axes are the edge normals of both.  Touching
    along a boundary (projection overlap <= tol) still counts as disjoint,
    which is exactly what the open set condition permits.
    """
    for verts in (a, b):
        m = verts.shape[0]
        for i in range(m):
            e = verts[(i + 1) % m] - verts[i]
            n = np.array([-e[1], e[0]])
            ln = np.linalg.norm(n)
            if ln == 0.0:
                continue
            n /= ln
            lo1, hi1 = _project(a, n)
            lo2, hi2 = _project(b, n)
            if hi1 <= lo2 + tol or hi2 <= lo1 + tol:
                return True
    return False


def _image_shapes(maps, open_set):
    """Images of the witness under each map, in a homogeneous representation."""
    if isinstance(open_set, Ball):
        return "ball", [
            (m.apply(open_set.center), m.ratio * open_set.radius) for m in maps
        ]
    if isinstance(open_set, Box):
        if all(m.is_identity_rotation() for m in maps):
            images = []
            for m in maps:
                lo = m.apply(open_set.lo)
                hi = m.apply(open_set.hi)
                images.append((np.minimum(lo, hi), np.maximum(lo, hi)))
            return "box", images
        if open_set.dim != 2:
            raise OpenSetConditionError(
                "rotated box witnesses are only supported in R^2"
            )
        corners = _box_corners(open_set)
        hull = corners[[0, 1, 3, 2]]  # CCW order of a 2-d box
        return "polygon", [m.apply(hull) for m in maps]
    if isinstance(open_set, ConvexPolygon):
        return "polygon", [m.apply(open_set.vertices) for m in maps]
    raise OpenSetConditionError(f"unsupported open set witness {type(open_set)!r}")


def _check_open_set_condition(maps, open_set) -> None:
    """Verify the user-supplied witness: images disjoint and contained.

    Disjointness is of open interiors (boundary touching allowed); containment
    is in the closure of the witness.  Both use a tolerance scaled to the
    witness diameter.
    """
    kind, images = _image_shapes(maps, open_set)
    scale = (
        2.0 * open_set.radius
        if isinstance(open_set, Ball)
        else 2.0 * open_set.bounding_ball().radius
    )
    tol = 1e-9 * max(scale, 1.0)

    if kind == "ball":
        for i, (ci, ri) in enumerate(images):
            if float(np.linalg.norm(ci - open_set.center)) + ri > open_set.radius + tol:
                raise OpenSetConditionError(f"image {i} escapes the witness ball")
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                ci, ri = images[i]
                cj, rj = images[j]
                if float(np.linalg.norm(ci - cj)) < ri + rj - tol:
                    raise OpenSetConditionError(f"images {i} and {j} overlap")
        return

    if kind == "box":
        for i, (lo, hi) in enumerate(images):
            if np.any(lo < open_set.lo - tol) or np.any(hi > open_set.hi + tol):
                raise OpenSetConditionError(f"image {i} escapes the witness box")
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                lo1, hi1 = images[i]
                lo2, hi2 = images[j]
                separated = np.any(hi1 <= lo2 + tol) or np.any(hi2 <= lo1 + tol)
                if not separated:
                    raise OpenSetConditionError(f"images {i} and {j} overlap")
        return

    # polygon images
    for i, verts in enumerate(images):
        for v in verts:
            if not _region_contains(open_set, v, tol):
                raise OpenSetConditionError(f"image {i} escapes the witness")
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if not _polygons_open_disjoint(images[i], images[j], tol):
                raise OpenSetConditionError(f"images {i} and {j} overlap")


# ---------------------------------------------------------------------------
# measure evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MassInterval:
    """Certified enclosure [lo, hi] of a natural-measure mass."""

    lo: float
    hi: float
    converged: bool
    depth: int

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def widen(self, pad: float) -> "MassInterval":
        return MassInterval(max(self.lo - pad, 0.0), self.hi + pad,
                            self.converged, self.depth)


def _subdivide(sys: IFSystem, classify, tol: float) -> MassInterval:
    """Shared cylinder-subdivision engine.

    `classify(centers, radii)` receives the enclosure balls of the current
    frontier (vectorized) and returns boolean masks (inside, outside) for the
    target region.  Cylinders fully inside contribute their weight to both
    bounds and fully outside contribute nothing.  Straddling cylinders are
    expanded; ones below the weight floor tol/1024 may instead be frozen as
    permanent upper-bound mass, but only while the frozen total stays under
    tol/4, so the pruning can never cost the width contract.
    """
    if tol < 1e-9:
        raise ValueError(
            "tolerance below the float certification floor 1e-9"
        )
    d = sys.dim
    c0 = sys.bounding_ball.center
    r0 = sys.bounding_ball.radius
    rho = sys.ratios
    wts = sys.weights
    trs = np.array([m.translation for m in sys.maps])
    rots = np.array([m.rotation for m in sys.maps])
    track_rot = sys.has_rotations
    floor = tol / 1024.0

    trans = np.zeros((1, d))
    scale = np.ones(1)
    weight = np.ones(1)
    rot = np.broadcast_to(np.eye(d), (1, d, d)).copy() if track_rot else None

    lo = 0.0
    frozen = 0.0
    depth = 0
    while True:
        if track_rot:
            centers = scale[:, None] * np.einsum("nij,j->ni", rot, c0) + trans
        else:
            centers = scale[:, None] * c0 + trans
        radii = scale * r0
        inside, outside = classify(centers, radii)
        lo += float(weight[inside].sum())
        keep = ~inside & ~outside
        tiny = keep & (weight < floor)
        # the floor only prunes while the frozen mass stays well under tol,
        # otherwise the width contract could be lost to many tiny straddlers
        if tiny.any() and frozen + float(weight[tiny].sum()) <= 0.25 * tol:
            frozen += float(weight[tiny].sum())
            expandable = keep & ~tiny
        else:
            expandable = keep
        active = float(weight[expandable].sum())
        # absorb float slop (Moran-root error in the cylinder weights plus
        # accumulated rounding) so the enclosure stays certified
        pad = 2e-10 if (lo + frozen + active) > 0.0 else 0.0
        plo = max(lo - pad, 0.0)
        phi = min(lo + frozen + active + pad, 1.0)
        if phi - plo <= tol:
            return MassInterval(plo, phi, True, depth)
        if depth >= MAX_SUBDIVISION_DEPTH or not expandable.any():
            return MassInterval(plo, phi, False, depth)

        trans_e = trans[expandable]
        scale_e = scale[expandable]
        weight_e = weight[expandable]
        if track_rot:
            rot_e = rot[expandable]
            new_trans, new_scale, new_weight, new_rot = [], [], [], []
            for i in range(sys.k):
                new_trans.append(
                    trans_e + scale_e[:, None] * np.einsum("nij,j->ni", rot_e, trs[i])
                )
                new_scale.append(scale_e * rho[i])
                new_weight.append(weight_e * wts[i])
                new_rot.append(np.einsum("nij,jk->nik", rot_e, rots[i]))
            rot = np.concatenate(new_rot)
        else:
            new_trans = [trans_e + scale_e[:, None] * trs[i] for i in range(sys.k)]
            new_scale = [scale_e * rho[i] for i in range(sys.k)]
            new_weight = [weight_e * wts[i] for i in range(sys.k)]
        trans = np.concatenate(new_trans)
        scale = np.concatenate(new_scale)
        weight = np.concatenate(new_weight)
        depth += 1


def measure_of_ball(sys: IFSystem, b: Ball, tol: float) -> MassInterval:
    """Interval enclosing mu(b intersect K), of width <= tol when converged."""
    bc = np.asarray(b.center, dtype=float)
    br = float(b.radius)

    def classify(centers, radii):
        dist = np.linalg.norm(centers - bc, axis=1)
        return dist + radii <= br, dist >= br + radii

    return _subdivide(sys, classify, tol)


def measure_of_slab_in_ball(sys: IFSystem, b: Ball, s: Slab, tol: float) -> MassInterval:
    """Interval enclosing mu(b intersect slab intersect K)."""
    bc = np.asarray(b.center, dtype=float)
    br = float(b.radius)
    normal = s.plane.normal
    offset = s.plane.offset
    eps = s.epsilon

    def classify(centers, radii):
        dist = np.linalg.norm(centers - bc, axis=1)
        pdist = np.abs(centers @ normal - offset)
        inside = (dist + radii <= br) & (pdist + radii <= eps)
        outside = (dist >= br + radii) | (pdist >= eps + radii)
        return inside, outside

    return _subdivide(sys, classify, tol)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

SAMPLE_DEPTH = 40


def sample_measure(sys: IFSystem, count: int, seed, depth: int = SAMPLE_DEPTH) -> np.ndarray:
    """Draw `count` points of K distributed by the natural measure.

    Each point is the image of an i.i.d. digit word of the given depth, with
    digit i carrying probability ratio_i^delta; the positional error is at
    most diam(K) * (max ratio)^depth.  Deterministic for a fixed seed; shards
    may derive their own seeds as (seed, shard_index) sequences.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    digits = rng.choice(sys.k, size=(count, depth), p=sys.weights / sys.weights.sum())
    return _fold_digits(sys, digits)


def _fold_digits(sys: IFSystem, digits: np.ndarray) -> np.ndarray:
    rho = sys.ratios
    trs = np.array([m.translation for m in sys.maps])
    pts = np.broadcast_to(sys.anchor, (digits.shape[0], sys.dim)).copy()
    if sys.has_rotations:
        rots = np.array([m.rotation for m in sys.maps])
        for j in range(digits.shape[1] - 1, -1, -1):
            dig = digits[:, j]
            pts = rho[dig, None] * np.einsum("nij,nj->ni", rots[dig], pts) + trs[dig]
    else:
        for j in range(digits.shape[1] - 1, -1, -1):
            dig = digits[:, j]
            pts = rho[dig, None] * pts + trs[dig]
    return pts


# ---------------------------------------------------------------------------
# bundled systems
# ---------------------------------------------------------------------------


def _no_rotation(d: int) -> np.ndarray:
    return np.eye(d)


def cantor_middle_thirds() -> IFSystem:
    """Middle-thirds Cantor set in R^1; delta = log 2 / log 3."""
    maps = [
        SimilarityMap(1 / 3, _no_rotation(1), np.array([0.0])),
        SimilarityMap(1 / 3, _no_rotation(1), np.array([2 / 3])),
    ]
    return IFSystem.create(maps, Box([0.0], [1.0]))


def sierpinski_gasket() -> IFSystem:
    """Sierpinski gasket on the triangle (0,0), (1,0), (1/2, sqrt3/2)."""
    h = math.sqrt(3.0) / 2.0
    maps = [
        SimilarityMap(0.5, _no_rotation(2), np.array([0.0, 0.0])),
        SimilarityMap(0.5, _no_rotation(2), np.array([0.5, 0.0])),
        SimilarityMap(0.5, _no_rotation(2), np.array([0.25, h / 2.0])),
    ]
    return IFSystem.create(maps, Box([0.0, 0.0], [1.0, h]))


def four_corner_dust() -> IFSystem:
    """Four-corner Cantor dust in the unit square with contraction 1/4."""
    maps = [
        SimilarityMap(0.25, _no_rotation(2), np.array([0.0, 0.0])),
        SimilarityMap(0.25, _no_rotation(2), np.array([0.75, 0.0])),
        SimilarityMap(0.25, _no_rotation(2), np.array([0.0, 0.75])),
        SimilarityMap(0.25, _no_rotation(2), np.array([0.75, 0.75])),
    ]
    return IFSystem.create(maps, Box([0.0, 0.0], [1.0, 1.0]))


def koch_curve() -> IFSystem:
    """Von Koch curve over [0,1]; two of the four maps rotate by +-60 degrees.

    The witness is the open triangle with base [0,1] and apex (1/2, sqrt3/6);
    its four images tile it up to shared boundary points.
    """
    c, s = 0.5, math.sqrt(3.0) / 2.0
    rot_pos = np.array([[c, -s], [s, c]])
    rot_neg = np.array([[c, s], [-s, c]])
    maps = [
        SimilarityMap(1 / 3, _no_rotation(2), np.array([0.0, 0.0])),
        SimilarityMap(1 / 3, rot_pos, np.array([1 / 3, 0.0])),
        SimilarityMap(1 / 3, rot_neg, np.array([0.5, math.sqrt(3.0) / 6.0])),
        SimilarityMap(1 / 3, _no_rotation(2), np.array([2 / 3, 0.0])),
    ]
    witness = ConvexPolygon(
        np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 6.0]])
    )
    return IFSystem.create(maps, witness)


BUNDLED_SYSTEMS = {
    "cantor": cantor_middle_thirds,
    "gasket": sierpinski_gasket,
    "dust": four_corner_dust,
    "koch": koch_curve,
}


def bundled_system(name: str) -> IFSystem:
    try:
        return BUNDLED_SYSTEMS[name]()
    except KeyError:
        raise ValueError(
            f"unknown bundled system {name!r}; choose from {sorted(BUNDLED_SYSTEMS)}"
        ) from None


# ---------------------------------------------------------------------------
# definition files
# ---------------------------------------------------------------------------


def _open_set_to_json(open_set) -> dict:
    if isinstance(open_set, Box):
        return {"type": "box", "min": open_set.lo.tolist(), "max": open_set.hi.tolist()}
    if isinstance(open_set, Ball):
        return {"type": "ball", "center": open_set.center.tolist(),
                "radius": open_set.radius}
    if isinstance(open_set, ConvexPolygon):
        return {"type": "polygon", "vertices": open_set.vertices.tolist()}
    raise ValueError(f"cannot serialize open set {type(open_set)!r}")


def _open_set_from_json(obj: dict):
    kind = obj.get("type", "box")
    if kind == "box":
        return Box(obj["min"], obj["max"])
    if kind == "ball":
        return Ball(np.asarray(obj["center"], dtype=float), float(obj["radius"]))
    if kind == "polygon":
        return ConvexPolygon(np.asarray(obj["vertices"], dtype=float))
    raise ValueError(f"unknown open set type {kind!r}")


def dump_system(sys: IFSystem, path) -> None:
    """Write the definition file: dimension, per-map ratio / rotation
    (row-major) / translation, and the open set witness."""
    payload = {
        "dimension": sys.dim,
        "maps": [
            {
                "ratio": m.ratio,
                "rotation": [float(x) for x in m.rotation.reshape(-1)],
                "translation": m.translation.tolist(),
            }
            for m in sys.maps
        ],
        "open_set": _open_set_to_json(sys.open_set),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_system(path) -> IFSystem:
    """Read a definition file and validate it (Moran root, OSC witness)."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    d = int(payload["dimension"])
    maps = []
    for entry in payload["maps"]:
        rot = np.asarray(entry["rotation"], dtype=float)
        if rot.ndim == 1:
            rot = rot.reshape(d, d)
        maps.append(
            SimilarityMap(float(entry["ratio"]), rot,
                          np.asarray(entry["translation"], dtype=float))
        )
    return IFSystem.create(maps, _open_set_from_json(payload["open_set"]))
