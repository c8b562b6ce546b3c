"""Euclidean geometry: samples, analytic stratified shapes, Hausdorff distance.

Shapes are unions of closed-form primitives (circular arcs, line segments,
isolated points).  Each shape knows its strata, can evaluate the distance from
any point to each stratum closure exactly, and reports ground-truth local
homology ranks for points lying on it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

ON_SHAPE_TOL = 1e-12


def distance(a, b) -> float:
    """Euclidean distance between two points of equal dimension."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(((a - b) ** 2).sum()))


@dataclass(frozen=True)
class Sample:
    """A finite point sample with its nominal density bound.

    ``noisy`` houses the constant t: noise-free samples have t = 0, noisy
    ones t = 1.  ``true_points`` optionally records, per sample point, the
    generating point on the shape (used for ground-truth association).
    """

    points: np.ndarray          # (n, dim)
    epsilon: float
    noisy: bool
    seed: Optional[int] = None
    true_points: Optional[np.ndarray] = None
    shape_meta: Optional[dict] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("sample must be a nonempty (n, dim) array")
        if not np.isfinite(pts).all():
            raise ValueError("sample coordinates must be finite")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "points", pts)

    @property
    def t(self) -> int:
        return 1 if self.noisy else 0

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Stratum:
    """One stratum of a stratified shape.

    kind is one of "point", "arc", "segment".  params:
      point:   (x, y)
      arc:     (cx, cy, radius, theta0, theta1) with theta1 - theta0 <= 2*pi
      segment: (x0, y0, x1, y1)
    ``valence`` (point strata only) counts incident curve branches.
    """

    sid: int
    height: int
    kind: str
    params: tuple
    valence: int = 0

    def dist(self, x) -> float:
        """Distance from x to the closure of this stratum (closed form)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "point":
            return float(np.hypot(x[0] - self.params[0], x[1] - self.params[1]))
        if self.kind == "segment":
            x0, y0, x1, y1 = self.params
            p0 = np.array([x0, y0])
            d = np.array([x1 - x0, y1 - y0])
            L2 = float(d @ d)
            s = 0.0 if L2 == 0 else float(np.clip((x - p0) @ d / L2, 0.0, 1.0))
            return float(np.linalg.norm(x - (p0 + s * d)))
        if self.kind == "arc":
            cx, cy, r, t0, t1 = self.params
            v = x - np.array([cx, cy])
            if t1 - t0 >= 2 * math.pi - 1e-15:
                return abs(float(np.linalg.norm(v)) - r)
            phi = math.atan2(v[1], v[0])
            # normalize into [t0, t0 + 2*pi)
            phi = t0 + (phi - t0) % (2 * math.pi)
            if phi <= t1:
                return abs(float(np.linalg.norm(v)) - r)
            e0 = np.array([cx + r * math.cos(t0), cy + r * math.sin(t0)])
            e1 = np.array([cx + r * math.cos(t1), cy + r * math.sin(t1)])
            return min(float(np.linalg.norm(x - e0)), float(np.linalg.norm(x - e1)))
        raise ValueError(f"unknown stratum kind {self.kind!r}")

    def project(self, x) -> np.ndarray:
        """Nearest point of the stratum closure to x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "point":
            return np.array(self.params, dtype=float)
        if self.kind == "segment":
            x0, y0, x1, y1 = self.params
            p0 = np.array([x0, y0])
            d = np.array([x1 - x0, y1 - y0])
            L2 = float(d @ d)
            s = 0.0 if L2 == 0 else float(np.clip((x - p0) @ d / L2, 0.0, 1.0))
            return p0 + s * d
        if self.kind == "arc":
            cx, cy, r, t0, t1 = self.params
            c = np.array([cx, cy])
            v = x - c
            nv = float(np.linalg.norm(v))
            if t1 - t0 >= 2 * math.pi - 1e-15:
                if nv == 0:
                    return c + np.array([r, 0.0])
                return c + v * (r / nv)
            phi = math.atan2(v[1], v[0]) if nv > 0 else t0
            phi = t0 + (phi - t0) % (2 * math.pi)
            if phi <= t1 and nv > 0:
                return c + v * (r / nv)
            e0 = c + r * np.array([math.cos(t0), math.sin(t0)])
            e1 = c + r * np.array([math.cos(t1), math.sin(t1)])
            return e0 if np.linalg.norm(x - e0) <= np.linalg.norm(x - e1) else e1
        raise ValueError(f"unknown stratum kind {self.kind!r}")


@dataclass(frozen=True)
class GroundTruthLabel:
    stratum_id: int
    local_ranks: dict  # degree -> rank; zero ranks omitted


class StratifiedShape:
    """Analytic stratified subset of the plane with ground-truth local homology.

    ``strata`` are ordered so that the tie-break "nearest stratum = lowest id"
    gives the intended answers (0-strata first, then the chord for the
    circle-chord shape, then arcs).  ``sampling_components`` lists the closed
    curves/segments used for even-arc-length sample generation.
    """

    def __init__(self, kind: str, strata: Sequence[Stratum], sampling_components,
                 reach_info: Optional[float] = None, meta_params: Optional[dict] = None):
        self.kind = kind
        self.strata = list(strata)
        self.sampling_components = list(sampling_components)  # ("circle",c,r) | ("segment",p0,p1)
        self.reach_info = reach_info
        self.meta_params = dict(meta_params or {})

    def dist(self, x):
        """(distance to shape, nearest stratum id); ties go to the lowest id."""
        best_d, best_sid = math.inf, -1
        for s in self.strata:
            d = s.dist(x)
            if d < best_d - 0.0 and not math.isclose(d, best_d, rel_tol=0.0, abs_tol=1e-12):
                best_d, best_sid = d, s.sid
            elif math.isclose(d, best_d, rel_tol=0.0, abs_tol=1e-12) and s.sid < best_sid:
                best_sid = s.sid
                best_d = min(best_d, d)
        return best_d, best_sid

    def project(self, x):
        """(nearest shape point, stratum id, distance)."""
        d, sid = self.dist(x)
        s = self.strata[sid]
        return s.project(x), sid, d

    def zero_strata(self):
        return [s for s in self.strata if s.height == 0 and s.kind == "point"]

    def dist_to_zero_strata(self, x) -> float:
        zs = self.zero_strata()
        if not zs:
            return math.inf
        return min(s.dist(x) for s in zs)

    def ground_truth(self, x) -> GroundTruthLabel:
        """Local homology ranks at a point of the shape.

        Interior points of curve strata get rank 1 in degree 1; a k-valent
        junction point gets rank k-1; a free endpoint (valence 1) gets all
        ranks zero.
        """
        d, sid = self.dist(x)
        if d > ON_SHAPE_TOL:
            raise ValueError(f"point {x} is not on the shape (distance {d})")
        s = self.strata[sid]
        if s.kind == "point":
            r1 = max(s.valence - 1, 0)
        else:
            r1 = 1
        ranks = {1: r1} if r1 > 0 else {}
        return GroundTruthLabel(stratum_id=sid, local_ranks=ranks)

    def component_lengths(self):
        out = []
        for comp in self.sampling_components:
            if comp[0] == "circle":
                out.append(2 * math.pi * comp[2])
            else:
                _, p0, p1 = comp
                out.append(float(np.linalg.norm(np.asarray(p1, float) - np.asarray(p0, float))))
        return out

    def even_points(self, n: int) -> np.ndarray:
        """n points spread over the components proportionally to length.

        Circles use endpoint-free even spacing; segments include both
        endpoints (midpoint gap = L / (2*(m-1)) then dominates d_H).
        """
        lengths = self.component_lengths()
        total = sum(lengths)
        counts = [max(2, int(round(n * L / total))) for L in lengths]
        # adjust to hit n exactly, preferring the longest components
        order = sorted(range(len(counts)), key=lambda i: -lengths[i])
        k = 0
        while sum(counts) != n:
            i = order[k % len(order)]
            counts[i] += 1 if sum(counts) < n else -1
            if counts[i] < 2:
                counts[i] = 2
            k += 1
        chunks = []
        for comp, m in zip(self.sampling_components, counts):
            if comp[0] == "circle":
                _, c, r = comp
                th = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
                chunks.append(np.c_[c[0] + r * np.cos(th), c[1] + r * np.sin(th)])
            else:
                _, p0, p1 = comp
                p0 = np.asarray(p0, float)
                p1 = np.asarray(p1, float)
                ss = np.linspace(0.0, 1.0, m)[:, None]
                chunks.append(p0 + ss * (p1 - p0))
        return np.vstack(chunks)

    def grid_points(self, per_unit: int) -> np.ndarray:
        """Discretization of the shape with step <= 1/per_unit along each component."""
        chunks = []
        for comp, L in zip(self.sampling_components, self.component_lengths()):
            m = max(2, int(math.ceil(L * per_unit)))
            if comp[0] == "circle":
                _, c, r = comp
                th = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
                chunks.append(np.c_[c[0] + r * np.cos(th), c[1] + r * np.sin(th)])
            else:
                _, p0, p1 = comp
                p0 = np.asarray(p0, float)
                p1 = np.asarray(p1, float)
                ss = np.linspace(0.0, 1.0, m)[:, None]
                chunks.append(p0 + ss * (p1 - p0))
        return np.vstack(chunks)

    def meta(self) -> dict:
        out = {"kind": self.kind}
        out.update(self.meta_params)
        return out


def circle(radius: float = 1.0) -> StratifiedShape:
    s = Stratum(0, 0, "arc", (0.0, 0.0, radius, 0.0, 2 * math.pi))
    return StratifiedShape("circle", [s], [("circle", (0.0, 0.0), radius)],
                           reach_info=radius, meta_params={"radius": radius})


def segment(p0=(0.0, 0.0), p1=(1.0, 0.0)) -> StratifiedShape:
    p0 = tuple(float(v) for v in p0)
    p1 = tuple(float(v) for v in p1)
    L = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
    strata = [
        Stratum(0, 0, "point", p0, valence=1),
        Stratum(1, 0, "point", p1, valence=1),
        Stratum(2, 1, "segment", (p0[0], p0[1], p1[0], p1[1])),
    ]
    return StratifiedShape("segment", strata, [("segment", p0, p1)],
                           reach_info=L / 2.0,
                           meta_params={"p0": list(p0), "p1": list(p1)})


def circle_chord() -> StratifiedShape:
    """Unit circle plus the horizontal diameter.

    Strata: the two junction points (+-1, 0) where three branches meet, the
    open chord, and the two open arcs.  The chord precedes the arcs so that
    equidistant interior points resolve to the chord.
    """
    strata = [
        Stratum(0, 0, "point", (-1.0, 0.0), valence=3),
        Stratum(1, 0, "point", (1.0, 0.0), valence=3),
        Stratum(2, 1, "segment", (-1.0, 0.0, 1.0, 0.0)),
        Stratum(3, 1, "arc", (0.0, 0.0, 1.0, 0.0, math.pi)),
        Stratum(4, 1, "arc", (0.0, 0.0, 1.0, math.pi, 2 * math.pi)),
    ]
    comps = [("circle", (0.0, 0.0), 1.0), ("segment", (-1.0, 0.0), (1.0, 0.0))]
    return StratifiedShape("circle-chord", strata, comps)


_SHAPE_BUILDERS = {
    "circle": circle,
    "circle-chord": circle_chord,
    "segment": segment,
}


def make_shape(kind: str, **kwargs) -> StratifiedShape:
    try:
        builder = _SHAPE_BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unsupported shape kind {kind!r}") from None
    return builder(**kwargs)


def shape_from_meta(meta: dict) -> StratifiedShape:
    """Rebuild an analytic shape from a sample's sidecar metadata."""
    kwargs = {k: v for k, v in meta.items() if k in ("radius", "p0", "p1")}
    return make_shape(meta["kind"], **kwargs)


class HausdorffResult(NamedTuple):
    value: float
    error_bound: float


def dist_to_shape(x, shape: StratifiedShape):
    """Exact distance from x to the shape and the id of the nearest stratum."""
    return shape.dist(x)


def hausdorff(points: np.ndarray, shape: StratifiedShape, grid: int = 512) -> HausdorffResult:
    """Hausdorff distance between a point set and a shape.

    The sample-to-shape direction is exact; the shape-to-sample direction is
    evaluated on an analytic discretization with ``grid`` points per unit
    length, so the reported value may undershoot the true supremum by at most
    ``error_bound`` (half the discretization step).
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    pts = np.asarray(points, dtype=float)
    d_ps = max(shape.dist(p)[0] for p in pts)
    g = shape.grid_points(grid)
    # chunked min-distance from grid points to the sample
    d_sp = 0.0
    for lo in range(0, len(g), 2048):
        block = g[lo:lo + 2048]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        d_sp = max(d_sp, float(np.sqrt(d2.min(axis=1).max())))
    step = 1.0 / grid
    return HausdorffResult(max(d_ps, d_sp), step / 2.0)


def generate_sample(shape: StratifiedShape, eps: float, n: int,
                    noise: float = 0.0, seed: int = 0,
                    grid: Optional[int] = None) -> Sample:
    """Deterministic epsilon-sample of a shape, verified after generation.

    ``noise`` is the radius of the uniform closed disc added to each point
    (0 means noise-free).  Raises if the verified Hausdorff distance (value
    plus discretization bound) is not below eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    base = shape.even_points(n)
    if noise > 0:
        rng = np.random.default_rng(seed)
        ang = rng.uniform(0.0, 2 * math.pi, size=n)
        rad = noise * np.sqrt(rng.uniform(0.0, 1.0, size=n))
        pts = base + np.c_[rad * np.cos(ang), rad * np.sin(ang)]
    else:
        pts = base.copy()
    if grid is None:
        grid = max(64, int(math.ceil(8.0 / eps)))
    hd = hausdorff(pts, shape, grid=grid)
    if hd.value + hd.error_bound >= eps:
        raise ValueError(
            f"generated sample fails the epsilon bound: d_H = {hd.value:.6g} "
            f"(+{hd.error_bound:.2g} grid bound) >= eps = {eps:.6g}; increase n")
    meta = shape.meta()
    meta.update({"n": n, "noise": noise})
    return Sample(points=pts, epsilon=eps, noisy=noise > 0, seed=seed,
                  true_points=base if noise > 0 else None, shape_meta=meta)


def ground_truth(shape: StratifiedShape, x) -> GroundTruthLabel:
    return shape.ground_truth(x)


# ---------------------------------------------------------------------------
# CSV / sidecar-JSON persistence

def sidecar_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def save_sample_csv(sample: Sample, path) -> None:
    path = Path(path)
    dim = sample.points.shape[1]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(dim)])
        for row in sample.points:
            w.writerow([repr(float(v)) for v in row])
    meta = {
        "epsilon": sample.epsilon,
        "noisy": sample.noisy,
        "seed": sample.seed,
        "shape": sample.shape_meta,
    }
    if sample.true_points is not None:
        meta["true_points"] = [[float(v) for v in p] for p in sample.true_points]
    with sidecar_path(path).open("w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_sample_csv(path, epsilon: Optional[float] = None,
                    noisy: Optional[bool] = None) -> Sample:
    path = Path(path)
    with path.open() as fh:
        rows = list(csv.reader(fh))
    pts = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    meta = {}
    sp = sidecar_path(path)
    if sp.exists():
        with sp.open() as fh:
            meta = json.load(fh)
    eps = epsilon if epsilon is not None else meta.get("epsilon")
    if eps is None:
        raise ValueError("epsilon not given and no sidecar metadata found")
    noz = noisy if noisy is not None else bool(meta.get("noisy", False))
    tp = meta.get("true_points")
    return Sample(points=pts, epsilon=float(eps), noisy=noz,
                  seed=meta.get("seed"),
                  true_points=np.asarray(tp, float) if tp else None,
                  shape_meta=meta.get("shape"))
