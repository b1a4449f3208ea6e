"""Symmetry-aware 6D pose errors (ADD, MSSD, MSPD) and threshold recall.

Definitions follow the BOP toolkit conventions:

* ADD  -- mean distance between model points under the two poses.
* MSSD -- min over symmetries of the max 3-D point distance.
* MSPD -- min over symmetries of the max 2-D distance after pinhole projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import AmiselError

ORTHO_TOL = 1e-6


class ProjectionError(AmiselError, ValueError):
    """A model point lies at or behind the camera plane."""


@dataclass(frozen=True, eq=False)
class Pose:
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(t))):
            raise ValueError("pose entries must be finite")
        if not np.allclose(R.T @ R, np.eye(3), atol=ORTHO_TOL) or abs(np.linalg.det(R) - 1) > ORTHO_TOL:
            raise ValueError("rotation must be orthonormal with determinant +1")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation

    def compose(self, other: "Pose") -> "Pose":
        """``self`` after ``other``: x -> self(other(x))."""
        return Pose(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)


@dataclass(frozen=True, eq=False)
class VertexSet:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) == 0:
            raise ValueError(f"vertex set must be a non-empty (n, 3) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("vertex coordinates must be finite")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class SymmetrySet:
    transforms: tuple[Pose, ...] = field(default_factory=lambda: (Pose.identity(),))

    def __post_init__(self):
        transforms = tuple(self.transforms)
        if not any(
            np.allclose(s.rotation, np.eye(3), atol=ORTHO_TOL) and np.allclose(s.translation, 0, atol=ORTHO_TOL)
            for s in transforms
        ):
            transforms = (Pose.identity(),) + transforms
        object.__setattr__(self, "transforms", transforms)


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float = 0.0
    cy: float = 0.0

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")


def _project(points: np.ndarray, cam: Intrinsics, which: str) -> np.ndarray:
    # principal point omitted: it cancels in differences and would break exact focal scaling
    z = points[:, 2]
    bad = np.flatnonzero(z <= 0)
    if len(bad):
        i = int(bad[0])
        raise ProjectionError(f"{which} pose puts model point {i} at depth {z[i]:.6g} (must be > 0)")
    return np.stack([cam.fx * (points[:, 0] / z), cam.fy * (points[:, 1] / z)], axis=1)


def project(points: np.ndarray, cam: Intrinsics) -> np.ndarray:
    """Pinhole projection to pixel coordinates."""
    return _project(np.asarray(points, dtype=float), cam, "given") + np.array([cam.cx, cam.cy])


def add_metric(estimated: Pose, truth: Pose, model: VertexSet) -> float:
    """Mean point distance between the two poses, in model units."""
    diff = estimated.apply(model.points) - truth.apply(model.points)
    return float(np.linalg.norm(diff, axis=1).mean())


def mssd(estimated: Pose, truth: Pose, model: VertexSet, sym: SymmetrySet = SymmetrySet()) -> float:
    pts_est = estimated.apply(model.points)
    return float(
        min(
            np.linalg.norm(pts_est - truth.compose(s).apply(model.points), axis=1).max()
            for s in sym.transforms
        )
    )


def mspd(
    estimated: Pose,
    truth: Pose,
    model: VertexSet,
    sym: SymmetrySet,
    cam: Intrinsics,
) -> float:
    proj_est = _project(estimated.apply(model.points), cam, "estimated")
    errors = []
    for s in sym.transforms:
        proj_gt = _project(truth.compose(s).apply(model.points), cam, "ground-truth")
        errors.append(np.linalg.norm(proj_est - proj_gt, axis=1).max())
    return float(min(errors))


def recall(errors: Sequence[float], thresholds: Sequence[float]) -> float:
    """Mean over thresholds of the share of errors strictly below it, in percent."""
    if len(errors) == 0 or len(thresholds) == 0:
        raise ValueError("recall needs non-empty errors and thresholds")
    e = np.asarray(errors, dtype=float)
    th = np.asarray(thresholds, dtype=float)
    if np.any(e < 0) or np.any(th <= 0):
        raise ValueError("errors must be >= 0 and thresholds > 0")
    return float(100.0 * np.mean([(e < t).mean() for t in th]))


def load_vertices(source: Union[str, Path, Iterable[str]]) -> VertexSet:
    """Read one ``x y z`` triple per line (meters); blank lines and ``#`` comments are skipped."""
    lines = Path(source).read_text().splitlines() if isinstance(source, (str, Path)) else source
    rows = []
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 coordinates, got {len(parts)}")
        rows.append([float(p) for p in parts])
    return VertexSet(np.array(rows))


def pose_from_row(values: Sequence[float]) -> Pose:
    """Pose from 12 numbers: row-major rotation followed by translation."""
    if len(values) != 12:
        raise ValueError(f"expected 12 numbers (9 rotation + 3 translation), got {len(values)}")
    v = np.asarray(values, dtype=float)
    return Pose(v[:9].reshape(3, 3), v[9:])


def rotation_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def random_rotation(rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Uniform random rotation from a normalized quaternion."""
    rng = rng or np.random.default_rng()
    q = rng.normal(size=4)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )
