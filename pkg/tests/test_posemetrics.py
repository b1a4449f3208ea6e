import math

import numpy as np
import pytest

from amisel.posemetrics import (
    Intrinsics,
    Pose,
    ProjectionError,
    SymmetrySet,
    VertexSet,
    add_metric,
    load_vertices,
    mspd,
    mssd,
    pose_from_row,
    project,
    random_rotation,
    recall,
    rotation_z,
)

CAM = Intrinsics(500.0, 500.0, 320.0, 240.0)


def loop_add(est, gt, pts):
    total = 0.0
    for x in pts:
        a = est.rotation @ x + est.translation
        b = gt.rotation @ x + gt.translation
        total += math.sqrt(sum((a[i] - b[i]) ** 2 for i in range(3)))
    return total / len(pts)


def loop_mssd(est, gt, pts, syms):
    best = math.inf
    for s in syms:
        worst = 0.0
        for x in pts:
            a = est.rotation @ x + est.translation
            b = gt.rotation @ (s.rotation @ x + s.translation) + gt.translation
            worst = max(worst, float(np.sqrt(((a - b) ** 2).sum())))
        best = min(best, worst)
    return best


def loop_mspd(est, gt, pts, syms, cam):
    def proj(p):
        return np.array([cam.fx * p[0] / p[2] + cam.cx, cam.fy * p[1] / p[2] + cam.cy])

    best = math.inf
    for s in syms:
        worst = 0.0
        for x in pts:
            a = proj(est.rotation @ x + est.translation)
            b = proj(gt.rotation @ (s.rotation @ x + s.translation) + gt.translation)
            worst = max(worst, float(np.sqrt(((a - b) ** 2).sum())))
        best = min(best, worst)
    return best


def random_case(rng, n=20, jitter=0.05):
    """Model, ground truth about 1 m in front of the camera, and a perturbed estimate."""
    model = VertexSet(rng.uniform(-0.05, 0.05, size=(n, 3)))
    gt = Pose(random_rotation(rng), np.array([0.0, 0.0, 1.0]) + rng.uniform(-0.1, 0.1, 3))
    delta = random_rotation(rng) if jitter >= 1 else _small_rotation(rng, jitter)
    est = Pose(delta @ gt.rotation, gt.translation + rng.normal(scale=0.01, size=3))
    return model, gt, est


def _small_rotation(rng, angle):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * k @ k


def random_symmetries(rng, count):
    return SymmetrySet(tuple(Pose(random_rotation(rng), np.zeros(3)) for _ in range(count)))


def test_pose_validation():
    with pytest.raises(ValueError):
        Pose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        Pose(np.eye(3) * 2, np.zeros(3))
    with pytest.raises(ValueError):
        pose_from_row([1, 0, 0])
    with pytest.raises(ValueError):
        VertexSet(np.zeros((0, 3)))


def test_identity_gives_zero():
    rng = np.random.default_rng(0)
    model, gt, _ = random_case(rng)
    assert add_metric(gt, gt, model) == 0
    assert mssd(gt, gt, model) == 0
    assert mspd(gt, gt, model, SymmetrySet(), CAM) == 0


def test_pure_translation():
    model = VertexSet(np.random.default_rng(1).uniform(-1, 1, size=(30, 3)))
    t = np.array([0.0, 0.0, 0.05])
    est = Pose(np.eye(3), t)
    assert add_metric(est, Pose.identity(), model) == pytest.approx(0.05, abs=1e-12)
    t = np.array([0.3, -0.4, 1.2])
    assert abs(add_metric(Pose(np.eye(3), t), Pose.identity(), model) - np.linalg.norm(t)) <= 1e-9


def test_single_point_mspd_five_pixels():
    model = VertexSet(np.array([[0.0, 0.0, 1.0]]))
    est = Pose(np.eye(3), np.array([0.01, 0.0, 0.0]))
    assert mspd(est, Pose.identity(), model, SymmetrySet(), Intrinsics(500, 500)) == pytest.approx(5.0)


def test_symmetry_absorption():
    rng = np.random.default_rng(2)
    model, gt, _ = random_case(rng)
    flip = Pose(rotation_z(math.pi), np.zeros(3))
    sym = SymmetrySet((flip,))
    est = gt.compose(flip)
    assert mssd(est, gt, model, sym) == pytest.approx(0, abs=1e-12)
    assert mspd(est, gt, model, sym, CAM) == pytest.approx(0, abs=1e-9)
    assert mssd(est, gt, model) > 0.01


def test_focal_doubling_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        model, gt, est = random_case(rng)
        sym = random_symmetries(rng, 2)
        cam2 = Intrinsics(2 * CAM.fx, 2 * CAM.fy, CAM.cx, CAM.cy)
        assert mspd(est, gt, model, sym, cam2) == 2 * mspd(est, gt, model, sym, CAM)


def test_match_loop_oracles():
    rng = np.random.default_rng(4)
    for _ in range(10):
        model, gt, est = random_case(rng, n=12)
        sym = random_symmetries(rng, 2)
        assert add_metric(est, gt, model) == pytest.approx(loop_add(est, gt, model.points), rel=1e-12)
        assert mssd(est, gt, model, sym) == pytest.approx(loop_mssd(est, gt, model.points, sym.transforms), rel=1e-12)
        assert mspd(est, gt, model, sym, CAM) == pytest.approx(
            loop_mspd(est, gt, model.points, sym.transforms, CAM), rel=1e-9
        )


def test_rigid_invariance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        model, gt, est = random_case(rng)
        g = Pose(random_rotation(rng), rng.normal(size=3))
        sym = random_symmetries(rng, 1)
        assert add_metric(g.compose(est), g.compose(gt), model) == pytest.approx(add_metric(est, gt, model), rel=1e-9)
        assert mssd(g.compose(est), g.compose(gt), model, sym) == pytest.approx(mssd(est, gt, model, sym), rel=1e-9)


def test_superset_monotone():
    rng = np.random.default_rng(6)
    for _ in range(100):
        model, gt, est = random_case(rng, n=10, jitter=1.0)
        base = random_symmetries(rng, 1)
        bigger = SymmetrySet(base.transforms + random_symmetries(rng, 2).transforms)
        assert mssd(est, gt, model, bigger) <= mssd(est, gt, model, base)
        assert mspd(est, gt, model, bigger, CAM) <= mspd(est, gt, model, base, CAM)
        assert mssd(est, gt, model, base) <= mssd(est, gt, model)


def test_projection_error_names_point():
    model = VertexSet(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -2.0]]))
    with pytest.raises(ProjectionError, match="point 1"):
        mspd(Pose.identity(), Pose.identity(), model, SymmetrySet(), CAM)


def test_project_adds_principal_point():
    assert project(np.array([[0.0, 0.0, 2.0]]), CAM).tolist() == [[320.0, 240.0]]


def test_recall_examples():
    assert recall([0, 0, 0], [1, 2]) == 100
    assert recall([1, 3], [2]) == 50
    assert recall([1, 2, 3], [1.5, 2.5, 3.5]) == pytest.approx(200 / 3)
    assert round(recall([1, 2, 3], [1.5, 2.5, 3.5]), 2) == 66.67
    assert recall([2], [2]) == 0  # strict
    for errors, th in (([], [1]), ([1], []), ([-1], [1]), ([1], [0])):
        with pytest.raises(ValueError):
            recall(errors, th)


def test_recall_monotone_in_threshold():
    rng = np.random.default_rng(7)
    errors = rng.uniform(0, 10, 50)
    values = [recall(errors, [1, th]) for th in np.linspace(0.5, 12, 30)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_load_vertices(tmp_path):
    path = tmp_path / "m.xyz"
    path.write_text("# comment\n0 0 1\n\n0.1, 0.2, 0.3\n")
    assert load_vertices(path).points.tolist() == [[0, 0, 1], [0.1, 0.2, 0.3]]
    path.write_text("1 2\n")
    with pytest.raises(ValueError, match="line 1"):
        load_vertices(path)
