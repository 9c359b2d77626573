import numpy as np
import pytest

from lectern.geometry import StylusPose, Vec3
from lectern.hybrid import (
    SOURCE_BLENDING,
    SOURCE_LOST,
    SOURCE_TABLET,
    SOURCE_VISION,
    BlendConfig,
    PoseFuser,
    fuse_stream,
)
from lectern.simulator import TabletReading
from lectern.vision import TrackDiagnostics, TrackResult

UP = Vec3(0.0, 0.0, 1.0)


def pose(x=0.0, y=0.0, z=0.0, axis=UP):
    return StylusPose(Vec3(x, y, z), axis)


def tablet(p=None):
    return TabletReading(hover=p is not None, pose=p, noise_sigma=0.0002)


def vision(p=None):
    lost = p is None
    return TrackResult(pose=p, lost=lost, confidence=0.0 if lost else 1.0,
                       diagnostics=TrackDiagnostics())


def blend_runs(sources):
    runs = []
    count = 0
    for s in sources:
        if s == SOURCE_BLENDING:
            count += 1
        elif count:
            runs.append(count)
            count = 0
    if count:
        runs.append(count)
    return runs


def test_hover_wins_over_vision():
    fuser = PoseFuser()
    out = fuser.fuse(tablet(pose(0.01)), vision(pose(0.02)))
    assert out.source == SOURCE_TABLET
    assert out.pose.tip.x == pytest.approx(0.01)


def test_vision_when_not_hovering():
    fuser = PoseFuser()
    out = fuser.fuse(tablet(None), vision(pose(0.02)))
    assert out.source == SOURCE_VISION
    assert out.pose.tip.x == pytest.approx(0.02)


def test_switch_blends_linearly_over_window():
    window = 5
    gap = 0.005
    fuser = PoseFuser(BlendConfig(window_frames=window))
    fuser.fuse(tablet(pose(0.0)), vision(None))  # steady on tablet

    outputs = []
    for _ in range(window + 2):
        outputs.append(fuser.fuse(tablet(None), vision(pose(gap))))

    sources = [o.source for o in outputs]
    assert sources[:window] == [SOURCE_BLENDING] * window
    assert sources[window] == SOURCE_VISION

    xs = [0.0] + [o.pose.tip.x for o in outputs]
    steps = [b - a for a, b in zip(xs, xs[1:])]
    expected = gap / (window + 1)
    for step in steps[: window + 1]:
        assert step == pytest.approx(expected, abs=1e-12)
    assert outputs[window].pose.tip.x == pytest.approx(gap)

    progresses = [o.blend_progress for o in outputs[:window]]
    assert all(0.0 < p < 1.0 for p in progresses)
    assert progresses == sorted(progresses)


def test_all_hover_stream_is_all_tablet():
    frames = [(tablet(pose(0.001 * i)), vision(None)) for i in range(20)]
    fused = list(fuse_stream(frames))
    assert all(f.source == SOURCE_TABLET for f in fused)


def test_single_switch_gives_one_blend_run():
    window = 5
    frames = []
    for i in range(40):
        hovering = i < 20
        truth = pose(0.001 * i)
        frames.append((
            tablet(truth if hovering else None),
            vision(pose(0.001 * i + 0.001)),
        ))
    fused = list(fuse_stream(frames, BlendConfig(window_frames=window)))
    assert blend_runs([f.source for f in fused]) == [window]
    assert fused[-1].source == SOURCE_VISION


def test_alternating_hover_never_leaves_blending():
    window = 5
    frames = []
    for i in range(30):
        truth_x = 0.0005 * i
        frames.append((
            tablet(pose(truth_x) if i % 2 == 0 else None),
            vision(pose(truth_x + 0.002)),
        ))
    fused = list(fuse_stream(frames, BlendConfig(window_frames=window)))
    sources = [f.source for f in fused]
    assert all(s == SOURCE_BLENDING for s in sources[2:])
    # continuity: per-frame step stays bounded by motion + gap/window
    xs = [f.pose.tip.x for f in fused]
    for a, b in zip(xs, xs[1:]):
        assert abs(b - a) <= 0.0005 + 0.002 / window + 1e-9


def test_continuity_bound_with_constant_offsets():
    window = 5
    eps = 0.002
    rng = np.random.default_rng(8)
    offsets = (eps / 2, -eps / 2)
    truth = np.cumsum(rng.normal(0.0, 0.0004, size=(60, 3)), axis=0)
    hover = [i % 11 < 6 for i in range(60)]

    frames = []
    for i in range(60):
        t_pose = StylusPose(Vec3(*(truth[i] + np.array([offsets[0], 0, 0]))), UP)
        v_pose = StylusPose(Vec3(*(truth[i] + np.array([offsets[1], 0, 0]))), UP)
        frames.append((tablet(t_pose if hover[i] else None), vision(v_pose)))

    fused = list(fuse_stream(frames, BlendConfig(window_frames=window)))
    for i in range(1, 60):
        motion = float(np.linalg.norm(truth[i] - truth[i - 1]))
        step = (fused[i].pose.tip - fused[i - 1].pose.tip).norm()
        assert step <= motion + eps / window + 1e-9


def test_source_correctness_outside_blending():
    """Hover frames fuse from the tablet, non-hover from vision, with only
    blending frames exempt."""
    rng = np.random.default_rng(3)
    frames = []
    hovers = []
    for i in range(120):
        hovering = bool(rng.random() < 0.5) if i % 9 == 0 else hovers[-1] if hovers else True
        hovers.append(hovering)
        truth = pose(0.0004 * i)
        frames.append((tablet(truth if hovering else None), vision(pose(0.0004 * i + 0.001))))
    fused = list(fuse_stream(frames))
    for hovering, f in zip(hovers, fused):
        if f.source == SOURCE_BLENDING:
            continue
        assert f.source == (SOURCE_TABLET if hovering else SOURCE_VISION)


def test_both_lost_holds_last_pose():
    fuser = PoseFuser()
    fuser.fuse(tablet(pose(0.01)), vision(None))
    out = fuser.fuse(tablet(None), vision(None))
    assert out.source == SOURCE_LOST
    assert out.pose.tip.x == pytest.approx(0.01)


def test_lost_with_no_history_has_no_pose():
    fuser = PoseFuser()
    out = fuser.fuse(tablet(None), vision(None))
    assert out.source == SOURCE_LOST
    assert out.pose is None


def test_axis_blend_normalized_and_sign_aligned():
    window = 4
    fuser = PoseFuser(BlendConfig(window_frames=window))
    fuser.fuse(tablet(pose(0.0, axis=Vec3(0.0, 0.1, 1.0).normalized())), vision(None))
    # vision reports the axis with flipped sign; blend must not pass through zero
    flipped = Vec3(0.0, -0.1, -1.0).normalized()
    for _ in range(window + 1):
        out = fuser.fuse(tablet(None), vision(pose(0.0, axis=flipped)))
        assert abs(out.pose.axis.norm() - 1.0) < 1e-9


def test_blend_config_validation():
    with pytest.raises(ValueError):
        BlendConfig(window_frames=0)
