import pytest

from lectern.config import CameraConfig
from lectern.geometry import CameraIntrinsics, RigidTransform, StereoRig
from lectern.simulator import StylusModel, default_rig


@pytest.fixture(scope="session")
def intrinsics() -> CameraIntrinsics:
    return CameraIntrinsics(fx=240.0, fy=240.0, cx=320.0, cy=120.0, width=640, height=240)


@pytest.fixture(scope="session")
def identity_rig(intrinsics) -> StereoRig:
    return StereoRig(intrinsics=intrinsics, baseline=0.04, rig_pose=RigidTransform.identity())


@pytest.fixture(scope="session")
def rig() -> StereoRig:
    return default_rig(CameraConfig())


@pytest.fixture(scope="session")
def model() -> StylusModel:
    return StylusModel.default()
