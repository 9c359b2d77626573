"""Constant-velocity Kalman filter over the stylus tip plus a direct
observation of the axis direction, used to smooth per-frame pose fits.

State layout: [tip(3), tip velocity(3), axis(3)]. The axis block is
renormalized to unit length after every update.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import TrackerConfig
from .geometry import StylusPose, Vec3

_PSD_TOL = 1e-8


@dataclass
class KalmanState:
    x: np.ndarray          # (9,)
    P: np.ndarray          # (9, 9) symmetric PSD
    last_update: int       # frame index of the last measurement update
    resets: int = 0        # covariance resets after PSD loss

    @property
    def tip(self) -> Vec3:
        return Vec3.from_array(self.x[:3])

    @property
    def velocity(self) -> Vec3:
        return Vec3.from_array(self.x[3:6])

    @property
    def axis(self) -> Vec3:
        return Vec3.from_array(self.x[6:9]).normalized()

    def pose(self) -> StylusPose:
        return StylusPose(self.tip, self.axis)


def _prior_covariance(cfg: TrackerConfig) -> np.ndarray:
    return np.diag(
        [cfg.meas_sigma_pos_m**2] * 3
        + [0.5**2] * 3
        + [max(cfg.meas_sigma_axis, 1e-6) ** 2] * 3
    )


def initial_state(measurement: StylusPose, frame_index: int, cfg: TrackerConfig) -> KalmanState:
    x = np.concatenate([measurement.tip.as_array(), np.zeros(3), measurement.axis.as_array()])
    return KalmanState(x=x, P=_prior_covariance(cfg), last_update=frame_index)


def _transition(dt: float) -> np.ndarray:
    F = np.eye(9)
    F[0:3, 3:6] = dt * np.eye(3)
    return F


def _process_noise(cfg: TrackerConfig) -> np.ndarray:
    return np.diag(
        [cfg.process_sigma_pos_m**2] * 3
        + [cfg.process_sigma_vel_mps**2] * 3
        + [cfg.process_sigma_axis**2] * 3
    )


def predict(state: KalmanState, dt: float, cfg: TrackerConfig) -> KalmanState:
    """Advance the motion model one step without a measurement."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    F = _transition(dt)
    x = F @ state.x
    P = F @ state.P @ F.T + _process_noise(cfg)
    return replace(state, x=x, P=0.5 * (P + P.T))


def kalman_step(
    state: KalmanState,
    measurement: StylusPose,
    dt: float,
    cfg: TrackerConfig,
    frame_index: int | None = None,
) -> KalmanState:
    """Predict + update with an observed pose; keeps the covariance symmetric PSD."""
    pred = predict(state, dt, cfg)
    x, P = pred.x, pred.P

    meas_axis = measurement.axis.as_array()
    if float(meas_axis @ x[6:9]) < 0:
        meas_axis = -meas_axis  # directions are sign-ambiguous; stay on the filter's side
    z = np.concatenate([measurement.tip.as_array(), meas_axis])

    H = np.zeros((6, 9))
    H[0:3, 0:3] = np.eye(3)
    H[3:6, 6:9] = np.eye(3)
    R = np.diag([cfg.meas_sigma_pos_m**2] * 3 + [max(cfg.meas_sigma_axis, 1e-9) ** 2] * 3)

    y = z - H @ x
    S = H @ P @ H.T + R
    K = np.linalg.solve(S.T, (P @ H.T).T).T
    x_new = x + K @ y
    I_KH = np.eye(9) - K @ H
    P_new = I_KH @ P @ I_KH.T + K @ R @ K.T
    P_new = 0.5 * (P_new + P_new.T)

    resets = state.resets
    if float(np.linalg.eigvalsh(P_new)[0]) < -_PSD_TOL:
        P_new = _prior_covariance(cfg)  # numerical breakdown: fall back to the prior
        resets += 1

    axis_norm = float(np.linalg.norm(x_new[6:9]))
    if axis_norm > 1e-12:
        x_new[6:9] /= axis_norm
    else:
        x_new[6:9] = meas_axis

    return KalmanState(
        x=x_new,
        P=P_new,
        last_update=frame_index if frame_index is not None else state.last_update + 1,
        resets=resets,
    )
