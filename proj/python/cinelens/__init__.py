# Copyright 2026 The CineLens Authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the CineLens camera simulator."""

from ._core import (
    DEFAULT_PORT,
    BindError,
    CameraState,
    DimensionMismatchError,
    DomainError,
    EmptyTrackError,
    Error,
    Filmback,
    IoError,
    Lens,
    NoTargetError,
    NotFoundError,
    Scenario,
    Session,
    ValidationError,
    clamp_camera_state,
    coc_diameter,
    default_coc_limit,
    dof_limits,
    evaluate_track,
    filmback_preset,
    filmback_presets,
    horizontal_fov_deg,
    hyperfocal_distance,
    image_distance,
    lens_preset,
    lens_presets,
    parse_framelog_csv,
    render_frame,
    run_scenario,
    vertical_fov_deg,
)

__version__ = "0.1.0"
