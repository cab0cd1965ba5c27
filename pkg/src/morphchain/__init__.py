"""morphchain: design toolkit for material-driven morphing chain mechanisms.

Chains of pre-characterized bending, twisting, and neutral actuator
elements are arranged by a genetic search so that the activated mechanism
matches a parametric target curve, with self-collision screening, a knot
completeness test, gravity-sag prediction, and printable geometry export.
"""

from .calibration import (
    DEFAULT_BEND_TABLE,
    DEFAULT_TWIST_TABLE,
    ExtrapolationError,
    MeasurementTable,
    chain_average,
    profile_from_tables,
    strain_to_angle,
)
from .collision import (
    CollisionConfig,
    CollisionReport,
    completeness_check,
    sweep_collision_check,
)
from .config import ConfigError, RunConfig, SynthesisSettings, config_from_dict, load_config
from .fitness import (
    FitnessWeights,
    TrialAnchors,
    objective,
    orientation_error,
    position_error,
    trial_anchors,
)
from .ga import (
    GARun,
    GASettings,
    SynthesisContext,
    SynthesisResult,
    evaluate_candidate,
    run_ga,
    straight_chain_objective,
    synthesize,
)
from .kinematics import (
    ActivationProfile,
    ElementKind,
    Pose,
    Sequence,
    Trajectory,
    element_offsets,
    element_rotation,
    forward_kinematics,
    reflect_about_root,
    rot_x,
    rot_y,
    rot_z,
    sequence_from_json,
    sequence_to_json,
)
from .materials import (
    DensityField,
    MaterialPair,
    Mesh,
    density_to_mesh,
    export_stl,
    extract_interface,
    extrude_to_mesh,
    interpolate_property,
    parse_stl,
)
from .spaceframe import FrameProperties, SagSolution, assemble_frame, solve_sag
from .target import (
    AnchorSet,
    IdealCurve,
    arc_matched_midpoint_node,
    ideal_anchors,
    ideal_point,
    ideal_tangent,
    sample_curve,
)

__version__ = "0.1.0"
