"""Self-similar configurations: uniform states, geometry and admissibility checks."""

from .build import (KINDS, build_configuration, build_four_shock, build_lighthill, build_prandtl,
                    build_regular_reflection, build_regular_reflection_nonsym, lighthill_gate)
from .curves import (CircularArc, CoonsPatch, CubicHermite, CurveKind, CurveSegment, LineSegment,
                     Polyline, outward_normal)
from .export import angle_sweep, geometry_dict, write_geometry_json, write_sweep_csv
from .model import Configuration, Region, SonicCircle, StraightShock
from .states import (CornerSolution, CriticalAngles, IncidentShock, Reflection, critical_angles,
                     detachment_angle, four_shock_states, incident_shock_setup, normal_reflection,
                     prandtl_problem, regular_reflection_angles, solve_corner, solve_state2,
                     sonic_angle)
from .validate import (Thresholds, ValidationReport, constant_state_closure, corner_angles,
                       validate_admissible_structure)
