"""Two-widths of closed plane curves via the dual tangent-line arrangement."""
from .curve import (DEFAULT_TOL, Component3, ParamCurve3, PlaneComponent, PlaneCurve, Tolerances,
                    load_curve, plane_curve, project_xy, save_curve, width1)
from .errors import (ArrangementInconsistent, CurvatureSignFailure, DegenerateHeights,
                     DegenerateInflection, DegenerateProjection, FlagViolation, InvalidCurve,
                     KWidthError, LowConfidence, NearTripleTangency, NonTransverseCrossing,
                     ParseError, PerturbationFailed, TangentLine, WidthMismatch)
from .graphic import LineCoord, build_graphic, dual_curve, line_intersections, width2

__all__ = ["DEFAULT_TOL", "Component3", "ParamCurve3", "PlaneComponent", "PlaneCurve",
           "Tolerances", "load_curve", "plane_curve", "project_xy", "save_curve", "width1",
           "LineCoord", "build_graphic", "dual_curve", "line_intersections", "width2",
           "ArrangementInconsistent", "CurvatureSignFailure", "DegenerateHeights",
           "DegenerateInflection", "DegenerateProjection", "FlagViolation", "InvalidCurve",
           "KWidthError", "LowConfidence", "NearTripleTangency", "NonTransverseCrossing",
           "ParseError", "PerturbationFailed", "TangentLine", "WidthMismatch"]

__version__ = "0.1.0"
