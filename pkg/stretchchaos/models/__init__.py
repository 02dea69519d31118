"""Discrete models, their parameter conditions and the associated rectangles."""
from .base import ComposedMap, FunctionMap, IntervalMap, PlanarMap
from .conditions import Condition, ConditionReport, duopoly_conditions, olg_conditions
from .domains import (
    ReorientationExample,
    SecondIterate,
    counterexample_geometry,
    covering_matrix,
    duopoly_geometry,
    li_yorke_intervals,
    logistic_geometry,
    logistic_intervals,
    logistic_second_iterate,
    olg_alt_geometry,
    olg_geometry,
    second_iterate_geometry,
    translation_example,
    unit_square,
)
from .maps import (
    MODELS,
    CounterexampleParams,
    DuopolyParams,
    Hump,
    LiYorkeParams,
    LogisticParams,
    Olg1dParams,
    OlgAltParams,
    OlgParams,
    Twist1Params,
    Twist2Params,
    affine_map,
    build_model,
    counterexample_map,
    duopoly_map,
    eval_model,
    li_yorke_map,
    logistic_map,
    olg1d_map,
    olg2d_map,
    twist1_maps,
    twist2_maps,
)
from .twist import (
    TwistGeometry,
    TwistSetup,
    WindingRegions,
    double_twist_params,
    twist1_setup,
    twist2_setup,
    twist_geometry,
    winding_regions,
)

__all__ = [
    "MODELS",
    "ComposedMap",
    "Condition",
    "ConditionReport",
    "CounterexampleParams",
    "DuopolyParams",
    "FunctionMap",
    "Hump",
    "IntervalMap",
    "LiYorkeParams",
    "LogisticParams",
    "Olg1dParams",
    "OlgAltParams",
    "OlgParams",
    "PlanarMap",
    "ReorientationExample",
    "SecondIterate",
    "Twist1Params",
    "Twist2Params",
    "TwistGeometry",
    "TwistSetup",
    "WindingRegions",
    "affine_map",
    "build_model",
    "counterexample_geometry",
    "counterexample_map",
    "covering_matrix",
    "double_twist_params",
    "duopoly_conditions",
    "duopoly_geometry",
    "duopoly_map",
    "eval_model",
    "li_yorke_intervals",
    "li_yorke_map",
    "logistic_geometry",
    "logistic_intervals",
    "logistic_map",
    "logistic_second_iterate",
    "olg1d_map",
    "olg2d_map",
    "olg_alt_geometry",
    "olg_conditions",
    "olg_geometry",
    "second_iterate_geometry",
    "translation_example",
    "twist1_maps",
    "twist1_setup",
    "twist2_maps",
    "twist2_setup",
    "twist_geometry",
    "unit_square",
    "winding_regions",
]
