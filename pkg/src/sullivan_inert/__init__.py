"""Exact rational Sullivan models, cell attachments and rational inertness."""

from .attach import fiber_dimension_table, inertness_check, pd_inertness, wedge_of_spheres_model
from .gca import Caps
from .lie import FreeLieAlgebra, magnus_log, theorem3_certificate, witt_dims
from .onerel import OneRelatorScenario, aspherical_check, circle_inertness_scenario
from .sullivan import CdgaPresentation, SullivanAlgebra, minimal_model, relative_model

__version__ = "0.1.0"

__all__ = [
    "Caps",
    "CdgaPresentation",
    "FreeLieAlgebra",
    "OneRelatorScenario",
    "SullivanAlgebra",
    "aspherical_check",
    "circle_inertness_scenario",
    "fiber_dimension_table",
    "inertness_check",
    "magnus_log",
    "minimal_model",
    "pd_inertness",
    "relative_model",
    "theorem3_certificate",
    "wedge_of_spheres_model",
    "witt_dims",
]
