"""Experiment drivers: manufactured cases, convergence studies, robustness
and inf-sup diagnostics, report output and the command-line interface."""

from .cases import ManufacturedCase, boundary_layer_case, gradient_case, smooth_case
from .convergence import StudyConfig, StudyRecord, run_convergence
from .diagnostics import RobustnessReport, check_pressure_robustness, estimate_inf_sup
