"""Generalised network autoregression with node-specific exogenous regressors."""

from .design import (
    ModelOrder,
    ParameterVector,
    SeriesData,
    assemble_coefficients,
    build_model_matrix,
    check_stationarity,
    count_parameters,
)
from .errors import ConfigurationError, DataError, GnarxError, NumericalError
from .estimator import FitResult, fit
from .forecaster import ScenarioPath, iterate_forecast, rolling_evaluation
from .midas import MidasSpec, QuarterlySeries, QuarterStamp, align_midas, fit_midas, project_gdp
from .network import Network, build_fully_connected, build_nearest_neighbour, five_net, from_edges
from .panel import CalendarStamp, Panel, load_panel_csv
from .selector import SearchSpace, bic, select_global, select_stagewise
from .stochastic import RngSpec, bootstrap_intervals, simulate

__version__ = "0.1.0"

__all__ = [
    "CalendarStamp",
    "ConfigurationError",
    "DataError",
    "FitResult",
    "GnarxError",
    "MidasSpec",
    "ModelOrder",
    "Network",
    "NumericalError",
    "Panel",
    "ParameterVector",
    "QuarterStamp",
    "QuarterlySeries",
    "RngSpec",
    "ScenarioPath",
    "SearchSpace",
    "SeriesData",
    "align_midas",
    "assemble_coefficients",
    "bic",
    "bootstrap_intervals",
    "build_fully_connected",
    "build_model_matrix",
    "build_nearest_neighbour",
    "check_stationarity",
    "count_parameters",
    "fit",
    "fit_midas",
    "five_net",
    "from_edges",
    "iterate_forecast",
    "load_panel_csv",
    "project_gdp",
    "rolling_evaluation",
    "select_global",
    "select_stagewise",
    "simulate",
]
