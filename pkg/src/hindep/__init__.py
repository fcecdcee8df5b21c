"""Sup-norm test of independence for paired functional (Hilbert-space valued) data."""

__version__ = "0.1.0"

from .core import (PairedDataset, SampleGrid, basis_coefficients, fourier_basis, project,
                   riemann_inner_product)
from .directions import angles_to_direction, direction_grid, direction_sample
from .errors import (DegenerateDataWarning, DimensionError, HindepError, NumericalError,
                     ParameterError, ParseError, ResourceError)
from .inference import (asymptotic_power, bootstrap_pvalue, critical_value, fit_null_model,
                        mc_level, mc_power, mix_split_size_power, sample_sup_distribution)
from .processes import example_pair
from .statistic import EvalGrid, StatisticConfig, discrepancy_surface, t_statistic
