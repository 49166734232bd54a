"""Reconstruction of a hidden common driver from two observed time series.

The package simulates driven chaotic systems, tests for a hidden common
driver with nearest-neighbor dimension estimates, and recovers the driver
with an anisotropic self-organizing map. Hot loops run in a compiled
extension when available (see :data:`BACKEND`).
"""

from ._backend import BACKEND
from .asom import (SomGrid, TrainingSchedule, TrainingTrace, global_winner, init_grid, load_grid,
                   neighborhood_weights, readout, row_winner, save_grid, schedules, train,
                   update_centers)
from .baselines import LinearProjection, cca_first_pair, pca_first_component, phase_shuffle
from .config import ExperimentConfig, load_config, parse_config
from .dimension import (Relation, analyze_dimensions, classify_relation, dimension_over_k_range,
                        global_dimension, local_dimension, mutual_dimension, som_shape_from_dims)
from .dynamics import (LogisticTriadParams, PairParams, SimulationOutput, TentTriadParams,
                       logistic_pair_simulate, logistic_triad_simulate, sample_experiment_params,
                       tent_tilted, tent_triad_simulate)
from .embedding import EmbeddedSeries, delay_embed, joint_embed, standardize, time_permute_joint
from .errors import (ConfigError, DivergenceError, HiddenDriverError, NumericalError,
                     PipelineError, UnsupportedShapeError)
from .evaluation import batch_summary, cross_correlation, evaluate, pearson
from .neighbors import NeighborIndex, build_index, cross_map_asymmetry, cross_map_neighborhood
from .pipeline import export_figure_data, run_batch, run_demo

__version__ = "0.1.0"
