"""Fractal hemodynamics and functional-network distortion toolkit.

Array arguments are NumPy arrays; time-series matrices are nodes x samples.
Experiment functions take the JSON config text used by the command-line tool.
"""

import json

from ._core import (
    ConfigError,
    IoError,
    NumericalError,
    __version__,
    apply_rshrf,
    centrality,
    centrality_distortion,
    control_config,
    default_config,
    estimate_fc,
    estimate_hurst,
    fgn_autocovariance,
    fractional_difference,
    fractional_integrate,
    gaussian_mutual_information,
    generate_connectome,
    generate_fgn,
    modwt,
    nonfractal_fc,
    run_scales,
    run_sweep,
    run_trial,
    sample_hurst_profile,
    selftest,
    simulate_neural,
    stationary_correlation,
    trial_seed,
)


def config(**overrides):
    """Default config as a dict, with top-level keys replaced by `overrides`."""
    cfg = json.loads(default_config())
    cfg.update(overrides)
    return cfg


def dumps(cfg):
    """Config dict to the JSON text expected by run_trial/run_sweep/run_scales."""
    return json.dumps(cfg)
