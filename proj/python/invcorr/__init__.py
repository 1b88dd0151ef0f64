"""Investor inventory-variation analytics."""

import json as _json

from ._core import (
    InvcorrError,
    __version__,
    binomial_herding_test,
    binomial_lower_tail,
    binomial_upper_tail,
    bootstrap_categorize,
    corr_with_return,
    correlation_of_columns,
    eigenvalues_descending,
    fit_exponential_tail,
    fit_power_bulk,
    fit_shuffled_exponential,
    gen_factor_panel,
    gen_iid_panel,
    gen_leadlag_panel,
    granger_indicator,
    granger_test,
    herding_index,
    mp_bounds,
    mp_density,
    regress_factor_return,
    significance_band,
    threshold_categorize,
)
from ._core import _run


def run(subcommand, config=None, **overrides):
    """Run a pipeline subcommand. `config` is a dict in the JSON config layout."""
    cfg = dict(config or {})
    cfg.update(overrides)
    return _run(subcommand, _json.dumps(cfg))
