"""Multigroup confidence intervals: direct, empirical Bayes, FAB, quantile-bound."""

import json as _json

from ._groupcover import *  # noqa: F401,F403
from ._groupcover import __version__, simulate_coverage as _simulate_coverage_json


def simulate(scenario):
    """Run a coverage scenario given as a dict (or JSON string); returns a dict."""
    if not isinstance(scenario, str):
        scenario = _json.dumps(scenario)
    return _json.loads(_simulate_coverage_json(scenario))
