"""Python front end for the SALE simulator core."""

import json

from ._core import (
    FrameConfig,
    GenerationError,
    Graph,
    PacketRunConfig,
    ParseError,
    RunConfig,
    RunTrace,
    build_graph,
    builtin_names,
    builtin_topology,
    complete_graph,
    distance_to_pareto,
    elect_leaders,
    is_connected,
    is_positive_definite,
    jacobian_det,
    jain_weighted,
    leader_gain,
    parse_topology,
    pi_gains,
    pi_stability_check,
    random_geometric,
    ring_graph,
    rims,
    run_ideal,
    run_packet,
    sensitivity_at_rim,
    solve_nash,
    stability_matrix,
    steady_state,
    throughput,
)
from ._core import metrics_json as _metrics_json
from ._core import run_scenario_file as _run_scenario_file


def metrics(g, trace, frame=None, pareto=True):
    """Metrics report of a finished run as a dict."""
    return json.loads(_metrics_json(g, trace, frame or FrameConfig(), pareto))


def run_scenario(path, write_files=False):
    """Run a scenario file. Returns (exit_code, metrics dict, written paths)."""
    code, report, written = _run_scenario_file(str(path), write_files)
    return code, json.loads(report), written


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
