"""Information cascades with fake agents: exact analysis, simulation and sweeps."""

import sys

from ._cascade import (
    DerivedModel,
    MCEstimate,
    ModelParams,
    ParameterError,
    ProbInterval,
    Truth,
    UndecidedError,
    UnsupportedRegime,
    agent_mc_estimate,
    bayesian_threshold,
    cascade_thresholds,
    derive,
    detect_drops,
    exact_interval,
    exhaustive_oracle,
    mc_estimate,
    run_cli,
    sequence_lower_bound,
    sweep_eps,
    tree_approx,
)

__all__ = [
    "DerivedModel",
    "MCEstimate",
    "ModelParams",
    "ParameterError",
    "ProbInterval",
    "Truth",
    "UndecidedError",
    "UnsupportedRegime",
    "agent_mc_estimate",
    "bayesian_threshold",
    "cascade_thresholds",
    "derive",
    "detect_drops",
    "exact_interval",
    "exhaustive_oracle",
    "mc_estimate",
    "run_cli",
    "sequence_lower_bound",
    "sweep_eps",
    "tree_approx",
]


def main() -> int:
    code, out, err = run_cli(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
