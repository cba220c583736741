# Copyright (c) 2021-2022, InterDigital Communications, Inc
# All rights reserved.

# Redistribution and use in source and binary forms, with or without
# modification, are permitted (subject to the limitations in the disclaimer
# below) provided that the following conditions are met:

# * Redistributions of source code must retain the above copyright notice,
#   this list of conditions and the following disclaimer.
# * Redistributions in binary form must reproduce the above copyright notice,
#   this list of conditions and the following disclaimer in the documentation
#   and/or other materials provided with the distribution.
# * Neither the name of InterDigital Communications, Inc nor the names of its
#   contributors may be used to endorse or promote products derived from this
#   software without specific prior written permission.

# NO EXPRESS OR IMPLIED LICENSES TO ANY PARTY'S PATENT RIGHTS ARE GRANTED BY
# THIS LICENSE. THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND
# CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT
# NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A
# PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
# CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
# EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
# PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
# OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
# WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
# OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF
# ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

"""
Design, evaluate and verify public signalling mechanisms from scenario files.

Example usages:
    * :code:`python -m hybridsignal.utils.cli design-stateless --scenario scenario.json`
    * :code:`python -m hybridsignal.utils.cli design-stateful --scenario states.json --weights 1,0,0`
    * :code:`python -m hybridsignal.utils.cli oracle --scenario scenario.json --grid 2000`
    * :code:`python -m hybridsignal.utils.cli sweep --config sweep.json --seed 7 --out sweep.csv -j 4`

Results are printed on stdout as JSON (CSV for ``sweep`` without ``--out``),
diagnostics on stderr. Exit codes: 0 success, 2 input error, 3 numerical
failure.
"""

import argparse
import json
import sys

from typing import Any, Dict, List

import numpy as np

from hybridsignal.design import (
    ORACLE_GRID,
    design,
    design_stateful,
    design_weighted,
    discretize,
    oracle_value,
    stateful_table,
)
from hybridsignal.design.stateless import (
    R2A_BREAKPOINTS,
    R2A_TARGETS,
    R4_SCAN_POINTS,
)
from hybridsignal.exceptions import NumericalError
from hybridsignal.harness import (
    ExperimentConfig,
    evaluate_stateful_mech,
    evaluate_stateless,
    run_capacity_sweep,
    write_csv,
    write_rows,
)
from hybridsignal.linprog import PIVOT_TOL
from hybridsignal.mechanisms import mechanism_from_config
from hybridsignal.ops import MEMBERSHIP_TOL

from .scenario import (
    SCHEMA,
    StatelessScenario,
    is_stateful,
    load_json,
    stateful_from_config,
    write_json,
)


def _emit(output: Dict[str, Any], out: str):
    output = {"schema": SCHEMA, **output}
    if out:
        write_json(output, out)
    print_json(output)


def print_json(output: Dict[str, Any]):
    print(json.dumps(output, indent=2))


def design_stateless_cmd(args):
    scenario = StatelessScenario.from_config(load_json(args.scenario))
    result = design(
        scenario.prior,
        scenario.beliefs,
        grid=args.grid,
        targets=args.r2a_targets,
        breakpoints=args.r2a_breakpoints,
        scan_points=args.r4_scan,
    )
    if not scenario.beliefs:
        print(
            "Warning: no posterior mean reaches the goal, V*=0", file=sys.stderr
        )
    print(f"Regime {result.regime}, V*={result.value:.6f}", file=sys.stderr)
    output = {"beliefs": [list(b) for b in scenario.beliefs]}
    output.update(result.to_config(scenario.prior))
    _emit(output, args.out)


def design_stateful_cmd(args):
    scenario = stateful_from_config(load_json(args.scenario))
    if args.weights:
        weights = [float(w) for w in args.weights.split(",") if w]
        result = design_weighted(scenario, weights, pivot_tol=args.pivot_tol)
    else:
        weights = None
        result = design_stateful(scenario, pivot_tol=args.pivot_tol)
    conditionals = ", ".join(f"{v:.4f}" for v in result.conditionals)
    print(f"V*={result.value:.6f}, V_j=({conditionals})", file=sys.stderr)
    output = {"gammas": scenario.gammas.tolist()}
    if weights is not None:
        output["weights"] = weights
    output.update(result.to_config())
    if weights is None:
        output["benchmarks"] = stateful_table(scenario, result)
    _emit(output, args.out)


def evaluate_cmd(args):
    config = load_json(args.scenario)
    document = load_json(args.mechanism)
    # design outputs embed the mechanism, stateful ones only carry the rows
    if "type" not in document and "mechanism" in document:
        document = document["mechanism"]
    if "type" not in document and "rows" in document:
        mechanism = np.asarray(document["rows"], dtype=float)
    else:
        mechanism = mechanism_from_config(document)

    if is_stateful(config):
        report = evaluate_stateful_mech(
            mechanism, stateful_from_config(config), tol=args.tol
        )
    elif isinstance(mechanism, np.ndarray):
        raise ValueError("A bare signal table needs a stateful scenario")
    else:
        scenario = StatelessScenario.from_config(config)
        report = evaluate_stateless(
            mechanism, scenario.prior, scenario.beliefs, tol=args.tol
        )
    _emit(report.to_config(), args.out)


def oracle_cmd(args):
    scenario = StatelessScenario.from_config(load_json(args.scenario))
    instance = discretize(scenario.prior, args.grid, scenario.beliefs)
    result = oracle_value(instance, pivot_tol=args.pivot_tol)
    print(f"V_oracle={result.value:.6f} (grid {result.grid})", file=sys.stderr)
    _emit(result.to_config(), args.out)


def sweep_cmd(args):
    config = load_json(args.config) if args.config else {}
    if args.seed is not None:
        config["seed"] = args.seed
    if args.trials is not None:
        config["trials"] = args.trials
    experiment = ExperimentConfig.from_config(config)
    rows = run_capacity_sweep(experiment, args.num_jobs, args.verbose)
    if args.out:
        write_csv(rows, args.out)
        print(f"Wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    else:
        write_rows(rows, sys.stdout)


def setup_args():
    parser = argparse.ArgumentParser(
        description="Optimal public signalling for hybrid-work capacity goals."
    )
    subparsers = parser.add_subparsers(dest="command", help="Select command")
    subparsers.required = True

    out_parser = argparse.ArgumentParser(add_help=False)
    out_parser.add_argument(
        "-o", "--out", type=str, default="", help="also write the JSON output here"
    )
    lp_parser = argparse.ArgumentParser(add_help=False)
    lp_parser.add_argument(
        "--pivot-tol",
        type=float,
        default=PIVOT_TOL,
        help="simplex pivot tolerance (default: %(default)s)",
    )

    p = subparsers.add_parser(
        "design-stateless",
        parents=[out_parser],
        help="optimal mechanism for a fixed goal",
    )
    p.add_argument("--scenario", type=str, required=True, help="scenario JSON")
    p.add_argument(
        "--grid",
        type=int,
        default=ORACLE_GRID,
        help="oracle grid for the general gap regime (default: %(default)s)",
    )
    p.add_argument(
        "--r2a-targets",
        type=int,
        default=R2A_TARGETS,
        help="targets per interval in the mixture search (default: %(default)s)",
    )
    p.add_argument(
        "--r2a-breakpoints",
        type=int,
        default=R2A_BREAKPOINTS,
        help="breakpoints in the mixture search (default: %(default)s)",
    )
    p.add_argument(
        "--r4-scan",
        type=int,
        default=R4_SCAN_POINTS,
        help="scan points bracketing the pooled mass (default: %(default)s)",
    )
    p.set_defaults(func=design_stateless_cmd)

    p = subparsers.add_parser(
        "design-stateful",
        parents=[out_parser, lp_parser],
        help="optimal table for state-dependent capacity floors",
    )
    p.add_argument("--scenario", type=str, required=True, help="scenario JSON")
    p.add_argument(
        "--weights",
        type=str,
        default="",
        help="per-state objective weights (example: '1,0,0')",
    )
    p.set_defaults(func=design_stateful_cmd)

    p = subparsers.add_parser(
        "evaluate", parents=[out_parser], help="compliance probability of a mechanism"
    )
    p.add_argument("--scenario", type=str, required=True, help="scenario JSON")
    p.add_argument("--mechanism", type=str, required=True, help="mechanism JSON")
    p.add_argument(
        "--tol",
        type=float,
        default=MEMBERSHIP_TOL,
        help="belief membership tolerance (default: %(default)s)",
    )
    p.set_defaults(func=evaluate_cmd)

    p = subparsers.add_parser(
        "oracle",
        parents=[out_parser, lp_parser],
        help="discretized lower bound on the optimal value",
    )
    p.add_argument("--scenario", type=str, required=True, help="scenario JSON")
    p.add_argument(
        "--grid",
        type=int,
        default=ORACLE_GRID,
        help="number of quantile cells (default: %(default)s)",
    )
    p.set_defaults(func=oracle_cmd)

    p = subparsers.add_parser("sweep", help="seeded capacity-floor experiment")
    p.add_argument("--config", type=str, default="", help="experiment JSON")
    p.add_argument("--seed", type=int, default=None, help="override the seed")
    p.add_argument("--trials", type=int, default=None, help="override the trials")
    p.add_argument("-o", "--out", type=str, default="", help="output CSV")
    p.add_argument(
        "-j",
        "--num-jobs",
        type=int,
        metavar="N",
        default=1,
        help="number of parallel jobs (default: %(default)s)",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="progress bar")
    p.set_defaults(func=sweep_cmd)
    return parser


def main(argv: List[str]):
    parser = setup_args()
    args = parser.parse_args(argv)

    try:
        args.func(args)
    except NumericalError as err:
        print(f"Error: {err}", file=sys.stderr)
        raise SystemExit(3)
    except KeyError as err:
        print(f"Error: missing key {err}", file=sys.stderr)
        raise SystemExit(2)
    except (ValueError, TypeError, OSError) as err:
        print(f"Error: {err}", file=sys.stderr)
        raise SystemExit(2)


if __name__ == "__main__":
    main(sys.argv[1:])
