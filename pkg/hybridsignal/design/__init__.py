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

from .oracle import (
    ORACLE_GRID,
    DiscretizedInstance,
    OracleResult,
    discretize,
    oracle_value,
)
from .stateful import (
    StatefulBenchmarks,
    StatefulDesign,
    StatefulScenario,
    benchmarks_stateful,
    build_lp,
    design_stateful,
    design_weighted,
    is_threshold_table,
    stateful_table,
)
from .stateless import (
    EMPTY,
    R1,
    R2_GENERAL,
    R2A,
    R3,
    R4,
    MixtureSplit,
    RegimeLabel,
    StatelessDesign,
    classify,
    design,
    partition_mechanism,
    pooling_high_mass,
    pooling_low_mass,
    search_r2a,
    solve_split,
)

__all__ = [
    "ORACLE_GRID",
    "DiscretizedInstance",
    "OracleResult",
    "discretize",
    "oracle_value",
    "StatefulBenchmarks",
    "StatefulDesign",
    "StatefulScenario",
    "benchmarks_stateful",
    "build_lp",
    "design_stateful",
    "design_weighted",
    "is_threshold_table",
    "stateful_table",
    "EMPTY",
    "R1",
    "R2_GENERAL",
    "R2A",
    "R3",
    "R4",
    "MixtureSplit",
    "RegimeLabel",
    "StatelessDesign",
    "classify",
    "design",
    "partition_mechanism",
    "pooling_high_mass",
    "pooling_low_mass",
    "search_r2a",
    "solve_split",
]
