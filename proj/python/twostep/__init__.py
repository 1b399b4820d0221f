"""Two-step consensus simulator and checker suite.

Thin wrapper over the C++ core: deterministic partially-synchronous
simulation of the two-step consensus protocol (task and object variants),
exhaustive two-step and recovery checks, and seeded safety fuzzing.
"""

from ._core import (
    check_two_step,
    fuzz,
    recovery_oracle,
    replay,
    required_n,
    run_scenario,
    sync_scenario,
)

__all__ = [
    "check_two_step",
    "fuzz",
    "recovery_oracle",
    "replay",
    "required_n",
    "run_scenario",
    "sync_scenario",
]
