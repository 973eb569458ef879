"""Timed port automata: histories, composition and stream-function semantics."""

from ._tpanet import (
    Automaton,
    Error,
    History,
    StepFun,
    banach_fix,
    blocking_pair,
    buffer,
    check_equivalence,
    classify_pulse,
    compose,
    copy,
    decomposition_oracle,
    distance,
    fair_merge,
    fixpoint_function,
    hide,
    load,
    random_automaton,
    random_loop_transformer,
    rename,
    run_command,
    unit_delay,
)

__all__ = [
    "Automaton",
    "Error",
    "History",
    "StepFun",
    "banach_fix",
    "blocking_pair",
    "buffer",
    "check_equivalence",
    "classify_pulse",
    "compose",
    "copy",
    "decomposition_oracle",
    "distance",
    "fair_merge",
    "fixpoint_function",
    "hide",
    "load",
    "random_automaton",
    "random_loop_transformer",
    "rename",
    "run_command",
    "unit_delay",
]
