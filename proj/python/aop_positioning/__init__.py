"""Age of Positioning for a random-waypoint agent behind an FCFS update queue."""

from ._core import (
    CSV_HEADER,
    AopBreakdown,
    AopEstimate,
    ConvergenceError,
    Discipline,
    HopRecord,
    Mode,
    ModelParams,
    OptimalPoll,
    QueueParams,
    StabilityError,
    aop_analytic,
    fw_cdf,
    g_of_s,
    generate_hops,
    optimal_p,
    simulate,
    solve_beta,
    t_k,
)

__all__ = [
    "CSV_HEADER",
    "AopBreakdown",
    "AopEstimate",
    "ConvergenceError",
    "Discipline",
    "HopRecord",
    "Mode",
    "ModelParams",
    "OptimalPoll",
    "QueueParams",
    "StabilityError",
    "aop_analytic",
    "fw_cdf",
    "g_of_s",
    "generate_hops",
    "optimal_p",
    "simulate",
    "solve_beta",
    "t_k",
]
