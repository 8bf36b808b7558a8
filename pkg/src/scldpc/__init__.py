"""Partitioned spatially coupled LDPC codes: construction, search and evaluation."""

from .construct import (
    CBMatrix,
    assemble_locality,
    build_local,
    couple_partition,
    cutting_vector,
    lift,
    lift_coupled,
    power_matrix,
)
from .cycles import count_c6_lifted, count_c6_proto, count_c6_sc, cycle_report
from .design import (
    DesignCandidate,
    LocalityDesigner,
    ParetoDesigner,
    ParetoList,
    locality_design,
    pareto_design,
)
from .enumeration import (
    count_distributions,
    count_filtered,
    count_nonequivalent,
    enumerate_nonequivalent,
)
from .exit_chart import proxy_global_threshold, threshold
from .simulate import SimConfig, simulate_ber, simulate_local_ber

__version__ = "0.1.0"
