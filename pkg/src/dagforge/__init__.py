"""Random task-graph generation, DAG property measurement, and unit-cost
list scheduling."""

from .core import (
    CycleError,
    Dag,
    DuplicateEdgeError,
    GraphError,
    SelfLoopError,
    ShapeDecomposition,
    TooLargeError,
    VertexRangeError,
    depths,
    from_edge_list,
    reversal,
    shape_decomposition,
    transitive_closure,
    transitive_reduction,
)
from .metrics import BlockReport, DagProperties, mass_and_blocks, measure_all, width
from .special import InadmissibleSizeError, SpecialKind, build_special, oracle_properties
from .generators import (
    CapExceededError,
    CountTable,
    GeneratorSpec,
    closed_form_predictions,
    dag_count_table,
    derive_rng,
    erdos_renyi,
    layer_by_layer,
    random_orders,
    random_shape,
    shape_to_dag,
    uniform_dag,
)
from .scheduling import (
    Schedule,
    brute_force_optimal,
    composed_optimal,
    decompose_at_bottlenecks,
    hcpt,
    hcpt_trap,
    heft,
    lower_bound,
    minmin,
    minmin_trap,
    upward_rank,
    validate_schedule,
)
from .uniformity import (
    ClassCatalog,
    canonical_class,
    chi_square_test,
    empirical_class_distribution,
    enumerate_labeled_dags,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
