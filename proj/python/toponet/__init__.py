"""Topological analysis of softmax classification networks.

Thin python surface over the C++ core: dataset samplers, Urysohn
separators, dense ReLU/softmax nets with activation tracing, per-layer
topological move reports, simplex Voronoi verdicts, Isomap projections,
and the end-to-end experiment runner.
"""

from ._toponet import (
    ActivationTrace,
    ComponentAssignment,
    IsomapResult,
    KernelCollisionWitness,
    LabeledPointSet,
    LiftedField,
    LinearMoveReport,
    MoveReport,
    Network,
    ReluActionReport,
    RunSummary,
    ScalarField,
    SeparabilityVerdict,
    SeparatingPlane,
    SeparationVerdict,
    TrainResult,
    accuracy,
    classical_mds,
    classify_relu_action,
    decompose_linear,
    default_component_epsilon,
    disc_separability_check,
    epsilon_components,
    forward,
    generate,
    head,
    initialize_network,
    isomap,
    kernel_collision_witness,
    layer_move_summary,
    lift_to_rk,
    load_dataset_csv,
    load_network,
    move_reports,
    run_experiment,
    run_experiment_file,
    save_dataset_csv,
    save_network,
    separation_verdict,
    softmax_map,
    trace_activations,
    train,
    urysohn_multiclass,
    urysohn_pair,
    voronoi_cell_of,
)

__all__ = [name for name in dir() if not name.startswith("_")]
