"""Finite-dimensional numerics and randomized inequality checks."""

from .checks import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    SUITES,
    CheckResult,
    VerificationReport,
    check_chi_truncation,
    check_gentle,
    check_lemma1,
    check_misc_inequalities,
    check_pinching,
    check_tail_bound,
    pinch,
    run_suite,
    suite_gentle,
    suite_pinching,
    suite_tail_bound,
)
from .quantum import (
    ChannelRep,
    Ensemble,
    apply_local,
    conditional_entropy,
    conditional_mutual_information,
    cq_state,
    holevo_quantity,
    mutual_information,
    partial_trace,
    permute_systems,
    pure,
    qcmi,
    random_isometry,
    random_projector,
    random_pure,
    random_state,
    random_unitary,
    trace_distance,
    trace_norm,
    truncate,
    validate_state,
    von_neumann_entropy,
)
