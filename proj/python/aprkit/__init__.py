"""Program-repair toolkit: code representations, diffs and patch assessment."""

from ._core import (
    AprkitError,
    HunkApplyFailure,
    InvalidPair,
    InvalidRegion,
    MalformedOutput,
    ParseError,
    apply_diff,
    ast_match,
    build_input,
    build_output,
    cohen_kappa,
    count_tokens,
    derive_region,
    enumerate_regions,
    exact_match,
    extract_functions,
    make_diff,
    reconstruct,
    render_training_config,
    valid_pair,
    valid_pairs,
)

__version__ = "0.1.0"
