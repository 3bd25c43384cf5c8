"""Volume entropy of weighted word metrics on free and small-cancellation groups."""

from .avoidance import (
    AvoidanceAutomaton,
    ForbiddenSet,
    GrowthSeries,
    build_forbidden_set,
    count_avoiding,
    growth_rate,
    make_forbidden_set,
    myers_solve_at,
    p_eval,
    p_largest_root,
)
from .cayley import ball_count, ball_profile, power_distance
from .entropy import EntropyEstimate, entropy_bounds, free_entropy, minimize_entropy
from .errors import (
    NonConvergence,
    NotTranslationApparent,
    PreconditionError,
    ResourceLimitExceeded,
    WordEntropyError,
)
from .presentations import (
    check_c_prime,
    check_even_distribution,
    check_translation_apparent,
    dehn_reduce,
    max_piece_length,
)
from .random_groups import DensityModelParams, genericity_experiment, sample_presentation
from .words import Presentation, WeightVector, format_word, free_reduce, parse_word

__version__ = "0.1.0"
