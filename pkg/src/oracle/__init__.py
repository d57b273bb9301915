# oracle
from .quantum import (
    commutator_bound,
    distribution_moments,
    expectations,
    filter_expectations,
    filtering_directions,
    heisenberg_product_theory,
    in_plane_direction,
    ozawa_lhs_closed_form,
    ozawa_lhs_theory,
    prob_detuned,
    prob_filter,
    prob_general,
    prob_stage_matrix,
    prob_triple,
    theory_epsilon_eta,
    triple_expectations,
)

__all__ = [
    "commutator_bound",
    "distribution_moments",
    "expectations",
    "filter_expectations",
    "filtering_directions",
    "heisenberg_product_theory",
    "in_plane_direction",
    "ozawa_lhs_closed_form",
    "ozawa_lhs_theory",
    "prob_detuned",
    "prob_filter",
    "prob_general",
    "prob_stage_matrix",
    "prob_triple",
    "theory_epsilon_eta",
    "triple_expectations",
]
