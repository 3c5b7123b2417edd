"""Sample-efficient black-box optimization over binned predictive posteriors."""

from .posterior import (
    DiscretePosterior,
    GaussianPosterior,
    closed_form_ei,
    dei,
    discretize_gaussian,
    feasibility_mass,
    moments,
)
from .sampling import Rng, latin_hypercube, train_test_split, uniform_sample
from .space import DesignPoint, DesignSpace, ObservationSet
from .specs import SpecItem, SpecSet, constraint_margin, fom, score_item

__version__ = "0.1.0"

__all__ = [
    "DesignSpace",
    "DesignPoint",
    "ObservationSet",
    "Rng",
    "uniform_sample",
    "latin_hypercube",
    "train_test_split",
    "DiscretePosterior",
    "GaussianPosterior",
    "moments",
    "closed_form_ei",
    "dei",
    "discretize_gaussian",
    "feasibility_mass",
    "SpecItem",
    "SpecSet",
    "score_item",
    "fom",
    "constraint_margin",
]
