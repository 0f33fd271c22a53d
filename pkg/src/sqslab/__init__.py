"""Statistical query sampling: predicates, oracles, adversaries, samplers and experiment harness."""

from __future__ import annotations

from .domain import (
    AllNegParity,
    BitVector,
    BoolLinear,
    Dictator,
    DictatorClass,
    Domain,
    FullCube,
    NegParity,
    NormalizedBoolLinear,
    PuncturedCube,
    PuncturedZp,
    SetMembership,
    ZpVector,
    density,
    positive_set,
)
from .harness import ExperimentConfig, run_experiment, verify_lemmas
from .oracles import (
    AdversaryState,
    HonestSQL,
    HonestSQS,
    QueryBudget,
    boollinear_adversary,
    negparity_adversary,
    optimal_success,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryState", "AllNegParity", "BitVector", "BoolLinear", "Dictator", "DictatorClass", "Domain",
    "ExperimentConfig", "FullCube", "HonestSQL", "HonestSQS", "NegParity", "NormalizedBoolLinear",
    "PuncturedCube", "PuncturedZp", "QueryBudget", "SetMembership", "ZpVector", "boollinear_adversary",
    "density", "negparity_adversary", "optimal_success", "positive_set", "run_experiment", "verify_lemmas",
]
