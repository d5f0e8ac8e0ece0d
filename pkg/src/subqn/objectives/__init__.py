from .base import Objective, ACTIVE_ATOL
from .hinge import (
    BinaryHingeObjective,
    MulticlassHingeObjective,
    MultilabelHingeObjective,
    uniform_label_loss,
)
from .logistic import L1LogisticObjective
from .analytic import (
    ANALYTIC_PROBLEMS,
    PolyhedralObjective,
    ScaledConeObjective,
    analytic_objective,
    analytic_start,
    plateau_max_objective,
    scaled_absolute_objective,
    vee_max_objective,
)

__all__ = [
    "ACTIVE_ATOL",
    "ANALYTIC_PROBLEMS",
    "BinaryHingeObjective",
    "L1LogisticObjective",
    "MulticlassHingeObjective",
    "MultilabelHingeObjective",
    "Objective",
    "PolyhedralObjective",
    "ScaledConeObjective",
    "analytic_objective",
    "analytic_start",
    "plateau_max_objective",
    "scaled_absolute_objective",
    "uniform_label_loss",
    "vee_max_objective",
]
