"""Self-similar collapse of a quantum particle in an inverse-square potential."""
from qcollapse.errors import NumericalError, QCollapseError, ValidationError
from qcollapse.models import CollapseParams, EvalAccuracy, ObservableReport, ProfileTable
from qcollapse.params import derive_params, params_for_gamma

__all__ = [
    "CollapseParams",
    "EvalAccuracy",
    "NumericalError",
    "ObservableReport",
    "ProfileTable",
    "QCollapseError",
    "ValidationError",
    "derive_params",
    "params_for_gamma",
]
