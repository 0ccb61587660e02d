import logging

import numpy as np

from qcollapse.graph_state import add_result, finish_suite
from qcollapse.params import params_for_gamma
from qcollapse.profile import ode_residual

logger = logging.getLogger(__name__)

RESIDUAL_XI = np.geomspace(0.05, 20.0, 200)
RESIDUAL_LIMIT = 1e-9


def residual_node(state):
    for gamma in state["gammas"]:
        worst = float(np.max(ode_residual(params_for_gamma(gamma), RESIDUAL_XI, state["accuracy"])))
        logger.debug(f"gamma={gamma:g}: max ODE residual {worst:.3g}")
        add_result(state, "residual", "max ODE residual on [0.05, 20]", gamma, worst, RESIDUAL_LIMIT)
    return finish_suite(state, "residual")
