import numpy as np

from qcollapse.graph_state import add_result, finish_suite
from qcollapse.params import params_for_gamma
from qcollapse.profile import (evaluate_R, integrate_inward, large_xi_tail_fit, small_xi_asymptote,
                               tail_constant)

TAIL_XI = np.linspace(20.0, 30.0, 101)
SMALL_XI = 0.01
ORACLE_XI = np.geomspace(0.5, 30.0, 60)


def asymptotics_node(state):
    acc = state["accuracy"]
    for gamma in state["gammas"]:
        params = params_for_gamma(gamma)

        envelope = np.abs(np.asarray(evaluate_R(params, TAIL_XI, acc))) * TAIL_XI ** 3
        add_result(state, "asymptotics", "tail envelope spread on [20, 30]", gamma,
                   np.ptp(envelope) / envelope.mean(), 1e-2)

        near = evaluate_R(params, SMALL_XI, acc)
        add_result(state, "asymptotics", "small-xi asymptote at 0.01", gamma,
                   abs(near - small_xi_asymptote(params, SMALL_XI)) / abs(near), 1e-3)

        fit = large_xi_tail_fit(params, acc=acc)
        exact = tail_constant(params)
        add_result(state, "asymptotics", "fitted vs analytic tail constant", gamma,
                   abs(fit.constant - exact) / abs(exact), 1e-2)

        closed = np.asarray(evaluate_R(params, ORACLE_XI, acc))
        inward = integrate_inward(params, ORACLE_XI, acc=acc)
        add_result(state, "asymptotics", "inward ODE oracle on [0.5, 30]", gamma,
                   np.max(np.abs(inward - closed) / np.abs(closed)), 1e-6)
    return finish_suite(state, "asymptotics")
