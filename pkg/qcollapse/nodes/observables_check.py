from qcollapse.graph_state import add_result, finish_suite
from qcollapse.observables import DECAY_COEFF, analytic_norm, radial_moment_integrals
from qcollapse.params import params_for_gamma


def observables_node(state):
    for gamma in state["gammas"]:
        params = params_for_gamma(gamma)
        report = radial_moment_integrals(params, acc=state["accuracy"])
        I0 = report.norm_I0
        add_result(state, "observables", "I0 vs closed form", gamma,
                   abs(I0 - analytic_norm(params)) / I0, 1e-8)
        add_result(state, "observables", "Re J + 3/2 I0", gamma, abs(report.energy_J.real + 1.5 * I0) / I0, 1e-8)
        add_result(state, "observables", "C_p - 2 C_r", gamma, abs(report.C_p - 2.0 * report.C_r) / report.C_r, 1e-8)
        add_result(state, "observables", "decay coefficient - 3/4", gamma, abs(report.decay_coeff - DECAY_COEFF), 1e-8)
        add_result(state, "observables", "C_r order of unity", gamma,
                   0.0 if 0.01 < report.C_r < 100 else 1.0, 0.5)
    return finish_suite(state, "observables")
