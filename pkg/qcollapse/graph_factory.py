from langgraph.graph import END, StateGraph

from qcollapse.errors import InvalidInput
from qcollapse.graph_state import CheckState
from qcollapse.nodes.asymptotics_check import asymptotics_node
from qcollapse.nodes.identities_check import identities_node
from qcollapse.nodes.observables_check import observables_node
from qcollapse.nodes.residual_check import residual_node
from qcollapse.nodes.router import SUITES, suite_router
from qcollapse.specfun import DEFAULT_ACCURACY

SUITE_NODES = {
    "residual": residual_node,
    "asymptotics": asymptotics_node,
    "identities": identities_node,
    "observables": observables_node,
}


def build_check_graph():
    graph = StateGraph(CheckState)
    routes = {name: name for name in SUITES}
    routes["done"] = END
    for name in SUITES:
        graph.add_node(name, SUITE_NODES[name])
        graph.add_conditional_edges(name, suite_router, routes)
    graph.set_conditional_entry_point(suite_router, routes)
    return graph.compile()


def run_checks(gammas, suites=SUITES, accuracy=None) -> list:
    """Run the selected verification suites; returns the list of check results."""
    unknown = [name for name in suites if name not in SUITE_NODES]
    if unknown:
        raise InvalidInput(f"unknown check suite(s): {', '.join(unknown)}")
    state = CheckState(gammas=list(gammas), pending=list(suites), results=[],
                       accuracy=accuracy or DEFAULT_ACCURACY, metadata={})
    final = build_check_graph().invoke(state)
    return final["results"]
