SUITES = ("residual", "asymptotics", "identities", "observables")


def suite_router(state):
    if not state["pending"]:
        return "done"
    return state["pending"][0]
