from typing import Optional, TypedDict

from qcollapse.models import EvalAccuracy


class CheckResult(TypedDict):
    suite: str
    check: str
    gamma: Optional[float]
    value: float
    limit: float
    passed: bool


class CheckState(TypedDict):
    gammas: list[float]
    pending: list[str]
    results: list[CheckResult]
    accuracy: EvalAccuracy
    metadata: dict


def add_result(state: CheckState, suite: str, check: str, gamma: Optional[float],
               value: float, limit: float) -> None:
    state["results"].append(CheckResult(suite=suite, check=check, gamma=gamma, value=float(value),
                                        limit=float(limit), passed=bool(value <= limit)))


def finish_suite(state: CheckState, suite: str) -> CheckState:
    state["pending"] = [name for name in state["pending"] if name != suite]
    state["metadata"].setdefault("completed", []).append(suite)
    return state
