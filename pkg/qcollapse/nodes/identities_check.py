"""Special-function identities on seeded random draws."""
import numpy as np

from qcollapse import specfun
from qcollapse.graph_state import add_result, finish_suite

N_DRAWS = 1000
SEED = 20240607


def _draws(rng, n):
    a = rng.uniform(-2.0, 2.0, n) + 1j * rng.uniform(-2.0, 2.0, n)
    b = rng.uniform(1.0, 3.0, n) + 1j * rng.uniform(-2.0, 2.0, n)
    radius = rng.uniform(0.0, 20.0, n)
    z = radius * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    return a, b, z


def _relative(lhs, rhs):
    return np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs)))


def kummer_transformation_error(a, b, z, acc):
    lhs = specfun.kummer_1f1(a, b, z, acc)
    rhs = np.exp(z) * specfun.kummer_1f1(b - a, b, -z, acc)
    return _relative(lhs, rhs)


def gamma_recurrence_error(z):
    return _relative(specfun.complex_gamma(z + 1.0), z * specfun.complex_gamma(z))


def gamma_reflection_error(z):
    return _relative(specfun.complex_gamma(z) * specfun.complex_gamma(1.0 - z), np.pi / np.sin(np.pi * z))


def derivative_error(a, b, z, acc, h=1e-3):
    """Analytic dM/dz against a five-point central difference."""
    def m(shift):
        return np.asarray(specfun.kummer_1f1(a, b, z + shift, acc))
    fd = (m(-2 * h) - 8 * m(-h) + 8 * m(h) - m(2 * h)) / (12 * h)
    return _relative(np.asarray(specfun.kummer_1f1_derivative(a, b, z, acc)), fd)


def identities_node(state):
    acc = state["accuracy"]
    rng = np.random.default_rng(SEED)
    a, b, z = _draws(rng, N_DRAWS)
    add_result(state, "identities", "Kummer transformation", None, kummer_transformation_error(a, b, z, acc), 1e-10)

    w = rng.uniform(0.1, 8.0, N_DRAWS) + 1j * rng.uniform(-5.0, 5.0, N_DRAWS)
    add_result(state, "identities", "Gamma recurrence", None, gamma_recurrence_error(w), 1e-12)
    v = rng.uniform(-3.9, 3.9, N_DRAWS) + 1j * rng.uniform(0.1, 3.0, N_DRAWS)
    add_result(state, "identities", "Gamma reflection", None, gamma_reflection_error(v), 1e-10)

    small = z * (5.0 / 20.0)
    add_result(state, "identities", "1F1 derivative vs finite difference", None,
               derivative_error(a, b, small, acc), 1e-8)
    return finish_suite(state, "identities")
