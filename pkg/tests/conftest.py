import numpy as np
import pytest

from qnls.poly import HomPoly, ModeSet


def random_balanced(ms: ModeSet, q: int, rng, n_keys: int = 6,
                    real: bool = True) -> HomPoly:
    """Sparse random balanced polynomial; real-valued when requested."""
    coeffs = {}
    modes = np.array(ms.modes)
    for _ in range(n_keys):
        k = tuple(sorted(rng.choice(modes, q)))
        l = tuple(sorted(rng.choice(modes, q)))
        c = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[(k, l)] = coeffs.get((k, l), 0j) + c
        if real:
            coeffs[(l, k)] = coeffs.get((l, k), 0j) + c.conjugate()
    return HomPoly(ms, q, coeffs)


def random_state(ms: ModeSet, rng, norm: float = 1.0) -> np.ndarray:
    u = rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size)
    return u * (norm / np.linalg.norm(u))


def coeff_close(P: HomPoly, Q: HomPoly, rtol: float = 1e-12) -> bool:
    """Coefficientwise comparison with a relative tolerance against the
    largest coefficient involved."""
    scale = max([abs(c) for c in P.coeffs.values()] +
                [abs(c) for c in Q.coeffs.values()] + [1e-300])
    for key in set(P.coeffs) | set(Q.coeffs):
        if abs(P.coeffs.get(key, 0j) - Q.coeffs.get(key, 0j)) > rtol * scale:
            return False
    return True


def is_zero(P: HomPoly, scale: float, rtol: float = 1e-12) -> bool:
    return all(abs(c) <= rtol * scale for c in P.coeffs.values())


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
