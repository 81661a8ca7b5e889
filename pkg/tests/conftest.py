import numpy as np
import pytest

from qdiscrim import HermitianOperator, SteeringMeasurement, convex_weights_for_center
from qdiscrim.operators import hermitian_eigen


def compose_rotations_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random unitary built from composed two-level plane rotations."""
    u = np.eye(dim, dtype=complex)
    for _ in range(2):
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                theta = rng.uniform(0, 2 * np.pi)
                phi = rng.uniform(0, 2 * np.pi)
                g = np.eye(dim, dtype=complex)
                g[p, p] = np.cos(theta)
                g[q, q] = np.cos(theta)
                g[p, q] = -np.exp(1j * phi) * np.sin(theta)
                g[q, p] = np.exp(-1j * phi) * np.sin(theta)
                u = u @ g
    return u


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_rotation_3d(rng: np.random.Generator) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def steering_measurement_for_state(symmetry_op, rho, fire_prob) -> SteeringMeasurement:
    """Invert the steering map: the A-side measurement whose first outcome
    prepares rho with the given probability on the B side."""
    total = symmetry_op.trace()
    normalized = symmetry_op.matrix / total
    decomp = hermitian_eigen(HermitianOperator(normalized))
    d_half = np.diag(1.0 / np.sqrt(np.maximum(decomp.eigenvalues, 1e-300)))
    v = decomp.eigenvectors
    target = fire_prob * rho.matrix
    m_t = d_half @ v.conj().T @ target @ v @ d_half
    return SteeringMeasurement(HermitianOperator(m_t.T))


def random_class_element_params(rng: np.random.Generator):
    """Admissible inputs for the direct qubit ensemble constructor."""
    while True:
        m = int(rng.integers(2, 5))
        units = rng.standard_normal((m, 3))
        units /= np.linalg.norm(units, axis=1, keepdims=True)
        try:
            weights = convex_weights_for_center(list(units), np.zeros(3))
        except ValueError:
            continue
        a = 2.0 * weights
        if float(np.linalg.norm(sum(w * u for w, u in zip(a, units)))) > 5e-10:
            continue
        q = 1.0 + 0.3 * rng.uniform(-1, 1, m)
        q /= q.sum()
        headroom = 2 * float(np.min(q)) - float(np.max(q))
        if headroom < 0.05:
            continue
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        center = float(rng.uniform(0, 0.25 * headroom)) * direction
        slack = 2 * float(np.min(q)) - float(np.linalg.norm(center)) - float(np.max(q))
        value = float(np.max(q)) + float(rng.uniform(0.2, 0.9)) * slack
        return value, center, list(units), a, q


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
