"""JSON schemas shared by the CLI, files on disk, and tests.

Matrices travel as {"dim": n, "re": [[...]], "im": [[...]]}, row-major
with decimal floating point entries. Bloch vectors are plain [x, y, z]
triples. Parsing errors carry the offending field in their message so the
CLI can emit a usable diagnostic.
"""

from __future__ import annotations

import numpy as np

from .certify import KktCertificate, ProbabilityForms
from .factory import FactoryOutput
from .operators import DensityOperator, HermitianOperator, _eigh
from .solve import DiscriminationSolution, WeightedEnsemble


def round_floats(value, digits: int = 9):
    """Recursively round floats to a fixed number of significant digits."""
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    return value


def matrix_to_json(matrix) -> dict:
    m = matrix.matrix if hasattr(matrix, "matrix") else np.asarray(matrix, dtype=complex)
    return {
        "dim": m.shape[0],
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
    }


def matrix_from_json(obj, field: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError(f"{field}: expected an object with dim/re/im")
    for key in ("dim", "re", "im"):
        if key not in obj:
            raise ValueError(f"{field}: missing key {key!r}")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"{field}.dim: expected a positive integer, got {dim!r}")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{field}: entries must be numbers ({exc})") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(
            f"{field}: re/im must be {dim}x{dim}, got {re.shape} and {im.shape}"
        )
    return re + 1j * im


def bloch_to_json(v) -> list[float]:
    return [float(x) for x in np.asarray(v, dtype=float).reshape(3)]


def ensemble_to_json(ensemble: WeightedEnsemble) -> dict:
    return {
        "priors": [float(q) for q in ensemble.priors],
        "states": [matrix_to_json(s) for s in ensemble.states],
    }


def ensemble_from_json(obj) -> WeightedEnsemble:
    """Parse an ensemble document into a validated WeightedEnsemble.

    Files written at 9 significant digits come back with priors and state
    traces off by up to ~1e-9, so defects below 1e-8 are renormalized away
    on parse; anything worse fails with a field diagnostic.
    """
    if not isinstance(obj, dict):
        raise ValueError("ensemble: expected an object with priors/states")
    if "priors" not in obj or "states" not in obj:
        raise ValueError("ensemble: missing key 'priors' or 'states'")
    priors = obj["priors"]
    states_json = obj["states"]
    if not isinstance(priors, list) or not isinstance(states_json, list):
        raise ValueError("ensemble: priors and states must be arrays")

    q = np.asarray(priors, dtype=float)
    total = float(np.sum(q))
    if q.ndim != 1 or abs(total - 1.0) > 1e-8:
        raise ValueError(f"priors: must sum to 1, got {total!r}")
    q = q / total

    states = []
    for i, state in enumerate(states_json):
        matrix = matrix_from_json(state, field=f"states[{i}]")
        try:
            states.append(_density_from_rounded(matrix))
        except ValueError as exc:
            raise ValueError(f"states[{i}]: {exc}") from exc
    try:
        return WeightedEnsemble(q, states)
    except ValueError as exc:
        raise ValueError(f"ensemble: {exc}") from exc


def _density_from_rounded(matrix: np.ndarray) -> DensityOperator:
    """Build a state from serialized entries, absorbing rounding up to 1e-8."""
    h = HermitianOperator(matrix)
    trace = h.trace()
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"state trace must be 1, got {trace!r}")
    values, vectors = _eigh(h.matrix / trace)
    if values[-1] < -1e-8:
        raise ValueError(f"state has negative eigenvalue {values[-1]:.3e}")
    clipped = np.maximum(values, 0.0)
    rebuilt = (vectors * clipped) @ vectors.conj().T
    return DensityOperator(HermitianOperator(rebuilt / np.trace(rebuilt).real))


def solution_to_json(solution: DiscriminationSolution) -> dict:
    complementary = []
    for r, sigma in zip(solution.complementary.weights, solution.complementary.states):
        complementary.append(
            {"r": float(r), "sigma": None if sigma is None else matrix_to_json(sigma)}
        )
    return {
        "p_guess": float(solution.p_guess),
        "K": matrix_to_json(solution.symmetry_op),
        "complementary": complementary,
        "povm": [matrix_to_json(m) for m in solution.povm],
        "support": [int(x) for x in solution.support],
    }


def certificate_to_json(cert: KktCertificate) -> dict:
    return {
        "residuals": {k: float(v) for k, v in cert.residuals().items()},
        "tolerance": float(cert.tolerance),
        "verdict": cert.verdict,
    }


def probability_forms_to_json(forms: ProbabilityForms) -> dict:
    out = {k: float(v) for k, v in forms.values().items()}
    out["spread"] = float(forms.spread())
    out["steering_probs"] = [float(p) for p in forms.steering_probs]
    return out


def factory_output_to_json(output: FactoryOutput) -> dict:
    doc = ensemble_to_json(output.ensemble)
    doc["steering_probs"] = [float(p) for p in output.steering_probs]
    doc["certified"] = bool(output.certified)
    doc["K"] = matrix_to_json(output.symmetry_op)
    if output.povm is not None:
        doc["povm"] = [matrix_to_json(m) for m in output.povm]
    return doc
