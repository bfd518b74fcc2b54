"""Energy landscape under local unitary perturbations.

First-order gradients -i <psi|[H, h_a]|psi>, Haar-random barren-plateau
statistics, and the trivial maximally-mixed predictor Tr(O) / 2^k.
"""

from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .errors import DimensionMismatch, NotHermitian, SizeLimit


@dataclass(frozen=True)
class UnitaryPerturbationSet:
    """Unit-norm Hermitian generators embedded on the full register."""

    labels: tuple
    matrices: tuple
    n: int


def make_generator_set(pairs, n) -> UnitaryPerturbationSet:
    """Embed (label, matrix, sites) generators; each must be Hermitian with
    unit operator norm within 1e-10."""
    labels, mats = [], []
    for label, mat, sites in pairs:
        mat = np.asarray(mat, dtype=complex)
        if ops.hermiticity_defect(mat) > 1e-10 * max(ops.operator_norm(mat), 1e-300):
            raise NotHermitian(f"generator {label!r} is not Hermitian")
        if abs(ops.operator_norm(mat) - 1.0) > 1e-10:
            raise ValueError(f"generator {label!r} must have unit operator norm")
        labels.append(str(label))
        mats.append(ops.kron_embed(mat, sites, n))
    return UnitaryPerturbationSet(labels=tuple(labels), matrices=tuple(mats), n=n)


def pauli_x_generators(n) -> UnitaryPerturbationSet:
    return make_generator_set(
        [(f"X{j}", ops.PAULI["X"], (j,)) for j in range(n)], n
    )


def random_pure_state(n, seed):
    """Haar-random n-qubit state via a normalized complex Gaussian vector."""
    if n > ops.MAX_QUBITS:
        raise SizeLimit(f"n={n} exceeds the dense-size guard of {ops.MAX_QUBITS}")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return vec / np.linalg.norm(vec)


def unitary_gradient(psi, h_mat, gens: UnitaryPerturbationSet):
    """Entries -i <psi|[H, h_a]|psi> (real for Hermitian H, h_a)."""
    psi = np.asarray(psi, dtype=complex)
    h_mat = np.asarray(h_mat, dtype=complex)
    if h_mat.shape != (len(psi), len(psi)):
        raise DimensionMismatch(
            f"H has shape {h_mat.shape} for a state of dimension {len(psi)}"
        )
    h_psi = h_mat @ psi
    out = np.empty(len(gens.matrices))
    for i, gen in enumerate(gens.matrices):
        # -i <psi|[H, h]|psi> = 2 Im <H psi | h psi>
        val = complex(np.vdot(h_psi, gen @ psi))
        out[i] = 2.0 * val.imag
    return out


@dataclass(frozen=True)
class PlateauStats:
    """Haar-sample statistics of gradients and observable deviations."""

    rows: tuple  # (sample_index, max_abs_gradient, obs_deviation)
    reference: float  # Tr(O) / 2^n
    mean_max_gradient: float
    max_max_gradient: float
    mean_obs_deviation: float
    max_obs_deviation: float


def plateau_stats(n, h_mat, o_mat, gens: UnitaryPerturbationSet,
                  num_samples, seed) -> PlateauStats:
    """Aggregate |gradient| maxima and |<O> - Tr(O)/2^n| over Haar samples."""
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    o_mat = np.asarray(o_mat, dtype=complex)
    reference = float(np.trace(o_mat).real) / 2**n
    rows = []
    seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, size=num_samples)
    for i, s in enumerate(seeds):
        psi = random_pure_state(n, int(s))
        grad = unitary_gradient(psi, h_mat, gens)
        obs = complex(np.vdot(psi, o_mat @ psi)).real
        rows.append((i, float(np.max(np.abs(grad))), abs(obs - reference)))
    max_grads = np.array([r[1] for r in rows])
    devs = np.array([r[2] for r in rows])
    return PlateauStats(
        rows=tuple(rows),
        reference=reference,
        mean_max_gradient=float(np.mean(max_grads)),
        max_max_gradient=float(np.max(max_grads)),
        mean_obs_deviation=float(np.mean(devs)),
        max_obs_deviation=float(np.max(devs)),
    )


def trivial_predictor(o_mat, k):
    """Tr(O) / 2^k: the maximally mixed prediction for a k-site observable."""
    o_mat = np.asarray(o_mat, dtype=complex)
    if ops.hermiticity_defect(o_mat) > 1e-10 * max(ops.operator_norm(o_mat), 1e-300):
        raise NotHermitian("observable is not Hermitian")
    return float(np.trace(o_mat).real) / 2**k
