"""Local Hamiltonians, grouped spectra, Bohr frequencies and Bohr blocks."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .errors import DimensionMismatch, GroupingUnstable, NotHermitian, SizeLimit

DEFAULT_GROUP_TOL_FACTOR = 1e-8


@dataclass(frozen=True)
class LocalHamiltonian:
    """A Hamiltonian given as a sum of few-qubit Hermitian terms.

    ``norm_bound`` is the sum of the term norms, a safe upper bound on
    ||H|| used by descent step-size rules.
    """

    n: int
    terms: tuple
    dense: np.ndarray
    norm_bound: float


@dataclass(frozen=True)
class SpectralData:
    """Grouped spectrum of a Hermitian operator.

    ``energies[g]`` is the mean eigenvalue of group ``g`` and
    ``projectors[g]`` the orthogonal projector onto its eigenspace.
    ``bohr_freqs`` is the deduplicated, sorted set of energy differences,
    closed under negation by construction.
    """

    energies: np.ndarray
    projectors: tuple
    bohr_freqs: np.ndarray
    spectral_gap: float
    bohr_gap: float
    group_tol: float

    @property
    def ground_projector(self):
        return self.projectors[0]

    @property
    def ground_energy(self):
        return float(self.energies[0])

    def bohr_index(self, nu):
        """Index of the Bohr frequency nearest to ``nu``."""
        return int(np.argmin(np.abs(self.bohr_freqs - nu)))


@dataclass
class BohrBlocks:
    """Decomposition A = sum_nu A_nu over Bohr frequencies of a Hamiltonian."""

    label: str
    freq_indices: np.ndarray  # indices into SpectralData.bohr_freqs
    freqs: np.ndarray
    mats: list = field(repr=False)

    def items(self):
        return zip(self.freqs, self.mats)

    def total(self):
        out = np.zeros_like(self.mats[0])
        for m in self.mats:
            out = out + m
        return out


def assemble(terms, n: int) -> LocalHamiltonian:
    """Build a dense Hamiltonian from (matrix, sites) terms on ``n`` qubits."""
    if n > ops.MAX_QUBITS:
        raise SizeLimit(f"n={n} exceeds the dense-size guard of {ops.MAX_QUBITS}")
    dense = np.zeros((2**n, 2**n), dtype=complex)
    norm_bound = 0.0
    kept = []
    for op, sites in terms:
        op = np.asarray(op, dtype=complex)
        if ops.hermiticity_defect(op) > 1e-10 * max(ops.operator_norm(op), 1e-300):
            raise NotHermitian(f"term on sites {tuple(sites)} is not Hermitian")
        dense += ops.kron_embed(op, sites, n)
        norm_bound += ops.operator_norm(op)
        kept.append((op, tuple(sites)))
    return LocalHamiltonian(n=n, terms=tuple(kept), dense=dense, norm_bound=norm_bound)


def build_ising_chain(n: int, h: float, periodic: bool = True, j_scale: float = 1.0):
    """Ferromagnetic chain H = -J sum Z_j Z_{j+1} - J h sum Z_j."""
    if n < 2:
        raise SizeLimit("the Ising chain needs at least 2 sites")
    zz = -j_scale * np.kron(ops.PAULI["Z"], ops.PAULI["Z"])
    terms = [(zz, (j, j + 1)) for j in range(n - 1)]
    if periodic:
        terms.append((zz, (n - 1, 0)))
    if h != 0.0:
        z = -j_scale * h * ops.PAULI["Z"]
        terms.extend((z, (j,)) for j in range(n))
    return assemble(terms, n)


def _cluster_sorted(values, tol):
    """Group a sorted 1d array into runs separated by gaps > tol."""
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            groups.append(slice(start, i))
            start = i
    return groups


def spectral_data(ham, group_tol=None) -> SpectralData:
    """Grouped eigendecomposition with Bohr frequencies and gaps.

    Eigenvalues are grouped by the transitive closure of
    ``|l_i - l_j| <= group_tol``; a :class:`GroupingUnstable` error is
    raised when two group means are within ``3 * group_tol`` (ambiguous
    clustering).
    """
    dense = ham.dense if isinstance(ham, LocalHamiltonian) else np.asarray(ham)
    w, v = ops.herm_eig(dense)
    scale = max(np.max(np.abs(w)), 1e-300) if len(w) else 1.0
    if group_tol is None:
        group_tol = DEFAULT_GROUP_TOL_FACTOR * scale
    if group_tol <= 0:
        raise ValueError("group_tol must be positive")

    slices = _cluster_sorted(w, group_tol)
    energies = np.array([float(np.mean(w[s])) for s in slices])
    for a, b in zip(energies[:-1], energies[1:]):
        if b - a <= 3 * group_tol:
            raise GroupingUnstable(
                f"group energies {a} and {b} are within 3*group_tol={3 * group_tol:.3e}"
            )
    projectors = []
    for s in slices:
        block = v[:, s]
        projectors.append(block @ block.conj().T)

    # Bohr frequencies: cluster the nonnegative differences, then mirror so
    # the set is exactly closed under negation.
    diffs = (energies[:, None] - energies[None, :]).ravel()
    pos = np.sort(diffs[diffs > group_tol])
    pos_freqs = []
    if len(pos):
        for s in _cluster_sorted(pos, group_tol):
            pos_freqs.append(float(np.mean(pos[s])))
    pos_freqs = np.array(pos_freqs)
    bohr = np.concatenate([-pos_freqs[::-1], [0.0], pos_freqs])

    if len(energies) > 1:
        spectral_gap = float(np.min(np.diff(energies)))
    else:
        spectral_gap = math.inf
    if len(bohr) > 1:
        bohr_gap = float(np.min(np.diff(bohr)))
    else:
        bohr_gap = math.inf
    return SpectralData(
        energies=energies,
        projectors=tuple(projectors),
        bohr_freqs=bohr,
        spectral_gap=spectral_gap,
        bohr_gap=bohr_gap,
        group_tol=float(group_tol),
    )


def bohr_decompose(a_mat, sd: SpectralData, label: str = "", drop_factor=1e-12):
    """Decompose ``a_mat`` into blocks A_nu = sum_{E2-E1=nu} P_{E2} A P_{E1}."""
    a_mat = np.asarray(a_mat, dtype=complex)
    dim = sd.projectors[0].shape[0]
    if a_mat.shape != (dim, dim):
        raise DimensionMismatch(
            f"operator shape {a_mat.shape} does not match dimension {dim}"
        )
    cutoff = drop_factor * max(ops.operator_norm(a_mat), 1e-300)
    acc = {}
    for i, pi in enumerate(sd.projectors):
        left = pi @ a_mat
        for j, pj in enumerate(sd.projectors):
            nu = sd.energies[i] - sd.energies[j]
            k = sd.bohr_index(nu)
            block = left @ pj
            if k in acc:
                acc[k] = acc[k] + block
            else:
                acc[k] = block
    keys = sorted(k for k, m in acc.items() if ops.operator_norm(m) > cutoff)
    return BohrBlocks(
        label=label,
        freq_indices=np.array(keys, dtype=int),
        freqs=sd.bohr_freqs[keys],
        mats=[acc[k] for k in keys],
    )
