"""Sparse operators on a truncated Hilbert space.

Builds the multiqubit multimode Rabi Hamiltonian

    H = sum_i omega_i a_i^dag a_i
      + sum_ij g_ij sigma_jx (a_i + a_i^dag)
      + sum_j delta_j sigma_jz,

its rotating-wave (Jaynes-Cummings) variant, the Z2 parity operator,
the excitation-number operator, mode/qubit ladder operators, and the
photon-number-block decomposition of a parity-sector Hamiltonian.

Truncation is hard: matrix elements that would exceed the total-photon
cutoff are dropped.  All builders are pure functions of immutable
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
import scipy.sparse as sp

from .errors import CutoffTooSmall, DimensionMismatch, IndexOutOfRange
from .hilbert import (
    DOWN,
    UP,
    BasisState,
    HilbertSpace,
    ModelDims,
    ParitySector,
    enumerate_basis,
    parity_of,
)

DENSE_THRESHOLD = 4096


@dataclass(frozen=True)
class RabiParams:
    """Mode frequencies omega_i, half-splittings delta_j, couplings g[i, j].

    All values in units of a reference frequency (typically omega = 1).
    """

    omega: np.ndarray
    delta: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", np.atleast_1d(np.asarray(self.omega, dtype=float)))
        object.__setattr__(self, "delta", np.atleast_1d(np.asarray(self.delta, dtype=float)))
        object.__setattr__(self, "g", np.atleast_2d(np.asarray(self.g, dtype=float)))
        if np.any(self.omega <= 0):
            raise ValueError(f"mode frequencies must be positive, got {self.omega}")
        if not np.all(np.isfinite(self.g)):
            raise ValueError("couplings must be finite")
        if self.g.shape != (self.M, self.N):
            raise DimensionMismatch(
                f"coupling matrix shape {self.g.shape} != (M={self.M}, N={self.N})"
            )

    @property
    def M(self) -> int:
        return len(self.omega)

    @property
    def N(self) -> int:
        return len(self.delta)

    def check_space(self, space: HilbertSpace):
        if (self.M, self.N) != (space.dims.M, space.dims.N):
            raise DimensionMismatch(
                f"params for (M={self.M}, N={self.N}) on space dims {space.dims}"
            )


@dataclass(frozen=True)
class SparseOperator:
    """A sparse matrix tied to the Hilbert space whose ordering it uses."""

    space: HilbertSpace
    matrix: sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.space.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return 0.0 if d.nnz == 0 else np.max(np.abs(d.data))

    def coo_lines(self):
        """Coordinate-format dump: ``row col re im`` per line."""
        coo = self.matrix.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            yield f"{r} {c} {v.real:.17g} {v.imag:.17g}"


def _build(space: HilbertSpace, triplets) -> SparseOperator:
    rows, cols, vals = [], [], []
    for r, c, v in triplets:
        rows.append(r)
        cols.append(c)
        vals.append(v)
    m = sp.coo_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)),
        shape=(space.dim, space.dim),
    ).tocsr()
    m.sum_duplicates()
    return SparseOperator(space=space, matrix=m)


def _flip_spin(state: BasisState, j: int) -> BasisState:
    spins = list(state.spins)
    spins[j] = -spins[j]
    return BasisState(state.occupations, tuple(spins))


def _shift_mode(state: BasisState, i: int, dn: int) -> BasisState:
    occ = list(state.occupations)
    occ[i] += dn
    return BasisState(tuple(occ), state.spins)


def build_hamiltonian(params: RabiParams, space: HilbertSpace) -> SparseOperator:
    """Rabi Hamiltonian with sigma_x coupling, hard-truncated at n_max."""
    params.check_space(space)
    n_max = space.dims.n_max

    def triplets():
        for col, st in enumerate(space.states):
            diag = sum(params.omega[i] * n for i, n in enumerate(st.occupations))
            diag += sum(params.delta[j] * s for j, s in enumerate(st.spins))
            yield col, col, diag
            for i in range(params.M):
                for j in range(params.N):
                    gij = params.g[i, j]
                    if gij == 0.0:
                        continue
                    flipped = _flip_spin(st, j)
                    n_i = st.occupations[i]
                    if st.total_photons < n_max:
                        up = _shift_mode(flipped, i, +1)
                        yield space.index(up), col, gij * sqrt(n_i + 1)
                    if n_i > 0:
                        down = _shift_mode(flipped, i, -1)
                        yield space.index(down), col, gij * sqrt(n_i)

    return _build(space, triplets())


def build_jc_hamiltonian(params: RabiParams, space: HilbertSpace) -> SparseOperator:
    """Rotating-wave variant: only a_i sigma_j^+ + a_i^dag sigma_j^- retained."""
    params.check_space(space)
    n_max = space.dims.n_max

    def triplets():
        for col, st in enumerate(space.states):
            diag = sum(params.omega[i] * n for i, n in enumerate(st.occupations))
            diag += sum(params.delta[j] * s for j, s in enumerate(st.spins))
            yield col, col, diag
            for i in range(params.M):
                for j in range(params.N):
                    gij = params.g[i, j]
                    if gij == 0.0:
                        continue
                    n_i = st.occupations[i]
                    if st.spins[j] == DOWN and n_i > 0:
                        # a_i sigma_j^+
                        tgt = _shift_mode(_flip_spin(st, j), i, -1)
                        yield space.index(tgt), col, gij * sqrt(n_i)
                    if st.spins[j] == UP and st.total_photons < n_max:
                        # a_i^dag sigma_j^-
                        tgt = _shift_mode(_flip_spin(st, j), i, +1)
                        yield space.index(tgt), col, gij * sqrt(n_i + 1)

    return _build(space, triplets())


def build_parity_operator(space: HilbertSpace) -> SparseOperator:
    """Z2 generator exp(i pi sum a^dag a) * prod_j sigma_jz, diagonal +-1."""
    diag = np.array([parity_of(st).sign for st in space.states], dtype=complex)
    return SparseOperator(space=space, matrix=sp.diags(diag).tocsr())


def build_excitation_operator(space: HilbertSpace) -> SparseOperator:
    """Excitation number sum_i a_i^dag a_i + sum_j sigma_jz/2 + N/2 (diagonal)."""
    N = space.dims.N
    diag = np.array(
        [st.total_photons + sum(st.spins) / 2 + N / 2 for st in space.states],
        dtype=complex,
    )
    return SparseOperator(space=space, matrix=sp.diags(diag).tocsr())


def build_mode_lowering(space: HilbertSpace, i: int) -> SparseOperator:
    """Annihilation operator a_i (only closed on a full, unsectored space)."""
    if not 0 <= i < space.dims.M:
        raise IndexOutOfRange(f"mode index {i} for M={space.dims.M}")

    def triplets():
        for col, st in enumerate(space.states):
            n_i = st.occupations[i]
            if n_i > 0:
                tgt = _shift_mode(st, i, -1)
                if tgt in space:
                    yield space.index(tgt), col, sqrt(n_i)

    return _build(space, triplets())


def build_qubit_op(space: HilbertSpace, j: int, axis: str) -> SparseOperator:
    """Pauli or ladder operator on qubit j; axis in {x, y, z, +, -}.

    sigma^- lowers up to down (the relaxation jump operator); x/y flip and
    map a parity sector out of itself, so use them on full spaces only.
    """
    if not 0 <= j < space.dims.N:
        raise IndexOutOfRange(f"qubit index {j} for N={space.dims.N}")
    if axis not in ("x", "y", "z", "+", "-"):
        raise ValueError(f"unknown axis {axis!r}")

    def triplets():
        for col, st in enumerate(space.states):
            s = st.spins[j]
            if axis == "z":
                yield col, col, float(s)
                continue
            flipped = _flip_spin(st, j)
            if axis == "x":
                if flipped in space:
                    yield space.index(flipped), col, 1.0
            elif axis == "y":
                if flipped in space:
                    # sigma_y |up> = i|down>, sigma_y |down> = -i|up>
                    yield space.index(flipped), col, 1j if s == UP else -1j
            elif axis == "+":
                if s == DOWN and flipped in space:
                    yield space.index(flipped), col, 1.0
            elif axis == "-":
                if s == UP and flipped in space:
                    yield space.index(flipped), col, 1.0

    return _build(space, triplets())


def build_mode_number(space: HilbertSpace, i: int) -> SparseOperator:
    """Photon number a_i^dag a_i (diagonal)."""
    if not 0 <= i < space.dims.M:
        raise IndexOutOfRange(f"mode index {i} for M={space.dims.M}")
    diag = np.array([st.occupations[i] for st in space.states], dtype=complex)
    return SparseOperator(space=space, matrix=sp.diags(diag).tocsr())


@dataclass(frozen=True)
class BlockDecomposition:
    """Photon-number blocks of the parity-sector Hamiltonian.

    D[k] is the diagonal block on the k-photon subspace (size
    2^(N-1) C(M+k-1, k)); O[k] connects k -> k+1 photons and has shape
    (block k+1) x (block k).  Reassembled block-tridiagonally they give
    the sector Hamiltonian on the shared photon range.
    """

    parity: ParitySector
    D: list[np.ndarray]
    O: list[np.ndarray]
    k_max: int
    space: HilbertSpace

    def stacked_coefficient_matrix(self, energy: float) -> np.ndarray:
        """The overdetermined one-photon-ansatz matrix, generalized to k_max.

        Columns span photon blocks 0..k_max, rows 0..k_max+1; the extra
        bottom row block is O[k_max] acting out of the top kept block.
        """
        ncols = sum(b.shape[1] for b in self.O)
        nrows = sum(d.shape[0] for d in self.D) + self.O[-1].shape[0]
        K = np.zeros((nrows, ncols))
        r = c = 0
        for k in range(self.k_max + 1):
            dk = self.D[k] - energy * np.eye(self.D[k].shape[0])
            K[r : r + dk.shape[0], c : c + dk.shape[1]] = dk
            K[r + dk.shape[0] : r + dk.shape[0] + self.O[k].shape[0], c : c + dk.shape[1]] = self.O[k]
            r += dk.shape[0]
            c += dk.shape[1]
        return K


def extract_blocks(params: RabiParams, parity: ParitySector, k_max: int) -> BlockDecomposition:
    """Photon-block decomposition of the sector Hamiltonian up to k_max.

    Internally works at cutoff k_max + 1 so that O[k_max] is available.
    """
    if k_max < 0:
        raise CutoffTooSmall(f"k_max must be >= 0, got {k_max}")
    dims = ModelDims(M=params.M, N=params.N, n_max=k_max + 1)
    space = enumerate_basis(dims, sector=parity)
    H = build_hamiltonian(params, space).dense().real
    blocks = space.photon_block_slices()
    D = [H[blocks[k], blocks[k]] for k in range(k_max + 1)]
    O = [H[blocks[k + 1], blocks[k]] for k in range(k_max + 1)]
    return BlockDecomposition(parity=parity, D=D, O=O, k_max=k_max, space=space)


def kronecker_oracle(params: RabiParams, space: HilbertSpace) -> np.ndarray:
    """Dense tensor-product construction of H, then projected onto ``space``.

    Independent route used to cross-check the sparse builder: operators
    are assembled mode by mode / qubit by qubit with per-mode Fock cutoff
    n_max, multiplied out as explicit Kronecker products, and the result
    is restricted to the truncated (and optionally parity-restricted)
    basis of ``space``.
    """
    params.check_space(space)
    M, N = params.M, params.N
    n_max = space.dims.n_max
    d_mode = n_max + 1

    a = np.diag(np.sqrt(np.arange(1, d_mode)), k=1)  # annihilation, single mode
    n_op = a.T @ a
    sx = np.array([[0, 1], [1, 0]], dtype=float)
    sz = np.array([[1, 0], [0, -1]], dtype=float)
    eye_mode = np.eye(d_mode)
    eye_q = np.eye(2)

    def embed(ops_modes, ops_qubits):
        out = np.array([[1.0]])
        for i in range(M):
            out = np.kron(out, ops_modes.get(i, eye_mode))
        for j in range(N):
            out = np.kron(out, ops_qubits.get(j, eye_q))
        return out

    H = np.zeros((d_mode**M * 2**N,) * 2)
    for i in range(M):
        H += params.omega[i] * embed({i: n_op}, {})
    for j in range(N):
        H += params.delta[j] * embed({}, {j: sz})
    for i in range(M):
        for j in range(N):
            H += params.g[i, j] * embed({i: a + a.T}, {j: sx})

    # project onto the total-photon-truncated (and sector) basis
    def full_index(st: BasisState) -> int:
        idx = 0
        for n in st.occupations:
            idx = idx * d_mode + n
        for s in st.spins:
            idx = idx * 2 + (0 if s == UP else 1)
        return idx

    sel = np.array([full_index(st) for st in space.states])
    return H[np.ix_(sel, sel)]
