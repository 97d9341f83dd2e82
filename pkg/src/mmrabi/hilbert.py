"""Truncated Fock x spin basis for M bosonic modes and N qubits.

States are labeled by per-mode photon occupations and per-qubit spins
(+1 for up, -1 for down, up being the sigma_z = +1 eigenstate).  The
total photon number is cut off at ``n_max`` (a bound on the sum across
modes, not per mode), so each photon-number block has the stars-and-bars
size C(M+k-1, k).

Canonical ordering: total photon number ascending, then occupation
vectors with mode 1 filled first (descending lexicographic), then spin
configurations ordered as a bitstring with up = 0 and qubit 1 as the
most significant bit.  This makes the block-tridiagonal structure of
the parity-sector Hamiltonian contiguous in index space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .errors import StateNotInSpace

UP = +1
DOWN = -1


@dataclass(frozen=True)
class ModelDims:
    """Model sizes: M modes, N qubits, total-photon cutoff n_max."""

    M: int
    N: int
    n_max: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"need at least one mode, got M={self.M}")
        if self.N < 1:
            raise ValueError(f"need at least one qubit, got N={self.N}")
        if self.n_max < 0:
            raise ValueError(f"cutoff must be non-negative, got n_max={self.n_max}")

    @property
    def n_photon_states(self) -> int:
        return sum(comb(self.M + k - 1, k) for k in range(self.n_max + 1))

    @property
    def dim(self) -> int:
        return 2**self.N * self.n_photon_states


@dataclass(frozen=True)
class BasisState:
    """One labeled configuration |n_1..n_M, s_1..s_N> with s in {+1,-1}."""

    occupations: tuple[int, ...]
    spins: tuple[int, ...]

    def __post_init__(self):
        if any(n < 0 for n in self.occupations):
            raise ValueError(f"negative occupation in {self.occupations}")
        if any(s not in (UP, DOWN) for s in self.spins):
            raise ValueError(f"spins must be +1/-1, got {self.spins}")

    @property
    def total_photons(self) -> int:
        return sum(self.occupations)

    def __str__(self):
        occ = ",".join(str(n) for n in self.occupations)
        spn = ",".join("u" if s == UP else "d" for s in self.spins)
        return f"|{occ};{spn}>"


@dataclass(frozen=True)
class ParitySector:
    """Z2 parity sector label, sign in {+1, -1}."""

    sign: int

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError(f"parity sign must be +1 or -1, got {self.sign}")


EVEN = ParitySector(+1)
ODD = ParitySector(-1)


def parity_of(state: BasisState) -> ParitySector:
    """Parity (-1)^(total photons) * product of spin signs."""
    sign = (-1) ** state.total_photons
    for s in state.spins:
        sign *= s
    return ParitySector(sign)


def _occupation_vectors(M: int, k: int):
    """All M-mode occupation vectors with total k, mode 1 filled first."""
    if M == 1:
        yield (k,)
        return
    for n1 in range(k, -1, -1):
        for rest in _occupation_vectors(M - 1, k - n1):
            yield (n1,) + rest


def _spin_vectors(N: int):
    # product order = ascending bitstring with up=0, qubit 1 most significant
    return itertools.product((UP, DOWN), repeat=N)


@dataclass(frozen=True)
class HilbertSpace:
    """Enumerated, ordered truncated basis, optionally parity-restricted.

    Immutable after construction; index <-> state lookups are mutually
    inverse bijections over the enumerated members.
    """

    dims: ModelDims
    sector: ParitySector | None
    states: tuple[BasisState, ...]
    _index: dict = field(repr=False, hash=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {s: i for i, s in enumerate(self.states)}
        )

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, state: BasisState) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise StateNotInSpace(f"{state} not in space {self.dims}, sector={self.sector}")

    def __contains__(self, state: BasisState) -> bool:
        return state in self._index

    def state(self, i: int) -> BasisState:
        return self.states[i]

    def photon_block_slices(self) -> list[slice]:
        """Index ranges of the k-photon blocks, k = 0..n_max."""
        slices = []
        start = 0
        for k in range(self.dims.n_max + 1):
            n = start
            while n < self.dim and self.states[n].total_photons == k:
                n += 1
            slices.append(slice(start, n))
            start = n
        return slices


def enumerate_basis(dims: ModelDims, sector: ParitySector | None = None) -> HilbertSpace:
    """Enumerate all basis states with total photons <= n_max in canonical order."""
    states = []
    for k in range(dims.n_max + 1):
        for occ in _occupation_vectors(dims.M, k):
            for spins in _spin_vectors(dims.N):
                st = BasisState(occ, spins)
                if sector is None or parity_of(st) == sector:
                    states.append(st)
    return HilbertSpace(dims=dims, sector=sector, states=tuple(states))


def state_index(space: HilbertSpace, state: BasisState) -> int:
    """Index of ``state`` in the canonical ordering; raises StateNotInSpace."""
    return space.index(state)


def basis_csv_lines(space: HilbertSpace):
    """One CSV line per state: index, n_1..n_M, s_1..s_N, parity."""
    yield (
        "index,"
        + ",".join(f"n_{i+1}" for i in range(space.dims.M))
        + ","
        + ",".join(f"s_{j+1}" for j in range(space.dims.N))
        + ",parity"
    )
    for i, st in enumerate(space.states):
        occ = ",".join(str(n) for n in st.occupations)
        spn = ",".join("1" if s == UP else "-1" for s in st.spins)
        yield f"{i},{occ},{spn},{parity_of(st).sign}"
