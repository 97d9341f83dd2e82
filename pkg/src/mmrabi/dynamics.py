"""Time-dependent closed and open dynamics under parameter schedules.

Closed runs integrate i d/dt psi = H(t) psi with an adaptive explicit
Runge-Kutta; open runs integrate the bare-basis Lindblad equation

    drho/dt = -i[H, rho]
            + sum_i kappa_i/2 (2 a_i rho a_i^dag - {a_i^dag a_i, rho})
            + sum_j gamma_j/2 (2 s_j^- rho s_j^+ - {s_j^+ s_j^-, rho})
            + sum_j gamma_phi_j (s_jz rho s_jz - rho),

with kappa_i(t) = kappa_in + kappa_c_i(t).  A dressed-basis amplitude-
damping master equation over instantaneous eigenstates is available as
an independent cross-check for static Hamiltonians.

Schedules are piecewise-linear curves named ``delta_j``, ``g_i`` and
``kappa_c_i`` (1-based).  Per-mode emission into the transmission lines
is the input-output flux kappa_c_i(t) <a_i^dag a_i>(t), accumulated
inside the ODE alongside the photon-ledger integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .errors import InvalidSchedule, PositivityLoss, SpaceMismatch, StepFailure
from .hilbert import HilbertSpace
from .operators import (
    RabiParams,
    build_mode_lowering,
    build_mode_number,
    build_parity_operator,
    build_qubit_op,
)


# --------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-linear curve defined by breakpoints (ts, vs)."""

    ts: np.ndarray
    vs: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        vs = np.asarray(self.vs, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 1:
            raise InvalidSchedule("breakpoints must be matching 1-d arrays")
        if np.any(np.diff(ts) <= 0) and ts.size > 1:
            raise InvalidSchedule("breakpoint times must be strictly increasing")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "vs", vs)

    def __call__(self, t):
        return np.interp(t, self.ts, self.vs)

    def slope(self, t: float) -> float:
        """Right-sided derivative (left-sided at the final breakpoint)."""
        if self.ts.size == 1:
            return 0.0
        k = np.searchsorted(self.ts, t, side="right") - 1
        k = min(max(k, 0), self.ts.size - 2)
        return (self.vs[k + 1] - self.vs[k]) / (self.ts[k + 1] - self.ts[k])

    @staticmethod
    def constant(value: float, duration: float) -> "PiecewiseLinear":
        return PiecewiseLinear(np.array([0.0, duration]), np.array([value, value]))


@dataclass(frozen=True)
class ProtocolSchedule:
    """Named piecewise-linear parameter curves on [0, T]."""

    duration: float
    curves: dict
    constraint_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.duration <= 0:
            raise InvalidSchedule(f"duration must be positive, got {self.duration}")
        for name, c in self.curves.items():
            if c.ts[0] < 0 or c.ts[-1] > self.duration + 1e-12:
                raise InvalidSchedule(f"curve {name} leaves [0, T]")

    def value(self, name: str, t: float) -> float:
        return float(self.curves[name](t))

    def derivative(self, name: str, t: float) -> float:
        return float(self.curves[name].slope(t))

    def breakpoints(self) -> np.ndarray:
        ts = np.concatenate([c.ts for c in self.curves.values()])
        return np.unique(np.clip(ts, 0.0, self.duration))

    def params_at(self, t: float, M: int, N: int, omega: float = 1.0) -> RabiParams:
        delta = [self.value(f"delta_{j+1}", t) for j in range(N)]
        g = np.zeros((M, N))
        for i in range(M):
            g[i, :] = self.value(f"g_{i+1}", t)
        return RabiParams(omega=np.full(M, omega), delta=np.array(delta), g=g)


def _piecewise(points) -> PiecewiseLinear:
    """PiecewiseLinear from (t, v) pairs, collapsing coincident breakpoints."""
    seen = {}
    for t, v in points:
        seen[float(t)] = float(v)
    ts = np.array(sorted(seen))
    return PiecewiseLinear(ts, np.array([seen[t] for t in ts]))


def make_w_generation_schedule(
    M: int,
    T: float,
    g_max: float = 0.25,
    delta_split_initial: float = 0.8,
    weights=None,
    omega: float = 1.0,
    split_hold_fraction: float = 0.15,
    g_ramp_fraction: float = 0.35,
) -> ProtocolSchedule:
    """Piecewise-linear ramps taking |0_M, up, up> into the W x Bell dark state.

    The qubit splitting delta_1 - delta_2 holds at its initial value d0
    until split_hold_fraction*T and then closes linearly, keeping
    delta_1 + delta_2 = omega throughout; coupling i ramps 0 -> g_max*w_i
    over [0, g_ramp_fraction*T] and then holds.  Ramping the couplings up
    while the splitting is still open keeps the instantaneous gap wide on
    both segments, which is what makes the default fractions fast.

    Weight vectors fix the coupling ratios; their overall scale is
    normalized so the collective (bright-mode) coupling sum_i g_i^2 equals
    2*g_max^2 regardless of M.  For M = 2 with uniform weights this is
    g_1 = g_2 = g_max, and the closed-system dynamics from the shared
    vacuum are then identical for every M.  Default weights are uniform
    (prototype W state).
    """
    if T <= 0:
        raise InvalidSchedule(f"T must be positive, got {T}")
    if g_max <= 0:
        raise InvalidSchedule(f"g_max must be positive, got {g_max}")
    if not 0 < delta_split_initial <= omega:
        raise InvalidSchedule(f"initial splitting {delta_split_initial} outside (0, omega]")
    if not 0 <= split_hold_fraction < 1:
        raise InvalidSchedule(f"split_hold_fraction {split_hold_fraction} outside [0, 1)")
    if not 0 < g_ramp_fraction <= 1:
        raise InvalidSchedule(f"g_ramp_fraction {g_ramp_fraction} outside (0, 1]")
    if weights is None:
        weights = np.ones(M)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (M,) or np.any(weights < 0) or not np.any(weights > 0):
        raise InvalidSchedule("per-mode weights must be M non-negative values, not all zero")
    weights = weights * np.sqrt(2.0) / np.linalg.norm(weights)

    d0 = delta_split_initial
    t_hold = split_hold_fraction * T
    t_g = g_ramp_fraction * T
    curves = {
        "delta_1": _piecewise(
            [(0.0, (omega + d0) / 2), (t_hold, (omega + d0) / 2), (T, omega / 2)]
        ),
        "delta_2": _piecewise(
            [(0.0, (omega - d0) / 2), (t_hold, (omega - d0) / 2), (T, omega / 2)]
        ),
    }
    for i in range(M):
        curves[f"g_{i+1}"] = _piecewise(
            [(0.0, 0.0), (t_g, g_max * weights[i]), (T, g_max * weights[i])]
        )
    sched = ProtocolSchedule(duration=T, curves=curves, constraint_tags=("delta_sum_omega",))
    check_constraint_tags(sched, omega)
    return sched


def check_constraint_tags(schedule: ProtocolSchedule, omega: float = 1.0, tol: float = 1e-12):
    """Verify tagged constraints at every breakpoint."""
    for tag in schedule.constraint_tags:
        if tag == "delta_sum_omega":
            for t in schedule.breakpoints():
                s = schedule.value("delta_1", t) + schedule.value("delta_2", t)
                if abs(s - omega) > tol:
                    raise InvalidSchedule(f"delta_1 + delta_2 = {s} != omega at t={t}")
        else:
            raise InvalidSchedule(f"unknown constraint tag {tag!r}")


# --------------------------------------------------------------------------
# scheduled Hamiltonian


class ScheduledHamiltonian:
    """H(t) = H_static + sum_j delta_j(t) Sz_j + sum_i g_i(t) X_i.

    X_i couples mode i symmetrically to every qubit (the g_ij = g_i
    structure the dark-state protocol requires).
    """

    def __init__(self, space: HilbertSpace, schedule: ProtocolSchedule, omega: float = 1.0):
        self.space = space
        self.schedule = schedule
        self.omega = omega
        M, N = space.dims.M, space.dims.N
        self.static = sum(
            omega * (build_mode_number(space, i).matrix) for i in range(M)
        ).tocsr()
        self.sz = [build_qubit_op(space, j, "z").matrix.tocsr() for j in range(N)]
        self.coupling = []
        for i in range(M):
            a = build_mode_lowering(space, i).matrix
            x_i = a + a.getH()
            term = sum(x_i @ build_qubit_op(space, j, "x").matrix for j in range(N))
            self.coupling.append(term.tocsr())

        self._dense = None

    def _coeffs(self, t: float):
        N = self.space.dims.N
        M = self.space.dims.M
        deltas = [self.schedule.value(f"delta_{j+1}", t) for j in range(N)]
        gs = [self.schedule.value(f"g_{i+1}", t) for i in range(M)]
        return deltas, gs

    def apply(self, t: float, y: np.ndarray) -> np.ndarray:
        """H(t) @ y without assembling H(t)."""
        deltas, gs = self._coeffs(t)
        out = self.static @ y
        for d, m in zip(deltas, self.sz):
            out += d * (m @ y)
        for g, m in zip(gs, self.coupling):
            if g != 0.0:
                out += g * (m @ y)
        return out

    def at_dense(self, t: float) -> np.ndarray:
        """Dense H(t); term matrices are densified once and cached."""
        if self._dense is None:
            self._dense = (
                self.static.toarray(),
                [m.toarray() for m in self.sz],
                [m.toarray() for m in self.coupling],
            )
        static, sz, coupling = self._dense
        deltas, gs = self._coeffs(t)
        H = static.copy()
        for d, m in zip(deltas, sz):
            H += d * m
        for g, m in zip(gs, coupling):
            if g != 0.0:
                H += g * m
        return H

    def at(self, t: float) -> sp.csr_matrix:
        deltas, gs = self._coeffs(t)
        H = self.static.copy()
        for d, m in zip(deltas, self.sz):
            H = H + d * m
        for g, m in zip(gs, self.coupling):
            H = H + g * m
        return H

    def derivative_at(self, t: float) -> sp.csr_matrix:
        N, M = self.space.dims.N, self.space.dims.M
        H = sp.csr_matrix((self.space.dim, self.space.dim), dtype=complex)
        for j in range(N):
            H = H + self.schedule.derivative(f"delta_{j+1}", t) * self.sz[j]
        for i in range(M):
            H = H + self.schedule.derivative(f"g_{i+1}", t) * self.coupling[i]
        return H

    def params_at(self, t: float) -> RabiParams:
        return self.schedule.params_at(t, self.space.dims.M, self.space.dims.N, self.omega)


# --------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    """Time grid, states (vectors or density matrices) and observables."""

    times: np.ndarray
    states: np.ndarray  # (n_t, dim) for pure, (n_t, dim, dim) for density
    observables: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def final_state(self):
        return self.states[-1]

    def is_density(self) -> bool:
        return self.states.ndim == 3


def fidelity(a, b: np.ndarray) -> float:
    """|<b|a>|^2 for pure a, <b|rho|b> for density a; b must be normalized."""
    b = np.asarray(b)
    a = np.asarray(a)
    if a.ndim == 1:
        if a.shape != b.shape:
            raise SpaceMismatch(f"state dims {a.shape} vs {b.shape}")
        return float(abs(np.vdot(b, a)) ** 2)
    if a.shape != (b.size, b.size):
        raise SpaceMismatch(f"density shape {a.shape} vs state dim {b.size}")
    return float(np.real(np.vdot(b, a @ b)))


def evolve_schrodinger(
    hamiltonian: ScheduledHamiltonian,
    psi0: np.ndarray,
    rtol: float = 1e-9,
    atol: float = 1e-11,
    n_samples: int = 201,
    observables: dict | None = None,
) -> Trajectory:
    """Adaptive integration of the closed-system dynamics over [0, T]."""
    T = hamiltonian.schedule.duration
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (hamiltonian.space.dim,):
        raise SpaceMismatch(f"psi0 length {psi0.shape} vs dim {hamiltonian.space.dim}")

    def rhs(t, y):
        return -1j * hamiltonian.apply(t, y)

    t_eval = np.linspace(0.0, T, n_samples)
    sol = solve_ivp(rhs, (0.0, T), psi0, method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval)
    if not sol.success:
        raise StepFailure(f"integration failed at t={sol.t[-1] if sol.t.size else 0}: {sol.message}")
    states = sol.y.T
    obs = {"norm": np.linalg.norm(states, axis=1)}
    R = build_parity_operator(hamiltonian.space).matrix
    obs["parity"] = np.real(np.einsum("ti,ti->t", states.conj(), (R @ states.T).T))
    for name, op in (observables or {}).items():
        m = op.matrix if hasattr(op, "matrix") else op
        obs[name] = np.real(np.einsum("ti,ti->t", states.conj(), (m @ states.T).T))
    return Trajectory(times=t_eval, states=states, observables=obs, metadata={"rtol": rtol})


# --------------------------------------------------------------------------
# open-system dynamics


@dataclass(frozen=True)
class NoiseModel:
    """Static dissipation rates; time-dependent kappa_c lives in the schedule."""

    kappa_in: float = 0.0
    gamma: tuple = ()
    gamma_phi: tuple = ()

    def __post_init__(self):
        if self.kappa_in < 0 or any(r < 0 for r in self.gamma) or any(
            r < 0 for r in self.gamma_phi
        ):
            raise ValueError("dissipation rates must be non-negative")

    def qubit_rates(self, N: int):
        gam = list(self.gamma) or [0.0] * N
        phi = list(self.gamma_phi) or [0.0] * N
        if len(gam) != N or len(phi) != N:
            raise ValueError(f"qubit rate lists must have length {N}")
        return gam, phi


def evolve_lindblad(
    hamiltonian: ScheduledHamiltonian,
    noise: NoiseModel,
    rho0: np.ndarray,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    n_samples: int = 201,
) -> Trajectory:
    """Bare-basis Lindblad evolution over the schedule's [0, T].

    The returned trajectory carries per-mode populations, per-line
    emission rates and their running integrals, plus the photon-ledger
    integrals (total kappa <n> outflow and coherent qubit exchange).
    """
    space = hamiltonian.space
    dim = space.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise SpaceMismatch(f"rho0 shape {rho0.shape} vs dim {dim}")
    if abs(np.trace(rho0) - 1) > 1e-9:
        raise ValueError("rho0 must have unit trace")

    M, N = space.dims.M, space.dims.N
    a_ops = [build_mode_lowering(space, i).dense() for i in range(M)]
    n_ops = [op.conj().T @ op for op in a_ops]
    n_diag = [np.real(np.diag(op)) for op in n_ops]
    sm_ops = [build_qubit_op(space, j, "-").dense() for j in range(N)]
    sz_ops = [build_qubit_op(space, j, "z").dense() for j in range(N)]
    gam, phi = noise.qubit_rates(N)
    sched = hamiltonian.schedule
    kappa_c_names = [f"kappa_c_{i+1}" for i in range(M)]
    has_kc = [name in sched.curves for name in kappa_c_names]
    N_tot = sum(n_ops)

    d2 = dim * dim
    n_extra = M + 2  # per-line emission integrals + kappa outflow + exchange

    def rhs(t, y):
        rho = y[:d2].reshape(dim, dim)
        H = hamiltonian.at_dense(t)
        drho = -1j * (H @ rho - rho @ H)
        extras = np.zeros(n_extra, dtype=complex)
        kappa_out = 0.0
        for i in range(M):
            kc = sched.value(kappa_c_names[i], t) if has_kc[i] else 0.0
            kappa = noise.kappa_in + kc
            n_exp = float(np.real(np.sum(n_diag[i] * np.diag(rho).real)))
            if kappa > 0:
                L = a_ops[i]
                Lr = L @ rho
                drho += kappa / 2 * (2 * (Lr @ L.conj().T) - (L.conj().T @ Lr) - (rho @ n_ops[i]))
                kappa_out += kappa * n_exp
            extras[i] = kc * n_exp
        for j in range(N):
            if gam[j] > 0:
                L = sm_ops[j]
                Lr = L @ rho
                LdL = L.conj().T @ L
                drho += gam[j] / 2 * (2 * (Lr @ L.conj().T) - (L.conj().T @ Lr) - (rho @ LdL))
            if phi[j] > 0:
                drho += phi[j] * (sz_ops[j] @ rho @ sz_ops[j] - rho)
        extras[M] = kappa_out
        extras[M + 1] = -1j * np.trace(N_tot @ (H @ rho - rho @ H))
        return np.concatenate([drho.ravel(), extras])

    y0 = np.concatenate([rho0.ravel(), np.zeros(n_extra, dtype=complex)])
    T = sched.duration
    t_eval = np.linspace(0.0, T, n_samples)
    sol = solve_ivp(rhs, (0.0, T), y0, method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval)
    if not sol.success:
        raise StepFailure(f"integration failed: {sol.message}")
    ys = sol.y.T
    rhos = ys[:, :d2].reshape(-1, dim, dim)
    final = rhos[-1]
    min_eig = float(np.linalg.eigvalsh((final + final.conj().T) / 2).min())
    if min_eig < -1e-6:
        raise PositivityLoss(f"final density matrix has eigenvalue {min_eig}")

    obs = {"trace": np.real(np.trace(rhos, axis1=1, axis2=2))}
    diag = np.real(np.einsum("tii->ti", rhos))
    for i in range(M):
        obs[f"n_{i+1}"] = diag @ n_diag[i]
        kc_t = np.array([sched.value(kappa_c_names[i], t) if has_kc[i] else 0.0 for t in t_eval])
        obs[f"emission_rate_{i+1}"] = kc_t * obs[f"n_{i+1}"]
        obs[f"emitted_{i+1}"] = np.real(ys[:, d2 + i])
    obs["total_photons"] = diag @ np.real(np.diag(N_tot))
    obs["kappa_outflow_integral"] = np.real(ys[:, d2 + M])
    obs["exchange_integral"] = np.real(ys[:, d2 + M + 1])
    obs["purity"] = np.real(np.einsum("tij,tji->t", rhos, rhos))
    return Trajectory(times=t_eval, states=rhos, observables=obs, metadata={"rtol": rtol})


def photon_ledger_defect(traj: Trajectory) -> float:
    """|Delta<N> - (exchange integral) + (kappa outflow integral)|.

    Zero (to integrator accuracy) on any open run: every photon is
    either still inside, emitted/lost through kappa, or coherently
    exchanged with the qubits.
    """
    n = traj.observables["total_photons"]
    return float(
        abs(
            (n[-1] - n[0])
            - traj.observables["exchange_integral"][-1]
            + traj.observables["kappa_outflow_integral"][-1]
        )
    )


def evolve_eigenbasis_markovian(
    H_static: np.ndarray,
    space: HilbertSpace,
    noise: NoiseModel,
    kappa_c: float,
    rho0: np.ndarray,
    T: float,
    omega: float = 1.0,
    rtol: float = 1e-8,
    n_samples: int = 201,
) -> Trajectory:
    """Amplitude-damping master equation in the eigenbasis of a frozen H.

    Jump operators |j><k| over eigenstates with rates
    rate_m * (eps_k - eps_j)/omega * |<k|C^m|j>|^2, where C^m is
    a_m + a_m^dag for modes and sigma_mx for qubits.  Defined for
    static Hamiltonians only; serves as an independent cross-check of
    the bare-basis Lindblad route.
    """
    dim = space.dim
    if H_static.shape != (dim, dim) or rho0.shape != (dim, dim):
        raise SpaceMismatch("operator shapes do not match the space")
    eps, U = np.linalg.eigh(H_static)
    M, N = space.dims.M, space.dims.N
    gam, phi = noise.qubit_rates(N)

    couplers = []
    for i in range(M):
        a = build_mode_lowering(space, i).dense()
        couplers.append((noise.kappa_in + kappa_c, a + a.conj().T))
    for j in range(N):
        couplers.append((gam[j], build_qubit_op(space, j, "x").dense()))

    # Gamma[j, k]: decay rate of the |j><k| jump (eps_k > eps_j)
    Gamma = np.zeros((dim, dim))
    for rate, C in couplers:
        if rate <= 0:
            continue
        Cd = np.abs(U.conj().T @ C @ U) ** 2
        dE = eps[None, :] - eps[:, None]  # eps_k - eps_j
        Gamma += rate * np.where(dE > 1e-12, dE / omega, 0.0) * Cd

    rho0_e = U.conj().T @ rho0 @ U
    out_rate = Gamma.sum(axis=0)  # total decay out of level k

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        drho = -1j * (eps[:, None] - eps[None, :]) * rho
        # gain on diagonal, anticommutator loss everywhere
        pop = np.real(np.diag(rho))
        drho += np.diag(Gamma @ pop)
        drho -= 0.5 * (out_rate[None, :] + out_rate[:, None]) * rho
        return drho.ravel()

    t_eval = np.linspace(0.0, T, n_samples)
    sol = solve_ivp(rhs, (0.0, T), rho0_e.ravel(), method="DOP853", rtol=rtol, atol=1e-10,
                    t_eval=t_eval)
    if not sol.success:
        raise StepFailure(f"integration failed: {sol.message}")
    rhos_e = sol.y.T.reshape(-1, dim, dim)
    rhos = np.einsum("ab,tbc,dc->tad", U, rhos_e, U.conj())
    obs = {"trace": np.real(np.trace(rhos, axis1=1, axis2=2))}
    return Trajectory(times=t_eval, states=rhos, observables=obs, metadata={"basis": "dressed"})


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    d = rho - sigma
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh((d + d.conj().T) / 2))))


# --------------------------------------------------------------------------
# adiabatic diagnostics


def gap_monitor(
    hamiltonian: ScheduledHamiltonian,
    tracked_state,
    times,
    degeneracy_window: float = 1e-8,
    element_threshold: float = 1e-10,
):
    """Sample instantaneous spectra and the Hdot matrix elements.

    ``tracked_state(t)`` returns the (normalized) protected state and its
    energy at time t.  Per sample: the eigenvalues, |<E_k|Hdot|v>| for
    eigenstates within ``degeneracy_window`` of the tracked energy
    (gauge-fixed by orthonormalizing the degenerate subspace), the max
    adiabatic ratio |element| / gap^2 over nondegenerate levels, and the
    effective gap to the closest level actually coupled by Hdot.
    """
    samples = []
    for t in times:
        H = hamiltonian.at(t).toarray()
        Hdot = hamiltonian.derivative_at(t).toarray()
        E, V = np.linalg.eigh(H)
        v, E_tracked = tracked_state(t)
        w = Hdot @ v
        elements = np.abs(V.conj().T @ w)
        degenerate = np.abs(E - E_tracked) < degeneracy_window
        # gauge-fix: orthonormal basis of the degenerate subspace
        if np.any(degenerate):
            Q, _ = np.linalg.qr(V[:, degenerate])
            deg_elements = np.abs(Q.conj().T @ w)
        else:
            deg_elements = np.array([])
        gaps = np.abs(E - E_tracked)
        nondeg = ~degenerate
        ratios = np.zeros_like(E)
        ratios[nondeg] = elements[nondeg] / gaps[nondeg] ** 2
        coupled = nondeg & (elements > element_threshold)
        eff_gap = float(gaps[coupled].min()) if np.any(coupled) else float("inf")
        samples.append(
            {
                "t": float(t),
                "energies": E,
                "degenerate_elements": deg_elements,
                "max_degenerate_element": float(deg_elements.max()) if deg_elements.size else 0.0,
                "max_ratio": float(ratios.max()),
                "effective_gap": eff_gap,
            }
        )
    return samples


# --------------------------------------------------------------------------
# catch and release


@dataclass
class ReleaseConfig:
    """kappa_c turn-on per mode: target rate, per-mode delays, ramp width."""

    kappa_c: float = 0.1
    delays: tuple = ()
    ramp_width: float = 1.0
    duration: float = 80.0


@dataclass
class EmissionReport:
    """Per-line emission curves and integrated emitted population."""

    times: np.ndarray
    rates: dict
    emitted_per_line: dict
    total_emitted: float


def make_catch_release_schedule(
    M: int,
    T_gen: float,
    hold_time: float,
    release: ReleaseConfig,
    g_max: float = 0.25,
    delta_split_initial: float = 0.8,
    weights=None,
    omega: float = 1.0,
    split_hold_fraction: float = 0.15,
    g_ramp_fraction: float = 0.35,
    detach_couplings: bool = True,
) -> ProtocolSchedule:
    """Three-phase schedule: generate / hold (kappa_c off) / release.

    With ``detach_couplings`` (default) the drive-controlled couplings
    ramp to zero across the hold window.  The generated state is already
    decoupled, so this leaves it untouched, but it stops residual
    non-singlet population (truncation leakage, dephasing-generated
    triplet) from converting qubit excitation into extra line photons
    while kappa_c is on.
    """
    gen = make_w_generation_schedule(
        M, T_gen, g_max, delta_split_initial, weights, omega,
        split_hold_fraction, g_ramp_fraction,
    )
    t_release = T_gen + hold_time
    total = t_release + release.duration
    delays = list(release.delays) or [0.0] * M
    if len(delays) != M:
        raise InvalidSchedule(f"need {M} release delays, got {len(delays)}")
    if detach_couplings and hold_time <= 0:
        raise InvalidSchedule("detach_couplings needs a positive hold_time to ramp over")
    curves = {}
    for name, c in gen.curves.items():
        if detach_couplings and name.startswith("g_"):
            curves[name] = PiecewiseLinear(
                np.concatenate([c.ts, [t_release, total]]),
                np.concatenate([c.vs, [0.0, 0.0]]),
            )
            continue
        # extend each generation curve as constant through hold + release
        curves[name] = PiecewiseLinear(
            np.concatenate([c.ts, [total]]), np.concatenate([c.vs, [c.vs[-1]]])
        )
    for i in range(M):
        t_on = t_release + delays[i]
        curves[f"kappa_c_{i+1}"] = PiecewiseLinear(
            np.array([0.0, t_on, t_on + release.ramp_width, total]),
            np.array([0.0, 0.0, release.kappa_c, release.kappa_c]),
        )
    return ProtocolSchedule(duration=total, curves=curves, constraint_tags=gen.constraint_tags)


def catch_release(
    space: HilbertSpace,
    noise: NoiseModel,
    schedule: ProtocolSchedule,
    rho0: np.ndarray,
    rtol: float = 1e-8,
    n_samples: int = 401,
    omega: float = 1.0,
):
    """Run the full generate/hold/release protocol; returns (Trajectory, EmissionReport)."""
    ht = ScheduledHamiltonian(space, schedule, omega=omega)
    traj = evolve_lindblad(ht, noise, rho0, rtol=rtol, n_samples=n_samples)
    M = space.dims.M
    rates = {i + 1: traj.observables[f"emission_rate_{i+1}"] for i in range(M)}
    emitted = {i + 1: float(traj.observables[f"emitted_{i+1}"][-1]) for i in range(M)}
    report = EmissionReport(
        times=traj.times,
        rates=rates,
        emitted_per_line=emitted,
        total_emitted=float(sum(emitted.values())),
    )
    return traj, report
