import numpy as np
import pytest

from mmrabi.dynamics import (
    NoiseModel,
    PiecewiseLinear,
    ProtocolSchedule,
    ReleaseConfig,
    ScheduledHamiltonian,
    catch_release,
    evolve_eigenbasis_markovian,
    evolve_lindblad,
    evolve_schrodinger,
    fidelity,
    gap_monitor,
    make_catch_release_schedule,
    make_w_generation_schedule,
    photon_ledger_defect,
    trace_distance,
)
from mmrabi.errors import InvalidSchedule
from mmrabi.hilbert import UP, BasisState, ModelDims, enumerate_basis
from mmrabi.operators import RabiParams
from mmrabi.solutions import dark_state_2q


def w_space(M=2, n_max=3):
    return enumerate_basis(ModelDims(M, 2, n_max))


def vacuum_up(space):
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.index(BasisState((0,) * space.dims.M, (UP,) * space.dims.N))] = 1.0
    return psi


def frozen_schedule(M, duration, delta=(0.5, 0.5), g=0.25):
    curves = {
        "delta_1": PiecewiseLinear.constant(delta[0], duration),
        "delta_2": PiecewiseLinear.constant(delta[1], duration),
    }
    for i in range(M):
        curves[f"g_{i+1}"] = PiecewiseLinear.constant(g, duration)
    return ProtocolSchedule(duration=duration, curves=curves)


# --------------------------------------------------------------------------
# schedules


def test_piecewise_linear_interpolation():
    c = PiecewiseLinear(np.array([0.0, 1.0, 3.0]), np.array([0.0, 2.0, 2.0]))
    assert c(0.5) == 1.0
    assert c(2.0) == 2.0
    assert c.slope(0.5) == 2.0
    assert c.slope(2.0) == 0.0


def test_schedule_constraint_and_normalized_weights():
    sched = make_w_generation_schedule(3, 50.0)
    for t in sched.breakpoints():
        assert abs(sched.value("delta_1", t) + sched.value("delta_2", t) - 1.0) < 1e-12
    g_end = np.array([sched.value(f"g_{i+1}", 50.0) for i in range(3)])
    # collective coupling normalized to sqrt(2) * g_max independent of M
    assert abs(np.linalg.norm(g_end) - 0.25 * np.sqrt(2.0)) < 1e-12
    two = make_w_generation_schedule(2, 50.0)
    assert abs(two.value("g_1", 50.0) - 0.25) < 1e-12


def test_schedule_validation():
    with pytest.raises(InvalidSchedule):
        make_w_generation_schedule(2, -1.0)
    with pytest.raises(InvalidSchedule):
        make_w_generation_schedule(2, 10.0, g_max=0.0)
    with pytest.raises(InvalidSchedule):
        make_w_generation_schedule(2, 10.0, weights=[1.0])
    with pytest.raises(InvalidSchedule):
        make_w_generation_schedule(2, 10.0, delta_split_initial=1.5)


# --------------------------------------------------------------------------
# closed evolution


def test_stationary_dark_state():
    space = w_space()
    sched = frozen_schedule(2, 20.0)
    ht = ScheduledHamiltonian(space, sched)
    psi0 = dark_state_2q(ht.params_at(0.0), space).vector
    traj = evolve_schrodinger(ht, psi0, n_samples=5)
    # E = omega: the state only picks up a global phase
    assert abs(fidelity(traj.final_state, psi0) - 1.0) < 1e-7


def test_norm_and_parity_conservation():
    space = w_space()
    ht = ScheduledHamiltonian(space, make_w_generation_schedule(2, 40.0))
    traj = evolve_schrodinger(ht, vacuum_up(space))
    assert np.max(np.abs(traj.observables["norm"] - 1.0)) < 1e-8
    assert np.max(np.abs(traj.observables["parity"] - 1.0)) < 1e-8


def test_reversibility():
    space = w_space()
    T = 30.0
    fwd = make_w_generation_schedule(2, T)
    ht = ScheduledHamiltonian(space, fwd)
    psi0 = vacuum_up(space)
    out = evolve_schrodinger(ht, psi0, n_samples=3).final_state
    rev_curves = {
        name: PiecewiseLinear(T - c.ts[::-1], c.vs[::-1]) for name, c in fwd.curves.items()
    }
    back = ProtocolSchedule(duration=T, curves=rev_curves)
    restored = evolve_schrodinger(
        ScheduledHamiltonian(space, back), out.conj(), n_samples=3
    ).final_state
    assert abs(fidelity(restored.conj(), psi0) - 1.0) < 1e-8


def test_tolerance_halving_converged():
    space = w_space()
    sched = make_w_generation_schedule(2, 50.0)
    target = dark_state_2q(ScheduledHamiltonian(space, sched).params_at(50.0), space).vector
    fids = []
    for rtol in (1e-9, 5e-10):
        traj = evolve_schrodinger(ScheduledHamiltonian(space, sched), vacuum_up(space),
                                  rtol=rtol, n_samples=3)
        fids.append(fidelity(traj.final_state, target))
    assert abs(fids[0] - fids[1]) < 1e-6


def test_monotone_nonadiabatic_error():
    space = w_space()
    errs = {}
    for T in (50.0, 200.0):
        sched = make_w_generation_schedule(2, T)
        ht = ScheduledHamiltonian(space, sched)
        traj = evolve_schrodinger(ht, vacuum_up(space), n_samples=3)
        target = dark_state_2q(ht.params_at(T), space).vector
        errs[T] = 1.0 - fidelity(traj.final_state, target)
    assert errs[200.0] <= errs[50.0]


# --------------------------------------------------------------------------
# protected matrix element


@pytest.mark.parametrize("T", [10.0, 100.0, 1000.0])
def test_protected_matrix_element(T):
    space = enumerate_basis(ModelDims(2, 2, 4))
    sched = make_w_generation_schedule(2, T)
    ht = ScheduledHamiltonian(space, sched)

    def tracked(t):
        return dark_state_2q(ht.params_at(t), space).vector, 1.0

    times = np.linspace(0.01 * T, 0.99 * T, 20)
    for sample in gap_monitor(ht, tracked, times):
        assert sample["max_degenerate_element"] < 1e-10


def test_gap_monitor_frozen_schedule():
    space = w_space()
    ht = ScheduledHamiltonian(space, frozen_schedule(2, 10.0, delta=(0.9, 0.1)))

    def tracked(t):
        return dark_state_2q(ht.params_at(t), space).vector, 1.0

    for sample in gap_monitor(ht, tracked, [1.0, 5.0]):
        assert sample["max_degenerate_element"] == 0.0
        assert sample["max_ratio"] == 0.0


def test_effective_gap_small_coupling():
    # at small g the gap to the nearest coupled level is about |d1 - d2|
    space = enumerate_basis(ModelDims(2, 2, 4))
    sched = make_w_generation_schedule(2, 100.0)
    ht = ScheduledHamiltonian(space, sched)

    def tracked(t):
        return dark_state_2q(ht.params_at(t), space).vector, 1.0

    # couplings still tiny, splitting at its initial value 0.8; the
    # element threshold masks the O(g^2)-suppressed two-photon channel
    sample = gap_monitor(ht, tracked, [1.0], element_threshold=1e-3)[0]
    assert abs(sample["effective_gap"] - 0.8) < 0.05


# --------------------------------------------------------------------------
# open evolution


def test_zero_rate_lindblad_matches_schrodinger():
    space = w_space()
    sched = make_w_generation_schedule(2, 20.0)
    psi0 = vacuum_up(space)
    pure = evolve_schrodinger(ScheduledHamiltonian(space, sched), psi0, n_samples=5)
    mixed = evolve_lindblad(
        ScheduledHamiltonian(space, sched), NoiseModel(), np.outer(psi0, psi0.conj()),
        n_samples=5,
    )
    psi = pure.final_state
    assert trace_distance(mixed.final_state, np.outer(psi, psi.conj())) < 1e-6


def test_lindblad_trace_preserved_and_ledger():
    space = w_space()
    sched = make_w_generation_schedule(2, 30.0)
    noise = NoiseModel(kappa_in=1e-3, gamma=(1e-4, 1e-4), gamma_phi=(1e-3, 1e-3))
    psi0 = vacuum_up(space)
    traj = evolve_lindblad(ScheduledHamiltonian(space, sched), noise,
                           np.outer(psi0, psi0.conj()), n_samples=9)
    assert np.max(np.abs(traj.observables["trace"] - 1.0)) < 1e-7
    assert photon_ledger_defect(traj) < 1e-4


def test_single_mode_exponential_decay():
    # one decayed mode, two-level photon truncation: <n>(t) = e^(-kappa t)
    space = enumerate_basis(ModelDims(1, 1, 1))
    kappa = 0.1
    curves = {
        "delta_1": PiecewiseLinear.constant(0.5, 40.0),
        "g_1": PiecewiseLinear.constant(0.0, 40.0),
        "kappa_c_1": PiecewiseLinear.constant(kappa, 40.0),
    }
    sched = ProtocolSchedule(duration=40.0, curves=curves)
    ht = ScheduledHamiltonian(space, sched)
    rho0 = np.zeros((space.dim, space.dim), dtype=complex)
    one = space.index(BasisState((1,), (UP,)))
    rho0[one, one] = 1.0
    traj = evolve_lindblad(ht, NoiseModel(), rho0, n_samples=21)
    n_t = traj.observables["n_1"]
    assert np.max(np.abs(n_t - np.exp(-kappa * traj.times))) < 1e-6


def test_dressed_markovian_storage_cross_check():
    # storage phase: bare-basis Lindblad vs dressed amplitude damping
    space = w_space(M=2, n_max=3)
    sched = frozen_schedule(2, 100.0)
    ht = ScheduledHamiltonian(space, sched)
    noise = NoiseModel(kappa_in=1e-4, gamma=(1e-5, 1e-5), gamma_phi=(0.0, 0.0))
    psi0 = dark_state_2q(ht.params_at(0.0), space).vector
    rho0 = np.outer(psi0, psi0.conj())
    bare = evolve_lindblad(ht, noise, rho0, n_samples=11)
    dressed = evolve_eigenbasis_markovian(
        ht.at_dense(0.0), space, noise, kappa_c=0.0, rho0=rho0, T=100.0, n_samples=11
    )
    assert trace_distance(bare.final_state, dressed.final_state) < 0.02


def test_dressed_markovian_zero_rates_preserves_populations():
    space = w_space(M=2, n_max=2)
    ht = ScheduledHamiltonian(space, frozen_schedule(2, 10.0))
    H = ht.at_dense(0.0)
    eps, U = np.linalg.eigh(H)
    rho0 = np.outer(U[:, 3], U[:, 3].conj())
    traj = evolve_eigenbasis_markovian(H, space, NoiseModel(), 0.0, rho0, T=10.0, n_samples=3)
    pops0 = np.real(np.diag(U.conj().T @ rho0 @ U))
    pops1 = np.real(np.diag(U.conj().T @ traj.final_state @ U))
    assert np.allclose(pops0, pops1, atol=1e-8)


# --------------------------------------------------------------------------
# catch and release


def test_hold_phase_populations_constant():
    # the generated W x singlet state is decoupled: photon populations
    # stay put while the couplings ramp off and kappa_c is still zero
    space = w_space(M=2, n_max=2)
    T = 20.0
    curves = {
        "delta_1": PiecewiseLinear.constant(0.5, T),
        "delta_2": PiecewiseLinear.constant(0.5, T),
        "g_1": PiecewiseLinear(np.array([0.0, T]), np.array([0.25, 0.0])),
        "g_2": PiecewiseLinear(np.array([0.0, T]), np.array([0.25, 0.0])),
        "kappa_c_1": PiecewiseLinear.constant(0.0, T),
        "kappa_c_2": PiecewiseLinear.constant(0.0, T),
    }
    ht = ScheduledHamiltonian(space, ProtocolSchedule(duration=T, curves=curves))
    psi = dark_state_2q(ht.params_at(0.0), space).vector
    traj = evolve_lindblad(ht, NoiseModel(), np.outer(psi, psi.conj()), n_samples=21)
    n_tot = traj.observables["total_photons"]
    assert np.max(np.abs(n_tot - n_tot[0])) < 1e-6


def test_catch_release_emits_photon():
    space = w_space(M=2, n_max=3)
    sched = make_catch_release_schedule(
        2, T_gen=60.0, hold_time=5.0, release=ReleaseConfig(delays=(0.0, 0.0), duration=60.0)
    )
    psi0 = vacuum_up(space)
    traj, report = catch_release(space, NoiseModel(), sched, np.outer(psi0, psi0.conj()),
                                 n_samples=101)
    assert abs(report.total_emitted - 1.0) < 0.05
    shares = np.array(list(report.emitted_per_line.values())) / report.total_emitted
    assert np.allclose(shares, 0.5, atol=0.01)


def test_detach_requires_hold_window():
    with pytest.raises(InvalidSchedule):
        make_catch_release_schedule(2, T_gen=10.0, hold_time=0.0,
                                    release=ReleaseConfig(delays=(0.0, 0.0)))
