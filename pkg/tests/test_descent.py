import dataclasses

import numpy as np
import pytest

import thermal_landscape as tl
from thermal_landscape.bath import BathSpec
from thermal_landscape.errors import MaxStepsExceeded, TriggerNotMet


def qubit_model(beta=10.0):
    ham = tl.assemble([(0.5 * (np.eye(2) - tl.PAULI["Z"]), (0,))], 1)
    return tl.build_model(
        ham, [("X0", tl.PAULI["X"].copy())],
        bath=BathSpec(beta=beta, tau=1.0), davies=True,
    )


def ising_model(h, beta=6.0):
    n = 4
    ham = tl.build_ising_chain(n, h, periodic=True)
    jumps = [(f"X{j}", tl.kron_embed(tl.PAULI["X"], [j], n)) for j in range(n)]
    return tl.build_model(
        ham, jumps, bath=BathSpec(beta=beta, tau=1.0, lambda0=4.0), davies=True,
    )


def test_config_defaults_match_constants():
    cfg = tl.DescentConfig(epsilon=0.01, norm_bound=2.0)
    assert cfg.max_steps == int(np.ceil(42.0 * 8.0 / 1e-4))
    assert cfg.grad_tol == pytest.approx(0.0099 * 0.01)
    assert cfg.trigger == pytest.approx(-0.99 * 0.01)


def test_qubit_descent_reaches_ground():
    model = qubit_model()
    cfg = tl.DescentConfig(epsilon=1e-3, norm_bound=1.0)
    trace = tl.thermal_gradient_descent(
        model, tl.projector(tl.basis_state("1")), cfg
    )
    assert trace.terminated_early
    assert trace.terminal_certificate.kind == "local_min_sufficient"
    assert trace.terminal_state[0, 0].real >= 0.99
    energies = [trace.steps[0].e_before] + [st.e_after for st in trace.steps]
    assert all(b < a for a, b in zip(energies, energies[1:]))
    # per-step drop bound from the cooling lemma (epsilon-tilde = 0.99 eps)
    bound = 0.99**2 * cfg.epsilon**2 / (20.0 * cfg.norm_bound**2) - 1e-9
    drops = [st.e_before - st.e_after for st in trace.steps]
    assert min(drops) >= bound
    assert len(trace.steps) <= cfg.max_steps


def test_qubit_descent_follows_rate_equation_oracle():
    model = qubit_model()
    spec = BathSpec(beta=10.0, tau=1.0)
    gm, gp = tl.gamma(-1.0, spec), tl.gamma(1.0, spec)
    pbar = gp / (gm + gp)
    cfg = tl.DescentConfig(epsilon=5e-2, norm_bound=1.0)
    trace = tl.thermal_gradient_descent(
        model, tl.projector(tl.basis_state("1")), cfg
    )
    p1 = 1.0
    for st in trace.steps:
        p1 = pbar + (p1 - pbar) * np.exp(-(gm + gp) * st.s)
        assert st.e_after == pytest.approx(p1, abs=1e-7)


def test_descent_ground_start_zero_steps():
    model = qubit_model()
    cfg = tl.DescentConfig(epsilon=1e-3, norm_bound=1.0)
    trace = tl.thermal_gradient_descent(
        model, tl.projector(tl.basis_state("0")), cfg
    )
    assert trace.steps == []
    assert trace.terminated_early
    assert trace.terminal_certificate.kind == "local_min_sufficient"


def test_ising_metastable_all_ones():
    model = ising_model(h=1.5)
    rho = tl.projector(tl.basis_state("1111"))
    cfg = tl.DescentConfig(epsilon=1e-4, norm_bound=model.ham.norm_bound)
    trace = tl.thermal_gradient_descent(model, rho, cfg)
    assert trace.steps == []
    assert trace.terminal_certificate.kind == "local_min_sufficient"
    assert trace.terminal_state[-1, -1].real >= 0.95


def test_ising_descent_from_domain_walls():
    model = ising_model(h=1.5)
    rho = tl.projector(tl.basis_state("0110"))
    cfg = tl.DescentConfig(epsilon=8e-2, norm_bound=model.ham.norm_bound)
    trace = tl.thermal_gradient_descent(model, rho, cfg)
    assert trace.terminated_early
    assert len(trace.steps) > 0
    energies = [trace.steps[0].e_before] + [st.e_after for st in trace.steps]
    assert all(b < a for a, b in zip(energies, energies[1:]))
    assert trace.terminal_certificate.kind == "local_min_sufficient"
    assert model.energy(trace.terminal_state) < model.energy(rho)


def test_cool_step_trigger_boundary():
    model = qubit_model()
    cfg = tl.DescentConfig(epsilon=1e-3, norm_bound=1.0)
    rho = tl.projector(tl.basis_state("1"))
    with pytest.raises(TriggerNotMet):
        tl.cool_step(model, rho, "X0", cfg.trigger, cfg)
    out = tl.cool_step(model, rho, "X0", -0.1, cfg)
    assert model.energy(out) < model.energy(rho)


def test_cool_step_monotone_sequence():
    model = qubit_model()
    cfg = tl.DescentConfig(epsilon=1e-3, norm_bound=1.0)
    rho = tl.projector(tl.basis_state("1"))
    energies = [model.energy(rho)]
    for _ in range(20):
        g = tl.gradient_vector(model, rho).g[0]
        rho = tl.cool_step(model, rho, "X0", g, cfg)
        energies.append(model.energy(rho))
    assert all(b < a for a, b in zip(energies, energies[1:]))


def test_max_steps_exceeded_carries_partial_trace():
    model = qubit_model()
    cfg = tl.DescentConfig(epsilon=1e-3, norm_bound=1.0, max_steps=3)
    with pytest.raises(MaxStepsExceeded) as excinfo:
        tl.thermal_gradient_descent(
            model, tl.projector(tl.basis_state("1")), cfg
        )
    partial = excinfo.value.trace
    assert len(partial.steps) == 3
    assert not partial.terminated_early
    assert partial.terminal_certificate is None


def test_descent_determinism():
    model = ising_model(h=1.5)
    rho = tl.projector(tl.basis_state("0110"))
    cfg = tl.DescentConfig(epsilon=5e-2, norm_bound=model.ham.norm_bound)
    t1 = tl.thermal_gradient_descent(model, rho, cfg)
    t2 = tl.thermal_gradient_descent(model, rho, cfg)
    assert [dataclasses.astuple(a) for a in t1.steps] == [
        dataclasses.astuple(b) for b in t2.steps
    ]
    assert np.array_equal(t1.terminal_state, t2.terminal_state)


def test_descent_noise_mode_reproducible():
    model = qubit_model()
    cfg = tl.DescentConfig(epsilon=5e-2, norm_bound=1.0, noise=True, seed=11)
    rho = tl.projector(tl.basis_state("1"))
    t1 = tl.thermal_gradient_descent(model, rho, cfg)
    t2 = tl.thermal_gradient_descent(model, rho, cfg)
    assert [st.g for st in t1.steps] == [st.g for st in t2.steps]
    other = tl.thermal_gradient_descent(
        model, rho, dataclasses.replace(cfg, seed=12)
    )
    assert [st.g for st in t1.steps] != [st.g for st in other.steps]
