"""Thermal gradient descent on exact density matrices.

Coordinate-wise descent: scan jumps in declared order, pick the first
direction whose energy gradient falls below the trigger, evolve along it
with step s = |g| / (9 B^2), repeat until no direction triggers, then
certify the terminal state.  Defaults reproduce the step budget
T = 42 B^3 / eps^2 and the trigger/estimation constants.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .errors import MaxStepsExceeded, TriggerNotMet
from .gradient import CertificateResult, certify_local_min, gradient_operator
from .lindblad import LindbladModel, evolve, weight_vector


@dataclass(frozen=True)
class DescentConfig:
    """Descent parameters; defaults follow the algorithm's constants.

    ``record_stride`` thins the recorded trace (every k-th step plus the
    final one); the walk itself is unaffected.
    """

    epsilon: float
    norm_bound: float  # B >= ||H||
    max_steps: int | None = None
    grad_tol: float | None = None  # scale of optional injected gradient noise
    trigger: float | None = None
    noise: bool = False
    seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.norm_bound <= 0:
            raise ValueError("norm_bound must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.max_steps is None:
            object.__setattr__(
                self, "max_steps",
                int(math.ceil(42.0 * self.norm_bound**3 / self.epsilon**2)),
            )
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.grad_tol is None:
            object.__setattr__(self, "grad_tol", 0.0099 * self.epsilon)
        if self.trigger is None:
            object.__setattr__(self, "trigger", -0.99 * self.epsilon)


@dataclass(frozen=True)
class StepRecord:
    index: int
    jump: str
    g: float
    s: float
    e_before: float
    e_after: float


@dataclass
class DescentTrace:
    steps: list
    terminal_state: np.ndarray
    terminal_certificate: CertificateResult | None
    terminated_early: bool
    config: DescentConfig = field(repr=False, default=None)


def _step_size(g, cfg: DescentConfig):
    return abs(g) / (9.0 * cfg.norm_bound**2)


def cool_step(model: LindbladModel, rho, a_star, g, cfg: DescentConfig):
    """One descent step along jump ``a_star`` with s = |g| / (9 B^2)."""
    if not g < cfg.trigger:
        raise TriggerNotMet(
            f"gradient {g} does not lie strictly below the trigger {cfg.trigger}"
        )
    s = _step_size(g, cfg)
    return evolve(model, weight_vector(model, label=a_star), rho, s)


def thermal_gradient_descent(model: LindbladModel, rho0, cfg: DescentConfig,
                             record_states=False) -> DescentTrace:
    """Run coordinate-wise thermal gradient descent from ``rho0``.

    Gradients are exact by default (this is a classical simulator); with
    ``cfg.noise`` set, seeded Gaussian noise of scale ``cfg.grad_tol`` is
    injected to emulate estimated gradients, and the noisy value is also
    used for the step size.
    """
    rho = ops.check_density_matrix(rho0)
    rng = np.random.default_rng(cfg.seed) if cfg.noise else None
    # gradient operators are cached on the model; grab them once, along with
    # the one-hot weight vectors reused by every step
    grad_ops = [
        (jump.label, gradient_operator(model, jump.label)) for jump in model.jumps
    ]
    unit_weights = {
        jump.label: weight_vector(model, label=jump.label) for jump in model.jumps
    }
    steps = []
    for t in range(1, cfg.max_steps + 1):
        # scan in declared order, stopping at the first triggered direction
        chosen = None
        for label, op in grad_ops:
            g = float(np.sum(op * rho.T).real)
            if rng is not None:
                g += float(rng.normal(0.0, cfg.grad_tol))
            if g < cfg.trigger:
                chosen = (label, g)
                break
        if chosen is None:
            cert = certify_local_min(model, rho, cfg.epsilon)
            return DescentTrace(
                steps=steps,
                terminal_state=rho,
                terminal_certificate=cert,
                terminated_early=True,
                config=cfg,
            )
        label, g = chosen
        e_before = model.energy(rho)
        s = _step_size(g, cfg)
        rho = evolve(model, unit_weights[label], rho, s)
        e_after = model.energy(rho)
        if t % cfg.record_stride == 0 or t == 1:
            steps.append(
                StepRecord(index=t, jump=label, g=g, s=s,
                           e_before=e_before, e_after=e_after)
            )
    partial = DescentTrace(
        steps=steps,
        terminal_state=rho,
        terminal_certificate=None,
        terminated_early=False,
        config=cfg,
    )
    raise MaxStepsExceeded(
        f"descent did not reach a local minimum within {cfg.max_steps} steps",
        trace=partial,
    )
