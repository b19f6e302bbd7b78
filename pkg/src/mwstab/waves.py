"""Small-amplitude periodic traveling waves of the two water-wave models.

Model A is the quadratic shallow-water model whose traveling profile
``eta`` (period ``2*pi`` in ``z = k(x - ct)``) satisfies

    (3c^2 - 2 eta) k^2 eta'' - k^2 (eta')^2 + eta = 0,

model B is the cubic variant whose profile ``w`` satisfies

    k^2 (w - c) w'' + (k^2/2) (w')^2 - (gamma/2) k^4 w'' (w')^2 - w = 0.

Both carry a one-parameter branch of even solutions bifurcating from the
first harmonic; ``analytic_wave`` evaluates the third-order expansion of
that branch and ``solve_wave`` refines it with a Newton-Galerkin iteration
restricted to the cosine subspace (which removes the translation
zero-mode and keeps every iterate even).
"""

import numpy as np
from dataclasses import dataclass, field

from .fourier import TrigSeries

__all__ = [
    "Model", "WaveBranch", "ConvergenceError", "ValidityError",
    "analytic_wave", "residual", "solve_wave", "branch_derivative",
    "wave_speed_expansion", "AMPLITUDE_LIMIT",
]

SQRT3 = np.sqrt(3.0)

#: validity guard for the small-amplitude expansions
AMPLITUDE_LIMIT = 0.2

DEFAULT_N_MODES = 64
DEFAULT_TOL = 1e-12


class ValidityError(ValueError):
    """Amplitude outside the validity range of the small-amplitude branch."""


class ConvergenceError(RuntimeError):
    """Newton iteration failed; carries the last residual norm."""

    def __init__(self, message, residual_norm):
        super().__init__(message)
        self.residual_norm = residual_norm


@dataclass(frozen=True)
class Model:
    """Which model, plus the cubic coefficient ``gamma`` (model B only)."""

    variant: str
    gamma: float = 0.0

    def __post_init__(self):
        if self.variant not in ("A", "B"):
            raise ValueError(f"unknown model variant {self.variant!r}")

    @property
    def is_a(self):
        return self.variant == "A"

    def c0(self, k):
        """Bifurcation speed of the trivial branch point."""
        return 1.0 / (SQRT3 * k) if self.is_a else 1.0 / k**2


@dataclass(frozen=True)
class WaveBranch:
    """One point on the small-amplitude branch."""

    model: Model
    a: float
    k: float
    c: float
    eta: TrigSeries
    residual_norm: float
    #: sup-norm residual after each Newton step (diagnostic)
    newton_residuals: tuple = field(default=(), repr=False)

    @property
    def n_modes(self):
        return self.eta.n_modes


def _check_domain(model, a, k):
    if not isinstance(model, Model):
        raise TypeError("model must be a Model instance")
    if k <= 0:
        raise ValueError(f"wavenumber must be positive, got k={k}")
    if abs(a) > AMPLITUDE_LIMIT:
        raise ValidityError(
            f"|a|={abs(a)} outside the small-amplitude range "
            f"(limit {AMPLITUDE_LIMIT})")


def wave_speed_expansion(model, a, k):
    """Third-order wave speed ``c0 + a^2 c2``."""
    if model.is_a:
        return 1.0 / (SQRT3 * k) + a**2 * k**3 / (4.0 * SQRT3)
    return 1.0 / k**2 + a**2 * (1.0 - model.gamma) * k**2 / 8.0


def analytic_wave(model, a, k, n_modes=DEFAULT_N_MODES):
    """Third-order truncation of the small-amplitude branch.

    Model A: ``eta = a cos z + a^2 (k^2/2)(cos 2z - 1) + a^3 (7k^4/16) cos 3z``
    with ``c = 1/(sqrt3 k) + a^2 k^3/(4 sqrt3)``.  Model B:
    ``w = a cos z + a^2 (k^2/4)(cos 2z - 1) + a^3 ((7+gamma) k^4/64) cos 3z``
    with ``c = 1/k^2 + a^2 (1-gamma) k^2/8``.
    """
    _check_domain(model, a, k)
    if n_modes < 3:
        raise ValueError("need at least 3 modes for the cubic truncation")
    cos = np.zeros(n_modes + 1)
    if model.is_a:
        a0, a2, a3 = -k**2 / 2.0, k**2 / 2.0, 7.0 * k**4 / 16.0
    else:
        a0, a2 = -k**2 / 4.0, k**2 / 4.0
        a3 = (7.0 + model.gamma) * k**4 / 64.0
    cos[0] = a**2 * a0
    cos[1] = a
    cos[2] = a**2 * a2
    cos[3] = a**3 * a3
    eta = TrigSeries(cos + 0.0)  # normalizes -0.0 at a = 0
    c = wave_speed_expansion(model, a, k)
    res = residual(model, eta, c, k).sup_norm()
    return WaveBranch(model=model, a=a, k=k, c=c, eta=eta, residual_norm=res)


def residual(model, eta, c, k):
    """Traveling-wave ODE residual as a series; zero iff (eta, c) solves it."""
    if k <= 0:
        raise ValueError(f"wavenumber must be positive, got k={k}")
    d1 = eta.deriv()
    d2 = eta.deriv(2)
    if model.is_a:
        return (3.0 * c**2 * k**2) * d2 - 2.0 * k**2 * (eta * d2) \
            - k**2 * (d1 * d1) + eta
    sq = d1 * d1
    return k**2 * (eta * d2) - (k**2 * c) * d2 + 0.5 * k**2 * sq \
        - 0.5 * model.gamma * k**4 * (d2 * sq) - eta


def _linearized(model, eta, c, k, delta):
    """Directional derivative of the residual in the profile direction."""
    d1 = eta.deriv()
    d2 = eta.deriv(2)
    p1 = delta.deriv()
    p2 = delta.deriv(2)
    if model.is_a:
        return (3.0 * c**2 * k**2) * p2 - 2.0 * k**2 * (eta * p2 + d2 * delta) \
            - 2.0 * k**2 * (d1 * p1) + delta
    g = model.gamma
    return k**2 * (eta * p2 + d2 * delta) - (k**2 * c) * p2 \
        + k**2 * (d1 * p1) \
        - 0.5 * g * k**4 * ((d1 * d1) * p2 + 2.0 * (d2 * d1) * p1) - delta


def _speed_derivative(model, eta, c, k):
    """Derivative of the residual with respect to the wave speed."""
    d2 = eta.deriv(2)
    if model.is_a:
        return (6.0 * c * k**2) * d2
    return (-k**2) * d2


def solve_wave(model, a, k, n_modes=DEFAULT_N_MODES, tol=DEFAULT_TOL,
               max_iter=25, seed_order=3):
    """Newton-Galerkin solution of the traveling-wave system.

    Unknowns are the cosine coefficients of the profile together with the
    speed ``c``; equations are the cosine coefficients of the ODE residual
    for harmonics ``0..N`` plus the amplitude normalization
    ``2 <eta, cos z> = a``.  Seeded from the analytic expansion
    (``seed_order`` 1 keeps only ``a cos z``, useful for convergence
    studies).  The Jacobian is assembled analytically.
    """
    _check_domain(model, a, k)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = n_modes

    if seed_order >= 2:
        seed = analytic_wave(model, a, k, n_modes=n)
        x = np.concatenate([seed.eta.cos, [seed.c]])
    else:
        cos = np.zeros(n + 1)
        cos[1] = a
        x = np.concatenate([cos, [model.c0(k)]])

    history = []
    for _ in range(max_iter):
        eta = TrigSeries(x[:n + 1])
        c = x[n + 1]
        res = residual(model, eta, c, k)
        sup = res.sup_norm()
        history.append(sup)
        err = max(sup, abs(x[1] - a))
        if err <= tol:
            return WaveBranch(model=model, a=a, k=k, c=c, eta=eta,
                              residual_norm=sup,
                              newton_residuals=tuple(history))
        jac = np.zeros((n + 2, n + 2))
        for j in range(n + 1):
            col = _linearized(model, eta, c, k, TrigSeries.cosine(j, n))
            jac[:n + 1, j] = col.cos
        jac[:n + 1, n + 1] = _speed_derivative(model, eta, c, k).cos
        jac[n + 1, 1] = 1.0
        rhs = np.concatenate([res.cos, [x[1] - a]])
        x = x - np.linalg.solve(jac, rhs)

    raise ConvergenceError(
        f"Newton iteration did not reach tol={tol} after {max_iter} steps "
        f"(last residual {history[-1]:.3e})", history[-1])


def branch_derivative(model, a, k, h=None, n_modes=DEFAULT_N_MODES,
                      tol=DEFAULT_TOL):
    """``d eta / d a`` by centered differences with one Richardson step.

    The result is even (the solver works in the cosine subspace).  The
    default step keeps the finite-difference noise from the solver
    tolerance well below 1e-6.
    """
    if h is None:
        h = 1e-4 * max(abs(a), 0.01)
    if h <= 0:
        raise ValueError("h must be positive")

    def central(step):
        hi = solve_wave(model, a + step, k, n_modes=n_modes, tol=tol)
        lo = solve_wave(model, a - step, k, n_modes=n_modes, tol=tol)
        return (hi.eta.cos - lo.eta.cos) / (2.0 * step)

    coarse = central(h)
    fine = central(h / 2.0)
    return TrigSeries((4.0 * fine - coarse) / 3.0)
