"""Time evolution under an extension and the boundary-flux energy audit."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import as_vector, matrix_exp, solve
from .checks import Report, check
from .errors import NotInDomain, SingularMatrix, SingularStep
from .extension import is_unitary_generator
from .serialization import csv_text

DOMAIN_TOL = 1e-8


@dataclass(frozen=True)
class Trajectory:
    """Samples of ``u(t)`` in extension coordinates.

    ``energies[k] = |u(t_k)|_V^2``; ``flux_plus[k]`` and ``flux_minus[k]``
    are ``|gp u|^2`` and ``|gm u|^2`` at the same instant.
    """

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    flux_plus: np.ndarray
    flux_minus: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        k = self.times.shape[0]
        for name in ("states", "energies", "flux_plus", "flux_minus"):
            if getattr(self, name).shape[0] != k:
                raise ValueError(f"{name} has {getattr(self, name).shape[0]} samples, times has {k}")

    @property
    def ambient(self):
        """States as vectors of ``V`` (one row per sample)."""
        return self.states @ self.basis.T

    def to_csv(self):
        n = self.basis.shape[0]
        header = ["t", "energy", "flux_plus", "flux_minus"]
        for j in range(n):
            header += [f"u{j}_re", f"u{j}_im"]
        U = self.ambient
        rows = []
        for k in range(self.times.shape[0]):
            row = [float(self.times[k]), float(self.energies[k]),
                   float(self.flux_plus[k]), float(self.flux_minus[k])]
            for z in U[k]:
                row += [float(z.real), float(z.imag)]
            rows.append(row)
        return csv_text(header, rows)


def initial_coords(e, u0, tol=DOMAIN_TOL):
    """Coordinates of ``u0`` in the extension basis; refuse data off the domain."""
    u0 = as_vector(u0, e.pencil.n)
    c, resid = e.to_coords(u0)
    norm = e.pencil.space.norm(u0)
    if resid > tol * max(1.0, norm):
        raise NotInDomain(
            f"initial state violates the boundary condition (off-domain part {resid:.3g})")
    return c


def propagator(e, t):
    """``exp(t gen)``; negative ``t`` only for unitary generators."""
    if t < 0 and not is_unitary_generator(e, cross_check=False):
        raise ValueError("backward evolution needs a unitary generator")
    return matrix_exp(e.gen, t)


def _run(e, P, c0, steps):
    Fp, Fm = e.boundary_maps()
    return kernels.evolve(np.ascontiguousarray(P), np.ascontiguousarray(c0), steps,
                          np.ascontiguousarray(Fp), np.ascontiguousarray(Fm))


def _record(e, times, states):
    Fp, Fm = e.boundary_maps()
    energy = np.einsum("ij,ij->i", states.conj(), states).real
    fp = states @ Fp.T
    fm = states @ Fm.T
    return Trajectory(times, states, energy,
                      np.einsum("ij,ij->i", fp.conj(), fp).real,
                      np.einsum("ij,ij->i", fm.conj(), fm).real,
                      e.basis)


def propagate_exact(e, u0, times):
    """``u(t_k) = exp(t_k gen) u0`` sampled on an increasing grid."""
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0:
        raise ValueError("empty time grid")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    c0 = initial_coords(e, u0)
    if times[0] != 0.0:
        c0 = propagator(e, times[0]) @ c0
    if times.size == 1:
        return _record(e, times, c0[None, :])
    dts = np.diff(times)
    if np.allclose(dts, dts[0], rtol=1e-12, atol=0.0):
        states, energy, fp, fm = _run(e, matrix_exp(e.gen, dts[0]), c0, times.size - 1)
        return Trajectory(times, states, energy, fp, fm, e.basis)
    states = np.empty((times.size, c0.size), dtype=np.complex128)
    states[0] = c0
    cache = {}
    for k, dt in enumerate(dts, start=1):
        key = float(dt)
        if key not in cache:
            cache[key] = matrix_exp(e.gen, dt)
        states[k] = cache[key] @ states[k - 1]
    return _record(e, times, states)


def cn_step_matrix(gen, dt):
    """Cayley map ``(I - dt/2 gen)^{-1} (I + dt/2 gen)``."""
    s = gen.shape[0]
    I = np.eye(s)
    try:
        return solve(I - 0.5 * dt * gen, I + 0.5 * dt * gen)
    except SingularMatrix as exc:
        raise SingularStep(f"I - dt/2 gen is singular for dt = {dt}") from exc


def propagate_cn(e, u0, dt, steps):
    """Crank-Nicolson stepping from ``u0`` with ``steps`` steps of size ``dt``."""
    if dt <= 0 or steps < 0:
        raise ValueError("need dt > 0 and steps >= 0")
    c0 = initial_coords(e, u0)
    P = cn_step_matrix(e.gen, dt)
    states, energy, fp, fm = _run(e, P, c0, int(steps))
    return Trajectory(dt * np.arange(int(steps) + 1), states, energy, fp, fm, e.basis)


def energy_rate_audit(e, traj, tol=1e-8):
    """Compare ``d/dt |u|^2 = 2 Re<gen u, u>`` with ``|gp u|^2 - |gm u|^2`` at every sample."""
    C = traj.states
    lhs = 2.0 * np.einsum("ij,ij->i", C.conj(), C @ e.gen.T).real
    rhs = traj.flux_plus - traj.flux_minus
    gap = np.abs(lhs - rhs)
    allowed = tol * np.maximum(1.0, traj.energies)
    ratio = gap / allowed
    k = int(np.argmax(ratio)) if ratio.size else 0
    worst = float(gap[k]) if gap.size else 0.0
    return Report("energy_rate", (
        check("energy_rate_identity", worst, float(allowed[k]) if gap.size else tol,
              f"worst sample t = {traj.times[k]:.6g}" if gap.size else ""),
    ), {
        "max_discrepancy": float(gap.max()) if gap.size else 0.0,
        "max_relative": float(ratio.max() * tol) if ratio.size else 0.0,
        "lhs": lhs,
        "rhs": rhs,
    })
