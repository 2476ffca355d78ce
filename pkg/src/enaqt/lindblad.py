"""Continuous-time Lindblad integrator used as the correctness oracle.

Implements the standard GKSL dissipator

    L(rho) = sum_k Gamma_k ( L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho} ).

For rank-one transition operators L = |N><M| the anticommutator projector
sits on the *source* state |M>, which is the only trace-free choice and the
one whose normalisation terms deplete the state the population leaves.

A fixed-step classical RK4 drives the integration (deliberately not an
eigendecomposition-based exponential, to stay structurally independent of
the discrete kernel it cross-checks).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .errors import DimensionMismatchError, NotHermitianError, StepTooLargeWarning
from .kernel import JumpRateSpec, Trajectory
from .linalg import HBAR_CM1_FS, evolution_unitary, frob_dist, herm_defect


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian (cm^-1) plus jump operators with rates in fs^-1."""

    hamiltonian: np.ndarray
    jumps: tuple = ()
    hbar: float = HBAR_CM1_FS

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatchError(f"hamiltonian must be square, got {h.shape}")
        defect = herm_defect(h)
        if defect > 1e-10:
            raise NotHermitianError(f"hamiltonian hermiticity defect {defect:.3e}")
        jumps = []
        for op, rate in self.jumps:
            op = np.asarray(op, dtype=complex)
            if op.shape != h.shape:
                raise DimensionMismatchError(
                    f"jump operator shape {op.shape} does not match {h.shape}"
                )
            if rate < 0:
                raise ValueError(f"jump rate must be >= 0, got {rate}")
            jumps.append((op, float(rate)))
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @classmethod
    def from_rate_matrix(cls, hamiltonian: np.ndarray, rates_per_fs: np.ndarray):
        """Model with rank-one transition jumps |N><M| at rate rates[M, N]."""
        r = np.asarray(rates_per_fs, dtype=float)
        d = r.shape[0]
        if r.shape != (d, d):
            raise DimensionMismatchError(f"rate matrix must be square, got {r.shape}")
        jumps = []
        for m in range(d):
            for n in range(d):
                if m == n or r[m, n] == 0.0:
                    continue
                op = np.zeros((d, d), dtype=complex)
                op[n, m] = 1.0
                jumps.append((op, r[m, n]))
        return cls(hamiltonian=hamiltonian, jumps=tuple(jumps))

    def transition_rate_matrix(self) -> np.ndarray:
        """Recover rates[M, N] from rank-one transition jumps.

        Raises ValueError if any jump operator is not a single-entry basis
        transition (the discrete kernel only represents those).
        """
        d = self.dim
        rates = np.zeros((d, d))
        for op, rate in self.jumps:
            idx = np.argwhere(np.abs(op) > 1e-14)
            if len(idx) != 1:
                raise ValueError(
                    "jump operator is not a basis transition |N><M|; "
                    "cannot map onto the discrete kernel"
                )
            n, m = idx[0]
            if n == m:
                raise ValueError("diagonal jump operators have no kernel counterpart")
            rates[m, n] += rate * float(np.abs(op[n, m]) ** 2)
        return rates

    def _stacked(self):
        """Batched arrays (L, L^dag, Gamma, sum Gamma L^dag L) for the rhs.

        Built once per model; the rhs is evaluated four times per RK4 step.
        """
        if not self.jumps:
            return None
        cached = getattr(self, "_stacked_cache", None)
        if cached is None:
            L = np.stack([op for op, _ in self.jumps])
            g = np.array([rate for _, rate in self.jumps])[:, None, None]
            Ld = L.conj().transpose(0, 2, 1)
            LdL_tot = np.sum(g * (Ld @ L), axis=0)
            cached = (L, Ld, g, LdL_tot)
            object.__setattr__(self, "_stacked_cache", cached)
        return cached


def lindblad_rhs(rho: np.ndarray, model: LindbladModel) -> np.ndarray:
    """d(rho)/dt: -(i/hbar)[H, rho] plus the GKSL dissipator."""
    rho = np.asarray(rho, dtype=complex)
    h = model.hamiltonian
    if rho.shape != h.shape:
        raise DimensionMismatchError(
            f"state shape {rho.shape} does not match hamiltonian {h.shape}"
        )
    out = (-1j / model.hbar) * (h @ rho - rho @ h)
    stacked = model._stacked()
    if stacked is not None:
        L, Ld, g, LdL_tot = stacked
        out += np.sum(g * (L @ rho @ Ld), axis=0)
        out -= 0.5 * (LdL_tot @ rho + rho @ LdL_tot)
    return out


def rk4_integrate(
    rho0: np.ndarray,
    model: LindbladModel,
    dt: float,
    steps: int,
    observers: np.ndarray | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of the master equation.

    The state is re-hermitized ((rho + rho^dag)/2) after every step. Emits
    StepTooLargeWarning once if ||rhs|| * dt >= 0.1, where the fixed step
    starts losing its accuracy budget.
    """
    rho = np.asarray(rho0, dtype=complex).copy()
    d = model.dim
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"state shape {rho.shape} does not match dim {d}")
    if observers is None:
        obs = np.stack([np.diag(e) for e in np.eye(d)]).astype(complex)
    else:
        obs = np.asarray(observers, dtype=complex)
        if obs.ndim != 3 or obs.shape[1:] != (d, d):
            raise DimensionMismatchError(
                f"observers must be (n_obs, {d}, {d}), got {obs.shape}"
            )

    times = np.arange(steps + 1) * dt
    populations = np.empty((steps + 1, obs.shape[0]))
    trace = np.empty(steps + 1)
    min_eig = np.empty(steps + 1)
    warned = False

    def record(k: int):
        populations[k] = np.einsum("oij,ji->o", obs, rho).real
        trace[k] = np.trace(rho).real
        min_eig[k] = float(np.linalg.eigvalsh(rho).min())

    record(0)
    for k in range(1, steps + 1):
        k1 = lindblad_rhs(rho, model)
        if not warned and np.linalg.norm(k1) * dt >= 0.1:
            warnings.warn(
                f"RK4 step {dt} fs is coarse: ||rhs||*dt = "
                f"{np.linalg.norm(k1) * dt:.3f} >= 0.1",
                StepTooLargeWarning,
                stacklevel=2,
            )
            warned = True
        k2 = lindblad_rhs(rho + 0.5 * dt * k1, model)
        k3 = lindblad_rhs(rho + 0.5 * dt * k2, model)
        k4 = lindblad_rhs(rho + dt * k3, model)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        record(k)
    traj = Trajectory(times=times, populations=populations, trace=trace, min_eig=min_eig)
    traj.metadata["final_state"] = rho
    return traj


@dataclass
class ConvergenceReport:
    """Distances between the discrete step iteration and the RK4 oracle."""

    t_final: float
    oracle_dt: float
    rows: list = field(default_factory=list)  # (dt, frobenius distance)

    def ratios(self) -> list:
        """Successive error ratios; ~2 per dt halving for a first-order map."""
        return [
            self.rows[i][1] / self.rows[i + 1][1]
            for i in range(len(self.rows) - 1)
            if self.rows[i + 1][1] > 0
        ]


def _discrete_final_state(
    rho0: np.ndarray, model: LindbladModel, rates: np.ndarray, dt: float, steps: int
) -> np.ndarray:
    u = evolution_unitary(model.hamiltonian, dt, hbar=model.hbar)
    ops = kernel.build_evolution_operators(JumpRateSpec(rates * dt), u)
    rho = np.asarray(rho0, dtype=complex).copy()
    for _ in range(steps):
        rho = kernel.enaqt_step(rho, ops)
    return rho


def convergence_report(
    model: LindbladModel,
    rho0: np.ndarray,
    t_final: float,
    dt_list,
    oracle_dt: float | None = None,
) -> ConvergenceReport:
    """Frobenius distance at t_final between the discrete kernel and RK4.

    Every dt in dt_list must divide t_final. The oracle runs once at
    oracle_dt (default min(dt_list)/10). Distances shrink roughly linearly
    in dt: the discrete step solves the master equation to first order.
    """
    dt_list = [float(dt) for dt in dt_list]
    if not dt_list:
        raise ValueError("dt_list must be non-empty")
    for dt in dt_list:
        if abs(t_final / dt - round(t_final / dt)) > 1e-9:
            raise ValueError(f"dt = {dt} fs does not divide t_final = {t_final} fs")
    if oracle_dt is None:
        oracle_dt = min(dt_list) / 10.0
    if oracle_dt > min(dt_list) / 10.0 + 1e-12:
        raise ValueError("oracle_dt must be at most min(dt_list)/10")

    oracle_steps = int(round(t_final / oracle_dt))
    ref = rk4_integrate(rho0, model, t_final / oracle_steps, oracle_steps)
    ref_state = ref.metadata["final_state"]

    rates = model.transition_rate_matrix()
    report = ConvergenceReport(t_final=t_final, oracle_dt=oracle_dt)
    for dt in sorted(dt_list, reverse=True):
        steps = int(round(t_final / dt))
        final = _discrete_final_state(rho0, model, rates, dt, steps)
        report.rows.append((dt, frob_dist(final, ref_state)))
    return report
