"""Discrete-time operator-sum step for environment-assisted transport.

One evolution step combines unitary evolution U = exp(-i H dt / hbar) with
incoherent jumps between basis states. Writing s_M = sqrt(1 - sum_N gamma_MN)
for the per-step survival amplitudes, the step map is

    rho' = S (U rho U^dag) S  +  sum_{M != N} gamma_MN |N><M| rho |M><N|,

with S = diag(s_M). The first term expands into all ordered products
M_MM (U rho U^dag) M_NN^dag, i.e. it contains the asymmetric decoherence
cross-terms for every pair M != N; the second term is the population
transfer. The map is linear, hermiticity-preserving, and built from a Kraus
family satisfying sum M^dag M = 1 exactly; its trace drift per step is
second order in dt because U does not commute with the projectors.

Jump probabilities are per-step values gamma = Gamma * dt supplied by the
caller; the kernel never sees rates and time steps separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    ProbabilityOutOfRangeError,
    StateInvalidError,
    SurvivalUnderflowError,
    TimeOutOfRangeError,
)


@dataclass(frozen=True)
class JumpRateSpec:
    """Per-step jump probabilities gamma[M, N] = P(jump M -> N in one step).

    The diagonal must be zero, every entry in [0, 1], and every row must sum
    to at most 1 so that the survival amplitude sqrt(1 - sum) exists.
    """

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatchError(f"gamma must be square, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ProbabilityOutOfRangeError("gamma contains non-finite entries")
        if np.any(g < 0.0):
            raise ProbabilityOutOfRangeError(
                f"gamma entries must be >= 0; minimum is {g.min():.3e}"
            )
        if np.any(np.diag(g) != 0.0):
            raise ProbabilityOutOfRangeError("gamma diagonal must be zero")
        # row sum <= 1 also bounds every single entry by 1
        row = g.sum(axis=1)
        if np.any(row > 1.0):
            bad = int(np.argmax(row))
            raise SurvivalUnderflowError(
                f"jump probability out of state {bad} sums to {row[bad]:.4f} > 1; "
                "use a smaller time step"
            )
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def survival_amplitudes(self) -> np.ndarray:
        """s_M = sqrt(1 - sum_N gamma[M, N])."""
        return np.sqrt(1.0 - self.gamma.sum(axis=1))


@dataclass(frozen=True)
class StepConfig:
    """Step parameters: dt in fs, bath-coupling fraction chi in [0, 1]."""

    dt: float
    chi: float = 1.0
    renormalize_trace: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0.0 <= self.chi <= 1.0:
            raise ValueError(f"chi must lie in [0, 1], got {self.chi}")


@dataclass(frozen=True)
class EvolutionOperators:
    """Evolution operators for one step: jumps plus unitary evolution.

    diagonal_ops[M] = s_M |M><M| U  (survival branch, evolves coherently),
    jump_ops, in lexicographic (M, N) order with N != M, are the rank-one
    sqrt(gamma_MN) |N><M| (jump branch, no coherent factor).
    """

    unitary: np.ndarray
    rates: JumpRateSpec
    survival: np.ndarray
    diagonal_ops: list = field(repr=False)
    jump_ops: list = field(repr=False)

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]


def single_jump_kraus(p: float):
    """Kraus pair for a single jump |0> -> |1> with probability p.

    M0 = sqrt(1-p)|0><0| + |1><1|,  M1 = sqrt(p)|1><0|.
    """
    if not np.isfinite(p) or p < 0.0 or p > 1.0:
        raise ProbabilityOutOfRangeError(f"jump probability must lie in [0, 1], got {p}")
    m0 = np.array([[np.sqrt(1.0 - p), 0.0], [0.0, 1.0]], dtype=complex)
    m1 = np.array([[0.0, 0.0], [np.sqrt(p), 0.0]], dtype=complex)
    return m0, m1


def single_jump_step(rho: np.ndarray, u: np.ndarray, p: float) -> np.ndarray:
    """One step of the two-level toy model: M0 U rho U^dag M0^dag + M1 rho M1^dag."""
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if rho.shape != (2, 2) or u.shape != (2, 2):
        raise DimensionMismatchError("single_jump_step works on 2x2 operators")
    m0, m1 = single_jump_kraus(p)
    m0u = m0 @ u
    return m0u @ rho @ m0u.conj().T + m1 @ rho @ m1.conj().T


def build_evolution_operators(rates: JumpRateSpec, u: np.ndarray) -> EvolutionOperators:
    """Assemble the step operators from per-step probabilities and a unitary."""
    u = np.asarray(u, dtype=complex)
    d = rates.dim
    if u.shape != (d, d):
        raise DimensionMismatchError(
            f"unitary shape {u.shape} does not match rate dimension {d}"
        )
    surv = rates.survival_amplitudes()
    diagonal_ops = []
    for m in range(d):
        op = np.zeros((d, d), dtype=complex)
        op[m, :] = surv[m] * u[m, :]        # s_M |M><M| U
        diagonal_ops.append(op)
    jump_ops = []
    for m in range(d):
        for n in range(d):
            if n == m or rates.gamma[m, n] == 0.0:
                continue
            op = np.zeros((d, d), dtype=complex)
            op[n, m] = np.sqrt(rates.gamma[m, n])
            jump_ops.append(op)
    return EvolutionOperators(
        unitary=u,
        rates=rates,
        survival=surv,
        diagonal_ops=diagonal_ops,
        jump_ops=jump_ops,
    )


def enaqt_step(rho: np.ndarray, ops: EvolutionOperators) -> np.ndarray:
    """Apply one step of the combined jump + unitary evolution.

    Equivalent to summing M_MM U rho U^dag M_NN^dag over all ordered pairs
    (M, N) plus the jump terms; evaluated in the algebraically identical
    compact form S (U rho U^dag) S + population transfer, which is exact
    (no extra approximation) and keeps hermiticity to rounding error.
    """
    rho = np.asarray(rho, dtype=complex)
    d = ops.dim
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"state shape {rho.shape} does not match dim {d}")
    coh = ops.unitary @ rho @ ops.unitary.conj().T
    out = ops.survival[:, None] * coh * ops.survival[None, :]
    # complex diagonal keeps the map linear on arbitrary (non-hermitian) inputs
    transfer = np.diagonal(rho) @ ops.rates.gamma
    out[np.diag_indices(d)] += transfer
    return out


def tunable_step(rho: np.ndarray, ops: EvolutionOperators, cfg: StepConfig) -> np.ndarray:
    """Blend coherent-only and full-step evolution with weight chi.

    chi = 1 reproduces enaqt_step exactly (same bits); chi = 0 is pure
    unitary evolution.
    """
    rho = np.asarray(rho, dtype=complex)
    chi = cfg.chi
    if chi == 1.0:
        out = enaqt_step(rho, ops)
    elif chi == 0.0:
        out = ops.unitary @ rho @ ops.unitary.conj().T
    else:
        coh = ops.unitary @ rho @ ops.unitary.conj().T
        out = (1.0 - chi) * coh + chi * enaqt_step(rho, ops)
    if cfg.renormalize_trace:
        out = out / np.trace(out).real
    return out


@dataclass
class Trajectory:
    """Recorded evolution: times in fs, one population row per step.

    populations[k, i] is the expectation of observer projector i at step k;
    trace and min_eig track the state's numerical health.
    """

    times: np.ndarray
    populations: np.ndarray
    trace: np.ndarray
    min_eig: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def index_at(self, t_fs: float) -> int:
        """Index of the grid point nearest to t_fs (must lie on the grid span)."""
        t0, t1 = float(self.times[0]), float(self.times[-1])
        if not (t0 - 1e-9) <= t_fs <= (t1 + 1e-9):
            raise TimeOutOfRangeError(
                f"t = {t_fs} fs outside trajectory span [{t0}, {t1}] fs"
            )
        return int(np.argmin(np.abs(self.times - t_fs)))


def evolve_trajectory(
    rho0: np.ndarray,
    ops: EvolutionOperators,
    cfg: StepConfig,
    steps: int,
    observers: np.ndarray,
    psd_tol: float = 1e-6,
) -> Trajectory:
    """Iterate the step map, recording projector populations per step.

    observers is an (n_obs, d, d) stack of hermitian projectors; populations
    are Re tr(P_i rho_k). Raises StateInvalidError if the state loses
    hermiticity or positivity beyond psd_tol (a symptom of gamma/dt
    misconfiguration), since the raw map is only first-order accurate.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rho = np.asarray(rho0, dtype=complex).copy()
    obs = np.asarray(observers, dtype=complex)
    d = ops.dim
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"state shape {rho.shape} does not match dim {d}")
    if obs.ndim != 3 or obs.shape[1:] != (d, d):
        raise DimensionMismatchError(
            f"observers must be (n_obs, {d}, {d}), got {obs.shape}"
        )

    n_obs = obs.shape[0]
    times = np.arange(steps + 1) * cfg.dt
    populations = np.empty((steps + 1, n_obs))
    trace = np.empty(steps + 1)
    min_eig = np.empty(steps + 1)

    def record(k: int):
        populations[k] = np.einsum("oij,ji->o", obs, rho).real
        trace[k] = np.trace(rho).real
        min_eig[k] = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if min_eig[k] < -psd_tol or herm > psd_tol:
            raise StateInvalidError(
                f"state invalid at step {k}: min eigenvalue {min_eig[k]:.3e}, "
                f"hermiticity defect {herm:.3e} (tolerance {psd_tol:.1e})"
            )

    record(0)
    for k in range(1, steps + 1):
        rho = tunable_step(rho, ops, cfg)
        record(k)
    return Trajectory(times=times, populations=populations, trace=trace, min_eig=min_eig)
