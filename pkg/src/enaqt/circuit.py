"""Compile one evolution step into an elementary-gate quantum circuit.

Layout for a dim-d system (n = ceil(log2 d) system qubits): wire 0 is bath
qubit B1 (tags jumped population), wires 1..n the system (most significant
bit first), wire n+1 is bath qubit B2 (absorbs one jump, then is reset), and
n further ancilla wires are reserved for the Toffoli-ladder expansion of the
multi-controlled gates (counted, never simulated). Excitons are encoded on
computational basis codes 1..d when d < 2^n (code 0 unused) and 0..d-1 when
d = 2^n.

One jump i -> j is two gates: a rotation of B2 by theta = 2 arcsin(sqrt(g))
controlled on B1 = 0 and the system being |i>, then a permutation controlled
on B2 = 1 that swaps |0>_B1 |i>  <->  |1>_B1 |j>. Tracing B2 out afterwards
realizes exactly the Kraus pair

    M0 = sqrt(1-g)|0,i><0,i| + |1,i><1,i| + 1_B1 (x) sum_{m != i} |m><m|,
    M1 = sqrt(g) |1,j><0,i|.

A full step strings all d(d-1) jumps in lexicographic (i, j) order with a B2
reset after each, applies the coherent gate C = |0><0|_B1 (x) U + |1><1|_B1
(x) 1 at the end, and traces out B1. The resulting channel is exactly trace
preserving and completely positive, unlike the raw one-shot step map, and
agrees with it to first order in the jump probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    LayoutMismatchError,
    ProbabilityOutOfRangeError,
)
from .kernel import JumpRateSpec, build_evolution_operators, enaqt_step
from .linalg import evolution_unitary, frob_dist

KIND_CRY = "controlled-ry"
KIND_CPERM = "controlled-permutation"
KIND_CUNITARY = "controlled-unitary"
KIND_BASIS = "basis-change"
KIND_RESET_B2 = "reset-b2"
KIND_TRACE_B1 = "trace-out-b1"

UNITARY_KINDS = (KIND_CRY, KIND_CPERM, KIND_CUNITARY, KIND_BASIS)


@dataclass(frozen=True)
class QubitLayout:
    """Wire bookkeeping for a dim-d system."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise LayoutMismatchError(f"need dim >= 2, got {self.dim}")

    @property
    def n_system(self) -> int:
        return int(np.ceil(np.log2(self.dim)))

    @property
    def b1_wire(self) -> int:
        return 0

    @property
    def system_wires(self) -> tuple:
        return tuple(range(1, self.n_system + 1))

    @property
    def b2_wire(self) -> int:
        return self.n_system + 1

    @property
    def ancilla_wires(self) -> tuple:
        n = self.n_system
        return tuple(range(n + 2, 2 * n + 2))

    @property
    def total_qubits(self) -> int:
        """System + 2 bath + ancillas (ancillas reserved for decomposition)."""
        return 2 * self.n_system + 2

    @property
    def sim_dim(self) -> int:
        """Dimension of the simulated space: B1 x system x B2."""
        return 2 ** (self.n_system + 2)

    def code_of(self, k: int) -> int:
        """Computational basis code of exciton k (0-based)."""
        if not 0 <= k < self.dim:
            raise IndexOutOfRangeError(f"exciton index {k} outside 0..{self.dim - 1}")
        return k + 1 if self.dim < 2 ** self.n_system else k

    def codes(self) -> list:
        return [self.code_of(k) for k in range(self.dim)]

    def basis_index(self, b1: int, code: int, b2: int) -> int:
        """Index into the simulated space for (B1, system code, B2)."""
        return (b1 << (self.n_system + 1)) | (code << 1) | b2


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit element: unitary gate or channel element (reset/trace)."""

    kind: str
    targets: tuple = ()
    controls: tuple = ()  # ((wire, required value), ...)
    theta: float | None = None
    matrix: np.ndarray | None = None
    src: int | None = None  # exciton indices for the permutation gate
    dst: int | None = None

    @property
    def is_unitary(self) -> bool:
        return self.kind in UNITARY_KINDS


@dataclass
class GateList:
    """Ordered gates plus the layout they act on."""

    layout: QubitLayout
    gates: list = field(default_factory=list)
    jump_count: int = 0

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


def _code_controls(layout: QubitLayout, code: int) -> tuple:
    """Controls pinning the system register to a given code."""
    n = layout.n_system
    bits = [(code >> (n - 1 - b)) & 1 for b in range(n)]
    return tuple((layout.system_wires[b], bits[b]) for b in range(n))


def build_jump_circuit(i: int, j: int, gamma: float, layout: QubitLayout) -> GateList:
    """Two-gate circuit for one jump from exciton i to exciton j (0-based).

    Rotation angle theta = 2 arcsin(sqrt(gamma)), so the B2 excitation
    amplitude is sqrt(gamma).
    """
    if i == j:
        raise IndexOutOfRangeError("jump needs distinct excitons")
    if not np.isfinite(gamma) or gamma < 0.0 or gamma > 1.0:
        raise ProbabilityOutOfRangeError(f"gamma must lie in [0, 1], got {gamma}")
    code_i = layout.code_of(i)
    code_j = layout.code_of(j)
    theta = 2.0 * np.arcsin(np.sqrt(gamma))
    rot = Gate(
        kind=KIND_CRY,
        targets=(layout.b2_wire,),
        controls=((layout.b1_wire, 0),) + _code_controls(layout, code_i),
        theta=theta,
    )
    perm = Gate(
        kind=KIND_CPERM,
        targets=(layout.b1_wire,) + layout.system_wires,
        controls=((layout.b2_wire, 1),),
        src=i,
        dst=j,
    )
    return GateList(layout=layout, gates=[rot, perm], jump_count=1)


def build_step_circuit(rates: JumpRateSpec, u: np.ndarray, layout: QubitLayout | None = None) -> GateList:
    """Full one-step circuit: every (i, j) jump in lexicographic order.

    Each jump sub-circuit is followed by a B2 reset; the coherent gate C
    comes after all jumps, then B1 is traced out.
    """
    d = rates.dim
    u = np.asarray(u, dtype=complex)
    if u.shape != (d, d):
        raise DimensionMismatchError(f"unitary shape {u.shape} does not match dim {d}")
    if layout is None:
        layout = QubitLayout(d)
    if layout.dim != d:
        raise LayoutMismatchError(f"layout dim {layout.dim} does not match rates dim {d}")
    out = GateList(layout=layout)
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            sub = build_jump_circuit(i, j, rates.gamma[i, j], layout)
            out.gates.extend(sub.gates)
            out.gates.append(Gate(kind=KIND_RESET_B2, targets=(layout.b2_wire,)))
            out.jump_count += 1
    out.gates.append(
        Gate(
            kind=KIND_CUNITARY,
            targets=layout.system_wires,
            controls=((layout.b1_wire, 0),),
            matrix=u,
        )
    )
    out.gates.append(Gate(kind=KIND_TRACE_B1, targets=(layout.b1_wire,)))
    return out


def basis_change_gate(transform: np.ndarray, layout: QubitLayout, to_exciton: bool = True) -> Gate:
    """Uncontrolled rotation of the system register between bases.

    `transform` holds the exciton states as columns in the site basis; the
    to_exciton gate (applied once before the first step) is its adjoint, and
    the inverse (to_exciton=False, applied once before measurement) is the
    transform itself. Steps in between run entirely in the exciton basis.
    """
    m = np.asarray(transform, dtype=complex)
    if m.shape != (layout.dim, layout.dim):
        raise LayoutMismatchError(
            f"transform shape {m.shape} does not fit layout dim {layout.dim}"
        )
    return Gate(
        kind=KIND_BASIS,
        targets=layout.system_wires,
        matrix=m.conj().T if to_exciton else m,
    )


def _pad_to_register(layout: QubitLayout, op: np.ndarray) -> np.ndarray:
    """Embed a dim x dim operator on the system register (identity off-code)."""
    n_full = 2 ** layout.n_system
    codes = layout.codes()
    padded = np.eye(n_full, dtype=complex)
    padded[np.ix_(codes, codes)] = op
    return padded


def gate_matrix(gate: Gate, layout: QubitLayout) -> np.ndarray:
    """Dense unitary of a gate on the simulated (B1, system, B2) space."""
    dim = layout.sim_dim
    if gate.kind == KIND_CRY:
        m = np.eye(dim, dtype=complex)
        required = dict(gate.controls)
        b1 = required.pop(layout.b1_wire)
        n = layout.n_system
        code = 0
        for b, wire in enumerate(layout.system_wires):
            code |= required[wire] << (n - 1 - b)
        i0 = layout.basis_index(b1, code, 0)
        i1 = layout.basis_index(b1, code, 1)
        c, s = np.cos(gate.theta / 2.0), np.sin(gate.theta / 2.0)
        m[i0, i0] = c
        m[i1, i0] = s
        m[i0, i1] = -s
        m[i1, i1] = c
        return m
    if gate.kind == KIND_CPERM:
        m = np.eye(dim, dtype=complex)
        a = layout.basis_index(0, layout.code_of(gate.src), 1)
        b = layout.basis_index(1, layout.code_of(gate.dst), 1)
        m[a, a] = 0.0
        m[b, b] = 0.0
        m[a, b] = 1.0
        m[b, a] = 1.0
        return m
    if gate.kind == KIND_CUNITARY:
        padded = _pad_to_register(layout, gate.matrix)
        n_full = 2 ** layout.n_system
        p0 = np.array([[1.0, 0.0], [0.0, 0.0]])
        p1 = np.array([[0.0, 0.0], [0.0, 1.0]])
        eye2 = np.eye(2)
        return np.kron(np.kron(p0, padded), eye2) + np.kron(
            np.kron(p1, np.eye(n_full)), eye2
        )
    if gate.kind == KIND_BASIS:
        padded = _pad_to_register(layout, gate.matrix)
        return np.kron(np.kron(np.eye(2), padded), np.eye(2))
    raise LayoutMismatchError(f"gate kind {gate.kind!r} has no unitary matrix")


def _reset_b2(sigma: np.ndarray, layout: QubitLayout) -> np.ndarray:
    """Trace out B2 and re-tensor |0><0|."""
    half = layout.sim_dim // 2
    r = sigma.reshape(half, 2, half, 2)
    traced = np.einsum("aibi->ab", r)
    out = np.zeros_like(sigma).reshape(half, 2, half, 2)
    out[:, 0, :, 0] = traced
    return out.reshape(layout.sim_dim, layout.sim_dim)


def apply_circuit(rho_sys: np.ndarray, gates: GateList, layout: QubitLayout | None = None) -> np.ndarray:
    """Run a compiled circuit on a system state; returns the reduced state.

    The state is embedded with B1 = B2 = |0>, unitary gates act by
    conjugation, resets trace-and-retension B2, and both bath qubits are
    traced out at the end. The channel is exactly trace preserving.
    """
    if layout is None:
        layout = gates.layout
    d = layout.dim
    rho_sys = np.asarray(rho_sys, dtype=complex)
    if rho_sys.shape != (d, d):
        raise LayoutMismatchError(
            f"state shape {rho_sys.shape} does not fit layout dim {d}"
        )
    n_full = 2 ** layout.n_system
    codes = layout.codes()
    reg = np.zeros((n_full, n_full), dtype=complex)
    reg[np.ix_(codes, codes)] = rho_sys
    p0 = np.zeros((2, 2), dtype=complex)
    p0[0, 0] = 1.0
    sigma = np.kron(np.kron(p0, reg), p0)

    for pos, gate in enumerate(gates):
        if gate.kind == KIND_RESET_B2:
            sigma = _reset_b2(sigma, layout)
        elif gate.kind == KIND_TRACE_B1:
            if pos != len(gates.gates) - 1:
                raise LayoutMismatchError("trace-out-b1 must be the final gate")
        else:
            m = gate_matrix(gate, layout)
            sigma = m @ sigma @ m.conj().T

    r = sigma.reshape(2, n_full, 2, 2, n_full, 2)
    reduced = np.einsum("xiyxjy->ij", r)
    return reduced[np.ix_(codes, codes)]


def sequential_kraus_step(rho: np.ndarray, rates: JumpRateSpec, u: np.ndarray) -> np.ndarray:
    """Operator-model reference: the same step evaluated by Kraus algebra.

    Works on the (B1 x system) space directly (no qubit encoding, no B2),
    applying each jump's Kraus pair in the same lexicographic order, then
    the coherent gate, then the B1 trace. Dual route to apply_circuit for
    channel-equivalence certification.
    """
    d = rates.dim
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"state shape {rho.shape} does not match dim {d}")
    u = np.asarray(u, dtype=complex)
    sigma = np.zeros((2 * d, 2 * d), dtype=complex)
    sigma[:d, :d] = rho  # B1 = |0> block
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            g = rates.gamma[i, j]
            m0 = np.eye(2 * d, dtype=complex)
            m0[i, i] = np.sqrt(1.0 - g)
            m1 = np.zeros((2 * d, 2 * d), dtype=complex)
            m1[d + j, i] = np.sqrt(g)
            sigma = m0 @ sigma @ m0.conj().T + m1 @ sigma @ m1.conj().T
    c = np.zeros((2 * d, 2 * d), dtype=complex)
    c[:d, :d] = u
    c[d:, d:] = np.eye(d)
    sigma = c @ sigma @ c.conj().T
    return sigma[:d, :d] + sigma[d:, d:]


def channel_choi(apply_channel, dim: int) -> np.ndarray:
    """Choi matrix sum_ab |a><b| (x) E(|a><b|) of a linear channel.

    The identity channel gives dim times the maximally entangled projector;
    CPTP channels give a PSD Choi matrix whose partial trace over the output
    factor is the identity.
    """
    c = np.zeros((dim * dim, dim * dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[a, b] = 1.0
            c += np.kron(e, np.asarray(apply_channel(e), dtype=complex))
    return c


def channel_transfer_matrix(apply_channel, dim: int) -> np.ndarray:
    """Row-major superoperator T with vec(E(rho)) = T @ vec(rho)."""
    t = np.empty((dim * dim, dim * dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[a, b] = 1.0
            t[:, a * dim + b] = np.asarray(apply_channel(e), dtype=complex).reshape(-1)
    return t


@dataclass
class ChannelScalingReport:
    """Choi distances circuit-vs-step-map under coupled (gamma, dt) scaling."""

    rows: list = field(default_factory=list)  # (scale, choi distance)

    def ratios(self) -> list:
        """Successive distance ratios; ~4 per halving (second-order gap)."""
        return [
            self.rows[i][1] / self.rows[i + 1][1]
            for i in range(len(self.rows) - 1)
            if self.rows[i + 1][1] > 0
        ]


def compare_step_channels(
    rates: JumpRateSpec,
    hamiltonian: np.ndarray,
    dt: float,
    scalings=(1.0, 0.5, 0.25),
) -> ChannelScalingReport:
    """Choi distance between the compiled circuit step and the one-shot map.

    For each scale s both the jump probabilities (gamma -> s*gamma) and the
    effective step (U -> U(s*dt)) shrink together; the two channels agree to
    first order in the step, so the distance falls by ~4x per halving.
    """
    d = rates.dim
    layout = QubitLayout(d)
    report = ChannelScalingReport()
    for s in scalings:
        gam = JumpRateSpec(rates.gamma * s)
        u = evolution_unitary(hamiltonian, s * dt)
        gates = build_step_circuit(gam, u, layout)
        ops = build_evolution_operators(gam, u)
        choi_circuit = channel_choi(lambda r: apply_circuit(r, gates, layout), d)
        choi_map = channel_choi(lambda r: enaqt_step(r, ops), d)
        report.rows.append((float(s), frob_dist(choi_circuit, choi_map)))
    return report


@dataclass(frozen=True)
class GateCountReport:
    """Complexity accounting for one compiled step."""

    dim: int
    jumps: int
    per_jump_elementary: int
    jump_elementary_total: int
    coherent_gates: int
    qubits: int
    raw_gates: int


def gate_count(gates: GateList, dim: int | None = None) -> GateCountReport:
    """Count jumps, elementary gates, and qubits for a compiled step.

    The elementary count uses the fixed convention that a jump decomposes
    into 2*ceil(log2 dim) two-control gates on the ancilla ladder;
    raw_gates counts the logical gate objects actually emitted.
    """
    layout = gates.layout
    if dim is None:
        dim = layout.dim
    jumps = sum(1 for g in gates if g.kind == KIND_CRY)
    per_jump = 2 * layout.n_system
    coherent = sum(1 for g in gates if g.kind == KIND_CUNITARY)
    return GateCountReport(
        dim=dim,
        jumps=jumps,
        per_jump_elementary=per_jump,
        jump_elementary_total=jumps * per_jump,
        coherent_gates=coherent,
        qubits=layout.total_qubits,
        raw_gates=sum(1 for g in gates if g.is_unitary),
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_matrix(m: np.ndarray) -> str:
    rows = []
    for row in np.asarray(m, dtype=complex):
        rows.append(",".join(f"{_fmt(z.real)}+{_fmt(z.imag)}j" for z in row))
    return ";".join(rows)


def export_gates(gates: GateList) -> str:
    """Line-oriented text form of a gate list (deterministic ordering).

    One gate per line: KIND, then key=value fields. Controls are
    wire:value pairs; matrices are row-major semicolon-separated rows of
    comma-separated re+imj entries.
    """
    lines = []
    for gate in gates:
        fields = []
        if gate.targets:
            fields.append("targets=" + ",".join(str(w) for w in gate.targets))
        if gate.controls:
            fields.append(
                "controls=" + ",".join(f"{w}:{v}" for w, v in gate.controls)
            )
        if gate.kind == KIND_CRY:
            fields.append(f"theta={_fmt(gate.theta)}")
        elif gate.kind == KIND_CPERM:
            fields.append(f"src={gate.src}")
            fields.append(f"dst={gate.dst}")
        elif gate.kind in (KIND_CUNITARY, KIND_BASIS):
            fields.append("matrix=" + _fmt_matrix(gate.matrix))
        lines.append(" ".join([gate.kind.upper()] + fields))
    return "\n".join(lines) + "\n"
