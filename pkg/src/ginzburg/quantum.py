"""Quantized phonon-detector dynamics for a single localized trajectory.

Truncated Fock representation of a few retained chain modes tensored with a
two-level detector (one qubit per internal frequency).  Three evolution
paths validate each other:

  evolve_exact          exp(-i H t / hbar) by dense eigendecomposition
  evolve_perturbative   first-order amplitude -i g t / (2 hbar) on |1, e>
  evolve_full           fixed-step midpoint-exponential (Magnus-2) stepping
                        of the time-dependent pre-RWA Hamiltonian

The rotating-wave Hamiltonian for the resonant mode is the non-degenerate
parametric amplifier H = (g_alpha/2)(a b + a^dag b^dag), which creates
phonon/detector excitations in pairs out of the vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GuardError, StabilityError, ValidationError
from .modes import ModeCoupling
from .params import SystemParams

DEFAULT_PERTURBATIVE_GUARD = 0.3
# fixed-step integrator resolves the fastest phase by this many steps/cycle
FULL_STEPS_PER_CYCLE = 50.0

_qubit_lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|


def _boson_lower(n_levels: int) -> np.ndarray:
    a = np.zeros((n_levels, n_levels), dtype=complex)
    for n in range(1, n_levels):
        a[n - 1, n] = math.sqrt(n)
    return a


@dataclass(frozen=True)
class FockSpace:
    """Detector qubits (slowest index) tensored with truncated mode ladders.

    modes: ((alpha, n_max), ...) in tensor order; detector_qubits is the
    number of internal frequencies (0 gives a purely bosonic space, used by
    the two-mode-squeezing tests).
    """

    modes: tuple[tuple[int, int], ...]
    detector_qubits: int = 1

    def __post_init__(self):
        labels = [alpha for alpha, _ in self.modes]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate mode labels: {labels}")
        if any(n_max < 1 for _, n_max in self.modes):
            raise ValidationError("every mode needs n_max >= 1")
        if self.detector_qubits not in (0, 1, 2):
            raise ValidationError("detector_qubits must be 0, 1, or 2")
        if not self.modes and self.detector_qubits == 0:
            raise ValidationError("empty Fock space")

    @property
    def mode_labels(self) -> tuple[int, ...]:
        return tuple(alpha for alpha, _ in self.modes)

    @property
    def dims(self) -> tuple[int, ...]:
        det = (2 ** self.detector_qubits,) if self.detector_qubits else ()
        return det + tuple(n_max + 1 for _, n_max in self.modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def _mode_slot(self, alpha: int) -> int:
        try:
            pos = self.mode_labels.index(alpha)
        except ValueError:
            raise ValidationError(
                f"mode {alpha} not in Fock space {self.mode_labels}") from None
        return pos + (1 if self.detector_qubits else 0)

    def _embed(self, op: np.ndarray, slot: int) -> np.ndarray:
        mats = [np.eye(d, dtype=complex) for d in self.dims]
        mats[slot] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    def annihilation(self, alpha: int) -> np.ndarray:
        slot = self._mode_slot(alpha)
        return self._embed(_boson_lower(self.dims[slot]), slot)

    def number_operator(self, alpha: int) -> np.ndarray:
        a = self.annihilation(alpha)
        return a.conj().T @ a

    def _detector_op(self, op2: np.ndarray, which: int) -> np.ndarray:
        if which >= self.detector_qubits:
            raise ValidationError(
                f"detector qubit {which} absent ({self.detector_qubits} present)")
        mats = [np.eye(2, dtype=complex)] * self.detector_qubits
        mats[which] = op2
        det = mats[0]
        for m in mats[1:]:
            det = np.kron(det, m)
        return self._embed(det, 0)

    def detector_lowering(self, which: int = 0) -> np.ndarray:
        return self._detector_op(_qubit_lower, which)

    def detector_excited_projector(self, which: int = 0) -> np.ndarray:
        return self._detector_op(np.diag([0.0, 1.0]).astype(complex), which)

    def basis_index(self, detector_level: int, occupations: Sequence[int]) -> int:
        if len(occupations) != len(self.modes):
            raise ValidationError("occupation list does not match mode count")
        multi = ((detector_level,) if self.detector_qubits else ()) + tuple(occupations)
        return int(np.ravel_multi_index(multi, self.dims))

    def vacuum(self) -> "QuantumState":
        amp = np.zeros(self.dim, dtype=complex)
        amp[0] = 1.0
        return QuantumState(self, amp)


@dataclass
class QuantumState:
    """Amplitude vector over a FockSpace basis."""

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.space.dim,):
            raise ValidationError(
                f"amplitude vector must have length {self.space.dim}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QuantumState":
        n = self.norm
        if n == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return QuantumState(self.space, self.amplitudes / n)

    def probability(self, detector_level: int, occupations: Sequence[int]) -> float:
        idx = self.space.basis_index(detector_level, occupations)
        return float(abs(self.amplitudes[idx]) ** 2)

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(self.amplitudes.conj() @ (op @ self.amplitudes)))

    def excitation_probability(self, which: int = 0) -> float:
        return self.expectation(self.space.detector_excited_projector(which))


@dataclass
class DensityMatrix:
    """Density operator over named tensor factors."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        d = int(np.prod(self.dims))
        if self.matrix.shape != (d, d):
            raise ValidationError(f"matrix must be {d}x{d} for dims {self.dims}")
        if len(self.names) != len(self.dims):
            raise ValidationError("one name per tensor factor required")

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def validate(self, herm_tol: float = 1e-12, eig_floor: float = -1e-10,
                 trace_tol: float = 1e-12):
        scale = max(float(np.max(np.abs(self.matrix))), 1e-300)
        if float(np.max(np.abs(self.matrix - self.matrix.conj().T))) > herm_tol * scale:
            raise ValidationError("density matrix not Hermitian")
        if float(np.min(np.linalg.eigvalsh(self.matrix))) < eig_floor:
            raise ValidationError("density matrix has a negative eigenvalue")
        if abs(self.trace - 1.0) > trace_tol:
            raise ValidationError(f"trace = {self.trace} is not 1")

    def partial_trace(self, keep: Sequence[str]) -> "DensityMatrix":
        keep = list(keep)
        missing = [n for n in keep if n not in self.names]
        if missing:
            raise ValidationError(f"unknown factors {missing}; have {self.names}")
        keep_idx = [i for i, n in enumerate(self.names) if n in keep]
        n_fac = len(self.dims)
        rho = self.matrix.reshape(self.dims + self.dims)
        # row index i and column index n_fac + i per factor; traced factors
        # share one summation label
        row = list(range(n_fac))
        col = [n_fac + i if i in keep_idx else i for i in range(n_fac)]
        out = [i for i in keep_idx] + [n_fac + i for i in keep_idx]
        reduced = np.einsum(rho, row + col, out)
        new_dims = tuple(self.dims[i] for i in keep_idx)
        d = int(np.prod(new_dims))
        return DensityMatrix(reduced.reshape(d, d), new_dims,
                             tuple(self.names[i] for i in keep_idx))

    def population(self, multi_index: Sequence[int]) -> float:
        idx = int(np.ravel_multi_index(tuple(multi_index), self.dims))
        return float(np.real(self.matrix[idx, idx]))


def density_from_state(state: QuantumState, dims: tuple[int, ...],
                       names: tuple[str, ...]) -> DensityMatrix:
    amp = state.amplitudes
    return DensityMatrix(np.outer(amp, amp.conj()), dims, names)


def trace_distance(rho_a: DensityMatrix, rho_b: DensityMatrix) -> float:
    """Half the trace norm of the difference (singular values = |eigenvalues|
    for the Hermitian difference)."""
    if rho_a.dims != rho_b.dims:
        raise ValidationError(f"dimension mismatch: {rho_a.dims} vs {rho_b.dims}")
    diff = rho_a.matrix - rho_b.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


# -- Hamiltonians ---------------------------------------------------------------


def _minimal_space(coupling: ModeCoupling, n_max: int = 1) -> FockSpace:
    return FockSpace(modes=((coupling.alpha, n_max),), detector_qubits=1)


def build_ndpa(coupling: ModeCoupling, space: FockSpace | None = None) -> np.ndarray:
    """Resonant-mode parametric-amplifier Hamiltonian (g_alpha/2)(ab + h.c.).

    <n+1, e| H |n, g> = (g_alpha/2) sqrt(n+1); Hermitian by construction.
    """
    if space is None:
        space = _minimal_space(coupling)
    if space.detector_qubits < 1:
        raise ValidationError("build_ndpa needs a detector qubit; "
                              "use build_two_mode_squeezer for bosonic pairs")
    a = space.annihilation(coupling.alpha)
    b = space.detector_lowering(0)
    ab = a @ b
    return 0.5 * coupling.g_alpha * (ab + ab.conj().T)


def build_two_mode_squeezer(g: float, space: FockSpace,
                            alpha_a: int, alpha_b: int) -> np.ndarray:
    """(g/2)(ab + a^dag b^dag) on two bosonic ladders (test-only detector
    variant exhibiting the sinh^2 pair spectrum)."""
    a = space.annihilation(alpha_a)
    b = space.annihilation(alpha_b)
    ab = a @ b
    return 0.5 * g * (ab + ab.conj().T)


def free_hamiltonian(space: FockSpace, mode_omegas: Sequence[float],
                     omega_d: float, hbar: float) -> np.ndarray:
    """H0 = sum_a hbar Omega_a n_a + hbar omega_d P_excited (per qubit)."""
    if len(mode_omegas) != len(space.modes):
        raise ValidationError("one frequency per mode factor required")
    h0 = np.zeros((space.dim, space.dim), dtype=complex)
    for (alpha, _), omega in zip(space.modes, mode_omegas):
        h0 += hbar * omega * space.number_operator(alpha)
    for q in range(space.detector_qubits):
        h0 += hbar * omega_d * space.detector_excited_projector(q)
    return h0


def _check_hermitian(h: np.ndarray):
    scale = max(float(np.max(np.abs(h))), 1e-300)
    if float(np.max(np.abs(h - h.conj().T))) > 1e-10 * scale:
        raise ValidationError("Hamiltonian is not Hermitian")


# -- evolutions ------------------------------------------------------------------


def evolve_exact(h: np.ndarray, psi0: QuantumState, t: float,
                 hbar: float = 1.0) -> QuantumState:
    """psi(t) = exp(-i H t / hbar) psi0 via dense eigendecomposition."""
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    _check_hermitian(h)
    evals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * t / hbar)
    amp = vecs @ (phases * (vecs.conj().T @ psi0.amplitudes))
    return QuantumState(psi0.space, amp)


def evolve_perturbative(coupling: ModeCoupling, t: float, hbar: float = 1.0,
                        space: FockSpace | None = None,
                        psi0: QuantumState | None = None,
                        guard: float = DEFAULT_PERTURBATIVE_GUARD) -> QuantumState:
    """First-order state (1 - i H t/hbar)|psi0>, normalized.

    From the vacuum this is |0,g> - i (g_alpha t / 2 hbar) |1,e> up to
    normalization.  Guarded to |g_alpha| t / hbar <= guard; beyond that the
    third-order error is no longer negligible and evolve_exact should be
    used instead.
    """
    gt = abs(coupling.g_alpha) * t / hbar
    if gt > guard:
        raise GuardError(
            f"|g_alpha| t / hbar = {gt:.3f} exceeds the perturbative guard "
            f"{guard}; use evolve_exact")
    if space is None:
        space = psi0.space if psi0 is not None else _minimal_space(coupling)
    if psi0 is None:
        psi0 = space.vacuum()
    h = build_ndpa(coupling, space)
    amp = psi0.amplitudes - 1j * (t / hbar) * (h @ psi0.amplitudes)
    return QuantumState(space, amp).normalized()


def interaction_hamiltonian_full(t: float, x_d: float,
                                 couplings: Sequence[ModeCoupling],
                                 space: FockSpace, params: SystemParams,
                                 omega_d: float | None = None) -> np.ndarray:
    """Pre-RWA interaction Hamiltonian at time t, detector at x_d:

        H(t) = sum_a g_a (a e^{-i Omega_a t} + h.c.)(b e^{-i omega_d t} + h.c.)
               * cos[Omega_a (x_d + L/2) / c_s]

    All retained modes enter; the co- and counter-rotating terms are kept so
    that stepping this operator validates the rotating-wave reduction.
    """
    if tuple(c.alpha for c in couplings) != space.mode_labels:
        raise ValidationError("couplings must match the Fock-space modes in order")
    if omega_d is None:
        omega_d = couplings[0].omega_d
    chain = params.chain
    b = space.detector_lowering(0)
    b_t = b * np.exp(-1j * omega_d * t)
    b_full = b_t + b_t.conj().T
    h = np.zeros((space.dim, space.dim), dtype=complex)
    for c in couplings:
        a = space.annihilation(c.alpha)
        a_t = a * np.exp(-1j * c.omega_alpha * t)
        geom = math.cos(c.omega_alpha * (x_d + chain.L / 2.0) / chain.c_s)
        h += c.g_alpha * geom * ((a_t + a_t.conj().T) @ b_full)
    return h


def evolve_full(psi0: QuantumState, t: float, traj, couplings: Sequence[ModeCoupling],
                space: FockSpace, params: SystemParams,
                omega_d: float | None = None, dt: float | None = None) -> QuantumState:
    """Midpoint-exponential (Magnus-2) stepping of the time-dependent
    Hamiltonian from 0 to t; second-order accurate and exactly unitary."""
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    if omega_d is None:
        omega_d = couplings[0].omega_d
    omega_fast = max(c.omega_alpha for c in couplings) + omega_d
    dt_max = 2.0 * math.pi / (FULL_STEPS_PER_CYCLE * omega_fast)
    if dt is None:
        dt = dt_max
    elif dt > dt_max * (1 + 1e-12) or dt <= 0:
        raise StabilityError(
            f"dt = {dt:.3e} outside (0, {dt_max:.3e}] "
            "(fastest phase needs >= 50 steps per cycle)")
    n_steps = max(1, int(math.ceil(t / dt)))
    dt = t / n_steps
    hbar = params.hbar
    amp = psi0.amplitudes.copy()
    for k in range(n_steps):
        t_mid = (k + 0.5) * dt
        h = interaction_hamiltonian_full(t_mid, float(traj.position(t_mid)),
                                         couplings, space, params, omega_d)
        evals, vecs = np.linalg.eigh(h)
        amp = vecs @ (np.exp(-1j * evals * dt / hbar) * (vecs.conj().T @ amp))
    return QuantumState(space, amp)
