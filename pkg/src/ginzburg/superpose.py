"""Detector moving in a superposition of two trajectories.

The two trajectories are treated as perfectly distinguishable (an explicit
orthogonal two-state branch label), with weights cos(theta) and
e^{i phi} sin(theta).  Each branch resonantly excites its own chain mode:
with a single internal frequency both branches share the detector's excited
level; with two internal levels branch 1 excites the first level together
with mode alpha_1 and branch 2 the second level with mode alpha_2.

First-order branch states are kept unnormalized and the global state is
normalized once when the density matrix is formed; the exact method evolves
each branch's 2x2 resonant block unitarily instead and serves as the oracle
for the first-order results.

Tracing out the branch label kills every cross-branch term, which is why
the reduced chain and detector states cannot tell a coherent trajectory
superposition from the matching classical mixture; discriminate() reports
exactly that comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GuardError, ValidationError
from .modes import (DEFAULT_Y_MAX, ModeCoupling, mode_coupling, resonance_mode,
                    resonance_pair)
from .params import SystemParams
from .quantum import (DEFAULT_PERTURBATIVE_GUARD, DensityMatrix, FockSpace,
                      QuantumState, evolve_exact, trace_distance)

_DETECTOR_MODELS = ("single", "two-level")
_METHODS = ("perturbative", "exact")


@dataclass(frozen=True)
class Branch:
    """One trajectory plus the chain mode it resonantly excites."""

    x0: float
    v: float
    alpha: int
    coupling: ModeCoupling


@dataclass(frozen=True)
class BranchSpec:
    """Two branches with superposition weights cos(theta), e^{i phi} sin(theta)."""

    branches: tuple[Branch, Branch]
    theta: float
    phi: float
    hbar: float = 1.0
    selectivity_violated: bool = False

    def __post_init__(self):
        if len(self.branches) != 2:
            raise ValidationError("exactly two branches required")
        if not 0.0 <= self.theta < math.pi / 2.0:
            raise ValidationError(f"theta must be in [0, pi/2), got {self.theta}")
        if not 0.0 <= self.phi < math.pi:
            raise ValidationError(f"phi must be in [0, pi), got {self.phi}")
        a1, a2 = (b.alpha for b in self.branches)
        if a1 == a2:
            raise ValidationError(
                f"branches must excite distinct modes, both resonate with {a1}")
        if self.hbar <= 0:
            raise ValidationError("hbar must be positive")

    @property
    def weights(self) -> tuple[complex, complex]:
        return (complex(math.cos(self.theta)),
                np.exp(1j * self.phi) * math.sin(self.theta))


def branch_spec_from_resonance(params: SystemParams, v1: float, v2: float,
                               theta: float, phi: float,
                               omega_d: float | None = None,
                               omega_d2: float | None = None,
                               x0_1: float = 0.0, x0_2: float = 0.0,
                               y_max: float = DEFAULT_Y_MAX) -> BranchSpec:
    """Resolve resonant modes/couplings for two trajectories.

    omega_d2 given selects the two-internal-level detector: branch i couples
    through its own frequency omega_d_i (resonance_pair supplies the
    selectivity diagnosis).  Otherwise both branches share omega_d.
    """
    if omega_d is None:
        omega_d = params.detector.omega_d1
    selectivity = False
    if omega_d2 is not None:
        pair = resonance_pair(v1, v2, omega_d, omega_d2, params, y_max=y_max)
        a1, a2 = pair.alpha1, pair.alpha2
        c1 = mode_coupling(a1, params, omega_d, y_max=y_max)
        c2 = mode_coupling(a2, params, omega_d2, y_max=y_max)
        selectivity = pair.selectivity_violated
    else:
        a1 = resonance_mode(v1, omega_d, params, y_max=y_max).alpha0
        a2 = resonance_mode(v2, omega_d, params, y_max=y_max).alpha0
        if a1 == a2:
            raise ValidationError(
                f"v1 and v2 resonate with the same mode alpha = {a1}; "
                "the branches would be indistinguishable in the chain")
        c1 = mode_coupling(a1, params, omega_d, y_max=y_max)
        c2 = mode_coupling(a2, params, omega_d, y_max=y_max)
    return BranchSpec(branches=(Branch(x0_1, v1, a1, c1), Branch(x0_2, v2, a2, c2)),
                      theta=theta, phi=phi, hbar=params.hbar,
                      selectivity_violated=selectivity)


@dataclass
class BranchedState:
    """Weights plus per-branch states over the shared factor space.

    branch_states may be unnormalized (first-order convention); the density
    matrix normalizes the global vector once.
    """

    spec: BranchSpec
    t: float
    detector_model: str
    method: str
    space: FockSpace
    branch_states: tuple[QuantumState, QuantumState]

    @property
    def weights(self) -> tuple[complex, complex]:
        return self.spec.weights

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) + self.space.dims

    @property
    def names(self) -> tuple[str, ...]:
        a1, a2 = (b.alpha for b in self.spec.branches)
        return ("branch", "detector", f"mode_{a1}", f"mode_{a2}")

    def global_vector(self) -> np.ndarray:
        dim = self.space.dim
        vec = np.zeros(2 * dim, dtype=complex)
        for i, (w, psi) in enumerate(zip(self.weights, self.branch_states)):
            vec[i * dim:(i + 1) * dim] = w * psi.amplitudes
        return vec

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.global_vector()))


def _branch_space(spec: BranchSpec, detector_model: str) -> FockSpace:
    a1, a2 = (b.alpha for b in spec.branches)
    qubits = 1 if detector_model == "single" else 2
    return FockSpace(modes=((a1, 1), (a2, 1)), detector_qubits=qubits)


def _excited_detector_index(detector_model: str, branch: int, qubits: int) -> int:
    if detector_model == "single":
        return 1
    # qubit `branch` excited, the other ground; qubit 0 is the slow index
    return 1 << (qubits - 1 - branch)


def evolve_superposed(spec: BranchSpec, t: float, detector: str = "single",
                      method: str = "perturbative",
                      guard: float = DEFAULT_PERTURBATIVE_GUARD) -> BranchedState:
    """Evolve both branches from the joint vacuum for time t.

    perturbative: branch i carries |vac, ground> - i (g_i t / 2 hbar) |1_i, e_i>
    (unnormalized).  exact: unitary evolution of each branch's resonant
    2x2 block, bypassing the weak-coupling guard.
    """
    if detector not in _DETECTOR_MODELS:
        raise ValidationError(f"detector must be one of {_DETECTOR_MODELS}")
    if method not in _METHODS:
        raise ValidationError(f"method must be one of {_METHODS}")
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    if detector == "two-level" and spec.selectivity_violated:
        raise GuardError(
            "resonance selectivity violated: a cross detuning sits inside the "
            "guard band, so branch/mode pairing is not clean")
    space = _branch_space(spec, detector)
    qubits = space.detector_qubits
    hbar = spec.hbar

    states = []
    for i, branch in enumerate(spec.branches):
        g = branch.coupling.g_alpha
        if method == "perturbative":
            gt = abs(g) * t / hbar
            if gt > guard:
                raise GuardError(
                    f"branch {i + 1}: |g| t / hbar = {gt:.3f} exceeds the "
                    f"perturbative guard {guard}; use method='exact'")
            amp = np.zeros(space.dim, dtype=complex)
            amp[0] = 1.0
            det_idx = _excited_detector_index(detector, i, qubits)
            occ = (1, 0) if i == 0 else (0, 1)
            amp[space.basis_index(det_idx, occ)] = -1j * g * t / (2.0 * hbar)
            states.append(QuantumState(space, amp))
        else:
            a = space.annihilation(branch.alpha)
            b = space.detector_lowering(0 if detector == "single" else i)
            ab = a @ b
            h = 0.5 * g * (ab + ab.conj().T)
            states.append(evolve_exact(h, space.vacuum(), t, hbar))
    return BranchedState(spec=spec, t=t, detector_model=detector, method=method,
                         space=space, branch_states=(states[0], states[1]))


def density_matrix(state: BranchedState) -> DensityMatrix:
    """|psi><psi| over branch x detector x mode_a1 x mode_a2, normalized once."""
    vec = state.global_vector()
    nsq = float(np.vdot(vec, vec).real)
    if nsq <= 0.0:
        raise ValidationError("branched state has zero norm")
    rho = DensityMatrix(np.outer(vec, vec.conj()) / nsq, state.dims, state.names)
    rho.validate()
    return rho


def mixed_density_matrix(spec: BranchSpec, t: float, detector: str = "single",
                         method: str = "perturbative",
                         guard: float = DEFAULT_PERTURBATIVE_GUARD) -> DensityMatrix:
    """Classical cos^2/sin^2 mixture of the two localized evolutions.

    Each branch evolves alone and is normalized as its own run, then the
    runs are mixed with the squared superposition weights on the same global
    factorization (branch label diagonal).
    """
    state = evolve_superposed(spec, t, detector, method, guard)
    dim = state.space.dim
    rho = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for i, (w, psi) in enumerate(zip(state.weights, state.branch_states)):
        amp = psi.normalized().amplitudes
        block = np.outer(amp, amp.conj()) * (abs(w) ** 2)
        rho[i * dim:(i + 1) * dim, i * dim:(i + 1) * dim] = block
    out = DensityMatrix(rho, state.dims, state.names)
    out.validate()
    return out


def _mode_factor_names(rho: DensityMatrix) -> list[str]:
    return [n for n in rho.names if n.startswith("mode_")]


def reduce_chain(rho: DensityMatrix, keep: Iterable[int] | None = None) -> DensityMatrix:
    """Trace out branch label and detector, keeping the phonon factors."""
    if keep is None:
        names = _mode_factor_names(rho)
    else:
        names = [f"mode_{a}" for a in keep]
        missing = [n for n in names if n not in rho.names]
        if missing:
            raise ValidationError(
                f"modes {missing} not in factorization {rho.names}")
    if not names:
        raise ValidationError("no phonon factors to keep")
    return rho.partial_trace(names)


def reduce_detector(rho: DensityMatrix) -> DensityMatrix:
    """Trace out branch label and phonon modes, keeping the detector levels."""
    if "detector" not in rho.names:
        raise ValidationError(f"no detector factor in {rho.names}")
    return rho.partial_trace(["detector"])


@dataclass(frozen=True)
class PairDistance:
    label_a: str
    label_b: str
    trace_distance: float
    verdict: str


@dataclass(frozen=True)
class DiscriminationReport:
    labels: tuple[str, ...]
    pairs: tuple[PairDistance, ...]
    threshold: float
    populations: dict

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "labels": list(self.labels),
            "pairs": [{"a": p.label_a, "b": p.label_b,
                       "trace_distance": p.trace_distance, "verdict": p.verdict}
                      for p in self.pairs],
            "populations": self.populations,
        }


def discriminate(rhos: Sequence[DensityMatrix], labels: Sequence[str] | None = None,
                 threshold: float = 1e-10) -> DiscriminationReport:
    """Pairwise trace distances between reduced states on a common
    factorization, with a distinguishable/indistinguishable verdict per pair."""
    if len(rhos) < 2:
        raise ValidationError("need at least two density matrices to compare")
    if labels is None:
        labels = tuple(f"state_{i}" for i in range(len(rhos)))
    labels = tuple(labels)
    if len(labels) != len(rhos):
        raise ValidationError("one label per density matrix required")
    base = rhos[0]
    for r in rhos[1:]:
        if r.dims != base.dims or r.names != base.names:
            raise ValidationError(
                f"factorization mismatch: {r.names}{r.dims} vs {base.names}{base.dims}")
    pairs = []
    for i in range(len(rhos)):
        for j in range(i + 1, len(rhos)):
            td = trace_distance(rhos[i], rhos[j])
            verdict = "distinguishable" if td > threshold else "indistinguishable"
            pairs.append(PairDistance(labels[i], labels[j], td, verdict))
    populations = {
        label: {str(tuple(int(v) for v in np.unravel_index(k, r.dims))):
                float(np.real(r.matrix[k, k]))
                for k in range(r.matrix.shape[0])
                if abs(r.matrix[k, k]) > 1e-300}
        for label, r in zip(labels, rhos)
    }
    return DiscriminationReport(labels=labels, pairs=tuple(pairs),
                                threshold=threshold, populations=populations)
