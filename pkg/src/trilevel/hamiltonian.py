"""Hamiltonians for the two coupled-level layouts and their decoupling rotations.

Two layouts are supported.  "lambda" couples both lower levels (1, 2) to
the top level 3; "vee" couples the ground level 1 to both upper levels
(2, 3).  When the paired levels are degenerate, rotating the two collective
modes splits the interaction into one bright mode, coupled to the field
with the root-sum-square of the couplings, and one dark mode that the
interaction annihilates.  The rotation convention used throughout maps the
dark mode onto occupation slot 2, so "dark quanta" are counted by S22 in
the rotated frame.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import SpaceSpec, enumerate_atomic_basis, index_map
from .operators import (
    ATOMIC,
    PRODUCT,
    OperatorMatrix,
    atomic_operator,
    deformed_operator,
    field_operator,
    identity,
    lift,
)

LAMBDA = "lambda"
VEE = "vee"
SCHEMES = (LAMBDA, VEE)

TOL_HERMITIAN = 1e-12
TOL_DARK_BLOCK = 1e-10

FieldAmplitude = complex


@dataclass(frozen=True)
class HamiltonianSpec:
    """Level energies, field frequency, and couplings for one scheme.

    Couplings are real and symmetric in their indices (g_ij = g_ji); only
    the scheme-relevant ones are read.  Zero couplings are accepted (they
    give the free Hamiltonian); negative ones are rejected.
    """

    scheme: str
    energies: tuple[float, float, float]
    omega: float
    g31: float = 0.0
    g32: float = 0.0
    g21: float = 0.0

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        e1, e2, e3 = self.energies
        if not (e1 <= e2 <= e3):
            raise ValueError(
                f"energies must be ordered E1 <= E2 <= E3, got {self.energies}"
            )
        for (i, j) in self.coupled_pairs():
            if self.coupling(i, j) < 0:
                raise ValueError(f"coupling g{i}{j} must be >= 0")

    def coupled_pairs(self) -> tuple[tuple[int, int], ...]:
        return ((3, 1), (3, 2)) if self.scheme == LAMBDA else ((3, 1), (2, 1))

    def coupling(self, i: int, j: int) -> float:
        table = {(3, 1): self.g31, (3, 2): self.g32, (2, 1): self.g21}
        if (i, j) not in table:
            raise ValueError(f"no coupling constant for level pair ({i}, {j})")
        return table[(i, j)]

    @property
    def degenerate_pair(self) -> tuple[int, int]:
        """The level pair that must be degenerate for exact dark-state decoupling."""
        return (1, 2) if self.scheme == LAMBDA else (2, 3)

    @property
    def degenerate(self) -> bool:
        a, b = self.degenerate_pair
        ea, eb = self.energies[a - 1], self.energies[b - 1]
        return abs(ea - eb) <= 1e-12 * max(1.0, abs(ea), abs(eb))


@dataclass(frozen=True)
class RotationResult:
    """Mode-rotation angle, bright coupling, and dark-mode composition.

    dark_composition holds the amplitudes of the dark single-atom state on
    dark_levels, unit norm and orthogonal to the bright combination.
    """

    angle: float
    effective_coupling: float
    dark_levels: tuple[int, int]
    dark_composition: tuple[float, float]
    degenerate: bool


def free_hamiltonian(spec: SpaceSpec, h: HamiltonianSpec) -> OperatorMatrix:
    """Sum of level energies times populations plus omega times photon number."""
    out = h.omega * lift(spec, field_operator(spec, "number"))
    for i, e in enumerate(h.energies, start=1):
        out = out + e * lift(spec, atomic_operator(spec, i, i))
    return out


def interaction_hamiltonian(spec: SpaceSpec, h: HamiltonianSpec) -> OperatorMatrix:
    """Sum over coupled pairs of g_ij (X_ij + X_ij^dag)."""
    from .operators import deformed_operator

    out = OperatorMatrix(PRODUCT, spec, np.zeros((spec.product_dim,) * 2))
    for (i, j) in h.coupled_pairs():
        x = deformed_operator(spec, i, j)
        out = out + h.coupling(i, j) * (x + x.dag())
    return out


def build_hamiltonian(spec: SpaceSpec, h: HamiltonianSpec) -> OperatorMatrix:
    out = free_hamiltonian(spec, h) + interaction_hamiltonian(spec, h)
    if not out.is_hermitian(TOL_HERMITIAN):
        raise RuntimeError("constructed Hamiltonian is not Hermitian")
    return out


def rotation_parameters(h: HamiltonianSpec) -> RotationResult:
    """Angle and bright/dark split of the degenerate-pair mode rotation.

    lambda: angle = atan(g32 / g31); the dark state is
    -sin(angle) |1> + cos(angle) |2>.
    vee: angle = atan(g21 / g31); the dark state is
    cos(angle) |2> - sin(angle) |3>.  (The coupling to level 2 plays the
    role of the "second" coupling in both cases; g32 never enters the vee
    interaction.)

    The bright coupling equals sqrt of the sum of squared couplings.
    """
    if h.scheme == LAMBDA:
        ga, gb = h.g31, h.g32
        dark_levels = (1, 2)
    else:
        ga, gb = h.g31, h.g21
        dark_levels = (2, 3)
    if ga == 0.0 and gb == 0.0:
        raise ValueError("rotation undefined with both couplings zero")
    angle = math.atan2(gb, ga)
    effective = math.hypot(ga, gb)
    if h.scheme == LAMBDA:
        composition = (-math.sin(angle), math.cos(angle))
    else:
        composition = (math.cos(angle), -math.sin(angle))
    return RotationResult(angle, effective, dark_levels, composition, h.degenerate)


def _mode_pair_vector(atoms: int, levels: tuple[int, int],
                      amplitudes: tuple[float, float]) -> np.ndarray:
    """All atoms in one superposition mode of two levels (binomial state)."""
    la, lb = levels
    ca, cb = amplitudes
    states = enumerate_atomic_basis(atoms)
    idx = {occ: k for k, occ in enumerate(states)}
    vec = np.zeros(len(states), dtype=np.complex128)
    for k in range(atoms + 1):
        occ = [0, 0, 0]
        occ[la - 1] = k
        occ[lb - 1] = atoms - k
        vec[idx[tuple(occ)]] = math.sqrt(math.comb(atoms, k)) * ca**k * cb**(atoms - k)
    return vec


def dark_atomic_vector(h: HamiltonianSpec, atoms: int) -> np.ndarray:
    """Atomic-space vector with every atom in the dark mode."""
    r = rotation_parameters(h)
    return _mode_pair_vector(atoms, r.dark_levels, r.dark_composition)


def bright_atomic_vector(h: HamiltonianSpec, atoms: int) -> np.ndarray:
    """Atomic-space vector with every atom in the bright (coupled) mode."""
    r = rotation_parameters(h)
    if h.scheme == LAMBDA:
        amplitudes = (math.cos(r.angle), math.sin(r.angle))
    else:
        amplitudes = (math.sin(r.angle), math.cos(r.angle))
    return _mode_pair_vector(atoms, r.dark_levels, amplitudes)


def dark_state(spec: SpaceSpec, h: HamiltonianSpec, fock_n: int) -> np.ndarray:
    """Unit product-space vector annihilated by the interaction Hamiltonian."""
    if not 0 <= fock_n <= spec.n_max:
        raise ValueError(f"photon number {fock_n} outside [0, {spec.n_max}]")
    field = np.zeros(spec.field_dim, dtype=np.complex128)
    field[fock_n] = 1.0
    return np.kron(dark_atomic_vector(h, spec.atoms), field)


def _exp_antihermitian(g: OperatorMatrix, theta: float) -> OperatorMatrix:
    """exp(theta G) for anti-Hermitian G via eigendecomposition of i G."""
    w, v = np.linalg.eigh(1j * g.mat)
    u = (v * np.exp(-1j * theta * w)) @ v.conj().T
    return OperatorMatrix(g.space, g.spec, u)


def _rotation_generator(spec: SpaceSpec, h: HamiltonianSpec) -> OperatorMatrix:
    la, lb = h.degenerate_pair
    return lift(spec, atomic_operator(spec, la, lb)) - lift(
        spec, atomic_operator(spec, lb, la)
    )


def dark_block_residual(spec: SpaceSpec, transformed: OperatorMatrix) -> float:
    """Largest matrix element of a rotated Hamiltonian that changes the
    dark-mode occupation (slot 2 of the occupation triple)."""
    imap = index_map(spec)
    n2 = np.array([imap.split(k)[0][1] for k in range(spec.product_dim)])
    mask = n2[:, None] != n2[None, :]
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(transformed.mat[mask])))


def mode_rotation_unitary(spec: SpaceSpec, h: HamiltonianSpec,
                          r: RotationResult) -> OperatorMatrix:
    """Second-quantized rotation of the degenerate mode pair.

    Built as exp(theta (S_ab - S_ba)) on the pair; the convention tries
    theta = +angle first and falls back to -angle, keeping whichever sign
    makes the conjugated Hamiltonian drop all couplings out of the dark
    mode (only checkable when the paired energies are degenerate).
    """
    gen = _rotation_generator(spec, h)
    ham = build_hamiltonian(spec, h)
    candidates = []
    for theta in (r.angle, -r.angle):
        u = _exp_antihermitian(gen, theta)
        unitary_defect = (u @ u.dag() - identity(spec, PRODUCT)).max_abs()
        if unitary_defect > 1e-12:
            raise RuntimeError(f"mode rotation is not unitary (defect {unitary_defect:.2e})")
        candidates.append(u)
    if not r.degenerate:
        warnings.warn(
            "rotated pair is not degenerate; dark-mode decoupling is not "
            "guaranteed and was not checked",
            stacklevel=2,
        )
        return candidates[0]
    for u in candidates:
        if dark_block_residual(spec, u @ ham @ u.dag()) <= TOL_DARK_BLOCK:
            return u
    raise RuntimeError("mode rotation failed to decouple the dark mode at either sign")


def extracted_coupling(spec: SpaceSpec, h: HamiltonianSpec,
                       u: OperatorMatrix) -> float:
    """Bright-transition coupling read off one rotated matrix element.

    Uses <(A-1, 0, 1); 0| U H U^dag |(A, 0, 0); 1> = g_eff sqrt(A); slot 2
    is the dark mode after rotation, so this element isolates the bright
    1 <-> 3 transition.
    """
    imap = index_map(spec)
    a = spec.atoms
    transformed = u @ build_hamiltonian(spec, h) @ u.dag()
    row = imap.flat((a - 1, 0, 1), 0)
    col = imap.flat((a, 0, 0), 1)
    return float(abs(transformed.mat[row, col]) / math.sqrt(a))


@dataclass(frozen=True)
class RotationReport:
    """Numeric summary of the mode rotation for one Hamiltonian spec."""

    unitary: OperatorMatrix
    dark_coupling_residual: float
    extracted_coupling: float
    expected_coupling: float
    degenerate: bool


def rotation_report(spec: SpaceSpec, h: HamiltonianSpec) -> RotationReport:
    r = rotation_parameters(h)
    u = mode_rotation_unitary(spec, h, r)
    ham = build_hamiltonian(spec, h)
    resid = dark_block_residual(spec, u @ ham @ u.dag()) if r.degenerate else float("nan")
    return RotationReport(
        unitary=u,
        dark_coupling_residual=resid,
        extracted_coupling=extracted_coupling(spec, h, u),
        expected_coupling=r.effective_coupling,
        degenerate=r.degenerate,
    )


def classical_hamiltonian(h: HamiltonianSpec, alpha: FieldAmplitude,
                          atoms: int) -> OperatorMatrix:
    """Atomic-space Hamiltonian with the field replaced by the amplitude alpha.

    H = sum_i E_i S_ii + sum_pairs g_ij (alpha S_ij + conj(alpha) S_ji).
    """
    spec = SpaceSpec(atoms, 1)  # field cutoff is irrelevant on the atomic space
    out = OperatorMatrix(ATOMIC, spec, np.zeros((spec.atomic_dim,) * 2))
    for i, e in enumerate(h.energies, start=1):
        out = out + e * atomic_operator(spec, i, i)
    alpha = complex(alpha)
    for (i, j) in h.coupled_pairs():
        term = (alpha * h.coupling(i, j)) * atomic_operator(spec, i, j)
        out = out + term + term.dag()
    return out


def excitation_operator(spec: SpaceSpec, scheme: str) -> OperatorMatrix:
    """Conserved excitation count fixed by the interaction structure.

    lambda: photon number + S33 (each absorption promotes one atom to 3).
    vee: photon number + S22 + S33 (either upper level holds the quantum).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    out = lift(spec, field_operator(spec, "number")) + lift(
        spec, atomic_operator(spec, 3, 3)
    )
    if scheme == VEE:
        out = out + lift(spec, atomic_operator(spec, 2, 2))
    return out
