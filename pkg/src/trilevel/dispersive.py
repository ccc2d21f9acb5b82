"""Dispersive-regime machinery: small rotations and effective Hamiltonians.

When every coupled transition is far detuned, conjugating the Hamiltonian
by the small unitaries exp[eps_ij (X_ij - X_ij^dag)], eps_ij = g_ij /
Delta_ij, removes the first-order atom-field exchange and leaves an
effective transfer between the degenerate levels.  The closed-form
leading-order transfer operators are

  lambda: eps31 g32 (S12 + S21)(S33 - n)      -- vanishes whenever the
          level-3 population equals the photon number;
  vee:    eps21 g31 (S32 + S23)(S11 + n + 1)  -- never vanishes on states
          with population in the (2, 3) pair.

Diagonal (Stark-shift) terms of the same order are never reconstructed
here; comparisons against the numeric conjugation are restricted to the
degenerate-transfer block, where the closed forms are complete at first
order in eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .hilbert import SpaceSpec, index_map
from .operators import (
    OperatorMatrix,
    PRODUCT,
    atomic_operator,
    deformed_operator,
    field_operator,
    identity,
    lift,
)
from .hamiltonian import LAMBDA, HamiltonianSpec, build_hamiltonian

TOL_UNITARY = 1e-12
DEFAULT_GUARD = 3


class ZeroDetuningError(ValueError):
    """A coupled pair sits exactly on resonance; no dispersive expansion."""


@dataclass(frozen=True)
class DispersiveParams:
    """Detunings, small parameters, and the regime-validity margin."""

    scheme: str
    n_bar: float
    detunings: dict[tuple[int, int], float]
    small_params: dict[tuple[int, int], float]
    validity_margin: float


def dispersive_params(h: HamiltonianSpec, n_bar: float, atoms: int) -> DispersiveParams:
    """Compute Delta_ij = E_i - E_j - omega and eps_ij = g_ij / Delta_ij.

    The validity margin is min over coupled pairs of
    |Delta_ij| / (A g_ij sqrt(n_bar + 1)); values well above 1 mark the
    dispersive regime.  Raises on a resonant pair or on |eps| >= 1.
    """
    if n_bar < 0:
        raise ValueError(f"mean photon number must be >= 0, got {n_bar}")
    detunings: dict[tuple[int, int], float] = {}
    small: dict[tuple[int, int], float] = {}
    margin = math.inf
    for (i, j) in h.coupled_pairs():
        delta = h.energies[i - 1] - h.energies[j - 1] - h.omega
        if delta == 0.0:
            raise ZeroDetuningError(f"pair ({i}, {j}) is resonant (zero detuning)")
        g = h.coupling(i, j)
        eps = g / delta
        if not abs(eps) < 1.0:
            raise ValueError(f"eps{i}{j} = {eps:.3g} is not a small parameter")
        detunings[(i, j)] = delta
        small[(i, j)] = eps
        if g > 0:
            margin = min(margin, abs(delta) / (atoms * g * math.sqrt(n_bar + 1.0)))
    return DispersiveParams(h.scheme, n_bar, detunings, small, margin)


def small_rotation(spec: SpaceSpec, i: int, j: int, eps: float) -> OperatorMatrix:
    """exp[eps (X_ij - X_ij^dag)], computed by Hermitian eigendecomposition."""
    x = deformed_operator(spec, i, j)
    gen = x - x.dag()
    w, v = np.linalg.eigh(1j * gen.mat)
    u = (v * np.exp(-1j * eps * w)) @ v.conj().T
    out = OperatorMatrix(PRODUCT, spec, u)
    defect = (out @ out.dag() - identity(spec, PRODUCT)).max_abs()
    if defect > TOL_UNITARY:
        raise RuntimeError(f"small rotation is not unitary (defect {defect:.2e})")
    return out


def _ordered_rotations(spec: SpaceSpec, p: DispersiveParams) -> tuple[OperatorMatrix, OperatorMatrix]:
    """(outer, inner) unitaries of the conjugation, in application order."""
    if p.scheme == LAMBDA:
        inner = small_rotation(spec, 3, 1, p.small_params[(3, 1)])
        outer = small_rotation(spec, 3, 2, p.small_params[(3, 2)])
    else:
        inner = small_rotation(spec, 2, 1, p.small_params[(2, 1)])
        outer = small_rotation(spec, 3, 1, p.small_params[(3, 1)])
    return outer, inner


def effective_transform(spec: SpaceSpec, h: HamiltonianSpec,
                        p: DispersiveParams) -> OperatorMatrix:
    """Numerically conjugated Hamiltonian U_outer U_inner H U_inner^dag U_outer^dag.

    The operator order is normative for reproducibility: the (3,1) rotation
    is innermost for lambda, the (2,1) rotation is innermost for vee.
    """
    if p.scheme != h.scheme:
        raise ValueError(f"params are for scheme {p.scheme!r}, Hamiltonian is {h.scheme!r}")
    outer, inner = _ordered_rotations(spec, p)
    ham = build_hamiltonian(spec, h)
    return outer @ inner @ ham @ inner.dag() @ outer.dag()


@dataclass(frozen=True)
class EffectiveModel:
    """Closed-form leading-order transfer term, prefactor kept separate."""

    scheme: str
    transfer_operator: OperatorMatrix
    prefactor: float

    def matrix(self) -> OperatorMatrix:
        return self.prefactor * self.transfer_operator


def analytic_effective(spec: SpaceSpec, h: HamiltonianSpec,
                       p: DispersiveParams) -> EffectiveModel:
    """Closed-form transfer operator on the product space.

    The two factors commute, so their order is immaterial; the result is
    Hermitian by construction.
    """
    if p.scheme != h.scheme:
        raise ValueError(f"params are for scheme {p.scheme!r}, Hamiltonian is {h.scheme!r}")
    num = lift(spec, field_operator(spec, "number"))
    one = identity(spec, PRODUCT)

    def s(i, j):
        return lift(spec, atomic_operator(spec, i, j))

    if h.scheme == LAMBDA:
        op = (s(1, 2) + s(2, 1)) @ (s(3, 3) - num)
        prefactor = p.small_params[(3, 1)] * h.g32
    else:
        op = (s(3, 2) + s(2, 3)) @ (s(1, 1) + num + one)
        prefactor = p.small_params[(2, 1)] * h.g31
    if not op.is_hermitian(1e-12):
        raise RuntimeError("analytic transfer operator is not Hermitian")
    return EffectiveModel(h.scheme, op, prefactor)


def transfer_block_mask(spec: SpaceSpec, scheme: str, guard: int) -> np.ndarray:
    """Boolean mask of matrix elements moving one excitation within the
    degenerate pair at equal photon number, inside the guarded subspace."""
    imap = index_map(spec)
    pair_slot = 0 if scheme == LAMBDA else 1  # occupation slot of the pair's first level
    dim = spec.product_dim
    occ = [imap.split(k) for k in range(dim)]
    mask = np.zeros((dim, dim), dtype=bool)
    limit = spec.n_max - guard
    for r in range(dim):
        (occ_r, n_r) = occ[r]
        if n_r > limit:
            continue
        for c in range(dim):
            (occ_c, n_c) = occ[c]
            if n_c != n_r or n_c > limit:
                continue
            if scheme == LAMBDA:
                same_spectator = occ_r[2] == occ_c[2]
                moved = abs(occ_r[0] - occ_c[0]) == 1
            else:
                same_spectator = occ_r[0] == occ_c[0]
                moved = abs(occ_r[1] - occ_c[1]) == 1
            mask[r, c] = same_spectator and moved
    return mask


def block_residual(spec: SpaceSpec, h: HamiltonianSpec, p: DispersiveParams,
                   guard: int) -> float:
    """Max difference between the numeric conjugation and the closed form,
    restricted to the guarded degenerate-transfer block."""
    mask = transfer_block_mask(spec, h.scheme, guard)
    diff = effective_transform(spec, h, p) - analytic_effective(spec, h, p).matrix()
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(diff.mat[mask])))


def _doubled_detuning_spec(h: HamiltonianSpec, p: DispersiveParams) -> HamiltonianSpec:
    """Same couplings, both detunings doubled via a field-frequency shift.

    Requires the scheme's two detunings to be equal (true whenever the
    degenerate-pair energies coincide); shifting omega by -Delta then
    exactly halves every eps at fixed g.
    """
    deltas = list(p.detunings.values())
    if abs(deltas[0] - deltas[1]) > 1e-9 * max(1.0, abs(deltas[0])):
        raise ValueError(
            "order probe requires equal detunings on the two coupled pairs; "
            f"got {deltas[0]:.6g} and {deltas[1]:.6g}"
        )
    return replace(h, omega=h.omega - deltas[0])


def residual_and_order(spec: SpaceSpec, h: HamiltonianSpec, p: DispersiveParams,
                       guard: int = DEFAULT_GUARD) -> tuple[float, float]:
    """Transfer-block residual plus its convergence order under eps -> eps/2.

    The closed form is the first-order off-diagonal term, so the residual
    should shrink at least quadratically: the returned order is
    log2(residual(eps) / residual(eps/2)), ideally about 2.
    """
    if guard < 2:
        raise ValueError(f"guard must be >= 2 for dispersive comparisons, got {guard}")
    if any(abs(e) > 0.1 for e in p.small_params.values()):
        raise ValueError("order probe expects |eps| <= 0.1")
    r1 = block_residual(spec, h, p, guard)
    h_half = _doubled_detuning_spec(h, p)
    p_half = dispersive_params(h_half, p.n_bar, spec.atoms)
    r2 = block_residual(spec, h_half, p_half, guard)
    if r1 < 1e-14 or r2 < 1e-14:
        return r1, math.inf
    return r1, math.log2(r1 / r2)
