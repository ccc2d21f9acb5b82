"""Index bookkeeping for the symmetric atomic space and the photon mode.

Permutation-symmetric states of A identical three-level atoms are labelled
by occupation triples (n1, n2, n3) with n1 + n2 + n3 = A, exactly like
three bosonic modes carrying a fixed total number.  The field is a single
mode with a hard photon cutoff n_max.  Every matrix in this package is
built on the canonical orderings fixed here:

* atomic triples are listed in descending lexicographic order, so basis
  index 0 has all atoms in level 1 and, for a single atom, bare level i
  sits at atomic index i - 1;
* the photon index varies fastest in the product space,
  flat = atomic_index * (n_max + 1) + n.
"""

from __future__ import annotations

from dataclasses import dataclass

Occupation = tuple[int, int, int]


@dataclass(frozen=True)
class SpaceSpec:
    """Atom count and photon cutoff defining the truncated model space."""

    atoms: int
    n_max: int

    def __post_init__(self) -> None:
        if self.atoms < 1:
            raise ValueError(f"atoms must be >= 1, got {self.atoms}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def atomic_dim(self) -> int:
        return (self.atoms + 1) * (self.atoms + 2) // 2

    @property
    def field_dim(self) -> int:
        return self.n_max + 1

    @property
    def product_dim(self) -> int:
        return self.atomic_dim * self.field_dim


def enumerate_atomic_basis(atoms: int) -> list[Occupation]:
    """All occupation triples summing to ``atoms``, descending lexicographic.

    The ordering is part of the package contract: index 0 is (atoms, 0, 0)
    and the last index is (0, 0, atoms).
    """
    if atoms < 1:
        raise ValueError(f"atoms must be >= 1, got {atoms}")
    return [
        (n1, n2, atoms - n1 - n2)
        for n1 in range(atoms, -1, -1)
        for n2 in range(atoms - n1, -1, -1)
    ]


class IndexMap:
    """Bijection between (occupation, photon number) pairs and flat indices."""

    def __init__(self, spec: SpaceSpec):
        self.spec = spec
        self.states: tuple[Occupation, ...] = tuple(enumerate_atomic_basis(spec.atoms))
        self._atomic_index = {occ: k for k, occ in enumerate(self.states)}

    def atomic_index(self, occupation: Occupation) -> int:
        occ = tuple(occupation)
        try:
            return self._atomic_index[occ]
        except KeyError:
            raise ValueError(
                f"{occ} is not an occupation triple summing to {self.spec.atoms}"
            ) from None

    def flat(self, occupation: Occupation, fock_n: int) -> int:
        if not 0 <= fock_n <= self.spec.n_max:
            raise ValueError(f"photon number {fock_n} outside [0, {self.spec.n_max}]")
        return self.atomic_index(occupation) * self.spec.field_dim + fock_n

    def split(self, flat: int) -> tuple[Occupation, int]:
        if not 0 <= flat < self.spec.product_dim:
            raise ValueError(
                f"flat index {flat} outside [0, {self.spec.product_dim})"
            )
        k, n = divmod(flat, self.spec.field_dim)
        return self.states[k], n


def index_map(spec: SpaceSpec) -> IndexMap:
    return IndexMap(spec)
