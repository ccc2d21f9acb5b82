"""Weight components of transition operators and the root-like diagram.

Each scheme fixes a commuting pair of population inversions (h1, h2); an
operator M is a weight vector when [h_k, M] = kappa_k M, and the pair
(kappa1, kappa2) is drawn in a planar basis whose two directions are
angled at 120 degrees.  First-order (photon-dressed or classical)
transitions appear as thick solid vectors, the second-order commutator
operators as dashed ones.  Commutation maps to vector addition on the
diagram, and replacing the field by a classical amplitude collapses the
two schemes onto weight sets related by a single reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from io import StringIO
import csv

import numpy as np

from .hilbert import SpaceSpec
from .operators import (
    ATOMIC,
    PRODUCT,
    OperatorMatrix,
    atomic_operator,
    commutator,
    deformed_operator,
    lift,
)
from .hamiltonian import LAMBDA, VEE, SCHEMES

TOL_WEIGHT = 1e-10

# planar basis: 120 degrees apart, unit length
BASIS_E1 = (1.0, 0.0)
BASIS_E2 = (math.cos(2.0 * math.pi / 3.0), math.sin(2.0 * math.pi / 3.0))

FIRST = "first"
SECOND = "second"

DEFAULT_STYLES = {
    FIRST: {"stroke_width": 2.0, "dash": None},
    SECOND: {"stroke_width": 1.5, "dash": "6,4"},
}


class NotAWeightVectorError(ValueError):
    """The commutator with a Cartan element is not proportional to the operator."""


@dataclass(frozen=True)
class CartanChoice:
    """Commuting inversion pair defining the weight components for a scheme."""

    scheme: str
    h1: OperatorMatrix
    h2: OperatorMatrix


def cartan_choice(scheme: str, spec: SpaceSpec, space: str = ATOMIC) -> CartanChoice:
    """Inversions (S11 - S22, S22 - S33) for lambda and their negatives for vee,
    optionally lifted to the product space."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")

    def inversion(i, j):
        op = atomic_operator(spec, i, i) - atomic_operator(spec, j, j)
        return lift(spec, op) if space == PRODUCT else op

    if scheme == LAMBDA:
        h1, h2 = inversion(1, 2), inversion(2, 3)
    else:
        h1, h2 = inversion(2, 1), inversion(3, 2)
    if commutator(h1, h2).max_abs() != 0.0:
        raise RuntimeError("Cartan elements fail to commute exactly")
    return CartanChoice(scheme, h1, h2)


@dataclass(frozen=True)
class WeightVector:
    """Snapped rational weight components and diagram coordinates."""

    label: str
    kappa: tuple[Fraction, Fraction]
    order: str
    coords: tuple[float, float]


def _snap_rational(value: float, max_denominator: int = 4) -> Fraction:
    best = min(
        (Fraction(round(value * q), q) for q in range(1, max_denominator + 1)),
        key=lambda f: abs(value - float(f)),
    )
    if abs(value - float(best)) > TOL_WEIGHT:
        raise NotAWeightVectorError(
            f"eigenvalue {value!r} does not snap to a small rational"
        )
    return best


def weight_of(op: OperatorMatrix, cartan: CartanChoice, label: str = "",
              order: str = FIRST) -> WeightVector:
    """Extract (kappa1, kappa2) by a least-squares proportionality fit.

    Raises NotAWeightVectorError when [h_k, op] is not proportional to op
    (relative residual above 1e-10) or when the fitted scalar is not a
    small rational.
    """
    scale = op.max_abs()
    if scale == 0.0:
        raise NotAWeightVectorError("zero operator has no weight")
    kappas = []
    for h in (cartan.h1, cartan.h2):
        comm = commutator(h, op)
        fit = np.vdot(op.mat, comm.mat) / np.vdot(op.mat, op.mat)
        if abs(fit.imag) > TOL_WEIGHT:
            raise NotAWeightVectorError(f"complex eigenvalue {fit!r} for {label!r}")
        residual = (comm - fit.real * op).max_abs() / scale
        if residual > TOL_WEIGHT:
            raise NotAWeightVectorError(
                f"{label or 'operator'}: commutator is not proportional "
                f"(relative residual {residual:.2e})"
            )
        kappas.append(_snap_rational(float(fit.real)))
    k1, k2 = kappas
    coords = (
        float(k1) * BASIS_E1[0] + float(k2) * BASIS_E2[0],
        float(k1) * BASIS_E1[1] + float(k2) * BASIS_E2[1],
    )
    return WeightVector(label, (k1, k2), order, coords)


@dataclass(frozen=True)
class DiagramLayout:
    scheme: str
    classical: bool
    vectors: tuple[WeightVector, ...]
    styles: dict = field(default_factory=lambda: dict(DEFAULT_STYLES))


def _scheme_operators(scheme: str, classical: bool, spec: SpaceSpec,
                      alpha: complex) -> list[tuple[str, OperatorMatrix, str]]:
    if classical:
        def first(i, j):
            return complex(alpha) * atomic_operator(spec, i, j)

        if scheme == LAMBDA:
            c31, c32 = first(3, 1), first(3, 2)
            return [
                ("alphaS31", c31, FIRST),
                ("alphaS32", c32, FIRST),
                ("alpha*S13", c31.dag(), FIRST),
                ("alpha*S23", c32.dag(), FIRST),
                ("-|alpha|^2 S21", commutator(c31, c32.dag()), SECOND),
                ("-|alpha|^2 S12", commutator(c31, c32.dag()).dag(), SECOND),
            ]
        c31, c21 = first(3, 1), first(2, 1)
        return [
            ("alphaS31", c31, FIRST),
            ("alphaS21", c21, FIRST),
            ("alpha*S13", c31.dag(), FIRST),
            ("alpha*S12", c21.dag(), FIRST),
            ("+|alpha|^2 S32", commutator(c31, c21.dag()), SECOND),
            ("+|alpha|^2 S23", commutator(c31, c21.dag()).dag(), SECOND),
        ]

    x31 = deformed_operator(spec, 3, 1)
    if scheme == LAMBDA:
        x32 = deformed_operator(spec, 3, 2)
        second = commutator(x31, x32.dag())
        return [
            ("aS31", x31, FIRST),
            ("aS32", x32, FIRST),
            ("a+S13", x31.dag(), FIRST),
            ("a+S23", x32.dag(), FIRST),
            ("(S33-n)S21", second, SECOND),
            ("(S33-n)S12", second.dag(), SECOND),
        ]
    x21 = deformed_operator(spec, 2, 1)
    second = commutator(x31, x21.dag())
    return [
        ("aS31", x31, FIRST),
        ("aS21", x21, FIRST),
        ("a+S13", x31.dag(), FIRST),
        ("a+S12", x21.dag(), FIRST),
        ("(S11+n+1)S32", second, SECOND),
        ("(S11+n+1)S23", second.dag(), SECOND),
    ]


def diagram_layout(scheme: str, classical: bool, spec: SpaceSpec,
                   alpha: complex = 1.0) -> DiagramLayout:
    """Weight vectors of the scheme's first- and second-order operators.

    Quantum mode uses the photon-dressed transitions on the product space;
    classical mode replaces the field by the amplitude alpha and works on
    the atomic space alone.
    """
    space = ATOMIC if classical else PRODUCT
    cartan = cartan_choice(scheme, spec, space)
    vectors = tuple(
        weight_of(op, cartan, label=label, order=order)
        for label, op, order in _scheme_operators(scheme, classical, spec, alpha)
    )
    return DiagramLayout(scheme, classical, vectors)


def weight_table(layout: DiagramLayout) -> str:
    """CSV table with header operator,order,kappa1,kappa2,x,y."""
    out = StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["operator", "order", "kappa1", "kappa2", "x", "y"])
    for v in layout.vectors:
        writer.writerow(
            [v.label, v.order, str(v.kappa[0]), str(v.kappa[1]),
             repr(v.coords[0]), repr(v.coords[1])]
        )
    return out.getvalue()


def _style(layout: DiagramLayout, order: str) -> dict:
    style = dict(DEFAULT_STYLES[order])
    style.update(layout.styles.get(order, {}))
    return style


def render_svg(layout: DiagramLayout) -> bytes:
    """Deterministic SVG 1.1 document: origin-centered vectors with labels.

    Identical layouts give byte-identical documents.
    """
    if not layout.vectors:
        raise ValueError("cannot render an empty layout")
    size = 480.0
    center = size / 2.0
    extent = max(1.0, max(math.hypot(*v.coords) for v in layout.vectors))
    scale = (size / 2.0 - 60.0) / extent

    def pt(x, y):
        return center + scale * x, center - scale * y  # SVG y grows downward

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size:.0f}" height="{size:.0f}" '
        f'viewBox="0 0 {size:.0f} {size:.0f}">',
        f'<title>{"classical" if layout.classical else "quantum"} '
        f'{layout.scheme} weight diagram</title>',
        f'<circle cx="{center:.1f}" cy="{center:.1f}" r="2.5" fill="#000"/>',
    ]
    for v in layout.vectors:
        style = _style(layout, v.order)
        x1, y1 = pt(0.0, 0.0)
        x2, y2 = pt(*v.coords)
        dash = f' stroke-dasharray="{style["dash"]}"' if style["dash"] else ""
        lines.append(
            f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            f'stroke="#000" stroke-width="{style["stroke_width"]:.2f}"{dash}/>'
        )
        # arrowhead: small triangle at the tip
        angle = math.atan2(y2 - y1, x2 - x1)
        head = 9.0
        spread = 0.45
        ax = x2 - head * math.cos(angle - spread)
        ay = y2 - head * math.sin(angle - spread)
        bx = x2 - head * math.cos(angle + spread)
        by = y2 - head * math.sin(angle + spread)
        lines.append(
            f'<polygon points="{x2:.3f},{y2:.3f} {ax:.3f},{ay:.3f} '
            f'{bx:.3f},{by:.3f}" fill="#000"/>'
        )
        lx = x2 + 14.0 * math.cos(angle)
        ly = y2 + 14.0 * math.sin(angle)
        lines.append(
            f'<text x="{lx:.3f}" y="{ly:.3f}" font-size="11" '
            f'font-family="monospace" text-anchor="middle">{v.label}</text>'
        )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def weyl_candidates() -> list[np.ndarray]:
    """Twelve planar symmetry candidates: rotations by multiples of 60
    degrees and reflections across axes at multiples of 30 degrees."""
    mats = []
    for k in range(6):
        t = k * math.pi / 3.0
        mats.append(np.array([[math.cos(t), -math.sin(t)],
                              [math.sin(t), math.cos(t)]]))
    for k in range(6):
        t = k * math.pi / 6.0
        mats.append(np.array([[math.cos(2 * t), math.sin(2 * t)],
                              [math.sin(2 * t), -math.cos(2 * t)]]))
    return mats


def _set_match_residual(points_a: np.ndarray, points_b: np.ndarray) -> float:
    resid = 0.0
    for a in points_a:
        resid = max(resid, float(np.min(np.linalg.norm(points_b - a, axis=1))))
    for b in points_b:
        resid = max(resid, float(np.min(np.linalg.norm(points_a - b, axis=1))))
    return resid


def find_reflection(coords_a: list[tuple[float, float]],
                    coords_b: list[tuple[float, float]],
                    tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """Reflection (det -1) mapping one coordinate set onto the other.

    Searches the twelve planar candidates and returns the best reflection
    with its set-matching residual; raises if none matches within tol.
    """
    pa = np.array(coords_a, dtype=float)
    pb = np.array(coords_b, dtype=float)
    if pa.shape != pb.shape:
        raise ValueError("coordinate sets must have equal size")
    best: tuple[np.ndarray, float] | None = None
    for mat in weyl_candidates():
        if np.linalg.det(mat) > 0:
            continue
        resid = _set_match_residual(pa @ mat.T, pb)
        if best is None or resid < best[1]:
            best = (mat, resid)
    assert best is not None
    if best[1] > tol:
        raise ValueError(
            f"no reflection maps the sets within {tol:g} (best residual {best[1]:.2e})"
        )
    return best
