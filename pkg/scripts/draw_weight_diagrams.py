#!/usr/bin/env python3
"""Write the four weight diagrams (quantum/classical x lambda/vee) as SVG."""

import argparse
from pathlib import Path

from trilevel.hilbert import SpaceSpec
from trilevel.hamiltonian import LAMBDA, VEE
from trilevel.weights import diagram_layout, render_svg, weight_table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    spec = SpaceSpec(1, 3)
    for scheme in (LAMBDA, VEE):
        for classical in (False, True):
            kind = "classical" if classical else "quantum"
            layout = diagram_layout(scheme, classical, spec)
            stem = args.out / f"weights_{scheme}_{kind}"
            stem.with_suffix(".svg").write_bytes(render_svg(layout))
            stem.with_suffix(".csv").write_text(weight_table(layout))
            print(f"wrote {stem}.svg and {stem}.csv")


if __name__ == "__main__":
    main()
