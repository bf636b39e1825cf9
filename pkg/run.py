#!/usr/bin/python

import sys

from hybridlchs.cli import build_parser, main

if __name__ == "__main__":
    # e.g.
    # Dirichlet benchmark with Law-Eberly preparation: python run.py benchmark --config heat_dirichlet.yaml --out outfiles/dirichlet -v
    # same with SNAP+D on 4 cores: python run.py benchmark --config heat_dirichlet.yaml --out outfiles/dirichlet_snapd --workers 4
    # kernel-parameter sweep: python run.py sweep --config sweep_dirichlet.yaml --out outfiles/sweep --workers 8 --executor futures

    # python run.py dv-baseline --config heat_neumann.yaml --out outfiles/dv_neumann
    # python run.py gatecount --bc periodic --dims 2 --n-t 100
    # python run.py truncation --config heat_dirichlet.yaml --out outfiles/truncation

    args = build_parser().parse_args()

    sys.exit(main(args))
