#!/usr/bin/python

import argparse
import os
import shutil

import pandas as pd
import yaml

from hybridlchs.plotting import plot_sweep_marginals, plot_truncation_curve
from hybridlchs.utils import loglog_slope


def main(args):
    if not os.path.exists(args.outpath):
        os.makedirs(args.outpath)

    shutil.copy(args.config, args.outpath)

    # load config from yaml
    with open(args.config, "r") as stream:
        config = yaml.safe_load(stream)

    for name, entry in config.get("sweeps", {}).items():
        marginals = pd.read_csv(f"{args.inpath}/{entry['marginals']}")
        out = plot_sweep_marginals(marginals, f"{args.outpath}/{name}.pdf", title=entry.get("title", name))
        print(f"Plotted sweep marginals of {name} to {out}")

    for name, entry in config.get("truncation", {}).items():
        curve = pd.read_csv(f"{args.inpath}/{entry['csv']}")
        curve.attrs["slope"] = loglog_slope(curve["n"], curve["error"])
        out = plot_truncation_curve(curve, f"{args.outpath}/{name}.pdf", label=entry.get("label", name))
        print(f"Plotted truncation curve of {name} to {out}")


if __name__ == "__main__":
    # e.g.
    # python make_plots.py --inpath ../outfiles --outpath ../outfiles/plots

    parser = argparse.ArgumentParser()
    parser.add_argument("--config", dest="config", default="make_plots_config.yaml", help="plot config", type=str)
    parser.add_argument("--inpath", dest="inpath", default="../outfiles", help="directory with the CSV outputs", type=str)
    parser.add_argument("--outpath", dest="outpath", default="../outfiles/plots", help="path of the output", type=str)

    args = parser.parse_args()

    main(args)
