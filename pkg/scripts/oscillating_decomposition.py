#!/usr/bin/env python3
"""Decompose the oscillating claw/triangle stream and dump the plot bundle.

The stream alternates a claw motif (even times) and a triangle motif (odd
times) on four vertices. Its coefficient grid concentrates on four entries:
the two motif scaling functions at frequencies 0 and 1/2. Aggregating with a
2-sample window suppresses the 1/2 line and leaves the constant clique.
"""

import argparse
from pathlib import Path

import numpy as np

from linkspectra import GraphBasis, aggregate, decompose, freq_relational, time_structure
from linkspectra import io as lio
from linkspectra import synth


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--times", type=int, default=32)
    ap.add_argument("--out", default="out/oscillating")
    args = ap.parse_args()

    stream = synth.gen_oscillating(args.times)
    basis = GraphBasis(synth.fig_partition(), 3)
    coeffs = decompose(stream, basis)
    outdir = Path(args.out)
    lio.write_plot_bundle(outdir, stream, time_structure(stream, basis),
                          freq_relational(stream), coeffs)
    lio.write_dense_csv(outdir / "aggregated.csv", aggregate(stream, 2))

    mag = coeffs.magnitude
    labels = lio.coefficient_labels(basis)
    print(f"T={args.times}, M=16, level=3; coefficients above 1e-9:")
    for u, k in np.argwhere(mag > 1e-9):
        print(f"  freq {u:3d} ({u / args.times:.3f} cyc)  {labels[k]:10s}"
              f"  |C| = {mag[u, k]:.6f}")
    agg = aggregate(stream, 2)
    print(f"2-sample aggregate constant clique: "
          f"{bool(np.array_equal(agg.values, np.ones_like(agg.values)))}")
    print(f"bundle written to {outdir}")


if __name__ == "__main__":
    main()
