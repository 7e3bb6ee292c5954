#!/usr/bin/env python3
# Copyright 2026 The dgof Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Plots error rates from a `dgof experiment` CSV.

One panel per constraint. Each line is one (k, s) pair; the x axis is the
player count and the y axis the rejection rate, so null rows show type-I
error and far rows show power.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

COLUMNS = ["cell", "k", "padded_k", "eps", "constraint", "s", "n_spec", "n",
           "truth", "trials", "accepts", "accept_rate", "stderr"]


def main():
  parser = argparse.ArgumentParser(description=__doc__)
  parser.add_argument("csv")
  parser.add_argument("--output", default="results.png")
  parser.add_argument("--delta", type=float, default=1 / 12)
  args = parser.parse_args()

  df = pd.read_csv(args.csv)
  if list(df.columns) != COLUMNS:
    raise SystemExit(f"unexpected columns: {list(df.columns)}")
  df["reject_rate"] = 1 - df["accept_rate"]

  constraints = sorted(df["constraint"].unique())
  fig, axes = plt.subplots(1, len(constraints), squeeze=False,
                           figsize=(5 * len(constraints), 4))
  for ax, constraint in zip(axes[0], constraints):
    sub = df[df["constraint"] == constraint]
    for (k, s, truth), g in sub.groupby(["k", "s", "truth"]):
      g = g.sort_values("n")
      style = "--" if truth == "null" else "-"
      ax.errorbar(g["n"], g["reject_rate"], yerr=g["stderr"], fmt=style + "o",
                  capsize=2, label=f"k={k} s={s} {truth}")
    ax.axhline(args.delta, color="grey", lw=0.8)
    ax.axhline(1 - args.delta, color="grey", lw=0.8)
    ax.set_xscale("log")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("players n")
    ax.set_ylabel("rejection rate")
    ax.set_title(constraint)
    ax.legend(fontsize=7)
  fig.tight_layout()
  fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
  main()
