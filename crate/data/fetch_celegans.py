#!/usr/bin/env python3
"""Download the WormAtlas hermaphrodite wiring tables and convert them to the
edge list and metadata CSV read by `bimod celegans`.

Writes celegans_edges.tsv and celegans_meta.csv next to this script unless
--out is given. Needs pandas and xlrd (for the .xls sheets).
"""

import argparse
import pathlib
import sys
import urllib.request

import pandas as pd

CONNECT_URL = "https://www.wormatlas.org/images/NeuronConnect.xls"
TYPE_URL = "https://www.wormatlas.org/images/NeuronType.xls"
CHEMICAL_SEND = {"S", "Sp"}
CATEGORIES = {
    "sensory": "sensory",
    "interneuron": "interneuron",
    "inter": "interneuron",
    "motor": "motor",
    "motorneuron": "motor",
}


def fetch(url, dest):
    if dest.exists():
        return dest
    print(f"downloading {url}", file=sys.stderr)
    with urllib.request.urlopen(url, timeout=60) as r:
        dest.write_bytes(r.read())
    return dest


def column(df, *names):
    lookup = {c.strip().lower(): c for c in df.columns}
    for n in names:
        if n in lookup:
            return lookup[n]
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path(__file__).parent)
    ap.add_argument("--connect", type=pathlib.Path, help="local NeuronConnect.xls")
    ap.add_argument("--types", type=pathlib.Path, help="local NeuronType.xls")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    connect = args.connect or fetch(CONNECT_URL, args.out / "NeuronConnect.xls")
    types = args.types or fetch(TYPE_URL, args.out / "NeuronType.xls")

    df = pd.read_excel(connect)
    src, dst, kind = column(df, "neuron 1"), column(df, "neuron 2"), column(df, "type")
    chem = df[df[kind].astype(str).str.strip().isin(CHEMICAL_SEND)]
    edges = sorted({(str(a).strip(), str(b).strip()) for a, b in zip(chem[src], chem[dst])})
    with open(args.out / "celegans_edges.tsv", "w") as f:
        f.write("# source\ttarget (chemical synapses, binary)\n")
        for a, b in edges:
            f.write(f"{a}\t{b}\t1\n")
    nodes = sorted({n for e in edges for n in e})

    meta = pd.read_excel(types)
    name = column(meta, "neuron")
    pos = column(meta, "soma position")
    cat = column(meta, "type", "category", "neuron type", "class")
    rows = {}
    for _, r in meta.iterrows():
        label = str(r[name]).strip()
        category = CATEGORIES.get(str(r[cat]).strip().lower(), "other") if cat else "other"
        position = r[pos] if pos is not None and pd.notna(r[pos]) else ""
        rows[label] = (category, position)
    if cat is None:
        print("warning: no neuron category column found; all neurons marked 'other'", file=sys.stderr)

    missing = [n for n in nodes if n not in rows]
    if missing:
        print(f"warning: {len(missing)} neurons without metadata: {missing}", file=sys.stderr)
    with open(args.out / "celegans_meta.csv", "w") as f:
        f.write("label,category,position\n")
        for n in nodes:
            category, position = rows.get(n, ("other", ""))
            f.write(f"{n},{category},{position}\n")
    print(f"{len(nodes)} neurons, {len(edges)} directed edges", file=sys.stderr)


if __name__ == "__main__":
    main()
