#!/usr/bin/env python3
"""Build an SSE fixture (element_index,kind,res_seq,x,y,z) from a PDB file.

Secondary structure comes from the file's HELIX and SHEET records; residues
are restricted to one chain and, optionally, to domain boundaries such as
"5-120" or "5-60,80-120". Elements are numbered 1.. in sequence order.

    curate_sse_fixture.py 2vlw.pdb --chain A --range 1-96 --out data/sse/2VLWA00.csv \
        --manifest data/sse/manifest.json --id 2VLWA00
"""

import argparse
import json
import sys
from pathlib import Path


def parse_ranges(text):
    if not text:
        return None
    out = []
    for part in text.split(","):
        lo, _, hi = part.strip().partition("-")
        out.append((int(lo), int(hi)))
    return out


def in_ranges(res, ranges):
    return ranges is None or any(lo <= res <= hi for lo, hi in ranges)


def read_pdb(path, chain):
    """Returns (ca, elements): ca maps res_seq -> (x, y, z); elements are (kind, start, end)."""
    ca = {}
    elements = []
    with open(path) as f:
        for line in f:
            rec = line[:6].strip()
            if rec == "ATOM" and line[12:16].strip() == "CA" and line[21] == chain:
                if line[16] not in (" ", "A"):
                    continue  # keep the first altloc only
                res = int(line[22:26])
                ca.setdefault(res, (float(line[30:38]), float(line[38:46]), float(line[46:54])))
            elif rec == "HELIX" and line[19] == chain:
                elements.append(("helix", int(line[21:25]), int(line[33:37])))
            elif rec == "SHEET" and line[21] == chain:
                elements.append(("strand", int(line[22:26]), int(line[33:37])))
            elif rec == "ENDMDL":
                break  # first model only
    return ca, elements


def curate(path, chain, ranges, min_residues=3):
    ca, elements = read_pdb(path, chain)
    # a strand listed in two sheets appears twice
    seen = set()
    rows = []
    idx = 0
    for kind, start, end in sorted(elements, key=lambda e: (e[1], e[2])):
        if (start, end) in seen:
            continue
        seen.add((start, end))
        residues = [r for r in range(start, end + 1) if r in ca and in_ranges(r, ranges)]
        if len(residues) < min_residues:
            continue
        idx += 1
        for r in residues:
            rows.append((idx, kind, r) + ca[r])
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("pdb")
    ap.add_argument("--chain", default="A")
    ap.add_argument("--range", dest="ranges", help="domain residue ranges, e.g. 5-120 or 5-60,80-120")
    ap.add_argument("--min-residues", type=int, default=3)
    ap.add_argument("--out", required=True)
    ap.add_argument("--id", help="fixture id for the manifest (default: output stem)")
    ap.add_argument("--manifest", help="JSON manifest to update with residue counts")
    args = ap.parse_args(argv)

    rows = curate(args.pdb, args.chain, parse_ranges(args.ranges), args.min_residues)
    if not rows:
        print(f"{args.pdb}: no secondary-structure elements in chain {args.chain}", file=sys.stderr)
        return 2
    with open(args.out, "w") as f:
        f.write("element_index,kind,res_seq,x,y,z\n")
        for idx, kind, res, x, y, z in rows:
            f.write(f"{idx},{kind},{res},{x:.3f},{y:.3f},{z:.3f}\n")

    counts = {}
    for idx, kind, *_ in rows:
        counts.setdefault(idx, [kind, 0])[1] += 1
    if args.manifest:
        mpath = Path(args.manifest)
        manifest = json.loads(mpath.read_text()) if mpath.exists() else {}
        manifest[args.id or Path(args.out).stem] = {
            "source": Path(args.pdb).name,
            "chain": args.chain,
            "ranges": args.ranges,
            "elements": [{"index": i, "kind": k, "residues": n} for i, (k, n) in sorted(counts.items())],
        }
        mpath.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(counts)} elements ({len(rows)} residues) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
