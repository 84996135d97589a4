#!/usr/bin/env python3
"""Convert UCI datasets into typed-header CSVs.

Usage: convert_keel.py <keel_ds/data dir> <agaricus-lepiota.data> <output dir>

The KEEL files come from the keel-ds wheel (keel_ds/data/{balanced,imbalanced}/raw);
KEEL already removed rows with missing values. Mushroom is read from the original
UCI agaricus-lepiota.data (all 8124 rows, class in the first column), where `?` in
stalk-root is the attribute value "missing" per the UCI attribute description.
"""

import csv
import sys
from pathlib import Path

MUSHROOM = [
    ("cap_shape", "bell=b,conical=c,convex=x,flat=f,knobbed=k,sunken=s"),
    ("cap_surface", "fibrous=f,grooves=g,scaly=y,smooth=s"),
    ("cap_color", "brown=n,buff=b,cinnamon=c,gray=g,green=r,pink=p,purple=u,red=e,white=w,yellow=y"),
    ("bruises", None),
    ("odor", "almond=a,anise=l,creosote=c,fishy=y,foul=f,musty=m,none=n,pungent=p,spicy=s"),
    ("gill_attachment", "attached=a,descending=d,free=f,notched=n"),
    ("gill_spacing", "close=c,crowded=w,distant=d"),
    ("gill_size", "broad=b,narrow=n"),
    ("gill_color", "black=k,brown=n,buff=b,chocolate=h,gray=g,green=r,orange=o,pink=p,purple=u,red=e,white=w,yellow=y"),
    ("stalk_shape", "enlarging=e,tapering=t"),
    ("stalk_root", "bulbous=b,club=c,cup=u,equal=e,rhizomorphs=z,rooted=r,missing=?"),
    ("stalk_surface_above_ring", "fibrous=f,scaly=y,silky=k,smooth=s"),
    ("stalk_surface_below_ring", "fibrous=f,scaly=y,silky=k,smooth=s"),
    ("stalk_color_above_ring", "brown=n,buff=b,cinnamon=c,gray=g,orange=o,pink=p,red=e,white=w,yellow=y"),
    ("stalk_color_below_ring", "brown=n,buff=b,cinnamon=c,gray=g,orange=o,pink=p,red=e,white=w,yellow=y"),
    ("veil_type", "partial=p,universal=u"),
    ("veil_color", "brown=n,orange=o,white=w,yellow=y"),
    ("ring_number", "none=n,one=o,two=t"),
    ("ring_type", "cobwebby=c,evanescent=e,flaring=f,large=l,none=n,pendant=p,sheathing=s,zone=z"),
    ("spore_print_color", "black=k,brown=n,buff=b,chocolate=h,green=r,orange=o,purple=u,white=w,yellow=y"),
    ("population", "abundant=a,clustered=c,numerous=n,scattered=s,several=v,solitary=y"),
    ("habitat", "grasses=g,leaves=l,meadows=m,paths=p,urban=u,waste=w,woods=d"),
]


def rows(path):
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("@"):
                yield [c.strip() for c in line.split(",")]


def write(out, header, data):
    with open(out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(data)
    print(f"{out}: {len(data)} rows")


def mushroom(src, out):
    decode = [None if v is None else {c: n for n, c in (p.split("=") for p in v.split(","))} for _, v in MUSHROOM]
    header = [f"{n}:bool" if d is None else f"{n}:cat" for (n, _), d in zip(MUSHROOM, decode)]
    header.append("class:label=poisonous")
    data = []
    for r in rows(src):
        label, r = r[0], r[1:]
        cells = [c if d is None else d[c] for c, d in zip(r, decode)]
        cells.append({"p": "poisonous", "e": "edible"}[label])
        data.append(cells)
    write(out, header, data)


def typed(src, out, kinds, label):
    header = [f"a{i + 1}:{k}" for i, k in enumerate(kinds)] + [f"class:label={label}"]
    write(out, header, list(rows(src)))


def main():
    keel, agaricus, out = Path(sys.argv[1]), Path(sys.argv[2]), Path(sys.argv[3])
    out.mkdir(parents=True, exist_ok=True)
    bal, imb = keel / "balanced/raw", keel / "imbalanced/raw"
    mushroom(agaricus, out / "mushroom.csv")
    write(
        out / "iris.csv",
        ["sepal_length:num", "sepal_width:num", "petal_length:num", "petal_width:num", "class:label=Iris-virginica"],
        list(rows(bal / "iris.dat")),
    )
    write(
        out / "ecoli.csv",
        ["mcg:num", "gvh:num", "lip:num", "chg:num", "aac:num", "alm1:num", "alm2:num", "class:label=positive"],
        list(rows(imb / "ecoli1.dat")),
    )
    typed(bal / "australian.dat", out / "credit_au.csv",
          "cat num num cat cat cat num cat cat num cat cat num num".split(), "1")
    typed(bal / "german.dat", out / "credit_g.csv",
          "cat num cat cat num cat cat num cat cat num cat num cat cat num cat num cat cat".split(), "1")


if __name__ == "__main__":
    main()
