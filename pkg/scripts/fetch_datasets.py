"""Fetch the two real-world datasets used by the acceptance suite.

Neither dataset is downloaded from its original host; both are pulled out of
packages published on PyPI, so this works wherever ``pip download`` does:

* 1984 House of Representatives votes (435 x 16), taken from ``voting.tab``
  in the Orange3 3.3.12 source distribution.  Yes is coded 1; no and
  abstain/missing are coded 0.
* MovieLens-100k ratings (943 users x 1682 movies), taken from the
  ``ml-100k.inter`` file shipped inside the RecBole wheel.

Usage::

    python scripts/fetch_datasets.py [--out data]
"""

import argparse
import subprocess
import sys
import tarfile
import tempfile
import zipfile
from pathlib import Path


def _pip_download(spec, dest, binary):
    cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "--timeout", "120",
           "-d", str(dest), spec]
    if not binary:
        cmd[5:5] = ["--no-binary", ":all:"]
    subprocess.run(cmd, check=True)


def fetch_votes(out: Path, work: Path) -> Path:
    _pip_download("orange3==3.3.12", work, binary=False)
    sdist = next(work.glob("[Oo]range3-3.3.12.tar.gz"))
    with tarfile.open(sdist) as tar:
        member = tar.getmember("Orange3-3.3.12/Orange/datasets/voting.tab")
        text = tar.extractfile(member).read().decode()
    lines = text.splitlines()
    header = lines[0].split("\t")[1:]
    rows = []
    for line in lines[3:]:
        cells = line.split("\t")
        if not cells or not cells[0]:
            continue
        votes = (cells[1:] + [""] * len(header))[: len(header)]
        rows.append(["1" if v == "y" else "0" for v in votes])
    if len(rows) != 435:
        raise RuntimeError(f"expected 435 voting records, found {len(rows)}")
    path = out / "congress_votes.csv"
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")
    return path


def fetch_movielens(out: Path, work: Path) -> Path:
    _pip_download("recbole==1.2.1", work, binary=True)
    wheel = next(work.glob("recbole-1.2.1-*.whl"))
    with zipfile.ZipFile(wheel) as z:
        text = z.read("recbole/dataset_example/ml-100k/ml-100k.inter").decode()
    triples = []
    for line in text.splitlines()[1:]:
        user, item, rating, _ = line.split("\t")
        triples.append((int(user), int(item), int(float(rating))))
    triples.sort()
    n = max(t[0] for t in triples)
    m = max(t[1] for t in triples)
    path = out / "ml100k.txt"
    with open(path, "w") as f:
        f.write(f"{n} {m} {len(triples)}\n")
        for i, j, v in triples:
            f.write(f"{i} {j} {v}\n")
    return path


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(tmp)
        print("wrote", fetch_votes(out, work))
        print("wrote", fetch_movielens(out, work))


if __name__ == "__main__":
    main()
