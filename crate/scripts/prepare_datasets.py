"""Turn the raw Compas and Law downloads into the CSVs under data/.

Usage: python scripts/prepare_datasets.py RAW_COMPAS RAW_LAW OUT_DIR

RAW_COMPAS is ProPublica's compas-scores-two-years.csv. RAW_LAW is the
one-hot encoded law school table (LSAT, UGPA, ZFYA, Race_*, Sex_*, PF_*).
Only the standard library is used.
"""

import csv
import sys
from pathlib import Path

COMPAS_COLUMNS = [
    "sex", "age_cat", "race", "juv_fel_count", "juv_misd_count",
    "priors_count", "c_charge_degree", "two_year_recid",
]


def keep_compas_row(row):
    # ProPublica's analysis filters
    days = row["days_b_screening_arrest"]
    if days == "" or not -30 <= int(float(days)) <= 30:
        return False
    return (
        row["is_recid"] != "-1"
        and row["c_charge_degree"] != "O"
        and row["score_text"] != "N/A"
    )


def prepare_compas(src, dst):
    with open(src, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        # the raw file repeats some column names; keep the first occurrence
        first = {}
        for i, name in enumerate(header):
            first.setdefault(name, i)
        rows = [{k: r[i] for k, i in first.items()} for r in reader]
    kept = [r for r in rows if keep_compas_row(r)]
    with open(dst, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COMPAS_COLUMNS)
        for r in kept:
            w.writerow([r[c] for c in COMPAS_COLUMNS])
    return len(kept)


def one_hot_value(row, prefix):
    hot = [k[len(prefix):] for k, v in row.items() if k.startswith(prefix) and float(v) == 1.0]
    if len(hot) != 1:
        raise ValueError(f"expected exactly one {prefix}* column set, got {hot}")
    return hot[0]


def prepare_law(src, dst):
    with open(src, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    with open(dst, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["lsat", "ugpa", "zfya", "sex", "race", "pass_bar"])
        for r in rows:
            sex = {"1": "female", "2": "male"}[one_hot_value(r, "Sex_")]
            w.writerow([r["LSAT"], r["UGPA"], r["ZFYA"], sex, one_hot_value(r, "Race_"), one_hot_value(r, "PF_")])
    return len(rows)


def main(argv):
    if len(argv) != 4:
        sys.exit(__doc__)
    out = Path(argv[3])
    out.mkdir(parents=True, exist_ok=True)
    print("compas rows:", prepare_compas(argv[1], out / "compas.csv"))
    print("law rows:", prepare_law(argv[2], out / "law.csv"))


if __name__ == "__main__":
    main(sys.argv)
