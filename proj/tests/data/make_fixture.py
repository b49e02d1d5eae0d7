#!/usr/bin/env python3
"""Writes cfpb_fixture.csv and embeddings.tsv.

2,000 complaint rows in four planted groups. Each group has three marker
words that every narrative of the group repeats, a handful of secondary
words, and shared filler. Ten rows have no narrative. Embeddings are 16-D
Gaussian blobs (unit variance) whose centers are 20 apart, one per group,
written only for rows that keep a narrative.
"""
import csv
import math
import random
from pathlib import Path

ROWS = 2000
EMPTY_ROWS = 10
DIM = 16
SEED = 20240611

GROUPS = [
    {
        "product": "Mortgage",
        "markers": ["mortgage", "escrow", "foreclosure"],
        "secondary": ["servicer", "modification", "appraisal", "lender", "refinance", "property"],
    },
    {
        "product": "Debt collection",
        "markers": ["collector", "debt", "harassment"],
        "secondary": ["voicemail", "validation", "lawsuit", "garnishment", "agency", "threatened"],
    },
    {
        "product": "Credit reporting",
        "markers": ["equifax", "transunion", "inaccurate"],
        "secondary": ["dispute", "bureau", "tradeline", "experian", "identity", "inquiry"],
    },
    {
        "product": "Checking or savings account",
        "markers": ["overdraft", "checking", "deposit"],
        "secondary": ["branch", "teller", "withdrawal", "statement", "fees", "savings"],
    },
]

FILLER = [
    "company", "account", "called", "told", "payment", "information", "received", "letter",
    "bank", "time", "month", "request", "customer", "service", "phone", "email", "issue",
    "problem", "response", "days", "weeks", "contacted", "asked", "explained", "complaint",
    "representative", "manager", "resolve", "office", "number",
]

COMPANIES = ["Acme Financial", "Northwind Bank", "Contoso Credit", "Fabrikam Services, Inc."]


def narrative(rng, group, row):
    words = []
    for m in group["markers"]:
        words.extend([m] * rng.randint(2, 3))
    for s in group["secondary"]:
        if rng.random() < 0.35:
            words.append(s)
    words.extend(rng.choice(FILLER) for _ in range(rng.randint(12, 20)))
    rng.shuffle(words)
    text = " ".join(words)
    if row % 7 == 0:
        text = "On XX/XX/XXXX I paid ${}.00, ".format(rng.randint(50, 5000)) + text
    if row % 11 == 0:
        text += ", and then XXXX said \"wait\"."
    if row % 13 == 0:
        text = text.replace(" ", "\n", 1)
    return text[0].upper() + text[1:]


def main():
    rng = random.Random(SEED)
    here = Path(__file__).resolve().parent
    centers = []
    for g in range(len(GROUPS)):
        c = [0.0] * DIM
        c[g] = 20.0 / math.sqrt(2.0)
        centers.append(c)

    empty = set(rng.sample(range(ROWS), EMPTY_ROWS))
    header = ["Date received", "Product", "Sub-product", "Issue", "Consumer complaint narrative",
              "Company", "State", "Complaint ID"]
    records = []
    vectors = []
    for row in range(ROWS):
        g = row % len(GROUPS)
        cid = 4000000 + 17 * row
        date = "2023-{:02d}-{:02d}".format(1 + row % 12, 1 + row % 28)
        text = "" if row in empty else narrative(rng, GROUPS[g], row)
        records.append([date, GROUPS[g]["product"], "", "Other", text, rng.choice(COMPANIES),
                        "CA", str(cid)])
        if text:
            v = [centers[g][d] + rng.gauss(0.0, 1.0) for d in range(DIM)]
            vectors.append((cid, v))

    with open(here / "cfpb_fixture.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        w.writerow(header)
        w.writerows(records)
    with open(here / "embeddings.tsv", "w", encoding="utf-8") as f:
        for cid, v in vectors:
            f.write("{}\t{}\t{}\n".format(cid, DIM, ",".join("{:.9g}".format(x) for x in v)))


if __name__ == "__main__":
    main()
