"""Regenerate the checked-in test fixtures.

Run from the repository root after installing the package:

    python3 fixtures/regen.py

Outputs are deterministic, so a clean run leaves git status unchanged.
"""

import random
from pathlib import Path

from predcache import belady_schedule
from predcache.traces import GENERATORS, cycling_trace, walk_trace, zipf_trace

HERE = Path(__file__).resolve().parent

CHECKIN_FILTER_K = 10
CHECKIN_MIN_OPT = 50

TRACES = (
    ("zipf_k10.txt", "zipf", 40, 400, 7),
    ("walk_k8.txt", "walk", 32, 400, 3),
    ("uniform_k4.txt", "uniform", 16, 300, 5),
    ("cycling_k10.txt", "cycling", 11, 220, 0),
    ("wide_uniform_k100.txt", "uniform", 120, 600, 9),
)


def write_traces():
    out_dir = HERE / "traces"
    out_dir.mkdir(exist_ok=True)
    for name, kind, pages, length, seed in TRACES:
        seq = GENERATORS[kind](pages, length, seed=seed)
        text = "\n".join(str(page) for page in seq.requests) + "\n"
        (out_dir / name).write_text(text, encoding="utf-8")
        print("traces/%s: %d requests, %d pages" % (name, len(seq), seq.num_pages))


def opt_of_tokens(tokens, k):
    from predcache import RequestSequence

    return belady_schedule(RequestSequence.from_tokens(tokens), k).opt_cost


def checkin_rows(user, tokens, start_minute):
    rows = []
    for i, loc in enumerate(tokens):
        stamp = "2010-01-01T%02d:%02d:%02dZ" % (
            (start_minute + i) // 3600 % 24,
            (start_minute + i) // 60 % 60,
            (start_minute + i) % 60,
        )
        rows.append("%s\t%s\t40.0\t-74.0\t%s" % (user, stamp, loc))
    return rows


def write_brightkite():
    # Two users pass the usability filter (longest first), one sits exactly
    # one fault below the threshold, one is tiny. Malformed rows and blank
    # lines exercise the skip counter.
    cyc = [("loc%04d" % (i % 60)) for i in range(380)]
    assert opt_of_tokens(cyc, CHECKIN_FILTER_K) >= CHECKIN_MIN_OPT
    zpf = ["p%03d" % p for p in zipf_trace(80, 350, seed=11).requests]
    assert opt_of_tokens(zpf, CHECKIN_FILTER_K) >= CHECKIN_MIN_OPT

    length = CHECKIN_MIN_OPT - 1
    while True:
        below = [("c%04d" % (i % 60)) for i in range(length)]
        opt = opt_of_tokens(below, CHECKIN_FILTER_K)
        if opt == CHECKIN_MIN_OPT - 1:
            break
        assert opt < CHECKIN_MIN_OPT, "overshot the filter threshold"
        length += 1
    tiny = ["d%d" % (i % 3) for i in range(6)]

    rows = []
    rows += checkin_rows("u380", cyc, 0)
    rows += checkin_rows("u350", zpf, 40000)
    rows += checkin_rows("u049", below, 80000)
    rows += checkin_rows("u006", tiny, 82000)
    rng = random.Random(99)
    rng.shuffle(rows)
    malformed = [
        "baduser\t2010-01-01T00:00:00Z\t40.0",
        "\t2010-01-01T00:00:00Z\t40.0\t-74.0\tlocX",
        "u9\t\t40.0\t-74.0\tlocX",
        "u9\t2010-01-01T00:00:00Z\t40.0\t-74.0\t",
        "a\tb\tc\td\te\tf",
    ]
    for i, row in enumerate(malformed):
        rows.insert(rng.randrange(len(rows)), row)
    rows.insert(7, "")
    rows.insert(len(rows) // 2, "")
    path = HERE / "brightkite_sample.tsv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print("brightkite_sample.tsv: %d lines (%d malformed)" % (len(rows), len(malformed)))


def write_citibike():
    out_dir = HERE / "citibike"
    out_dir.mkdir(exist_ok=True)

    stations = [3000 + p for p in zipf_trace(70, 240, seed=13).requests]
    lines = [
        'Tripduration,Starttime,Stoptime,"Start Station ID","Start Station Name","End Station ID"'
    ]
    rng = random.Random(31)
    blanks = sorted(rng.sample(range(240), 6))
    for i, station in enumerate(stations):
        cell = "" if i in blanks else str(station)
        lines.append(
            '432,2017-07-01 00:%02d:%02d,2017-07-01 01:00:00,%s,"Main St & 1 Ave",%d'
            % (i // 60, i % 60, cell, 3999)
        )
    lines.insert(50, "681,2017-07-01")
    lines.insert(120, "")
    (out_dir / "201707-sample.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    stations = [4000 + p for p in walk_trace(50, 180, seed=21).requests]
    lines = ["tripduration,starttime,stoptime,start station id,start station name"]
    for i, station in enumerate(stations):
        lines.append("510,2017-08-01 00:%02d:%02d,2017-08-01 01:00:00,%d,Oak Sq" % (i // 60, i % 60, station))
    (out_dir / "201708-sample.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["Tripduration,Starttime,Stoptime,End Station ID"]
    for i in range(3):
        lines.append("100,2017-09-01 00:00:%02d,2017-09-01 01:00:00,%d" % (i, 5000 + i))
    (out_dir / "missing-column.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("citibike/: 2 usable months + 1 missing-column file")


if __name__ == "__main__":
    write_traces()
    write_brightkite()
    write_citibike()
