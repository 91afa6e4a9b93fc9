"""Figure rendering for CLI reports.

matplotlib is imported lazily and pinned to the Agg backend, so the main
code paths never pay for it. Every figure is written next to a CSV with the
same stem carrying the plotted numbers.
"""

from __future__ import annotations

import csv
import os


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _bar_figure(path, labels, values, title, ylabel):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(max(4, 0.28 * len(labels) + 1), 3.2))
    xs = range(len(labels))
    colors = ["#888888" if v is None else "#3b6ea5" for v in values]
    ax.bar(xs, [0 if v is None else v for v in values], color=colors)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(l) for l in labels], rotation=90, fontsize=6)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_figures(report: dict, outdir: str) -> list:
    """Write figures + CSVs for a CLI report; returns the file list."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    cmd = report.get("command")
    if cmd == "check":
        entries = (report.get("delay") or {}).get("entries") or []
        labels = [e["index"] for e in entries]
        # plot witness positions; missing witnesses render as gaps
        positions = []
        for e in entries:
            w = e.get("witness")
            positions.append(labels.index(w) if w in labels else None)
        png = os.path.join(outdir, "check_witnesses.png")
        _bar_figure(png, labels, positions, "commutation witnesses", "witness position")
        csvp = os.path.join(outdir, "check_witnesses.csv")
        _write_csv(csvp, ["index", "witness", "value"],
                   [[e["index"], e.get("witness"), e["value"]] for e in entries])
        written += [png, csvp]
    elif cmd == "reduce":
        chain = (report.get("result") or {}).get("chain") or \
                (report.get("result") or {}).get("elements") or []
        png = os.path.join(outdir, "reduce_chain.png")
        plt = _plt()
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.step(range(len(chain)), range(len(chain)), where="post", color="#3b6ea5")
        ax.set_xticks(range(len(chain)))
        ax.set_xticklabels([str(c) for c in chain], rotation=90, fontsize=6)
        ax.set_title(f"reduced index ({report.get('op')})")
        ax.set_ylabel("chain position")
        fig.tight_layout()
        fig.savefig(png, dpi=110)
        plt.close(fig)
        csvp = os.path.join(outdir, "reduce_chain.csv")
        _write_csv(csvp, ["position", "element"], list(enumerate(chain)))
        written += [png, csvp]
    elif cmd == "morphism":
        evidence = (report.get("verdict") or {}).get("evidence") or {}
        table = evidence.get("entries") or []
        labels = [str(row[0]) for row in table]
        png = os.path.join(outdir, "morphism_witnesses.png")
        _bar_figure(png, labels, list(range(len(labels))),
                    "morphism witnesses", "entry")
        csvp = os.path.join(outdir, "morphism_witnesses.csv")
        _write_csv(csvp, ["subject", "witness"], [[str(r[0]), str(r[1])] for r in table])
        written += [png, csvp]
    elif cmd == "fuzz":
        rows = report.get("rows") or []
        labels = [r["seed"] for r in rows]
        values = [len(r["mismatches"]) for r in rows]
        png = os.path.join(outdir, "fuzz_agreement.png")
        _bar_figure(png, labels, values, "oracle mismatches per seed", "mismatches")
        csvp = os.path.join(outdir, "fuzz_agreement.csv")
        _write_csv(csvp, ["seed", "ok", "mismatches"],
                   [[r["seed"], r["ok"], len(r["mismatches"])] for r in rows])
        written += [png, csvp]
    return written
