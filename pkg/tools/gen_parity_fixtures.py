#!/usr/bin/env python3
"""Regenerate the geometry-parity fixture shared with the browser client.

The fixture pins select/snap/rescale outputs computed by this package on a
mixed corpus of layouts.  Expectations are computed on layouts that went
through the structure-file wire format (dump + parse), because that is the
exact float data a client sees: token boxes travel as x/y/width/height and
the right/bottom edges are reconstructed by addition on both sides.

Usage:  python3 tools/gen_parity_fixtures.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from pdfannot import Bounds, rescale_bounds, select_tokens, snap_bounds
from pdfannot.pdf import SyntheticPage, TextPlacement, build_pdf
from pdfannot.pdf.extract import extract_token_layout
from pdfannot.tokens import PageInfo, PageTokenLayout, Token, layout_from_jsonable, layout_to_jsonable

from helpers import agreement_fixture_pdf, make_grid_layout

OUT = REPO / "frontend" / "tests" / "fixtures" / "geometry_parity.json"


def pair_layout() -> PageTokenLayout:
    """The two-token page used by the documented select/snap examples."""
    return PageTokenLayout(
        page=PageInfo(index=0, width=100.0, height=50.0),
        tokens=[
            Token(text="alpha", bounds=Bounds(10.0, 10.0, 20.0, 20.0)),
            Token(text="beta", bounds=Bounds(30.0, 12.0, 50.0, 18.0)),
        ],
    )


def edge_layout() -> PageTokenLayout:
    """Tokens hugging the page margins so snapping exercises the clamps."""
    return PageTokenLayout(
        page=PageInfo(index=0, width=200.0, height=100.0),
        tokens=[
            Token(text="corner", bounds=Bounds(1.0, 1.5, 12.0, 9.0)),
            Token(text="brink", bounds=Bounds(188.0, 90.0, 199.5, 99.0)),
            Token(text="mid", bounds=Bounds(90.0, 45.0, 110.0, 55.0)),
        ],
    )


def build_layouts() -> dict:
    rng = random.Random(20260815)
    hello = build_pdf([SyntheticPage(placements=[TextPlacement(x=72.0, y=700.0, text="Hello World")])])
    layouts = {
        "pair": [pair_layout()],
        "edges": [edge_layout()],
        "hello": extract_token_layout(hello),
        "agreement": extract_token_layout(agreement_fixture_pdf()),
        "aligned-grid": [make_grid_layout(rows=5, cols=6)],
        "jittered-grid": [
            make_grid_layout(rows=5, cols=6, origin=(40.0, 50.0), rng=rng, jitter=2.5)
        ],
    }
    # round-trip through the wire format: expectations must be computed on
    # exactly the floats a client reconstructs from x/y/width/height
    wire = {name: layout_to_jsonable(pages) for name, pages in layouts.items()}
    parsed = {name: layout_from_jsonable(payload) for name, payload in wire.items()}
    return wire, parsed


def bounds_dict(b: Bounds) -> dict:
    return {"left": b.left, "top": b.top, "right": b.right, "bottom": b.bottom}


def random_rect(rng: random.Random, page: PageInfo) -> Bounds:
    xs = sorted(rng.uniform(-15.0, page.width + 15.0) for _ in range(2))
    ys = sorted(rng.uniform(-15.0, page.height + 15.0) for _ in range(2))
    return Bounds(xs[0], ys[0], xs[1], ys[1])


def main() -> None:
    wire, parsed = build_layouts()
    rng = random.Random(4242)
    names = sorted(parsed)

    select_cases = [
        # documented example: both tokens, in order
        {
            "layout": "pair",
            "page": 0,
            "rect": {"left": 15.0, "top": 5.0, "right": 35.0, "bottom": 25.0},
        },
        # grazing contact along an edge selects nothing
        {
            "layout": "pair",
            "page": 0,
            "rect": {"left": 0.0, "top": 0.0, "right": 10.0, "bottom": 40.0},
        },
    ]
    for _ in range(400):
        name = names[rng.randrange(len(names))]
        page_index = rng.randrange(len(parsed[name]))
        rect = random_rect(rng, parsed[name][page_index].page)
        select_cases.append({"layout": name, "page": page_index, "rect": bounds_dict(rect)})
    for case in select_cases:
        layout = parsed[case["layout"]][case["page"]]
        case["expect"] = select_tokens(layout, Bounds.from_dict(case["rect"]))

    snap_cases = [
        # documented example: union plus padding
        {"layout": "pair", "page": 0, "tokens": [0, 1], "padding": 3.0, "clamp": False},
        # identity case: single token, zero padding
        {"layout": "pair", "page": 0, "tokens": [0], "padding": 0.0, "clamp": False},
        # left/top clamp to 0 and right/bottom clamp to the page
        {"layout": "edges", "page": 0, "tokens": [0, 1, 2], "padding": 3.0, "clamp": True},
        {"layout": "edges", "page": 0, "tokens": [0], "padding": 5.0, "clamp": True},
    ]
    for _ in range(400):
        name = names[rng.randrange(len(names))]
        page_index = rng.randrange(len(parsed[name]))
        layout = parsed[name][page_index]
        count = rng.randint(1, min(6, len(layout.tokens)))
        indices = sorted(rng.sample(range(len(layout.tokens)), count))
        snap_cases.append(
            {
                "layout": name,
                "page": page_index,
                "tokens": indices,
                "padding": rng.choice([0.0, 1.5, 3.0, rng.uniform(0.0, 10.0)]),
                "clamp": rng.random() < 0.5,
            }
        )
    for case in snap_cases:
        layout = parsed[case["layout"]][case["page"]]
        tokens = [layout.tokens[i] for i in case["tokens"]]
        page = layout.page if case["clamp"] else None
        case["expect"] = bounds_dict(snap_bounds(tokens, case["padding"], page))

    rescale_cases = [
        # documented example: x doubles, y triples
        {
            "bounds": {"left": 10.0, "top": 10.0, "right": 20.0, "bottom": 20.0},
            "from": [100.0, 100.0],
            "to": [200.0, 300.0],
        },
    ]
    for _ in range(400):
        fw = rng.uniform(100.0, 1200.0)
        fh = rng.uniform(100.0, 1200.0)
        xs = sorted(rng.uniform(0.0, fw) for _ in range(2))
        ys = sorted(rng.uniform(0.0, fh) for _ in range(2))
        rescale_cases.append(
            {
                "bounds": {"left": xs[0], "top": ys[0], "right": xs[1], "bottom": ys[1]},
                "from": [fw, fh],
                "to": [rng.uniform(50.0, 2400.0), rng.uniform(50.0, 2400.0)],
            }
        )
    for case in rescale_cases:
        got = rescale_bounds(
            Bounds.from_dict(case["bounds"]),
            tuple(case["from"]),
            tuple(case["to"]),
        )
        case["expect"] = bounds_dict(got)

    fixture = {
        "layouts": wire,
        "select": select_cases,
        "snap": snap_cases,
        "rescale": rescale_cases,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixture, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(
        f"wrote {OUT.relative_to(REPO)}: "
        f"{len(select_cases)} select, {len(snap_cases)} snap, {len(rescale_cases)} rescale"
    )


if __name__ == "__main__":
    main()
