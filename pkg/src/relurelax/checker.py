"""Precision verdicts over box families, and the expressivity matrix.

A network's analysis is called precise on a box when the analyzer's
output interval equals the exact range.  "For all boxes" is
approximated by finite, deterministic families: every span between
breakpoints, midpoint-shifted spans whose endpoints are not
breakpoints, and seeded random boxes.  Reports label themselves as that
surrogate; they are evidence, not proof.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .analyzers import Box, analyze
from .constructors import (
    convex_encoding,
    dp0_precise_convex,
    dp1_substitute,
    ibp_monotone,
    mn_single_layer,
)
from .cpwl import Cpwl1D, exact_range, random_cpwl
from .network import NetworkBuilder, RELU, ReluNetwork, to_cpwl
from .oracle import exact_range_multivariate, exact_range_univariate
from .rational import format_rational

__all__ = [
    "BoxFamily",
    "PrecisionReport",
    "EncodingMismatchError",
    "breakpoint_spans",
    "random_intervals",
    "grid_boxes_2d",
    "standard_family",
    "check_precise",
    "max_witness_network",
    "abs_function",
    "table1_matrix",
    "Table1Report",
]


class EncodingMismatchError(ValueError):
    """The network does not compute the reference function."""


@dataclass(frozen=True)
class BoxFamily:
    strategy: str
    boxes: tuple[Box, ...]

    def __add__(self, other: "BoxFamily") -> "BoxFamily":
        seen = set()
        merged = []
        for b in self.boxes + other.boxes:
            if b not in seen:
                seen.add(b)
                merged.append(b)
        return BoxFamily(
            strategy=f"{self.strategy}+{other.strategy}", boxes=tuple(merged)
        )


def breakpoint_spans(xs: Sequence) -> BoxFamily:
    """All spans [x_i, x_j] with i < j, plus the midpoint-shifted spans
    [(x_i+x_{i+1})/2, (x_j+x_{j+1})/2] whose endpoints avoid the
    breakpoints themselves."""
    pts = sorted({Fraction(x) for x in xs})
    if len(pts) < 2:
        raise ValueError("need at least two points to span")
    boxes = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            boxes.append(Box.make((pts[i], pts[j])))
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    for i in range(len(mids)):
        for j in range(i + 1, len(mids)):
            boxes.append(Box.make((mids[i], mids[j])))
    return BoxFamily(strategy="breakpoint-spans", boxes=tuple(boxes))


def random_intervals(lo, hi, count: int, seed) -> BoxFamily:
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise ValueError("need a nondegenerate base interval")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    boxes = []
    for _ in range(count):
        den = rng.randint(2, 32)
        a, b = sorted(rng.sample(range(den + 1), 2))
        boxes.append(
            Box.make((lo + (hi - lo) * Fraction(a, den),
                      lo + (hi - lo) * Fraction(b, den)))
        )
    return BoxFamily(strategy=f"random({count})", boxes=tuple(boxes))


def grid_boxes_2d(outer: Box, resolution: int) -> BoxFamily:
    """Every grid-aligned sub-box of a 2D box at the given resolution."""
    if outer.dim != 2 or resolution < 1:
        raise ValueError("need a 2D box and positive resolution")
    lines = []
    for l, u in outer.bounds:
        lines.append([l + (u - l) * Fraction(k, resolution)
                      for k in range(resolution + 1)])
    boxes = []
    for i0 in range(resolution + 1):
        for j0 in range(i0 + 1, resolution + 1):
            for i1 in range(resolution + 1):
                for j1 in range(i1 + 1, resolution + 1):
                    boxes.append(
                        Box.make(
                            (lines[0][i0], lines[0][j0]),
                            (lines[1][i1], lines[1][j1]),
                        )
                    )
    return BoxFamily(strategy=f"grid2d({resolution})", boxes=tuple(boxes))


def standard_family(f: Cpwl1D, random_count: int = 100, seed=0) -> BoxFamily:
    lo, hi = f.domain
    fam = breakpoint_spans([x for x, _ in f.points])
    if random_count:
        fam = fam + random_intervals(lo, hi, random_count, seed)
    return fam


@dataclass(frozen=True)
class PrecisionReport:
    relaxation: str
    family: str
    entries: tuple[dict, ...]
    all_precise: bool
    witness: dict | None

    def to_json(self) -> dict:
        return {
            "relax": self.relaxation,
            "family": self.family,
            "surrogate": True,
            "all_precise": self.all_precise,
            "boxes": len(self.entries),
            "witness": self.witness,
            "entries": list(self.entries),
        }

    def csv_rows(self):
        yield "box,oracle_lo,oracle_hi,analyzer_lo,analyzer_hi,precise"
        for e in self.entries:
            yield ",".join(
                [
                    e["box"],
                    e["oracle"][0],
                    e["oracle"][1],
                    e["analyzer"][0],
                    e["analyzer"][1],
                    "1" if e["precise"] else "0",
                ]
            )


def _oracle_range(net: ReluNetwork, box: Box, f: Cpwl1D | None):
    if f is not None:
        l, u = box.bounds[0]
        return exact_range(f, l, u)
    if net.input_dim == 1:
        return exact_range_univariate(net, box)
    return exact_range_multivariate(net, box)


def _minimize_witness(net, relax, box: Box, f, rounds: int = 8) -> Box:
    """Shrink a failing box by bisection while it keeps failing."""
    cur = box
    for _ in range(rounds):
        shrunk = None
        for k in range(cur.dim):
            l, u = cur.bounds[k]
            if l == u:
                continue
            m = (l + u) / 2
            for half in ((m, u), (l, m)):
                cand = Box(
                    bounds=cur.bounds[:k] + (half,) + cur.bounds[k + 1:]
                )
                res = analyze(net, cand, relax)
                if res.interval != _oracle_range(net, cand, f):
                    shrunk = cand
                    break
            if shrunk:
                break
        if shrunk is None:
            return cur
        cur = shrunk
    return cur


def check_precise(net: ReluNetwork, f: Cpwl1D | None, relax: str,
                  family: BoxFamily, stop_early: bool = False,
                  minimize: bool = True) -> PrecisionReport:
    """Compare analyzer intervals against the exact range on every box.

    When f is given the network must encode it exactly (verified up
    front) and ranges are read off f; otherwise the brute-force network
    oracle supplies them.
    """
    if f is not None:
        lo, hi = f.domain
        got = to_cpwl(net, lo, hi)
        if got != f:
            raise EncodingMismatchError(
                "network does not encode the reference function"
            )
    entries = []
    witness = None
    for box in family.boxes:
        res = analyze(net, box, relax)
        orc = _oracle_range(net, box, f)
        precise = res.interval == orc
        entries.append(
            {
                "box": box.format(),
                "oracle": [format_rational(orc[0]), format_rational(orc[1])],
                "analyzer": [
                    format_rational(res.out_lower),
                    format_rational(res.out_upper),
                ],
                "precise": precise,
            }
        )
        if not precise and witness is None:
            wbox = _minimize_witness(net, relax, box, f) if minimize else box
            wres = analyze(net, wbox, relax)
            worc = _oracle_range(net, wbox, f)
            witness = {
                "box": wbox.format(),
                "analyzer": [
                    format_rational(wres.out_lower),
                    format_rational(wres.out_upper),
                ],
                "oracle": [format_rational(worc[0]), format_rational(worc[1])],
            }
            for key in ("argmax", "argmin"):
                if key in wres.detail:
                    witness[key] = wres.detail[key]
            if stop_early:
                break
    return PrecisionReport(
        relaxation=relax,
        family=family.strategy,
        entries=tuple(entries),
        all_precise=witness is None,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# The expressivity matrix


def max_witness_network() -> ReluNetwork:
    """y + relu(x - y), the two-input witness the triangle row fails on."""
    nb = NetworkBuilder(2)
    r = nb.add(inputs={0: 1, 1: -1}, act=RELU)
    out = nb.add(inputs={1: 1}, refs={r: 1})
    return nb.build(out)


def abs_function() -> Cpwl1D:
    return Cpwl1D.from_points([(-1, 1), (0, 0), (1, 1)])


CLASSES = ("cpwl", "monotone", "convex", "monotone-convex")
CLASS_LABELS = {"cpwl": "CPWL", "monotone": "M-CPWL", "convex": "C-CPWL",
                "monotone-convex": "MC-CPWL"}
ROWS = (
    ("R", "ibp"),
    ("R", "dp0"),
    ("R", "dp1"),
    ("R", "tri"),
    ("R", "mn"),
    ("R2", "tri"),
)
ROW_LABELS = {"ibp": "IBP", "dp0": "DeepPoly-0", "dp1": "DeepPoly-1",
              "tri": "Triangle", "mn": "Multi-Neuron"}


def _cell_constructor(relax: str, klass: str, rng: random.Random):
    if relax == "mn":
        return mn_single_layer
    if relax == "ibp":
        if klass in ("monotone", "monotone-convex"):
            return ibp_monotone
        return None
    if relax == "dp0":
        if klass == "monotone":
            return ibp_monotone
        if klass in ("convex", "monotone-convex"):
            return dp0_precise_convex
        return None
    if relax == "dp1":
        if klass == "monotone":
            return lambda f: dp1_substitute(ibp_monotone(f))
        if klass in ("convex", "monotone-convex"):
            return lambda f: dp1_substitute(dp0_precise_convex(f))
        return None
    if relax == "tri":
        if klass == "monotone":
            return ibp_monotone
        if klass in ("convex", "monotone-convex"):
            def build(f, rng=rng):
                n_signs = len(f.points) - 2
                signs = tuple(rng.choice((1, -1)) for _ in range(n_signs))
                return convex_encoding(f, signs)
            return build
        return None
    raise ValueError(relax)


@dataclass(frozen=True)
class Table1Report:
    cells: dict
    corpus_size: int
    max_segments: int
    seed: int

    def symbol(self, space: str, relax: str, klass: str) -> str:
        return self.cells[(space, relax, klass)]["symbol"]

    def render(self) -> str:
        widths = [12, 12] + [9] * len(CLASSES)
        header = ["X", "Relaxation"] + [CLASS_LABELS[c] for c in CLASSES]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for space, relax in ROWS:
            row = ["R" if space == "R" else "R^2", ROW_LABELS[relax]]
            for klass in CLASSES:
                row.append(self.symbol(space, relax, klass))
            lines.append("  ".join(s.ljust(w) for s, w in zip(row, widths)))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "corpus_size": self.corpus_size,
            "max_segments": self.max_segments,
            "seed": self.seed,
            "cells": [
                {"space": sp, "relax": rx, "class": kl, **info}
                for (sp, rx, kl), info in sorted(self.cells.items())
            ],
        }


def _corpus(klass: str, count: int, max_segments: int, rng: random.Random):
    shape = klass
    out = []
    for _ in range(count):
        lo = 2 if shape in ("convex", "convex-min") else 1
        n = rng.randint(lo, max_segments)
        out.append(random_cpwl(n, shape, rng))
    return out


def table1_matrix(count: int = 50, max_segments: int = 9, seed: int = 0,
                  random_boxes: int = 10) -> Table1Report:
    """Run the designated construction for every claimed-precise cell
    and a concrete imprecise witness for every claimed-impossible cell;
    open cells are reported as '?'."""
    rng = random.Random(seed)
    corpora = {k: _corpus(k, count, max_segments, rng) for k in CLASSES}
    cells = {}

    for space, relax in ROWS:
        for klass in CLASSES:
            if space == "R2":
                net = max_witness_network()
                fam = BoxFamily(strategy="unit-square", boxes=(
                    Box.make((0, 1), (0, 1)),))
                rep = check_precise(net, None, "tri", fam, stop_early=True)
                cells[(space, relax, klass)] = {
                    "symbol": "✗",
                    "witness": rep.witness,
                    "note": "two-input maximum witness",
                }
                continue
            ctor = _cell_constructor(relax, klass, rng)
            if ctor is None:
                if relax == "ibp":
                    f = abs_function()
                    net = dp0_precise_convex(f)
                    fam = BoxFamily(
                        strategy="abs-domain", boxes=(Box.make((-1, 1)),)
                    )
                    rep = check_precise(net, f, "ibp", fam, stop_early=True)
                    cells[(space, relax, klass)] = {
                        "symbol": "✗",
                        "witness": rep.witness,
                        "note": "absolute-value witness",
                    }
                else:
                    cells[(space, relax, klass)] = {
                        "symbol": "?",
                        "note": "open",
                    }
                continue
            precise = 0
            witness = None
            for fi, f in enumerate(corpora[klass]):
                net = ctor(f)
                fam = standard_family(f, random_count=random_boxes,
                                      seed=f"{seed}:{klass}:{relax}:{fi}")
                rep = check_precise(net, f, relax, fam, stop_early=True,
                                    minimize=False)
                if rep.all_precise:
                    precise += 1
                elif witness is None:
                    witness = rep.witness
            info = {
                "symbol": "✓" if precise == count else "✗",
                "precise_functions": precise,
                "functions": count,
            }
            if witness is not None:
                info["witness"] = witness
            cells[(space, relax, klass)] = info
    return Table1Report(
        cells=cells, corpus_size=count, max_segments=max_segments, seed=seed
    )
