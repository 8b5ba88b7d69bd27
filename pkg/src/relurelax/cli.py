"""Command-line interface.

Exit codes: 0 success (and all-precise for check), 1 imprecise verdict,
2 usage error, 3 invalid input data.
"""

from __future__ import annotations

import json
import sys

import click

from .analyzers import RELAXATIONS, Box, analyze
from .checker import (
    BoxFamily,
    breakpoint_spans,
    check_precise,
    random_intervals,
    table1_matrix,
)
from .constructors import (
    convex_encoding,
    dp0_precise_convex,
    dp1_substitute,
    ibp_monotone,
    mn_single_layer,
    parse_signs,
    step_network,
)
from .cpwl import Cpwl1D
from .network import KinkHyperplane, ReluNetwork
from .plotting import plot_rows, render_figure, write_csv
from .rational import parse_rational
from .rewrites import collapse_to_single_layer, to_network_form, verify_replacement

EXIT_IMPRECISE = 1
EXIT_INVALID = 3


def _fail(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_INVALID)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read {path}: {exc}")


def _load_network(path: str) -> ReluNetwork:
    try:
        return ReluNetwork.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        _fail(f"invalid network in {path}: {exc}")


def _load_cpwl(path: str) -> Cpwl1D:
    try:
        return Cpwl1D.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        _fail(f"invalid function in {path}: {exc}")


def _parse_box(spec: str) -> Box:
    try:
        return Box.parse(spec)
    except ValueError as exc:
        _fail(f"invalid box {spec!r}: {exc}")


def _emit(obj, output: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@click.group()
def main() -> None:
    """Exact analysis of ReLU networks under convex relaxations."""


@main.command()
@click.argument("kind", type=click.Choice(
    ["step", "ibp-monotone", "convex", "dp0-convex", "dp1-subst", "mn"]))
@click.argument("source", required=False, type=click.Path())
@click.option("--x0", default=None, help="step: left breakpoint")
@click.option("--x1", default=None, help="step: right breakpoint")
@click.option("--beta", default=None, help="step: height")
@click.option("--signs", default=None,
              help="convex: ReLU orientations, e.g. ++-")
@click.option("--output", "-o", default=None, type=click.Path())
def construct(kind, source, x0, x1, beta, signs, output):
    """Build an encoding network; emits the network JSON."""
    try:
        if kind == "step":
            if x0 is None or x1 is None or beta is None:
                _fail("step needs --x0, --x1 and --beta")
            net = step_network(
                parse_rational(x0), parse_rational(x1), parse_rational(beta)
            )
        elif kind == "dp1-subst":
            if not source:
                _fail("dp1-subst needs a network JSON file")
            net = dp1_substitute(_load_network(source))
        else:
            if not source:
                _fail(f"{kind} needs a function JSON file")
            f = _load_cpwl(source)
            if kind == "ibp-monotone":
                net = ibp_monotone(f)
            elif kind == "convex":
                chosen = parse_signs(signs) if signs is not None else \
                    (1,) * max(0, len(f.points) - 2)
                net = convex_encoding(f, chosen)
            elif kind == "dp0-convex":
                net = dp0_precise_convex(f)
            else:
                net = mn_single_layer(f)
    except ValueError as exc:
        _fail(str(exc))
    _emit(net.to_json(), output)


@main.command("analyze")
@click.argument("net_path", type=click.Path())
@click.option("--relax", required=True, type=click.Choice(RELAXATIONS))
@click.option("--box", "box_spec", required=True,
              help="l,u per dimension joined by x, e.g. 0,1x0,1")
@click.option("--output", "-o", default=None, type=click.Path())
def analyze_cmd(net_path, relax, box_spec, output):
    """Analyze a network over a box; emits the result JSON."""
    net = _load_network(net_path)
    box = _parse_box(box_spec)
    try:
        res = analyze(net, box, relax)
    except ValueError as exc:
        _fail(str(exc))
    _emit(res.to_json(), output)


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--fn", "fn_path", default=None, type=click.Path(),
              help="reference function JSON; omitted: brute-force oracle")
@click.option("--relax", required=True, type=click.Choice(RELAXATIONS))
@click.option("--box", "box_spec", default=None,
              help="check one explicit box instead of a family")
@click.option("--random-boxes", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--csv", "csv_path", default=None, type=click.Path())
@click.option("--output", "-o", default=None, type=click.Path())
def check(net_path, fn_path, relax, box_spec, random_boxes, seed, csv_path,
          output):
    """Precision verdict over a box family; exit 0 iff all precise."""
    net = _load_network(net_path)
    f = _load_cpwl(fn_path) if fn_path else None
    try:
        if box_spec:
            family = BoxFamily(strategy="explicit", boxes=(_parse_box(box_spec),))
        elif f is not None:
            family = breakpoint_spans([x for x, _ in f.points])
            if random_boxes:
                lo, hi = f.domain
                family = family + random_intervals(lo, hi, random_boxes, seed)
        else:
            _fail("checking without --fn needs an explicit --box")
        report = check_precise(net, f, relax, family)
    except ValueError as exc:
        _fail(str(exc))
    if csv_path:
        with open(csv_path, "w") as fh:
            for row in report.csv_rows():
                fh.write(row + "\n")
    _emit(report.to_json(), output)
    if not report.all_precise:
        sys.exit(EXIT_IMPRECISE)


@main.command()
@click.option("--count", default=50, show_default=True,
              help="functions per class")
@click.option("--max-segments", default=9, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--random-boxes", default=10, show_default=True)
@click.option("--json", "json_path", default=None, type=click.Path())
def table1(count, max_segments, seed, random_boxes, json_path):
    """Reproduce the expressivity matrix over a random corpus."""
    try:
        report = table1_matrix(
            count=count, max_segments=max_segments, seed=seed,
            random_boxes=random_boxes,
        )
    except ValueError as exc:
        _fail(str(exc))
    click.echo(report.render())
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(report.to_json(), fh, indent=2)
            fh.write("\n")


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--kink", required=True,
              help="hyperplane normal, e.g. 1,-1")
@click.option("--box", "box_spec", required=True)
@click.option("--sub-boxes", default=20, show_default=True,
              help="random sub-boxes for the containment report")
@click.option("--seed", default=0, show_default=True)
@click.option("--output", "-o", default=None, type=click.Path())
def rewrite(net_path, kink, box_spec, sub_boxes, seed, output):
    """Collapse to single-layer form; emits network plus containment report."""
    import random as _random

    net = _load_network(net_path)
    box = _parse_box(box_spec)
    try:
        w = tuple(parse_rational(p) for p in kink.split(","))
        fn = to_network_form(net, box, KinkHyperplane(w=w))
        collapsed = collapse_to_single_layer(fn)
        rng = _random.Random(seed)
        boxes = [box]
        for _ in range(sub_boxes):
            dims = []
            for l, u in box.bounds:
                den = rng.randint(2, 16)
                a, b = sorted(rng.sample(range(den + 1), 2))
                dims.append((l + (u - l) * parse_rational(f"{a}/{den}"),
                             l + (u - l) * parse_rational(f"{b}/{den}")))
            boxes.append(Box.make(*dims))
        report = verify_replacement(net, collapsed, boxes, seed=seed)
    except ValueError as exc:
        _fail(str(exc))
    _emit({"network": collapsed.to_json(), "report": report.to_json()}, output)
    if not report.ok:
        sys.exit(EXIT_IMPRECISE)


@main.command()
@click.argument("net_path", type=click.Path())
@click.option("--relax", required=True, type=click.Choice(RELAXATIONS))
@click.option("--box", "box_spec", required=True)
@click.option("--samples", default=64, show_default=True)
@click.option("--output", "-o", default=None, type=click.Path(),
              help="CSV destination; default stdout")
@click.option("--fig", default=None, type=click.Path(),
              help="also render the band to this image file")
def plotdata(net_path, relax, box_spec, samples, output, fig):
    """Emit (x, value, lower, upper) rows; optionally render a figure."""
    net = _load_network(net_path)
    box = _parse_box(box_spec)
    try:
        rows = plot_rows(net, box, relax, samples=samples)
    except ValueError as exc:
        _fail(str(exc))
    if output:
        with open(output, "w") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    if fig:
        render_figure(rows, fig, title=relax)


if __name__ == "__main__":
    main()
