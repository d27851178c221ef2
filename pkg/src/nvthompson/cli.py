"""Command-line front end.

Element arguments may be a path to a file or literal text in any of three
forms: an element file (``dim:`` / ``pairs:`` / ``from ... -> to ...``), a
tree-pair diagram ``tree | [perm] | tree``, or a generator word.

Exit codes: 0 success (``eq``: equal), 1 ``eq`` unequal, 2 unparseable input,
3 engine error, 4 unverified decomposition, 5 ball over budget, 6 dimension
not drawable.

Settings fall back to environment variables: NVT_DIM, NVT_MAX_LEVEL,
NVT_RADIUS, NVT_BUDGET, NVT_OUT, NVT_SEED.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import geometry as geo
from . import metrics
from .elements import (
    Element, block_count, caret_count, depth, equals, format_element, parse_element, serialize,
)
from .errors import (
    BallTooLarge, DecodeError, InvalidAddress, NVError, ParseError, UnsupportedDimension,
    UnverifiedDecomposition,
)
from .generators import evaluate_word, format_word, parse_word, relation_table, shift_rewrite
from .normal_form import decompose, upper_bound_length
from .render import render
from .trees import diagram_to_element, parse_diagram, parse_tree

EXIT_UNEQUAL = 1
EXIT_PARSE = 2
EXIT_ENGINE = 3
EXIT_UNVERIFIED = 4
EXIT_BUDGET = 5
EXIT_DIMENSION = 6

EXPERIMENTS = ("ball", "c0", "distortion", "counts")
DEFAULT_N_MAX = {"c0": 14, "distortion": 10, "counts": 20}


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{name} must be an integer, got {raw!r}") from None


def _read_arg(arg: str) -> str:
    path = Path(arg)
    try:
        if path.is_file():
            return path.read_text()
    except OSError:
        pass
    return arg


def load_element(arg: str, dim: int) -> Element:
    text = _read_arg(arg)
    if "pairs:" in text or text.lstrip().startswith("dim:"):
        return parse_element(text)
    if "|" in text:
        return diagram_to_element(parse_diagram(text.strip(), dim))
    return evaluate_word(parse_word(text), dim)


def load_drawable(arg: str, dim: int):
    """Like load_element, but also accepts a bare tree or a block-per-line pattern."""
    text = _read_arg(arg).strip()
    if text.startswith("(") or text == "L":
        return parse_tree(text)
    if "/2^" in text and "from" not in text:
        return geo.parse_pattern(text)
    return load_element(text, dim)


def _emit_element(x: Element) -> None:
    sys.stdout.write(format_element(x))
    sys.stdout.write(f"# blocks: {block_count(x)}\n# carets: {caret_count(x)}\n# depth: {depth(x)}\n")


def _output(path: str | None, data: str | bytes) -> None:
    if path is None:
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
    else:
        metrics.atomic_write(path, data)


# commands ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    _emit_element(evaluate_word(parse_word(_read_arg(args.word)), args.dim))
    return 0


def cmd_eq(args) -> int:
    a = load_element(args.a, args.dim)
    b = load_element(args.b, args.dim)
    same = equals(a, b)
    print("equal" if same else "not equal")
    return 0 if same else EXIT_UNEQUAL


def cmd_mul(args) -> int:
    _emit_element(load_element(args.a, args.dim) * load_element(args.b, args.dim))
    return 0


def cmd_inv(args) -> int:
    _emit_element(~load_element(args.a, args.dim))
    return 0


def cmd_reduce(args) -> int:
    x = load_element(args.a, args.dim)
    _emit_element(x)
    print(f"# key: {serialize(x).decode()}")
    return 0


def cmd_decompose(args) -> int:
    x = load_element(args.a, args.dim)
    w = decompose(x)
    if args.finite:
        w = shift_rewrite(w, x.dim)
        if evaluate_word(w, x.dim) != x:
            raise UnverifiedDecomposition("rewritten word does not evaluate to the element")
    print(format_word(w))
    print(f"# verified: yes ({len(w)} symbols)")
    return 0


def cmd_wordlength(args) -> int:
    x = load_element(args.a, args.dim)
    w, n = upper_bound_length(x, full_check=True)
    print(f"upper bound: {n}")
    if args.exact:
        ball = metrics.bfs_ball(args.radius, x.dim, budget=args.budget, upper_bounds=False)
        rec = ball.get(serialize(x))
        if rec is None:
            print(f"exact: > {args.radius}")
        else:
            print(f"exact: {rec.length}")
    if args.show_word:
        print(format_word(w))
    return 0


def cmd_experiment(args) -> int:
    out = Path(args.out)
    settings: dict[str, object] = {"experiment": args.name, "dim": args.dim, "seed": args.seed,
                                   "max_level": geo.max_level()}
    if args.name == "ball":
        settings.update(radius=args.radius, budget=args.budget)
        ball = metrics.bfs_ball(args.radius, args.dim, budget=args.budget)
        report = metrics.check_bounds(ball, args.dim)
        metrics.write_ball_csv(out / "ball.csv", ball)
        metrics.atomic_write(out / "ball-report.txt", "\n".join(report.lines()) + "\n")
        print("\n".join(report.lines()))
    else:
        n_max = args.n_max if args.n_max is not None else DEFAULT_N_MAX[args.name]
        settings["n_max"] = n_max
        if args.name == "c0":
            metrics.write_c0_csv(out / "c0.csv", metrics.experiment_c0_growth(n_max, args.dim))
        elif args.name == "distortion":
            metrics.write_distortion_csv(out / "distortion.csv",
                                         metrics.experiment_distortion(n_max, args.dim))
        else:
            metrics.write_counts_csv(out / "counts.csv", metrics.genericity_table(n_max))
    metrics.write_manifest(out / f"{args.name}-manifest.txt", settings)
    print(f"wrote {args.name} results to {out}")
    return 0


def cmd_render(args) -> int:
    obj = load_drawable(args.input, args.dim)
    fmt = "svg" if args.svg else "ascii"
    _output(args.output, render(obj, fmt, numbered=not args.no_numbers))
    return 0


# parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nvthompson", description=__doc__.split("\n\n")[0])
    p.add_argument("--dim", type=int, default=_env_int("NVT_DIM", 2), help="cube dimension (NVT_DIM)")
    p.add_argument("--max-level", type=int, default=_env_int("NVT_MAX_LEVEL", geo.DEFAULT_MAX_LEVEL),
                   help="interval level cap (NVT_MAX_LEVEL)")
    p.add_argument("--relation-table", action="store_true",
                   help="print the verified shift relations and exit")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("eval", help="evaluate a generator word")
    s.add_argument("word")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("eq", help="exit 0 if two elements are equal, 1 if not")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_eq)

    s = sub.add_parser("mul", help="product a*b (a applied first)")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_mul)

    for name, func, text in (("inv", cmd_inv, "inverse"), ("reduce", cmd_reduce, "reduced form")):
        s = sub.add_parser(name, help=text)
        s.add_argument("a")
        s.set_defaults(func=func)

    s = sub.add_parser("decompose", help="verified word for an element")
    s.add_argument("a")
    s.add_argument("--finite", action="store_true", help="rewrite onto the finite generating set")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("wordlength", help="certified upper bound, optionally the exact length")
    s.add_argument("a")
    s.add_argument("--exact", action="store_true", help="search the Cayley ball for the exact length")
    s.add_argument("--radius", type=int, default=_env_int("NVT_RADIUS", 4))
    s.add_argument("--budget", type=int, default=_env_int("NVT_BUDGET", metrics.DEFAULT_BUDGET))
    s.add_argument("--show-word", action="store_true")
    s.set_defaults(func=cmd_wordlength)

    s = sub.add_parser("experiment", help="run an experiment and write CSV files")
    s.add_argument("name", choices=EXPERIMENTS)
    s.add_argument("--radius", type=int, default=_env_int("NVT_RADIUS", 4))
    s.add_argument("--budget", type=int, default=_env_int("NVT_BUDGET", metrics.DEFAULT_BUDGET))
    s.add_argument("--n-max", type=int, default=None)
    s.add_argument("--out", default=os.environ.get("NVT_OUT") or "out")
    s.add_argument("--seed", type=int, default=_env_int("NVT_SEED", 0),
                   help="recorded in the manifest; the experiments themselves are deterministic")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("render", help="draw a partition, tree or diagram")
    s.add_argument("input")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--svg", action="store_true")
    fmt.add_argument("--ascii", action="store_true")
    s.add_argument("--no-numbers", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_render)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.dim < 1:
        parser.error("--dim must be at least 1")
    if args.max_level < 0:
        parser.error("--max-level must be nonnegative")
    if getattr(args, "radius", 0) < 0:
        parser.error("--radius must be nonnegative")
    try:
        with geo.level_cap(args.max_level):
            if args.relation_table:
                print("\n".join(relation_table(args.dim).lines()))
                return 0
            if args.command is None:
                parser.print_help()
                return EXIT_PARSE
            return args.func(args)
    except (ParseError, DecodeError, InvalidAddress, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnverifiedDecomposition as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNVERIFIED
    except BallTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UnsupportedDimension as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except NVError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
