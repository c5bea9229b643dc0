#!/usr/bin/env python3
"""Regenerate the cyclomatic-complexity oracle fixtures.

Writes tests/fixtures/cc_oracle/corpus.py (a corpus of 50 functions/methods
plus class samples covering every decision-point kind) and expected.csv with
independently computed (name, kind, span, score, rank) rows.

The scorer here is the test oracle: a separate implementation of the same
documented counting rules on top of CPython's `ast` module, sharing no code
or parser with the Rust implementation under test. Rules (each +1):

  if / elif, conditional (ternary) expression, for (incl. async for),
  while, each except handler, assert, each and/or boolean operator
  (a chain of n operands counts n-1), each comprehension `for` clause,
  each comprehension `if` clause, each `case` arm of a match.

`else`, `finally`, `with`, and `try` add nothing. A block's score is
1 + its own decisions; nested def/class bodies (and their decorators and
default arguments) score separately. Class rows carry the round-half-up
mean of their direct methods' scores; classes without methods are omitted.

Rank thresholds: A:1-5, B:6-10, C:11-20, D:21-30, E:31-40, F:41+.
"""

import ast
import csv
import io
import os
import sys

FIXTURE_DIR = os.path.join(
    os.path.dirname(os.path.abspath(__file__)),
    "..", "crates", "profrisk", "tests", "fixtures", "cc_oracle",
)


# --------------------------------------------------------------------------
# Independent scorer (the oracle)
# --------------------------------------------------------------------------

class DecisionCounter(ast.NodeVisitor):
    """Counts decision points in a statement list, not crossing into
    nested definitions."""

    def __init__(self):
        self.count = 0

    # Nested blocks are boundaries; nothing inside them (decorators and
    # defaults included) counts here.
    def visit_FunctionDef(self, node):
        pass

    visit_AsyncFunctionDef = visit_FunctionDef
    visit_ClassDef = visit_FunctionDef

    def visit_If(self, node):
        self.count += 1
        self.generic_visit(node)

    def visit_IfExp(self, node):
        self.count += 1
        self.generic_visit(node)

    def visit_For(self, node):
        self.count += 1
        self.generic_visit(node)

    visit_AsyncFor = visit_For

    def visit_While(self, node):
        self.count += 1
        self.generic_visit(node)

    def visit_ExceptHandler(self, node):
        self.count += 1
        self.generic_visit(node)

    def visit_Assert(self, node):
        self.count += 1
        self.generic_visit(node)

    def visit_BoolOp(self, node):
        self.count += len(node.values) - 1
        self.generic_visit(node)

    def visit_comprehension(self, node):
        self.count += 1 + len(node.ifs)
        self.generic_visit(node)

    def visit_Match(self, node):
        self.count += len(node.cases)
        self.generic_visit(node)


def score_body(body):
    counter = DecisionCounter()
    for stmt in body:
        counter.visit(stmt)
    return 1 + counter.count


def rank_of(score):
    for limit, letter in ((5, "A"), (10, "B"), (20, "C"), (30, "D"), (40, "E")):
        if score <= limit:
            return letter
    return "F"


def mean_half_up(values):
    s, n = sum(values), len(values)
    return (2 * s + n) // (2 * n)


COMPOUND_BODIES = {
    ast.If: ("body", "orelse"),
    ast.For: ("body", "orelse"),
    ast.AsyncFor: ("body", "orelse"),
    ast.While: ("body", "orelse"),
    ast.With: ("body",),
    ast.AsyncWith: ("body",),
    ast.Try: ("body", "orelse", "finalbody"),
}


def collect_blocks(body, prefix="", in_class=False):
    """Yield (qualified_name, kind, start, end, score) in source order,
    mirroring the block model: methods are defs directly in a class body,
    class scores average their direct methods."""
    rows = []
    for node in body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            kind = "method" if in_class else "function"
            name = f"{prefix}{node.name}"
            rows.append((name, kind, node.lineno, node.end_lineno, score_body(node.body)))
            rows.extend(collect_blocks(node.body, prefix=f"{name}.", in_class=False))
        elif isinstance(node, ast.ClassDef):
            name = f"{prefix}{node.name}"
            inner = collect_blocks(node.body, prefix=f"{name}.", in_class=True)
            direct = [r[4] for r in inner
                      if r[1] == "method" and r[0].count(".") == name.count(".") + 1]
            if direct:
                rows.append((name, "class", node.lineno, node.end_lineno,
                             mean_half_up(direct)))
            rows.extend(inner)
        elif isinstance(node, ast.Try):
            for field in COMPOUND_BODIES[ast.Try]:
                rows.extend(collect_blocks(getattr(node, field), prefix, False))
            for handler in node.handlers:
                rows.extend(collect_blocks(handler.body, prefix, False))
        elif isinstance(node, ast.Match):
            for case in node.cases:
                rows.extend(collect_blocks(case.body, prefix, False))
        elif type(node) in COMPOUND_BODIES:
            for field in COMPOUND_BODIES[type(node)]:
                rows.extend(collect_blocks(getattr(node, field), prefix, False))
    rows.sort(key=lambda r: r[2])
    return rows


# --------------------------------------------------------------------------
# Corpus
# --------------------------------------------------------------------------

def boundary_function(name, ifs):
    lines = [f"def {name}(x):", "    y = 0"]
    for i in range(ifs):
        lines.append(f"    if x == {i}:")
        lines.append("        y += 1")
    lines.append("    return y")
    return "\n".join(lines)


# Scores 5,6,10,11,20,21,30,31,40,41 probe every rank boundary.
BOUNDARY_SCORES = [5, 6, 10, 11, 20, 21, 30, 31, 40, 41]

HANDWRITTEN = '''\
def k_straight(a, b):
    total = a + b
    return total


def k_single_if(x):
    if x:
        return 1
    return 0


def k_if_else(x):
    if x > 0:
        return "pos"
    else:
        return "neg"


def k_elif_chain(x):
    if x > 100:
        return 4
    elif x > 10:
        return 3
    elif x > 1:
        return 2
    elif x > 0:
        return 1
    else:
        return 0


def k_ternary(x):
    return 1 if x else 0


def k_nested_ternary(x):
    return "a" if x > 1 else ("b" if x < 0 else "c")


def k_for(xs):
    total = 0
    for x in xs:
        total += x
    return total


def k_for_nested(grid):
    total = 0
    for row in grid:
        for x in row:
            total += x
    return total


def k_while(n):
    while n > 0:
        n -= 1
    return n


def k_try_single_except(raw):
    try:
        return int(raw)
    except ValueError:
        return None


def k_try_multi_except(raw):
    try:
        return parse(raw)
    except ValueError:
        return "value"
    except KeyError:
        return "key"
    except OSError:
        return "os"
    finally:
        cleanup()


def k_assert(x):
    assert x is not None
    assert x >= 0
    return x


def k_and(a, b):
    return a and b


def k_or_chain(a, b, c):
    return a or b or c


def k_bool_chain(a, b, c, d):
    return a and b and c and d


def k_bool_mixed(a, b, c, d):
    return (a or b) and (c or d)


def k_listcomp(xs):
    return [x * 2 for x in xs]


def k_listcomp_if(xs):
    return [x for x in xs if x > 0]


def k_listcomp_multi(grid):
    return [x for row in grid for x in row]


def k_listcomp_two_ifs(xs):
    return [x for x in xs if x if x % 2]


def k_setcomp(xs):
    return {x % 7 for x in xs}


def k_dictcomp(items):
    return {k: v for k, v in items}


def k_genexp(xs):
    return (x * x for x in xs)


def k_nested_comp(grid):
    return [[y + 1 for y in row] for row in grid]


def k_comp_with_ternary(xs):
    return [x if x > 0 else -x for x in xs]


def k_lambda_body(xs):
    key = lambda x: x.weight if x.heavy else 0
    return sorted(xs, key=key)


def k_mixed_deep(xs):
    for x in xs:
        if x and x > 0:
            pass


def k_sum_genexp(xs):
    return sum(x for x in xs if x)


async def k_async_for(source):
    total = 0
    async for item in source:
        total += item
    return total


def k_match(command):
    match command:
        case "start":
            return 1
        case "stop":
            return 2
        case _:
            return 0


def k_match_guard(point):
    match point:
        case (x, y) if x and y:
            return x + y
        case _:
            return 0


def k_parent_of_nested(xs):
    if not xs:
        return None

    def k_inner(x):
        if x > 0:
            return x
        if x < 0:
            return -x
        return 0

    return [k_inner(x) for x in xs]


@apply_config(strict and verbose)
def k_decorated(x):
    if x:
        return x
    return None


def k_default_arg(x, mode=("fast" if FAST else "slow")):
    return (x, mode)


class COne:
    def m_checked(self, x):
        if x:
            return x
        return None

    def m_scan(self, xs):
        for x in xs:
            if x:
                return x
        return None


class CTwo:
    def low(self, x):
        if x and x > 0:
            return x
        return 0

    def high(self, xs):
        for x in xs:
            if x > 0 and x < 10:
                pass
            elif x < 0:
                pass
        return xs


class CThree:
    def only(self, a, b, c):
        if a:
            pass
        if b:
            pass
        if c and a or b:
            pass
        return (a, b, c)
'''


def build_corpus():
    parts = ["# Generated by tools/gen_cc_oracle.py; do not edit by hand.",
             "# A corpus of functions covering every counted decision kind,",
             "# plus rank-boundary probes and class aggregation samples.",
             ""]
    for score in BOUNDARY_SCORES:
        parts.append(boundary_function(f"p_score_{score:02d}", score - 1))
        parts.append("")
        parts.append("")
    parts.append(HANDWRITTEN)
    return "\n".join(parts)


def main():
    corpus = build_corpus()
    tree = ast.parse(corpus)
    rows = [(name, kind, start, end, score, rank_of(score))
            for name, kind, start, end, score in collect_blocks(tree.body)]

    # Sanity anchors for the oracle itself.
    for score in BOUNDARY_SCORES:
        row = next(r for r in rows if r[0] == f"p_score_{score:02d}")
        assert row[4] == score, (row, score)
    boundary_ranks = [rank_of(s) for s in BOUNDARY_SCORES]
    assert boundary_ranks == ["A", "B", "B", "C", "C", "D", "D", "E", "E", "F"]
    anchors = {
        "k_single_if": 2,
        "k_mixed_deep": 4,
        "k_straight": 1,
        "CTwo": 4,          # methods score 3 and 5
        "CTwo.low": 3,
        "CTwo.high": 5,
        "COne": 3,          # methods score 2 and 3, mean 2.5 rounds up
        "k_parent_of_nested": 3,
        "k_parent_of_nested.k_inner": 3,
        "k_decorated": 2,
        "k_default_arg": 1,
        "k_match": 4,
        "k_bool_chain": 4,
    }
    for name, expected in anchors.items():
        row = next(r for r in rows if r[0] == name)
        assert row[4] == expected, (row, expected)

    functions = [r for r in rows if r[1] in ("function", "method")]
    classes = [r for r in rows if r[1] == "class"]
    assert len(functions) == 50, len(functions)

    os.makedirs(FIXTURE_DIR, exist_ok=True)
    with open(os.path.join(FIXTURE_DIR, "corpus.py"), "w", newline="\n") as fh:
        fh.write(corpus)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "kind", "start_line", "end_line", "cc", "rank"])
    writer.writerows(rows)
    with open(os.path.join(FIXTURE_DIR, "expected.csv"), "w", newline="\n") as fh:
        fh.write(buf.getvalue())

    kinds = sorted({r[5] for r in rows})
    print(f"wrote {len(rows)} rows ({len(functions)} functions/methods, "
          f"{len(classes)} classes), ranks seen: {kinds}")


if __name__ == "__main__":
    sys.exit(main())
