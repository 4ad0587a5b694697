# SPDX-License-Identifier: Apache-2.0
"""Dump node-kind shapes of guest programs using the reference `ast` module.

Expression-context nodes (Load/Store/Del) are omitted; everything else follows
ast.iter_child_nodes order. Output: one "<name>\t<shape>" line per program.
"""
import ast
import pathlib
import sys


def children(node):
    return [c for c in ast.iter_child_nodes(node) if not isinstance(c, ast.expr_context)]


def shape(node):
    kids = children(node)
    if not kids:
        return type(node).__name__
    return "(" + type(node).__name__ + " " + " ".join(shape(k) for k in kids) + ")"


def main(paths):
    for p in sorted(paths):
        tree = ast.parse(pathlib.Path(p).read_text())
        print(f"{pathlib.Path(p).stem}\t{shape(tree)}")


if __name__ == "__main__":
    main(sys.argv[1:])
