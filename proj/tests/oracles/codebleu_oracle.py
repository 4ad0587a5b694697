# SPDX-License-Identifier: Apache-2.0
"""Reference CodeBLEU scores for the golden pairs, computed with CPython's own
`ast`, `tokenize` and `keyword` modules.

Usage: codebleu_oracle.py <dir>   (pairs are NN_cand.py / NN_ref.py)
Prints: name total ngram weighted syntax dataflow   ("-" for a dropped component)
"""
import ast
import io
import keyword
import math
import pathlib
import re
import sys
import tokenize
from collections import Counter

WEIGHTS = (0.15, 0.15, 0.35, 0.35)
KEYWORD_WEIGHT = 5.0
KEEP = {tokenize.NAME, tokenize.NUMBER, tokenize.STRING, tokenize.OP}


def tokens(src):
    try:
        out = []
        for t in tokenize.generate_tokens(io.StringIO(src).readline):
            if t.type == tokenize.ERRORTOKEN:
                raise SyntaxError("error token")
            if t.type in KEEP:
                out.append(t.string)
        return out
    except (tokenize.TokenError, SyntaxError, IndentationError):
        return re.findall(r"[^\W\d]\w*|\d+(?:\.\d+)?|\S", src)


def grams(seq, n):
    return Counter(tuple(seq[i:i + n]) for i in range(len(seq) - n + 1))


def brevity(c, r):
    return 1.0 if c > r else math.exp(1 - r / c)


def bleu(cand, ref):
    if not cand:
        return 0.0
    logs = []
    for n in range(1, 5):
        c, r = grams(cand, n), grams(ref, n)
        m = sum(min(k, r[g]) for g, k in c.items())
        t = max(len(cand) - n + 1, 0)
        p = m / t if n == 1 else (m + 1) / (t + 1)
        if p <= 0:
            return 0.0
        logs.append(math.log(p))
    return brevity(len(cand), len(ref)) * math.exp(sum(logs) / 4)


def weighted_bleu(cand, ref):
    if not cand or not ref:
        return 0.0
    w = lambda tok: KEYWORD_WEIGHT if keyword.iskeyword(tok) else 1.0
    c1, r1 = Counter(cand), Counter(ref)
    num = sum(w(t) * min(k, c1[t]) for t, k in r1.items())
    den = sum(w(t) * k for t, k in r1.items())
    if num <= 0:
        return 0.0
    logs = [math.log(num / den)]
    for n in range(2, 5):
        c, r = grams(cand, n), grams(ref, n)
        m = sum(min(k, r[g]) for g, k in c.items())
        t = max(len(cand) - n + 1, 0)
        logs.append(math.log((m + 1) / (t + 1)))
    return brevity(len(cand), len(ref)) * math.exp(sum(logs) / 4)


def kids(node):
    return [c for c in ast.iter_child_nodes(node) if not isinstance(c, ast.expr_context)]


def shape(node):
    k = kids(node)
    if not k:
        return type(node).__name__
    return "(" + type(node).__name__ + " " + " ".join(shape(c) for c in k) + ")"


def subtrees(tree):
    return [shape(n) for n in ast.walk(tree) if kids(n)]


class Flow:
    """Def-use edges (canonical var, defining node kind, using parent kind)."""

    def __init__(self):
        self.scopes = [{}]
        self.names = {}
        self.edges = []

    def define(self, name, kind):
        if name is None:
            return
        if name not in self.names:
            self.names[name] = f"var_{len(self.names)}"
        self.scopes[-1][name] = kind

    def use(self, name, parent):
        for scope in reversed(self.scopes):
            if name in scope:
                self.edges.append((self.names[name], scope[name], parent))
                return

    def bind(self, t, kind):
        if isinstance(t, ast.Name):
            self.define(t.id, kind)
        elif isinstance(t, (ast.Tuple, ast.List, ast.Starred)):
            for c in kids(t):
                self.bind(c, kind)
        else:
            for c in kids(t):
                self.expr(c, type(t).__name__)

    def args_outer(self, a):
        for c in kids(a):
            if isinstance(c, ast.arg):
                if c.annotation is not None:
                    self.expr(c.annotation, "arg")
            else:
                self.expr(c, "arguments")

    def args_bind(self, a):
        for c in kids(a):
            if isinstance(c, ast.arg):
                self.define(c.arg, "arg")

    def block(self, stmts):
        for s in stmts:
            self.stmt(s)

    def stmt(self, n):
        k = type(n).__name__
        if isinstance(n, ast.Assign):
            self.expr(n.value, k)
            for t in n.targets:
                self.bind(t, k)
        elif isinstance(n, ast.AugAssign):
            if isinstance(n.target, ast.Name):
                self.use(n.target.id, k)
            else:
                for c in kids(n.target):
                    self.expr(c, type(n.target).__name__)
            self.expr(n.value, k)
            if isinstance(n.target, ast.Name):
                self.define(n.target.id, k)
        elif isinstance(n, ast.AnnAssign):
            self.expr(n.annotation, k)
            if n.value is not None:
                self.expr(n.value, k)
            self.bind(n.target, k)
        elif isinstance(n, (ast.For, ast.AsyncFor)):
            self.expr(n.iter, k)
            self.bind(n.target, k)
            self.block(n.body)
            self.block(n.orelse)
        elif isinstance(n, (ast.With, ast.AsyncWith)):
            for item in n.items:
                self.expr(item.context_expr, "withitem")
                if item.optional_vars is not None:
                    self.bind(item.optional_vars, k)
            self.block(n.body)
        elif isinstance(n, ast.ExceptHandler):
            if n.type is not None:
                self.expr(n.type, k)
            self.define(n.name, k)
            self.block(n.body)
        elif isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef)):
            self.args_outer(n.args)
            for d in n.decorator_list:
                self.expr(d, k)
            if n.returns is not None:
                self.expr(n.returns, k)
            self.define(n.name, k)
            self.scopes.append({})
            self.args_bind(n.args)
            self.block(n.body)
            self.scopes.pop()
        elif isinstance(n, ast.ClassDef):
            for c in n.bases + n.keywords + n.decorator_list:
                self.expr(c, k)
            self.define(n.name, k)
            self.scopes.append({})
            self.block(n.body)
            self.scopes.pop()
        elif isinstance(n, (ast.Import, ast.ImportFrom)):
            for a in n.names:
                if a.name != "*":
                    self.define(a.asname or a.name.split(".")[0], k)
        else:
            for c in kids(n):
                if isinstance(c, (ast.stmt, ast.excepthandler)):
                    self.stmt(c)
                else:
                    self.expr(c, k)

    def expr(self, n, parent):
        k = type(n).__name__
        if isinstance(n, ast.Name):
            if isinstance(n.ctx, ast.Load):
                self.use(n.id, parent)
        elif isinstance(n, ast.Lambda):
            self.args_outer(n.args)
            self.scopes.append({})
            self.args_bind(n.args)
            self.expr(n.body, k)
            self.scopes.pop()
        elif isinstance(n, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
            for g in n.generators:
                self.expr(g.iter, "comprehension")
                self.bind(g.target, "comprehension")
                for cond in g.ifs:
                    self.expr(cond, "comprehension")
            parts = [n.key, n.value] if isinstance(n, ast.DictComp) else [n.elt]
            for p in parts:
                self.expr(p, k)
        elif isinstance(n, ast.NamedExpr):
            self.expr(n.value, k)
            self.define(n.target.id, k)
        else:
            for c in kids(n):
                self.expr(c, k)


def flow_edges(tree):
    f = Flow()
    f.block(tree.body)
    return f.edges


def parse(src):
    try:
        return ast.parse(src)
    except SyntaxError:
        return None


def score(cand, ref):
    ct, rt = tokens(cand), tokens(ref)
    parts = [None] * 4
    if rt:
        parts[0] = bleu(ct, rt)
    if any(keyword.iskeyword(t) for t in rt):
        parts[1] = weighted_bleu(ct, rt)
    rtree, ctree = parse(ref), parse(cand)
    if rtree is not None:
        rs = subtrees(rtree)
        if rs:
            have = set(subtrees(ctree)) if ctree is not None else set()
            parts[2] = sum(s in have for s in rs) / len(rs)
        re_ = flow_edges(rtree)
        if re_:
            pool = Counter(flow_edges(ctree)) if ctree is not None else Counter()
            hit = 0
            for e in re_:
                if pool[e] > 0:
                    pool[e] -= 1
                    hit += 1
            parts[3] = hit / len(re_)
    num = sum(w * p for w, p in zip(WEIGHTS, parts) if p is not None)
    den = sum(w for w, p in zip(WEIGHTS, parts) if p is not None)
    return (num / den if den else 0.0), parts


def main(directory):
    d = pathlib.Path(directory)
    for cand in sorted(d.glob("*_cand.py")):
        name = cand.name[: -len("_cand.py")]
        ref = d / f"{name}_ref.py"
        total, parts = score(cand.read_text(), ref.read_text())
        cells = ["-" if p is None else f"{p:.6f}" for p in parts]
        print(name, f"{total:.6f}", *cells, sep="\t")


if __name__ == "__main__":
    main(sys.argv[1])
