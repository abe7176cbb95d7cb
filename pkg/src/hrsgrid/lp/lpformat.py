"""Export to the CPLEX-style text LP format for cross-checking with external solvers."""

import math
import re

from .program import EQ, GE, LE, LinearProgram

_BAD = re.compile(r"[^A-Za-z0-9_.\[\]]")


def _clean(name):
    name = _BAD.sub("_", name)
    return name if not name[0].isdigit() else "_" + name


def _expr(indices, coefs, names):
    parts = []
    for j, a in zip(indices, coefs):
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {abs(a):.17g} {names[j]}")
    text = " ".join(parts) if parts else "0"
    return text[2:] if text.startswith("+ ") else text


def write_lp(lp: LinearProgram, path):
    names = [_clean(v.name) for v in lp.variables]
    lines = [f"\\ {lp.name}", "Minimize"]
    obj = [(j, a) for j, a in enumerate(lp.cost) if a != 0.0]
    lines.append(" obj: " + _expr([j for j, _ in obj], [a for _, a in obj], names))
    lines.append("Subject To")
    op = {LE: "<=", GE: ">=", EQ: "="}
    for con in lp.constraints:
        lines.append(f" {_clean(con.name)}: {_expr(con.indices, con.coefs, names)} "
                     f"{op[con.sense]} {con.rhs:.17g}")
    lines.append("Bounds")
    for name, v in zip(names, lp.variables):
        lo = "-inf" if not math.isfinite(v.lower) else f"{v.lower:.17g}"
        hi = "+inf" if not math.isfinite(v.upper) else f"{v.upper:.17g}"
        lines.append(f" {lo} <= {name} <= {hi}")
    ints = [n for n, v in zip(names, lp.variables) if v.integer]
    if ints:
        lines.append("General")
        lines.append(" " + " ".join(ints))
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
