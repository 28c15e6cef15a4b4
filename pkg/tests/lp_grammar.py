"""Minimal LP-format reader used to check exported files.

Accepts the subset written by the exporter: comment lines, one objective,
named constraint rows (continuation lines indented), a Bounds section with
``lo <= v <= hi`` lines, a Binaries section and End.  Anything else is a
syntax error.
"""

import re

import numpy as np

NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
NUM = r"[0-9]+(?:\.[0-9]*)?(?:[eE][-+]?[0-9]+)?"
TERM = re.compile(rf"^([+-])\s+({NUM})\s+({NAME})$")
FIRST = re.compile(rf"^(-\s+)?({NUM})\s+({NAME})$")
ROW = re.compile(rf"^({NAME}):\s+(.*)\s+(<=|>=|=)\s+(-?{NUM})$")
BOUND = re.compile(rf"^(-?{NUM})\s+<=\s+({NAME})\s+<=\s+(-?{NUM})$")
SECTIONS = ["Minimize", "Subject To", "Bounds", "Binaries", "End"]


class LpSyntaxError(ValueError):
    pass


def _expr(text):
    toks = text.split()
    out = []
    i = 0
    while i < len(toks):
        if i == 0 and toks[0] != "-" and toks[0] != "+":
            m = FIRST.match(" ".join(toks[0:2]))
            step = 2
        else:
            m = TERM.match(" ".join(toks[i:i + 3]))
            step = 3
        if not m:
            raise LpSyntaxError(f"bad term near {' '.join(toks[i:i + 3])!r}")
        if step == 2:
            out.append((float(m.group(2)), m.group(3)))
        else:
            sign = -1.0 if m.group(1) == "-" else 1.0
            out.append((sign * float(m.group(2)), m.group(3)))
        i += step
    return out


def parse_lp(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("\\")]
    # join continuation lines (indented with three spaces)
    logical = []
    for ln in lines:
        if ln.startswith("   ") and logical:
            logical[-1] += " " + ln.strip()
        else:
            logical.append(ln)
    section = None
    seen = []
    obj, rows, bounds, binaries = None, [], {}, []
    for ln in logical:
        s = ln.strip()
        if s in SECTIONS:
            if seen and SECTIONS.index(s) <= SECTIONS.index(seen[-1]):
                raise LpSyntaxError(f"section {s} out of order")
            seen.append(s)
            section = s
            continue
        if not s:
            continue
        if section == "Minimize":
            if not s.startswith("obj: ") or obj is not None:
                raise LpSyntaxError("objective must be a single 'obj:' row")
            obj = _expr(s[5:])
        elif section == "Subject To":
            m = ROW.match(s)
            if not m:
                raise LpSyntaxError(f"bad constraint {s[:60]!r}")
            rows.append((m.group(1), _expr(m.group(2)), m.group(3), float(m.group(4))))
        elif section == "Bounds":
            m = BOUND.match(s)
            if not m:
                raise LpSyntaxError(f"bad bound {s!r}")
            bounds[m.group(2)] = (float(m.group(1)), float(m.group(3)))
        elif section == "Binaries":
            for v in s.split():
                if not re.fullmatch(NAME, v):
                    raise LpSyntaxError(f"bad binary name {v!r}")
                binaries.append(v)
        else:
            raise LpSyntaxError(f"text outside any section: {s[:40]!r}")
    if seen != SECTIONS:
        raise LpSyntaxError(f"sections found {seen}, expected {SECTIONS}")
    names = [r[0] for r in rows]
    if len(set(names)) != len(names):
        raise LpSyntaxError("duplicate row names")
    return {"objective": obj, "rows": rows, "bounds": bounds, "binaries": binaries}


def to_matrices(lp):
    """Dense (c, A, lo, hi, integrality, var_lo, var_hi, names) for scipy.optimize.milp."""
    names = []
    index = {}

    def idx(v):
        if v not in index:
            index[v] = len(names)
            names.append(v)
        return index[v]

    for _, v in lp["objective"]:
        idx(v)
    for _, terms, _, _ in lp["rows"]:
        for _, v in terms:
            idx(v)
    for v in lp["binaries"]:
        idx(v)
    for v in lp["bounds"]:
        idx(v)
    n = len(names)
    c = np.zeros(n)
    for coef, v in lp["objective"]:
        c[index[v]] += coef
    A = np.zeros((len(lp["rows"]), n))
    lo = np.full(len(lp["rows"]), -np.inf)
    hi = np.full(len(lp["rows"]), np.inf)
    for i, (_, terms, sense, rhs) in enumerate(lp["rows"]):
        for coef, v in terms:
            A[i, index[v]] += coef
        if sense in ("<=", "="):
            hi[i] = rhs
        if sense in (">=", "="):
            lo[i] = rhs
    integrality = np.zeros(n)
    v_lo = np.zeros(n)
    v_hi = np.full(n, np.inf)
    for v in lp["binaries"]:
        integrality[index[v]] = 1
        v_hi[index[v]] = 1
    for v, (a, b) in lp["bounds"].items():
        v_lo[index[v]], v_hi[index[v]] = a, b
    return c, A, lo, hi, integrality, v_lo, v_hi, names
