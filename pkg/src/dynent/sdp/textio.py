"""Plain-text dump of a :class:`HermitianSdp` for cross-checking with other solvers.

Format (one record per line, ``#`` starts a comment)::

    dynent-sdp 1
    field <real|complex>
    sense <min|max>
    constant <float>
    block <name> <dimension>            # one line per block, in order
    constraint <k> <rhs>                # k = 1..m, in order
    entry <k> <block> <i> <j> <re> <im> # coefficient triplets
    end

``entry`` lines carry the upper triangle (``i <= j``, zero-based) of the
coefficient of block ``<block>`` in constraint ``k``; ``k = 0`` is the
objective.  The lower triangle is implied by Hermiticity.  Floats are written
with ``repr`` so a dump/load round trip is exact.
"""
from __future__ import annotations

import io

import numpy as np

from .standard import HermitianSdp

__all__ = ["dump", "dumps", "load", "loads"]


def _entries(k, name, m):
    m = np.asarray(m, dtype=complex)
    iu, ju = np.triu_indices(m.shape[0])
    for i, j in zip(iu, ju):
        v = m[i, j]
        if v != 0:
            yield f"entry {k} {name} {i} {j} {float(v.real) + 0.0!r} {float(v.imag) + 0.0!r}"


def dumps(problem: HermitianSdp) -> str:
    lines = ["dynent-sdp 1", f"field {problem.field}", f"sense {problem.sense}",
             f"constant {float(problem.constant)!r}"]
    lines += [f"block {n} {d}" for n, d in problem.blocks]
    lines += [f"constraint {k + 1} {float(rhs)!r}" for k, (_, rhs) in enumerate(problem.constraints)]
    for name, m in problem.objective.items():
        lines.extend(_entries(0, name, m))
    for k, (terms, _) in enumerate(problem.constraints):
        acc = {}
        for name, m in terms:
            acc[name] = acc.get(name, 0) + np.asarray(m, dtype=complex)
        for name, m in acc.items():
            lines.extend(_entries(k + 1, name, m))
    lines.append("end")
    return "\n".join(lines) + "\n"


def dump(problem: HermitianSdp, fp) -> None:
    if isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__"):
        with open(fp, "w", encoding="utf-8") as f:
            f.write(dumps(problem))
    else:
        fp.write(dumps(problem))


def loads(text: str) -> HermitianSdp:
    field, sense, const = "complex", "min", 0.0
    blocks, rhs = [], []
    mats: dict = {}
    lines = [ln.split("#", 1)[0].strip() for ln in io.StringIO(text)]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "dynent-sdp 1":
        raise ValueError("not a dynent-sdp 1 document")
    for ln in lines[1:]:
        tok = ln.split()
        kind = tok[0]
        if kind == "field":
            field = tok[1]
        elif kind == "sense":
            sense = tok[1]
        elif kind == "constant":
            const = float(tok[1])
        elif kind == "block":
            blocks.append((tok[1], int(tok[2])))
        elif kind == "constraint":
            if int(tok[1]) != len(rhs) + 1:
                raise ValueError("constraints must be numbered consecutively from 1")
            rhs.append(float(tok[2]))
        elif kind == "entry":
            k, name, i, j = int(tok[1]), tok[2], int(tok[3]), int(tok[4])
            d = dict(blocks)[name]
            m = mats.setdefault((k, name), np.zeros((d, d), dtype=complex))
            v = complex(float(tok[5]), float(tok[6]))
            m[i, j] = v
            m[j, i] = np.conj(v)
        elif kind == "end":
            break
        else:
            raise ValueError(f"unknown record {kind!r}")
    objective = {name: m for (k, name), m in mats.items() if k == 0}
    constraints = []
    for k in range(1, len(rhs) + 1):
        terms = [(name, m) for (kk, name), m in mats.items() if kk == k]
        constraints.append((terms, rhs[k - 1]))
    return HermitianSdp(blocks, objective, constraints, sense, const, field)


def load(fp) -> HermitianSdp:
    if isinstance(fp, (str, bytes)) or hasattr(fp, "__fspath__"):
        with open(fp, encoding="utf-8") as f:
            return loads(f.read())
    return loads(fp.read())
