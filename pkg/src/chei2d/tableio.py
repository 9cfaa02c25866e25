"""Rank-table text format.

One node per line, "node_id P K Pstar Kstar", preceded by '#' metadata
lines carrying the computation parameters (alpha, tolerance, iteration
counts, residuals).  Floats are written with full round-trip precision
so a table re-read reproduces the vectors bit for bit.
"""

from __future__ import annotations

import io
from typing import IO

import numpy as np

from .ranking import RankVector, TwoDRanking

__all__ = ["write_rank_table", "read_rank_table", "serialize_rank_table"]

_MAGIC = "chei2d-rank-table"


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _vector_params(name: str, v: RankVector) -> list[tuple[str, object]]:
    return [
        (f"{name}_iterations", v.iterations_used),
        (f"{name}_residual", float(v.residual)),
        (f"{name}_converged", v.converged),
    ]


def serialize_rank_table(ranking: TwoDRanking, params: dict | None = None) -> str:
    buf = io.StringIO()
    write_rank_table(ranking, buf, params=params)
    return buf.getvalue()


def write_rank_table(ranking: TwoDRanking, destination, params: dict | None = None) -> None:
    """Write the paired table to a path or text stream.

    ``params`` entries (e.g. alpha, tol, filter settings) are emitted as
    '# key=value' header lines in sorted key order for byte stability.
    """
    if hasattr(destination, "write"):
        _write(ranking, destination, params)
    else:
        with open(destination, "w", encoding="utf-8") as fp:
            _write(ranking, fp, params)


def _write(ranking: TwoDRanking, fp: IO[str], params: dict | None) -> None:
    fp.write(f"# {_MAGIC}\n")
    fp.write(f"# N={ranking.node_count}\n")
    for key, value in sorted((params or {}).items()):
        fp.write(f"# {key}={_format_value(value)}\n")
    for name, vec in (("pagerank", ranking.pagerank), ("cheirank", ranking.cheirank)):
        for key, value in _vector_params(name, vec):
            fp.write(f"# {key}={_format_value(value)}\n")
    fp.write("# columns: node_id P K Pstar Kstar\n")
    p = ranking.pagerank.probabilities
    ps = ranking.cheirank.probabilities
    k = ranking.K
    ks = ranking.Kstar
    for i in range(ranking.node_count):
        fp.write(f"{i + 1} {float(p[i])!r} {k[i]} {float(ps[i])!r} {ks[i]}\n")


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def read_rank_table(source) -> tuple[TwoDRanking, dict]:
    """Read a table back into a :class:`TwoDRanking` plus its header
    parameters.  Raises ValueError on malformed rows or when a rank
    column is not a permutation of 1..N."""
    if hasattr(source, "read"):
        return _read(source)
    with open(source, "r", encoding="utf-8") as fp:
        return _read(fp)


def _read(fp: IO[str]) -> tuple[TwoDRanking, dict]:
    params: dict = {}
    rows: list[tuple[int, float, int, float, int]] = []
    for lineno, raw in enumerate(fp, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                params[key.strip()] = _coerce(value.strip())
            continue
        tokens = line.split()
        if len(tokens) != 5:
            raise ValueError(f"rank table line {lineno}: expected 5 columns")
        try:
            rows.append(
                (int(tokens[0]), float(tokens[1]), int(tokens[2]),
                 float(tokens[3]), int(tokens[4]))
            )
        except ValueError:
            raise ValueError(f"rank table line {lineno}: malformed values") from None
    if not rows:
        raise ValueError("rank table holds no data rows")
    n = len(rows)
    node_id = np.array([row[0] for row in rows], dtype=np.int64)
    if not np.array_equal(np.sort(node_id), np.arange(1, n + 1)):
        raise ValueError("rank table node ids must cover 1..N exactly once")
    by_node = np.argsort(node_id)
    p = np.array([rows[i][1] for i in by_node])
    k = np.array([rows[i][2] for i in by_node], dtype=np.int64)
    ps = np.array([rows[i][3] for i in by_node])
    ks = np.array([rows[i][4] for i in by_node], dtype=np.int64)
    for prob in (p, ps):
        if not np.all(np.isfinite(prob)) or np.any(prob < 0):
            raise ValueError("rank table probabilities must be finite and nonnegative")

    def build(name: str, prob: np.ndarray, index: np.ndarray) -> RankVector:
        if not np.array_equal(np.sort(index), np.arange(1, n + 1)):
            raise ValueError(f"rank table {name} index is not a permutation of 1..N")
        order = np.empty(n, dtype=np.int64)
        order[index - 1] = np.arange(1, n + 1)
        return RankVector(
            prob,
            order,
            index,
            iterations_used=int(params.get(f"{name}_iterations", 0)),
            residual=float(params.get(f"{name}_residual", 0.0)),
            converged=bool(params.get(f"{name}_converged", 1)),
        )

    ranking = TwoDRanking(build("pagerank", p, k), build("cheirank", ps, ks))
    return ranking, params
