"""Trace CSV files: one row per recorded sample.

Columns: time, x0_1..x0_n, xt_i_k (global error of follower i on stage k,
row-major in i then k), psi_i_k (same layout), V_1..V_n, budget_active.
Numbers carry 17 significant digits so a binary64 value round-trips exactly;
separator is a comma, newline is LF, no locale formatting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedTrace
from .sim import SimResult


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def header_columns(N: int, n: int) -> list[str]:
    cols = ["time"]
    cols += [f"x0_{k}" for k in range(1, n + 1)]
    cols += [f"xt_{i}_{k}" for i in range(1, N + 1) for k in range(1, n + 1)]
    cols += [f"psi_{i}_{k}" for i in range(1, N + 1) for k in range(1, n + 1)]
    cols += [f"V_{k}" for k in range(1, n + 1)]
    cols.append("budget_active")
    return cols


def write_trace(result: SimResult, path: str):
    S, N, n = result.estimate_errors.shape
    cols = header_columns(N, n)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for s in range(S):
            row = [result.times[s]]
            row += list(result.leader_states[s])
            row += list(result.estimate_errors[s].reshape(-1))
            row += list(result.local_errors[s].reshape(-1))
            row += list(result.lyapunov[s])
            row.append(result.decay_bound[s])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


@dataclass(frozen=True)
class TraceData:
    """Arrays read back from a trace CSV."""

    times: np.ndarray          # (S,)
    leader_states: np.ndarray  # (S, n)
    estimate_errors: np.ndarray  # (S, N, n)
    local_errors: np.ndarray     # (S, N, n)
    lyapunov: np.ndarray         # (S, n)
    decay_bound: np.ndarray      # (S,)

    @property
    def follower_count(self) -> int:
        return self.estimate_errors.shape[1]

    @property
    def order(self) -> int:
        return self.estimate_errors.shape[2]


def read_trace(path: str) -> TraceData:
    """Parse a trace CSV, recovering N and n from the header.

    Raises MalformedTrace for an unreadable file, an unexpected header, a row
    of the wrong width, non-numeric fields, or a file with no data rows.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MalformedTrace(f"cannot read trace: {exc}") from None
    if not lines:
        raise MalformedTrace("empty file")
    header = lines[0].split(",")
    n = sum(1 for c in header if c.startswith("x0_"))
    nxt = sum(1 for c in header if c.startswith("xt_"))
    if n < 1 or nxt < 1 or nxt % n != 0:
        raise MalformedTrace(f"unrecognized header: {lines[0][:80]}")
    N = nxt // n
    if header != header_columns(N, n):
        raise MalformedTrace("header does not match the expected column layout")
    expected = len(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != expected:
            raise MalformedTrace(
                f"line {lineno}: expected {expected} fields, got {len(fields)}"
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise MalformedTrace(f"line {lineno}: non-numeric field") from None
    if not rows:
        raise MalformedTrace("trace has a header but no data rows")
    data = np.array(rows)
    S = data.shape[0]
    pos = 1
    leader = data[:, pos : pos + n]
    pos += n
    xt = data[:, pos : pos + N * n].reshape(S, N, n)
    pos += N * n
    psi = data[:, pos : pos + N * n].reshape(S, N, n)
    pos += N * n
    V = data[:, pos : pos + n]
    pos += n
    budget = data[:, pos]
    return TraceData(
        times=data[:, 0],
        leader_states=leader,
        estimate_errors=xt,
        local_errors=psi,
        lyapunov=V,
        decay_bound=budget,
    )
