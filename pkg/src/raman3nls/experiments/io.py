"""File formats: spectra text files, diagnostics CSV, JSON reports."""

from __future__ import annotations

import csv
import json
import os
import re
from pathlib import Path

import numpy as np

from ..integrator import DiagnosticsRecord
from ..spectral_core import SpectralState

_HEADER = re.compile(r"^# N=(\d+) time=(\S+)$")


def write_spectra(state: SpectralState, path: str | os.PathLike) -> None:
    """One `k,re,im` line per mode in ascending k under a `# N=<N> time=<t>` header."""
    # repr of a built-in float is the shortest exact round-trip form
    lines = [f"# N={state.trunc} time={float(state.time)!r}"]
    for k, c in zip(state.k, state.coeffs):
        lines.append(f"{k},{float(c.real)!r},{float(c.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_spectra(path: str | os.PathLike) -> SpectralState:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    m = _HEADER.match(text[0]) if text else None
    if m is None:
        raise ValueError(f"{path}: missing '# N=<N> time=<t>' header")
    N, time = int(m.group(1)), float(m.group(2))
    coeffs = np.zeros(2 * N + 1, dtype=np.complex128)
    seen = set()
    for line in text[1:]:
        if not line.strip():
            continue
        k, re_, im_ = line.split(",")
        k = int(k)
        if abs(k) > N or k in seen:
            raise ValueError(f"{path}: bad mode {k}")
        seen.add(k)
        coeffs[k + N] = complex(float(re_), float(im_))
    return SpectralState(coeffs, N, time)


def _hs_label(s: float) -> str:
    return f"h{s:g}"


def diagnostics_columns(diag: DiagnosticsRecord) -> list[str]:
    """t, l2, momentum, h1, then the other Sobolev norms, then abs_k<probe> columns."""
    extra = [s for s in diag.hs_norms if s != 1.0]
    return (["t", "l2", "momentum", "h1"] + [_hs_label(s) for s in extra]
            + [f"abs_k{p}" for p in diag.mode_abs])


def write_diagnostics(diag: DiagnosticsRecord, path: str | os.PathLike, h1: np.ndarray | None = None) -> None:
    """Write the diagnostics table; ``h1`` is taken from the record when it tracks s = 1."""
    if h1 is None:
        if 1.0 not in diag.hs_norms:
            raise ValueError("diagnostics record does not track the H^1 norm")
        h1 = diag.hs_norms[1.0]
    extra = [s for s in diag.hs_norms if s != 1.0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(diagnostics_columns(diag))
        for j, t in enumerate(diag.times):
            row = [t, diag.l2[j], diag.momentum[j], h1[j]]
            row += [diag.hs_norms[s][j] for s in extra]
            row += [diag.mode_abs[p][j] for p in diag.mode_abs]
            writer.writerow([repr(float(x)) for x in row])


def write_rows(rows: list[dict], columns: list[str], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row[c] for c in columns})


def write_json(obj, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n",
                          encoding="utf-8")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serialisable: {type(x).__name__}")
