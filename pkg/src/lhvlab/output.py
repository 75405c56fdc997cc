"""CSV, JSON and SVG emitters plus the run manifest that travels with them."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .analysis import rate_center
from .core import Curve, TheoryConfig
from .kernels import BACKEND

CSV_HEADER = "phi_rad,c,t,e_hv,e_ref,diff_e,rel_dev_t"


def _g(x: float) -> str:
    return "%.12g" % x


def curve_csv(curve: Curve) -> str:
    t = curve.t
    center = rate_center(t)
    lines = [CSV_HEADER]
    for p in curve:
        lines.append(",".join(_g(v) for v in (
            p.phi, p.c, p.t, p.e_hv, p.e_ref, p.e_hv - p.e_ref, p.t / center - 1.0)))
    return "\n".join(lines) + "\n"


def curve_records(curve: Curve) -> list[dict]:
    out = []
    for p in curve:
        rec = {"phi_rad": p.phi, "c": p.c, "t": p.t, "e_hv": p.e_hv, "e_ref": p.e_ref}
        if p.se_e is not None:
            rec["se_e"] = p.se_e
            rec["se_t"] = p.se_t
        out.append(rec)
    return out


@dataclass(frozen=True)
class RunManifest:
    config: dict
    method: str
    seed: int
    version: str = ""
    backend: str = BACKEND
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @classmethod
    def for_run(cls, cfg: TheoryConfig, method: str) -> RunManifest:
        from . import __version__
        return cls(cfg.to_dict(), method, cfg.seed, __version__)

    def to_dict(self) -> dict:
        return {"config": self.config, "method": self.method, "seed": self.seed,
                "version": self.version, "backend": self.backend,
                "timestamp": self.timestamp}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---- SVG -------------------------------------------------------------------

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 20, 20, 50


def _polyline(xs, ys, x0, x1, y0, y1, colour: str, dash: str = "") -> str:
    pw, ph = _W - _ML - _MR, _H - _MT - _MB
    pts = " ".join(
        "%.2f,%.2f" % (_ML + (x - x0) / (x1 - x0) * pw, _MT + (y1 - y) / (y1 - y0) * ph)
        for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{colour}" stroke-width="1.5"{extra} points="{pts}"/>'


def curve_svg(curve: Curve, title: str = "", manifest: RunManifest | None = None) -> str:
    """Static plot of E, t/2 and the QM reference against phi."""
    phi = curve.phi
    series = [
        ("E (model)", curve.e_hv, "#1f77b4", ""),
        ("E (QM)", curve.e_ref, "#555555", "5,4"),
        ("t/2", curve.t / 2.0, "#d62728", ""),
    ]
    ys = np.concatenate([s[1] for s in series])
    y0 = min(-1.0, math.floor(float(ys.min()) * 2) / 2)
    y1 = max(1.0, math.ceil(float(ys.max()) * 2) / 2)
    x0, x1 = 0.0, max(float(phi.max()), 1e-9)
    pw, ph = _W - _ML - _MR, _H - _MT - _MB
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
              f'viewBox="0 0 {_W} {_H}">\n')
    if manifest is not None:
        out.write("<metadata>" + json.dumps(manifest.to_dict(), sort_keys=True)
                  .replace("&", "&amp;").replace("<", "&lt;") + "</metadata>\n")
    out.write(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="white" stroke="black"/>\n')
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        xp = _ML + pw * k / 4
        out.write(f'<text x="{xp:.1f}" y="{_H - _MB + 18}" font-size="11" '
                  f'text-anchor="middle">{xv:.3g}</text>\n')
    nticks = int(round((y1 - y0) / 0.5))
    for k in range(nticks + 1):
        yv = y0 + 0.5 * k
        yp = _MT + ph * (1 - k / nticks)
        out.write(f'<text x="{_ML - 6}" y="{yp + 4:.1f}" font-size="11" '
                  f'text-anchor="end">{yv:.3g}</text>\n')
    if y0 < 0 < y1:
        yp = _MT + ph * (y1 / (y1 - y0))
        out.write(f'<line x1="{_ML}" x2="{_ML + pw}" y1="{yp:.1f}" y2="{yp:.1f}" stroke="#bbbbbb"/>\n')
    out.write(f'<text x="{_ML + pw / 2}" y="{_H - 12}" font-size="12" '
              f'text-anchor="middle">phi (rad)</text>\n')
    if title:
        out.write(f'<text x="{_ML + 8}" y="{_MT + 16}" font-size="12">{title}</text>\n')
    for i, (name, y, colour, dash) in enumerate(series):
        out.write(_polyline(phi, y, x0, x1, y0, y1, colour, dash) + "\n")
        ly = _MT + 36 + 16 * i
        lx = _ML + pw - 120
        out.write(f'<line x1="{lx}" x2="{lx + 24}" y1="{ly}" y2="{ly}" stroke="{colour}" '
                  f'stroke-width="1.5"' + (f' stroke-dasharray="{dash}"' if dash else "") + "/>\n")
        out.write(f'<text x="{lx + 30}" y="{ly + 4}" font-size="11">{name}</text>\n')
    out.write("</svg>\n")
    return out.getvalue()
