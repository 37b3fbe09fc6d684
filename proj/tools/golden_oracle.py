#!/usr/bin/env python3
"""Independent NumPy implementation of the extraction chain.

Reads a campaign manifest plus its Touchstone sweeps and writes one RCS grid
CSV per band (theta rows x phi columns, dBsm). The C++ test suite compares
`rcs extract` output against grids produced here, so nothing in this file
calls into the C++ code.

    python3 tools/golden_oracle.py camp/manifest.json tests/golden/agv
"""

import json
import math
import os
import sys

import numpy as np

C = 299792458.0
PAD = 4
TAPER_ALPHA = 0.25
MIN_WEIGHT = 0.01
NOISE_FLOOR_DB = 10.0
EXTENT_PER_DIAGONAL = 1.5

UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


def read_s1p(path):
    unit, fmt = 1e9, "MA"
    freqs, vals = [], []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("#"):
                tok = line[1:].upper().split()
                for t in tok:
                    if t in UNITS:
                        unit = UNITS[t]
                    elif t in ("RI", "MA", "DB"):
                        fmt = t
                continue
            f, a, b = (float(x) for x in line.split())
            freqs.append(f * unit)
            if fmt == "RI":
                vals.append(complex(a, b))
            else:
                mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
                vals.append(mag * complex(math.cos(math.radians(b)), math.sin(math.radians(b))))
    return np.array(freqs), np.array(vals)


def hann(n):
    u = np.arange(n) / (n - 1)
    return 0.5 - 0.5 * np.cos(2 * np.pi * u)


def tukey_at(u, alpha):
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    edge = np.minimum(u, 1 - u)
    taper = edge < alpha / 2
    out[taper] = 0.5 * (1 - np.cos(2 * np.pi * edge[taper] / alpha))
    out[(u < 0) | (u > 1)] = 0.0
    return out


def profile(x, w):
    n = len(x)
    m = PAD * n
    padded = np.zeros(m, dtype=complex)
    padded[:n] = x * w
    # numpy's ifft divides by m; undo it and apply 1/(n * mean(w)).
    return np.fft.ifft(padded) * m / (n * w.mean())


def refine_peak(xw, df, lo, hi):
    i = np.arange(len(xw))

    def slope(t):
        term = xw * np.exp(1j * 2 * np.pi * i * df * t)
        p = term.sum()
        dp = (1j * 2 * np.pi * i * df * term).sum()
        return (np.conj(p) * dp).real

    mid = 0.5 * (lo + hi)
    if not (slope(lo) > 0 and slope(hi) < 0):
        return mid
    for _ in range(64):
        m = 0.5 * (lo + hi)
        if m <= lo or m >= hi:
            break
        if slope(m) > 0:
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def gate_center(x, df, distance, extent):
    n = len(x)
    w = hann(n)
    p = profile(x, w)
    m = len(p)
    dt = 1.0 / (m * df)
    period = m * dt
    expected = math.fmod(2 * distance / C, period)
    guard = 2 * extent / C
    t = np.arange(m) * dt
    off = np.fmod(t - expected, period)
    off = np.where(off >= period / 2, off - period, off)
    off = np.where(off < -period / 2, off + period, off)
    mags = np.abs(p)
    inside = np.abs(off) <= guard
    if not inside.any():
        raise RuntimeError("empty guard window")
    best = int(np.flatnonzero(inside)[np.argmax(mags[inside])])
    if mags[best] < np.median(mags) * 10 ** (NOISE_FLOOR_DB / 20):
        raise RuntimeError("peak below noise floor")
    center = refine_peak(x * w, df, best * dt - dt, best * dt + dt)
    return math.fmod(center, period) % period


def apply_gate(x, df, center, span):
    n = len(x)
    i = np.arange(n)
    w = hann(n)
    shifted = x * np.exp(1j * 2 * np.pi * i * df * center)
    p = profile(shifted, w)
    m = len(p)
    dt = 1.0 / (m * df)
    k = np.arange(m)
    t = np.where(k < (m + 1) // 2, k * dt, k * dt - m * dt)
    p = p * tukey_at((t + span / 2) / span, TAPER_ALPHA)
    back = np.fft.fft(p)[:n] * (n * w.mean()) / m
    return back * np.exp(-1j * 2 * np.pi * i * df * center)


def extract(tg, bg, sph, sbg, df, manifest, extent):
    r = manifest["sphere"]["radius_m"]
    d_sph = manifest["sphere"]["distance_m"]
    d_tg = manifest["target"]["distance_m"]
    t = tg - bg
    s = sph - sbg
    span = 4 * extent / C
    tg_gated = apply_gate(t, df, gate_center(t, df, d_tg, extent), span)
    sp_gated = apply_gate(s, df, gate_center(s, df, d_sph, extent), span)
    w = hann(len(t))
    valid = w >= MIN_WEIGHT * w.max()
    ratio = tg_gated[valid] / sp_gated[valid]
    sqrt_sigma = math.sqrt(math.pi * r * r) * (d_tg / d_sph) ** 2 * ratio
    rcs = float(np.mean(np.abs(sqrt_sigma) ** 2))
    return 10 * math.log10(rcs)


def udeg(v):
    return int(round(v * 1e6))


def main(manifest_path, out_prefix):
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    base = os.path.dirname(os.path.abspath(manifest_path))
    tgt = manifest["target"]
    extent = max(0.1, EXTENT_PER_DIAGONAL * math.sqrt(tgt["length_m"] ** 2 + tgt["width_m"] ** 2 + tgt["height_m"] ** 2))

    for band in manifest["bands"]:
        name = band["name"]
        entries = {}
        for e in manifest["entries"]:
            if e["band"] == name:
                entries[(udeg(e["theta_deg"]), udeg(e["phi_deg"]), e["scenario"])] = e

        def lookup(theta, phi, scenario):
            if (theta, phi, scenario) in entries:
                return entries[(theta, phi, scenario)]
            keys = sorted(k for k in entries if k[2] == scenario)
            same = [k for k in keys if k[0] == theta]
            if same:
                return entries[same[0]]
            return entries[keys[0]] if keys else None

        def load(e):
            f, v = read_s1p(os.path.join(base, e["path"]))
            return f, v

        cells = {}
        for key in sorted(k for k in entries if k[2] == "target"):
            theta, phi, _ = key
            f, tg = load(entries[key])
            _, bg = load(entries[(theta, phi, "background")])
            sph_e = lookup(theta, phi, "sphere")
            _, sph = load(sph_e)
            sbg_e = lookup(theta, phi, "sphere_background")
            if sbg_e is None:
                sbg_e = entries[(udeg(sph_e["theta_deg"]), udeg(sph_e["phi_deg"]), "background")]
            _, sbg = load(sbg_e)
            df = (band["f_stop_hz"] - band["f_start_hz"]) / (band["n_samples"] - 1)
            cells[(theta, phi)] = extract(tg, bg, sph, sbg, df, manifest, extent)

        thetas = sorted({k[0] for k in cells})
        phis = sorted({k[1] for k in cells})
        if manifest.get("mirror_azimuth", False):
            phis = sorted(set(phis) | {360_000_000 - p for p in phis if 0 < p < 180_000_000})
        lines = ["theta_deg\\phi_deg," + ",".join(repr(p / 1e6) for p in phis)]
        for t in thetas:
            row = [repr(t / 1e6)]
            for p in phis:
                src = (t, p) if (t, p) in cells else (t, 360_000_000 - p)
                row.append(repr(cells[src]) if src in cells else "")
            lines.append(",".join(row))
        path = f"{out_prefix}_{name}_grid.csv"
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {path} ({len(cells)} measured cells)")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
