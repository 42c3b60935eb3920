#!/usr/bin/env python3
"""Convert a preprocessed h5 archive (one group per video holding features,
gtscore, user_summary, change_points, picks, n_frames) into the vasum dataset
layout: manifest.json plus little-endian sidecar files."""

import argparse
import json
import sys
from pathlib import Path

import h5py
import numpy as np


def convert(src, dst, name, protocol, fps):
    dst.mkdir(parents=True, exist_ok=True)
    videos = []
    with h5py.File(src, "r") as h5:
        for key in sorted(h5.keys(), key=lambda k: (len(k), k)):
            g = h5[key]
            features = np.asarray(g["features"], dtype="<f4")
            gtscore = np.asarray(g["gtscore"], dtype="<f4").reshape(-1)
            users = (np.asarray(g["user_summary"]) > 0).astype(np.uint8)
            if users.ndim == 1:
                users = users[None, :]
            picks = np.asarray(g["picks"], dtype=np.int64).reshape(-1)
            n_frames = int(np.asarray(g["n_frames"]).reshape(-1)[0])
            cps = np.asarray(g["change_points"], dtype=np.int64).reshape(-1, 2)
            # Some archives pad user summaries by a frame or two.
            users = users[:, :n_frames]
            if users.shape[1] < n_frames:
                users = np.pad(users, ((0, 0), (0, n_frames - users.shape[1])))
            cps[-1, 1] = min(cps[-1, 1], n_frames - 1)

            features.tofile(dst / f"{key}.features.bin")
            gtscore.tofile(dst / f"{key}.gtscore.bin")
            users.tofile(dst / f"{key}.usersum.bin")
            videos.append({
                "id": key,
                "n_frames": n_frames,
                "fps": fps,
                "P": int(features.shape[0]),
                "D": int(features.shape[1]),
                "U": int(users.shape[0]),
                "picks": picks.tolist(),
                "change_points": cps.tolist(),
                "features_file": f"{key}.features.bin",
                "gtscore_file": f"{key}.gtscore.bin",
                "usersum_file": f"{key}.usersum.bin",
            })
    manifest = {"name": name, "protocol": protocol, "videos": videos}
    (dst / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return len(videos)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("h5", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--name", required=True, help="dataset name, e.g. tvsum or summe")
    ap.add_argument("--protocol", choices=["mean", "max"],
                    help="default: max for summe, mean otherwise")
    ap.add_argument("--fps", type=float, default=30.0)
    args = ap.parse_args(argv)
    protocol = args.protocol or ("max" if "summe" in args.name.lower() else "mean")
    n = convert(args.h5, args.out, args.name, protocol, args.fps)
    print(f"wrote {n} videos to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
