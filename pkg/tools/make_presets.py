"""Regenerate src/rbflt/contour_presets.json (calibrated contour parameters).

Run from the repository root: ``python3 tools/make_presets.py``.
"""
import json
import math
import pathlib
import sys
import time

from rbflt.laplace_inversion import _calibrated, spec_to_dict, suite_error, calibration_pairs

# (kind, t0, T, M, suite, oscillation)
ENTRIES = [
    # self-test windows
    *[(k, t0, T, 40, "transform-pairs", None) for k in ("parabolic", "hyperbolic")
      for t0, T in ((0.5, 5.0), (0.3, 3.0), (0.09995, 3.0), (0.05, 1.0), (0.05, 1.8))],
    # problem 1 and its alpha / N studies
    *[("hyperbolic", 0.5, 5.0, M, "manufactured", None) for M in (45, 60, 61, 71, 91)],
    ("parabolic", 0.3, 3.0, 40, "manufactured", None),
    ("parabolic", 0.3, 3.0, 50, "manufactured", None),   # problem 2
    ("parabolic", 0.05, 1.0, 71, "manufactured", None),  # problem 3
    ("parabolic", 1e-4, 1e-3, 40, "manufactured", None),  # continuity check near t = 0
    ("hyperbolic", 0.05, 1.8, 300, "manufactured", (20 * math.pi, 5.0)),  # periodic presets
]


def main(path="src/rbflt/contour_presets.json"):
    out = []
    for kind, t0, T, M, suite, osc in ENTRIES:
        tic = time.perf_counter()
        spec = _calibrated(kind, t0, T, M, suite, osc)
        d = {k: (float(v) if isinstance(v, float) or hasattr(v, "dtype") else v) for k, v in spec_to_dict(spec).items()}
        d["suite"] = suite
        if osc is not None:
            d["oscillation"] = list(osc)
        d["suite_error"] = suite_error(spec, pairs=calibration_pairs(osc, suite))
        out.append(d)
        print(f"{kind:10s} [{t0}, {T}] M={M} {suite} osc={osc}: error {d['suite_error']:.2e} "
              f"({time.perf_counter() - tic:.1f} s)", flush=True)
        # written after every entry so an interrupted run keeps its progress
        pathlib.Path(path).write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main(*sys.argv[1:])
