"""The command-line pipeline: solve from a JSON config, inspect the trace,
and round-trip the binary field/metric snapshots.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

import torusma as tm
from torusma import cli

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    config = {
        "n": 1,
        "N": 64,
        "F": "0.3*sin(2*pi*x1)*sin(2*pi*y1)",
        "background": "flat",
    }
    cfg_path = tmp / "config.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp / "run"

    rc = cli.main(["solve", "--config", str(cfg_path), "--out", str(out)])
    print("solve exit code:", rc)

    print("\nmanifest:")
    manifest = json.loads((out / "manifest.json").read_text())
    print(json.dumps({k: manifest[k] for k in ("converged", "t_reached", "outputs")},
                     indent=2))

    print("\ntrace table:")
    cli.main(["report", str(out / "trace.json"), "--csv", str(tmp / "steps.csv")])

    # binary snapshots round-trip bit-exactly
    phi = tm.read_field(out / "phi.cmaf")
    tm.write_field(tmp / "copy.cmaf", phi)
    again = tm.read_field(tmp / "copy.cmaf")
    print("\nround-trip bit-exact:", np.array_equal(phi.values, again.values))
