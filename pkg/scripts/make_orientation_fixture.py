"""Regenerate the orientation-only reconstruction baseline with the brute-force transform."""
from pathlib import Path

import numpy as np

from clifsig.verify import FIXTURE, orientation_outputs

out = Path(__file__).resolve().parents[1] / "src" / "clifsig" / "data" / FIXTURE
np.savez(out, **orientation_outputs(oracle=True))
print(f"wrote {out}")
