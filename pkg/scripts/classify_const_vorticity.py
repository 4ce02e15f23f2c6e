"""
Root-count classification for constant vorticity, printed as a small atlas.

For a few values of xi = 4 sigma / (d^5 gamma^2) the script reports the
branch landmarks (y_-, y_+, max of b^-, the axis speed) and then classifies
a ladder of surface speeds c against them.
"""

import sys
from pathlib import Path

import numpy as np

try:
    import capjet
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    import capjet

from capjet import ConstVortCase, b_pm, classify_root_count, max_b_minus, verify_inequalities

report = verify_inequalities()
print("inequality certificates:")
for row in report.rows:
    print(f"  {row.name:<24} min margin {row.min_margin:.3e} at x = {row.x_at_min:.4g}")
print()

for gamma0 in (5.0, 3.5, 3.0, 2.5):
    case = ConstVortCase(d=1.0, sigma=1.0, gamma0=gamma0)
    print(f"gamma0 = {gamma0}: xi = {case.xi:.6f}")
    print(f"  b-(0) = {b_pm(0.0, -1, case):.6f}   b+(0) = y+ = {case.y_plus:.6f}")
    c_ladder = list(np.linspace(-2.2, -0.4, 7))
    if case.xi < capjet.closed_form.XI_STAR:
        x_star, b_star = max_b_minus(case)
        print(f"  interior max of b-: {b_star:.6f} at x = {x_star:.4f}")
        # a speed between y_- and the interior max admits two roots
        c_ladder.append(0.5 * (case.y_minus + b_star))
    for c in sorted(c_ladder):
        kind = classify_root_count(float(c), case)
        print(f"    c = {c:+.4f}  ->  {kind.value}")
    print()
