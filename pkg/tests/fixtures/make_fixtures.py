"""Regenerate frozen reference data with the direct Lie-series normalizer.

Run from the repository root: ``python3 tests/fixtures/make_fixtures.py``.
The recursive normalizer is deliberately not used here.
"""
import json
import math
from pathlib import Path

from lyapnorm.normalform import oracle_normalize
from lyapnorm.poly import GradedSeries, Polynomial, to_json_obj
from lyapnorm.resonance import Mode, Spectrum

HERE = Path(__file__).parent


def model_m():
    x1, x2, y1, y2 = (Polynomial.coordinate(2, i) for i in range(4))
    lam = (1j, 1j * math.sqrt(2))
    return lam, Polynomial.quadratic(lam) + (x1 + y1) ** 2 * (x2 + y2)


def main():
    lam, H = model_m()
    spec = Spectrum(lam, Mode.LYAPUNOV)
    spec = spec.with_gamma()
    Zs, chis, _ = oracle_normalize(GradedSeries.from_polynomial(H), spec, 4, 8)
    doc = {
        "model": to_json_obj(H),
        "lambda": [[v.real, v.imag] for v in lam],
        "mode": "thm1",
        "order": 4,
        "trunc_order": 8,
        "Z": [to_json_obj(z) for z in Zs],
        "chi": [to_json_obj(c) for c in chis],
    }
    (HERE / "model_m_order4.json").write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


if __name__ == "__main__":
    main()
