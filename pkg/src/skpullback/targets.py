"""Printed reference values from the two worked examples, kept in one place.

Decimal targets are strings so that no digits are lost; tolerances are the
acceptance tolerances.
"""

from fractions import Fraction

import mpmath

# Example 1: f in S_18(SL2(Z)), g = Delta in S_12(SL2(Z)), kappa = 11, kappa' = 9, N = 1
EXAMPLE_1 = {
    "C": Fraction(1),
    "petersson_g": "0.0000010353620568043209223478168122251645",
    "petersson_tol": 1e-8,
    "kz_ratio": "75633.942121560198996880460854760845132468",
    "kz_tol": 1e-6,
    "lambda_sym2": "0.0053135057875930754652200977341472154100",
    "lambda_tol": 1e-8,
    # |(3/2) c(3) + c(4)|; the signed sum is -1/2
    "pullback_ratio_abs": Fraction(1, 2),
    "h_leading": {3: 1, 4: -2, 7: -16, 8: 36, 11: 99},
}

# Example 2: f = g in S_2(Gamma0(15)), kappa = kappa' = 1, N = 15
EXAMPLE_2 = {
    "C": Fraction(1),
    "petersson_g": "0.0023596244145167680294160631624014882733",
    "petersson_tol": 1e-6,
    "kz_ratio": "1.0161993600970582320694739236097011625363",
    "kz_tol": 1e-6,
    "lambda_sym2": "0.0034762890966413331251690052554140352448",
    "lambda_tol": 1e-6,
    "pullback_ratio_abs": Fraction(2),
    "h_leading": {3: 1, 8: -2, 15: -1, 20: 2, 23: 2},
}

THEOREM_TOL = 1e-4


def _as_mpf(table: dict) -> dict:
    out = {}
    for k, v in table.items():
        out[k] = mpmath.mpf(v) if isinstance(v, str) else v
    return out


class _Lazy(dict):
    """Decimal strings become mpf at the precision in force when first read."""

    def __getitem__(self, key):
        return _as_mpf(dict.__getitem__(self, key))


EXAMPLES = _Lazy({1: EXAMPLE_1, 2: EXAMPLE_2})
