"""Deliberately naive transcription of the formulas in docs/model-notes.md.

Line-by-line, Fortran-style indexing through accessor closures, triple
Python loop, no numpy arithmetic. Kept independent of pwadvect.kernel so it
can serve as a dual-implementation oracle: both must agree bit-for-bit.
"""

import numpy as np

from pwadvect.grid import SourceSet, zeros_sources


def naive_sources(fields, coeffs) -> SourceSet:
    dims = fields.dims
    nx, ny, nz = dims.nx, dims.ny, dims.nz
    ud, vd, wd = fields.u.data, fields.v.data, fields.w.data

    def u(k, j, i):
        return float(ud[i, j, k - 1])

    def v(k, j, i):
        return float(vd[i, j, k - 1])

    def w(k, j, i):
        return float(wd[i, j, k - 1])

    tcx = float(coeffs.tcx)
    tcy = float(coeffs.tcy)
    tzc1 = [float("nan")] + [float(c) for c in coeffs.tzc1]  # 1-based
    tzc2 = [float("nan")] + [float(c) for c in coeffs.tzc2]

    out = zeros_sources(dims)
    su, sv, sw = out.su.data, out.sv.data, out.sw.data

    for i in range(1, nx + 1):
        for j in range(1, ny + 1):
            for k in range(2, nz + 1):
                s = tcx * (u(k, j, i - 1) * (u(k, j, i) + u(k, j, i - 1))
                           - u(k, j, i + 1) * (u(k, j, i) + u(k, j, i + 1)))
                s = s + tcy * (u(k, j - 1, i) * (v(k, j - 1, i) + v(k, j - 1, i + 1))
                               - u(k, j + 1, i) * (v(k, j, i) + v(k, j, i + 1)))
                if k < nz:
                    s = s + (tzc1[k] * u(k - 1, j, i) * (w(k - 1, j, i) + w(k - 1, j, i + 1))
                             - tzc2[k] * u(k + 1, j, i) * (w(k, j, i) + w(k, j, i + 1)))
                else:
                    s = s + tzc1[k] * u(k - 1, j, i) * (w(k - 1, j, i) + w(k - 1, j, i + 1))
                su[i, j, k - 1] = s

                s = tcx * (v(k, j, i - 1) * (u(k, j, i - 1) + u(k, j + 1, i - 1))
                           - v(k, j, i + 1) * (u(k, j, i) + u(k, j + 1, i)))
                s = s + tcy * (v(k, j - 1, i) * (v(k, j, i) + v(k, j - 1, i))
                               - v(k, j + 1, i) * (v(k, j, i) + v(k, j + 1, i)))
                if k < nz:
                    s = s + (tzc1[k] * v(k - 1, j, i) * (w(k - 1, j, i) + w(k - 1, j + 1, i))
                             - tzc2[k] * v(k + 1, j, i) * (w(k, j, i) + w(k, j + 1, i)))
                else:
                    s = s + tzc1[k] * v(k - 1, j, i) * (w(k - 1, j, i) + w(k - 1, j + 1, i))
                sv[i, j, k - 1] = s

                s = tcx * (w(k, j, i - 1) * (u(k - 1, j, i - 1) + u(k, j, i - 1))
                           - w(k, j, i + 1) * (u(k - 1, j, i) + u(k, j, i)))
                s = s + tcy * (w(k, j - 1, i) * (v(k - 1, j - 1, i) + v(k, j - 1, i))
                               - w(k, j + 1, i) * (v(k - 1, j, i) + v(k, j, i)))
                if k < nz:
                    s = s + (tzc1[k] * w(k - 1, j, i) * (w(k, j, i) + w(k - 1, j, i))
                             - tzc2[k] * w(k + 1, j, i) * (w(k, j, i) + w(k + 1, j, i)))
                else:
                    s = s + tzc1[k] * w(k - 1, j, i) * (w(k, j, i) + w(k - 1, j, i))
                sw[i, j, k - 1] = s
    return out


def naive_lcg_doubles(seed: int, count: int) -> np.ndarray:
    """Sequential transcription of the documented LCG recurrence."""
    out = np.empty(count)
    state = seed & 0xFFFFFFFFFFFFFFFF
    for n in range(count):
        state = (6364136223846793005 * state + 1442695040888963407) & 0xFFFFFFFFFFFFFFFF
        out[n] = (state >> 11) * 2.0**-53
    return out
