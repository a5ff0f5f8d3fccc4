"""Coboundary verdicts for c_k restricted to the translations, k = 1..KMAX.

Prints the symmetry witness and whether the SNF solver agrees.
"""

import sys

from cocyclegap import coboundary_decide, restrict, standard_phase_cocycle, symmetry_test
from cocyclegap.experiments import zmod_group
from cocyclegap.groups import describe

kmax = int(sys.argv[1]) if len(sys.argv) > 1 else 8
for k in range(1, kmax + 1):
    c = restrict(standard_phase_cocycle(zmod_group(k)), "translations")
    sym = symmetry_test(c)
    fast, snf = coboundary_decide(c), coboundary_decide(c, fast_path=False)
    wit = "-" if sym.symmetric else " ".join(describe(c.group, x) for x in sym.witness)
    print(f"k={k}  symmetric={sym.symmetric!s:5}  witness={wit:11}  fast={fast.verdict:13}  snf={snf.verdict}")
