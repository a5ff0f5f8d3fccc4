"""||pi_k(g_1) + ... + pi_k(g_m)|| for small k: matrix-free value next to the dense SVD."""

import sys

from cocyclegap.experiments import SpectralConfig, cmd_norm_single

m = int(sys.argv[1]) if len(sys.argv) > 1 else 3
for k in range(1, 6):
    r = cmd_norm_single(k, m, SpectralConfig())
    dense = r.get("dense_norm")
    dense_s = f"{dense:.12f}" if dense is not None else "n/a (dim > 2000)"
    print(f"k={k} dim={r['dim']:5} norm={r['norm']['value']:.12f} dense={dense_s} gap={r['gap']:.6f}")
