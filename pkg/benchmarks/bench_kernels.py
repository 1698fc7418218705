"""Compare the numba and pure-numpy kernels on representative shapes.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Shapes follow the workloads the package actually runs: tall-skinny QR of a
sketch (1000 x 38, 25344 x 40) and soft thresholding of a 500 x 500 RPCA
residual. Reports the best wall time of ``--repeat`` runs per backend.
"""
import argparse
import timeit

import numpy as np

from sorsvd import _kernels
from sorsvd._accel import HAVE_NUMBA
from sorsvd.core import gaussian_matrix

CASES = [
    ("householder_qr", (1000, 38)),
    ("householder_qr", (5000, 100)),
    ("householder_qr", (25344, 40)),
    ("soft_threshold", (500, 500)),
    ("soft_threshold", (2000, 2000)),
]


def _args_for(kernel, shape):
    a = gaussian_matrix(*shape, seed=7)
    return (a,) if kernel == "householder_qr" else (a, 0.5)


def run(repeat):
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels can be timed")
    print(f"{'kernel':<16}{'shape':>14}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for kernel, shape in CASES:
        args = _args_for(kernel, shape)
        f_np = getattr(_kernels, f"{kernel}_np")
        t_np = min(timeit.repeat(lambda: f_np(*args), number=1, repeat=repeat))
        if HAVE_NUMBA:
            f_nb = getattr(_kernels, f"{kernel}_nb")
            f_nb(*args)  # compile outside the timed region
            t_nb = min(timeit.repeat(lambda: f_nb(*args), number=1, repeat=repeat))
            out_np, out_nb = f_np(*args), f_nb(*args)
            if kernel == "householder_qr":
                diff = np.max(np.abs(out_np[0] @ out_np[1] - out_nb[0] @ out_nb[1]))
            else:
                diff = np.max(np.abs(out_np - out_nb))
            assert diff < 1e-10, f"{kernel} backends disagree by {diff}"
            print(f"{kernel:<16}{str(shape):>14}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.2f}x")
        else:
            print(f"{kernel:<16}{str(shape):>14}{t_np:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    run(ap.parse_args().repeat)
