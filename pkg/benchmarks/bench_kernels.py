"""Time the compiled and pure-Python kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row is the best of ``--repeat`` runs, in microseconds per call.
"""

import argparse
import math
import timeit

import numpy as np

from chdom import kernels
from chdom.zgeom import e_array, m_array


def _blocks(rng, n):
    xs = np.exp(rng.uniform(math.log(0.05), math.log(20), n))
    return np.stack([m_array(x, a) @ e_array(int(d)) for x, a, d in
                     zip(xs, rng.uniform(0, 2 * math.pi, n), rng.choice([-1, 1], n))])


def cases(k, rng):
    chain12 = _blocks(rng, 12)
    chain50 = _blocks(rng, 50)
    mat, _ = k.chain_product(chain12)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return {
        "chain_product(12)": lambda: k.chain_product(chain12),
        "chain_product(50)": lambda: k.chain_product(chain50),
        "eigvals3": lambda: k.eigvals3(mat),
        "eigvals3(random)": lambda: k.eigvals3(a),
        "gelfand_log(10)": lambda: k.gelfand_log(mat, 10),
        "normalize": lambda: k.normalize(a),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=2000)
    args = p.parse_args(argv)
    backends = kernels.available_backends()
    names = sorted(backends)
    table = {}
    for name in names:
        for label, fn in cases(backends[name], np.random.default_rng(0)).items():
            best = min(timeit.repeat(fn, number=args.number, repeat=args.repeat))
            table.setdefault(label, {})[name] = 1e6 * best / args.number
    width = max(map(len, table)) + 2
    print("kernel".ljust(width) + "".join(n.rjust(12) for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, row in table.items():
        line = label.ljust(width) + "".join(f"{row[n]:12.2f}" for n in names)
        if len(names) > 1:
            line += f"{row['python'] / row['cython']:9.1f}x"
        print(line)
    if len(names) == 1:
        print("(compiled backend not built; run `python3 setup.py build_ext --inplace`)")


if __name__ == "__main__":
    main()
