"""Smoke test for the pysymext extension module.

Build with `cargo build -p symext-py --release` and copy
target/release/libpysymext.so next to this file as pysymext.so.
"""

import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pysymext as sx


def close(a, b, tol):
    return all(abs(x - y) <= tol for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def main():
    assert sx.list_diagrams(4) == [(4, 0), (3, 1), (2, 2)]
    assert sx.hook_dim((3, 1)) == 3
    assert abs(sx.alpha_coeff((2, 0), -2, 0) - 1 / math.sqrt(2)) < 1e-12

    rho, blocks = sx.gen_random_extendible(4, 2, 7, "exclude-bosonic")
    assert rho.layout == [2, 2]
    assert close(blocks.marginal().matrix(), rho.matrix(), 1e-12)

    sigma = sx.sym_to_bos(blocks)
    checks = sx.verify_extension(sigma, rho, 4)
    assert checks["bosonic_extension"], checks

    report = sx.solve_symmetric(rho, 4, sx.SolverConfig(seed=1))
    assert report.status == "FEASIBLE", str(report)
    cert = report.certificate()
    assert close(cert.marginal().matrix(), rho.matrix(), 1e-7)

    singlet = [[0, 0, 0, 0], [0, 0.5, -0.5, 0], [0, -0.5, 0.5, 0], [0, 0, 0, 0]]
    s = sx.DensityMatrix([[complex(x) for x in row] for row in singlet], [2, 2])
    assert sx.solve_bosonic(s, 2).status == "INFEASIBLE"
    _, ppt, min_ev = sx.tilde_state(s, 2)
    assert not ppt and abs(min_ev + 0.125) < 1e-10

    q = sx.qutrit_marginal()
    assert sx.solve_bosonic_k2_generic(q, 3).status == "INFEASIBLE"

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "sigma.state")
        sigma.save(path, seed=7)
        again = sx.BosonicState.load(path)
        assert again.matrix() == sigma.matrix()

    try:
        sx.DensityMatrix([[1.0 + 0j, 0j], [0j, 1.0 + 0j]], [2])
    except ValueError:
        pass
    else:
        raise AssertionError("unnormalized state accepted")

    print("pysymext smoke test: PASS")


if __name__ == "__main__":
    main()
