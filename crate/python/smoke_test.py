"""Smoke test for the `qmp` Python extension.

Build and install first:

    cd crates/qmp-py && maturin build --release -o dist && pip install dist/qmp-*.whl

Then run `python3 python/smoke_test.py`. Exits non-zero on the first failed check.
"""

import math
import sys
from fractions import Fraction

import qmp


def check(name, cond):
    print(("ok   " if cond else "FAIL ") + name)
    if not cond:
        sys.exit(1)


def main():
    check("kronecker([2,1]^3) == 1", qmp.kronecker([2, 1], [2, 1], [2, 1]) == 1)
    check(
        "kronecker matches brute force at k = 5",
        qmp.kronecker([3, 2], [3, 1, 1], [2, 2, 1]) == qmp.kronecker_bruteforce([3, 2], [3, 1, 1], [2, 2, 1]),
    )
    check("stretch of (1,1)^3 alternates", qmp.stretch([1, 1], [1, 1], [1, 1], 4) == [0, 1, 0, 1])
    check("littlewood_richardson", qmp.littlewood_richardson([2, 1], [2, 1], [3, 2, 1]) == 2)
    check("contingency tables", qmp.contingency_count(2, [1, 1], [1, 1], [1, 1]) == 4)
    check("big integers are Python ints", isinstance(qmp.kronecker([5000, 5000], [5000, 5000], [5000, 5000]), int))

    mp = qmp.marginal_polytope([2, 2, 2])
    verts = sorted(tuple(v) for v in mp.vertices())
    half = Fraction(1, 2)
    expect = sorted([(1, 1, 1), (1, half, half), (half, 1, half), (half, half, 1), (half, half, half)])
    check("three-qubit polytope vertices", verts == expect)
    check("polytope membership", mp.contains(["3/4", "3/4", "3/4"]) and not mp.contains([1, 1, "1/2"]))

    for n in range(1, 7):
        check(f"bosonic linear entropy n={n}", qmp.average_linear_entropy_bosonic(n) == Fraction(1, 2) - Fraction(1, 2 * n))

    f = qmp.eigenvalue_density(dims=[2, 3])
    check("Lloyd-Pagels (2,3) has mass 1", f.total_mass() == 1 and f.singular_walls == 0)
    x = Fraction(1, 3)
    half = Fraction(1, 2)
    check("Lloyd-Pagels (2,3) value", f([x]) == Fraction(15, 2) * (x**2 - x**4))
    check("two-qubit density is 3x^2", qmp.eigenvalue_density(dims=[2, 2])([half]) == Fraction(3, 4))

    bell = qmp.Submodule(2, 2, [[1, 0, 1, 0], [0, 1, 0, 1]])
    s = bell.entropies()
    check("Bell entropies (1, 1, 0)", (s[(1,)], s[(2,)], s[(1, 2)]) == (1, 1, 0))
    check("Bell classical entropy", bell.classical_entropies()[(1,)] == 2)
    m = qmp.Submodule(2, 6, [[2, 0, 0, 0]])
    check("cardinality product", m.cardinality() * m.complement().cardinality() == 6**4)
    check("double complement", m.complement().complement() == m)

    sweep = {r["family"]: r for r in qmp.stabilizer_sweep(3, 2, ["ssa", "mono"])}
    check("three-qubit SSA sweep", sweep["ssa"]["violations"] == 0 and sweep["ssa"]["min_slack"] == 0)
    check("monotonicity is violated", sweep["mono"]["violations"] > 0)

    w = [0, 1, 1, 0, 1, 0, 0, 0]
    res = qmp.flow_to_minimum([2, 2, 2], [complex(a) for a in w])
    check("W state is critical", all(abs(l - 2 / 3) < 1e-4 for l in res["lambda"]) and res["converged"])
    psi = qmp.haar_state([2, 2], 1)
    check("Haar state is normalized", math.isclose(sum(abs(a) ** 2 for a in psi), 1.0, rel_tol=1e-12))
    lam = qmp.max_eigenvalues([2, 2], psi)
    check("two-qubit marginals are isospectral", math.isclose(lam[0], lam[1], rel_tol=1e-9))

    try:
        qmp.Submodule(1, 1, [[0, 0]])
        check("invalid modulus raises", False)
    except ValueError:
        check("invalid modulus raises", True)
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
