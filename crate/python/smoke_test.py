"""Smoke test for the cohdist extension module.

Build and install first:
    pip install maturin
    pip install --no-build-isolation -e crates/python
"""

import json
import math

import cohdist


def overlap(u, v):
    return abs(sum(a.conjugate() * b for a, b in zip(u, v)))


def main():
    p = [0.4, 0.3, 0.2, 0.1]
    assert cohdist.permutohedron_contains(p, 2)
    psi, phi = cohdist.construct_pair(p)
    assert overlap(psi, phi) < 1e-10
    assert all(abs(abs(z) ** 2 - q) < 1e-12 for z, q in zip(psi, p))

    fourier = cohdist.fourier_set(5)
    assert max(overlap(fourier[i], fourier[j]) for i in range(5) for j in range(i + 1, 5)) < 1e-12

    r = cohdist.phase_search([2 / 9, 2 / 9, 2 / 9, 1 / 3], 3, seed=7, restarts=100)
    assert not r["found"] and r["residual"] > 1e-3, r

    assert cohdist.qubit_classify(0.5, 0.5) == (2, 4)
    assert cohdist.qubit_classify(0.9, 0.1) == (1, 1)
    assert cohdist.qubit_classify(0.6, 0.6) == (2, 3)

    phi_, theta, res = cohdist.qubit_triple(2 / 3)
    assert abs(phi_ - 2 * math.pi / 3) < 1e-8 and abs(theta - 2 * math.pi / 3) < 1e-8 and res < 1e-10

    for kind, kw in [("w", {"d": 3}), ("qubit-pair", {"a": 0.7, "b": 0.4}), ("outlook", {})]:
        text = cohdist.construct_family(kind, **kw)
        verdict, residual = cohdist.verify_family(text)
        assert verdict and residual < 1e-10, (kind, residual)
    assert len(json.loads(cohdist.construct_family("w", d=2))["members"]) == 4

    status, summary = cohdist.acceptance_criterion(17)
    assert status == "PASS", summary

    try:
        cohdist.construct_pair([0.7, 0.3])
    except ValueError:
        pass
    else:
        raise AssertionError("max p above 1/2 accepted")

    print("cohdist smoke test passed")


if __name__ == "__main__":
    main()
