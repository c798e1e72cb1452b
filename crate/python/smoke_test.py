"""Smoke test for the ccr_py extension module."""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import ccr_py


def main():
    half = ccr_py.Phase(1, 2)
    assert str(half) == "1/2" and half.order() == 2
    assert (half * half).is_one()
    assert abs(complex(half) - (-1)) < 1e-12
    assert (ccr_py.Phase(1, 3) ** 3).is_one()

    t = ccr_py.Triple.pauli()
    assert t.dimension() == 4 and t.rank == 2
    assert t.theta(0, 1) == half
    assert t.is_full_matrix()
    assert t.center() == [[0, 0]]

    ua, ub = t.generator(0), t.generator(1)
    assert ua * ub == (ub * ua).scale(half)
    uab = t.monomial([1, 1])
    exact, value = (uab * uab).trace()
    assert exact == "-1" and abs(value + 1) < 1e-12
    assert (uab.adjoint() * uab) == t.monomial([0, 0])
    again = t.element_from_json(uab.to_json())
    assert again == uab

    clone = ccr_py.Triple.from_json(t.to_json())
    assert clone == t

    pt = ccr_py.pairing_triple(2, 3)
    assert pt.dimension() == 81 and pt.is_full_matrix()

    m = ccr_py.phi_matrix(3, 2)
    assert m == [[1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]
    m3 = ccr_py.phi_matrix(2, 3)
    assert abs(m3[0][1] - math.sqrt(3) / 2) < 1e-9 and m3[1][0] == 0.0
    assert ccr_py.recover_order(4, 3, [2, 0, 3, 1]) == [2, 0, 3, 1]

    frag = ccr_py.nonuniqueness_fragment(2, 2, [(3, 1)])
    assert frag.rank == 7 and frag.labels[-1] == "g(*)"
    assert frag.dimension() == 288 and not frag.is_full_matrix()

    code, out = ccr_py.run_cli(["dim", t.to_json()])
    assert code == 0 and json.loads(out)["dimension"] == "4"
    code, out = ccr_py.run_cli(["split", t.to_json(), "--part", "0"])
    assert code == 1 and json.loads(out)["code"] == "split_refused"

    try:
        ccr_py.pairing_triple(1, 4)
    except ValueError as e:
        assert "precondition" in str(e)
    else:
        raise AssertionError("composite p accepted")

    print("ccr_py smoke test passed")


if __name__ == "__main__":
    main()
