"""Smoke test for the symbb Python bindings (build with `pip install -e crates/py`)."""

import itertools
from pathlib import Path

import symbb

ROOT = Path(__file__).resolve().parent.parent


def brute_force(b, m):
    n = len(b)
    return min(
        sum(b[i][j] for i in s for j in s) for s in itertools.combinations(range(n), m)
    )


def ring(n, m):
    w = [0, 9, 4, 2, 1, 1, 1, 1]
    b = [[w[min((i - j) % n, (j - i) % n, 7)] for j in range(n)] for i in range(n)]
    return symbb.Instance(b, m), b


def main():
    inst, b = ring(8, 3)
    group = symbb.automorphism_group(inst)
    assert group.order == 16, group.order
    assert group.orbits() == [list(range(1, 9))]

    opt = brute_force(b, 3)
    cert = symbb.solve(inst, opt, audit=True)
    assert cert["outcome"]["kind"] == "Proved", cert["outcome"]
    assert not cert["audit"]["failures"]
    cert = symbb.solve(inst, opt + 1)
    assert cert["outcome"]["kind"] == "Refuted"
    assert inst.objective(cert["outcome"]["witness"]) == cert["outcome"]["value"]

    g, gp = symbb.cone_distance([[-1.0, 0.0], [0.0, 1.0]])
    assert abs(g - 1.0) < 1e-8, g

    roundtrip = symbb.Instance.from_json(inst.to_json())
    assert roundtrip.matrix() == b

    tai = ROOT / "data" / "tai256c.dat"
    if tai.exists():
        big = symbb.Instance.load(str(tai))
        order = symbb.automorphism_group(big).order
        assert order == 2048, order
        rows = symbb.orbit_report(big, 1)
        assert len(rows) == 44
        members, num, den = rows[0]
        assert members == [2, 16, 17, 241]
        assert -(-num // den) == 52655297
        print(f"tai256c: group order {order}, {len(rows)} orbits after fixing 1")

    print("smoke test passed")


if __name__ == "__main__":
    main()
