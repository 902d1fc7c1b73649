"""Smoke test for the Python extension.

Build and install it first:

    pip install --no-build-isolation ./crates/py

then run `python3 python/smoke_test.py` (or point pytest at this file).
"""

import math

import dirichlet_graph as dg


def close(a, b, rel=1e-9):
    return math.isclose(a, b, rel_tol=rel, abs_tol=1e-12)


def test_line_capacity_is_two_over_n():
    z = dg.Graph.generate("lattice:1")
    for n in (1, 5, 40):
        r = dg.capacity(z, n)
        assert close(r["capacity"], 2.0 / n), r["capacity"]
        assert close(r["flux_capacity"], 2.0 / n)
        assert r["ball_size"] == 2 * n + 1
        assert r["potential"][0] == 1.0


def test_square_lattice_matches_dense_solve():
    # the ball of radius 4 in Z^2 is small enough to solve by hand with numpy
    np = __import__("numpy")
    z2 = dg.Graph.generate("lattice:2")
    ball = z2.ball(4)
    interior = [v for v in ball.interior() if v != (0, 0)]
    index = {v: k for k, v in enumerate(interior)}
    a = np.zeros((len(interior), len(interior)))
    rhs = np.zeros(len(interior))
    for v, k in index.items():
        a[k, k] = ball.degree(v)
        for y, w in z2.neighbors(v):
            if y == (0, 0):
                rhs[k] += w
            elif y in index:
                a[k, index[y]] -= w
    e = np.linalg.solve(a, rhs)
    flux = ball.degree((0, 0)) - sum(e[index[y]] * w for y, w in z2.neighbors((0, 0)) if y in index)
    got = dg.capacity(z2, 4)["capacity"]
    assert close(got, flux, 1e-10), (got, flux)


def test_verdicts():
    # capacities of Z^3 balls still move by a few percent between these radii
    z3 = dg.classify(dg.Graph.generate("lattice:3"), "recurrence", radii=[4, 8, 16], tol=0.05)
    assert z3["verdict"] == "negative", z3
    z = dg.classify(dg.Graph.generate("lattice:1"), "recurrence", radii=[100, 200, 400], tol=0.01)
    assert z["verdict"] == "positive", z
    sc = dg.classify(dg.Graph.generate("lattice:2"), "sc", radii=[4, 8, 16])
    assert sc["verdict"] == "positive", sc
    assert sc["question"] == "sc" and len(sc["values"]) == 3


def test_deficiency_decreases():
    chain = dg.Graph.generate("path_chain:beta=2,mu=1")
    d = dg.deficiency(chain, [2, 4, 8])
    trace = [row[0] for row in d["deficiencies"]]
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
    assert trace[-1] > 0.1


def test_resolvent_is_bounded_by_one_over_alpha():
    z = dg.Graph.generate("lattice:1")
    r = dg.resolvent(z, [2, 4, 8], data={0: 1.0, 1: 1.0, -1: 1.0}, alpha=0.5)
    assert all(0.0 <= x <= 2.0 for x in r["solution"].values())
    first = [row[0] for row in r["values"]]
    assert first == sorted(first)


def test_green_identity_and_witness():
    ball = dg.Graph.generate("lattice:1").ball(6)
    u = {x: 1.0 / (1 + x * x) for x in range(-5, 6)}
    v = {x: float(x % 3) for x in range(-4, 5)}
    assert abs(ball.green_defect(u, v)) < 1e-12
    g = ball.green({x: 1.0 for x in range(-6, 7)})
    assert close(g["boundary_sum"], 2.0)
    w = ball.witness({x: 1.0 for x in range(-6, 7)})
    assert w["checks"]["nonnegative"] and not w["all_pass"]


def test_graph_text_round_trip():
    star = dg.Graph.generate("star:3")
    ball = star.ball(1)
    assert ball.validate() == []
    again = dg.Graph.parse(ball.to_text())
    assert close(dg.capacity(again, 1, origin=ball.vertices()[0])["capacity"],
                 dg.capacity(star, 1, origin=ball.vertices()[0])["capacity"])


def test_errors():
    for bad, exc in [
        (lambda: dg.Graph.generate("no_such_family"), ValueError),
        (lambda: dg.capacity(dg.Graph.generate("lattice:1"), 3, origin=(0, 0)), dg.GraphError),
        (lambda: dg.Graph.from_file("/nonexistent/graph.g"), OSError),
    ]:
        try:
            bad()
        except exc:
            pass
        else:
            raise AssertionError(f"expected {exc.__name__}")
    assert dg.validate_text("v a 1 0\nv b 1 0\ne a b -1\n")
    assert issubclass(dg.NumericalError, dg.GraphError)


if __name__ == "__main__":
    tests = [(k, f) for k, f in sorted(globals().items()) if k.startswith("test_")]
    for name, f in tests:
        f()
        print("ok", name)
    print(f"{len(tests)} passed")
