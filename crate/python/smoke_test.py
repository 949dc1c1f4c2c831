"""Smoke test for the qsense Python extension.

Build and install first:
    pip install maturin
    maturin build -m crates/py/Cargo.toml -o dist && pip install dist/qsense-*.whl
"""

import math

import qsense


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    f0 = qsense.critical_fidelity(1)
    assert close(f0, 0.5)
    beta, alpha = qsense.distances(f0)
    assert close(alpha, beta * beta)

    h = qsense.PauliHamiltonian(0.0, 0.0, 0.0, 0.5)
    plus = qsense.QubitState.plus()
    b = qsense.bound_static(h, plus, f0)
    assert close(b.tau_mt, math.pi / 2) and close(b.tau_ml, math.pi / 4)
    assert close(h.evolve(plus, 0.0).fidelity(plus), 1.0)

    env = qsense.Envelope.constant(1.0, 10.0)
    t = qsense.actual_crossing_time(1.0, 0.5, env, f0)
    assert close(t, math.pi / 2, 1e-8)

    ac = qsense.AcScenario(1.0, 0.5)
    assert abs(ac.t_min() - 2.70903) < 1e-5
    assert close(ac.t_min(), ac.t_min_quadrature())
    assert qsense.AcScenario(1.0, 2.0).t_min() is None

    rows = ac.sweep([0.0, 1.0, 2.0, 3.0], 2000, seed=7)
    assert rows == ac.sweep([0.0, 1.0, 2.0, 3.0], 2000, seed=7)
    assert all(r[2] == qsense.detection_probability(ac.fidelity_at(r[0]), 1) for r in rows)

    rate = qsense.monte_carlo(0.9, 10, 20000, seed=1)
    exact = qsense.detection_probability(0.9, 10)
    assert abs(rate - exact) < 4 * math.sqrt(exact * (1 - exact) / 20000)

    tau, cross = qsense.controlled_rotating(0.1, 1.0, 1.05, 40.0)
    assert abs(tau - cross) / tau < 1e-6

    b1 = qsense.biomagnetic_threshold(10.0, n=10**6, m=10, kind="ghz")
    b2 = qsense.biomagnetic_threshold(100.0, n=10**6, m=10, kind="ghz")
    assert 0 < b1 < b2

    try:
        qsense.critical_fidelity(0)
    except ValueError:
        pass
    else:
        raise AssertionError("n = 0 accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
