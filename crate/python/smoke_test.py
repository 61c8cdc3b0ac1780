"""Smoke test for the tapseq Python module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import sys

import tapseq


def main() -> int:
    corpus = tapseq.corpus()
    assert "counter3" in corpus, sorted(corpus)

    m = corpus["counter3"]
    print(m)
    init = m.initial_state()
    assert init == "0" * m.num_latches

    # The bad literal of counter3 is reached after seven increments.
    for mode, result in [
        ("tapseq", tapseq.run_tapseq(m)),
        ("bmc", tapseq.run_bmc(m)),
        ("oracle", tapseq.explicit_oracle(m)),
    ]:
        assert result["verdict"] == "bug", (mode, result)
        cex = result["counterexample"]
        assert cex["length"] == 7, (mode, cex)
        replay = tapseq.validate_witness(m, cex["witness"])
        assert replay["states"] == cex["states"]
        print(f"{mode}: bug at depth {cex['length']}")

    # Walk the trace by hand with the simulator.
    s = init
    cex = tapseq.run_tapseq(m)["counterexample"]
    for x, expected in zip(cex["inputs"], cex["states"][1:]):
        s, _ = m.simulate(s, x)
        assert s == expected
    assert m.is_bad(s, cex["final_bad_input"])

    rand_a = tapseq.run_rand(corpus["lock2x3"], seed=7)
    rand_b = tapseq.run_rand(corpus["lock2x3"], seed=7)
    assert rand_a == rand_b
    print("rand:", rand_a["verdict"], rand_a["stats"])

    safe = tapseq.run_tapseq(corpus["never_bad"])
    assert safe["verdict"] == "converged" and safe["counterexample"] is None
    assert tapseq.explicit_oracle(corpus["never_bad"])["verdict"] == "unreachable"

    f = m.step_formula(init)
    kind, proof = tapseq.solve(f)
    assert kind == "unsat" and proof is not None
    tapseq.check_proof(f, proof)
    kind, lits = tapseq.solve("p cnf 2 2\n1 2 0\n-1 0\n")
    assert kind == "sat" and lits == [-1, 2], lits

    parsed = tapseq.AigModel.parse(m.to_binary())
    assert parsed.to_ascii() == m.to_ascii()

    try:
        tapseq.AigModel.parse(b"aag 1 2 0 0 0\n")
    except ValueError as e:
        print("rejected malformed model:", e)
    else:
        raise AssertionError("malformed model accepted")

    print("ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
