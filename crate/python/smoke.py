"""Smoke test for the pylatdisc extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke.py`.
"""

import math

import pylatdisc as ld


def main():
    body = ld.BodyParams(2, 3)
    assert body.mk == 6
    assert ld.count_a(body, 2.0) == (33, 0)
    assert ld.count_a(body, 7.0, method="brute") == ld.count_a(body, 7.0)
    assert ld.lame_count(3, 10) == (21, 0)
    assert abs(ld.body_volume(ld.BodyParams(1, 2, relaxed=True)) - 4 * math.pi / 3) < 1e-12

    # eta = 2 reduces to the classical Bessel function; J_{1/2}(x) = sqrt(2/(pi x)) sin x
    x = 7.3
    want = math.sqrt(2 / (math.pi * x)) * math.sin(x)
    assert abs(ld.gen_bessel(2, 0.5, x) - want) < 1e-10

    assert abs(ld.slice_identity_residual(3, 10) - 0.1416) < 1e-3

    h = ld.VaalerApprox(8)
    assert abs(h(0.3) - h(1.3)) < 1e-12
    assert ld.check_bound(16, [i / 97 for i in range(1000)])["violations"] == 0

    rec = ld.discrepancy_record(body, 50.0)
    assert rec.A == 821617
    assert abs(rec.P - rec.H1 - rec.H2 - rec.R) < 1e-6

    recs = ld.sweep(body, [10.0, 20.0, 40.0])
    csv = ld.records_to_csv(recs)
    assert csv.splitlines()[0] == "x,A,vol_term,H1,H2,P,R"

    verdict = ld.classify_exponent(body)
    assert verdict["case_id"] == 1 and verdict["exponent"] == 1.48

    report = ld.transform_report(3, 1000)
    assert report["depth"] == 4
    ev = ld.theorem2_check(3, 1e4)
    assert ev["lattice_term"] >= 0 and ev["tail_term"] > 0

    try:
        ld.BodyParams(1, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("BodyParams(1, 2) should need relaxed=True")

    print("pylatdisc smoke test passed")


if __name__ == "__main__":
    main()
