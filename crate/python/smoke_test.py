"""Smoke test for the `bianchi` extension module.

    pip install --no-build-isolation ./crates/py
    python python/smoke_test.py
"""

import json
import math

import bianchi


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL: {what}")
    print(f"ok   {what}")


def main():
    q, r = bianchi.euclid_div(1, "7+3w", "2+1w")
    check(int(bianchi.norm(1, r)) < int(bianchi.norm(1, "2+1w")), f"euclid_div 7+3i by 2+i -> ({q}, {r})")

    s = bianchi.space(1, "1+1w")
    check(s["en_size"] == 3 and s["exactness_holds"], "space d=1 n=1+i")

    fam = bianchi.heilbronn(1, "1+1w", verify=True)
    check(fam["num_matrices"] == 4 and fam["num_classes"] == 3, "Heilbronn family of 1+i certifies")

    t = bianchi.hecke(1, "2+1w", "1+1w", oracle=True)
    check(t["trace"] == "3", "T_(1+i) at n=2+i matches the oracle")

    eig = bianchi.eigensystems(11, "1-2w", max_norm=16)
    lam = {e["eta"]: e["lambda"] for e in eig["systems"][0]["eigenvalues"]}
    check(lam["0+1w"] == "-1" and lam["3+0w"] == "1", "eigenvalues at d=11 n=1-2w")

    check(abs(bianchi.bessel_k(0, 1.0) - 0.42102443824070834) < 1e-12, "K0(1)")

    f = bianchi.FourierSeries(11, "1-2w", bound=100)
    check(f.coefficient("1") == "1" and f.coefficient("1+3w") == "7", "a_1 = 1, a_(1+3w) = 7")
    check(f.coefficient("11") is None, "coefficients beyond the bound are absent")

    v = f.eval(0.1 + 0.2j, 1.0)
    check(len(v) == 3 and all(math.isfinite(abs(c)) for c in v), "F(z, t) has three finite components")

    shifted = f.eval(0.1 + 0.2j + complex(1, 0), 1.0)
    check(max(abs(a - b) for a, b in zip(v, shifted)) < 1e-12, "F is periodic under z -> z + 1")

    rep = f.automorphy(["2-2w", "1", "1-2w", "1"], 0.03 - 0.29j, 0.302)
    check(rep["within_budget"], f"generic γ residual {rep['residual']:.2e} within budget")

    g = bianchi.FourierSeries.from_json(f.to_json())
    check(len(g) == len(f) and g.norm_bound == 100, "table JSON round trip")

    try:
        bianchi.space(5, "3")
    except ValueError:
        check(True, "d=5 is rejected")
    else:
        check(False, "d=5 is rejected")

    print(json.dumps({"all_ok": True}))


if __name__ == "__main__":
    main()
