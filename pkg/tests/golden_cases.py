"""CLI invocations whose JSON output is committed under ``tests/golden``.

Run ``python3 tests/golden_cases.py`` to regenerate after an intentional
output change.
"""

from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "glmfab" / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

_LOGIT = ["--family", "binomial-logit", "--data", str(DATA / "logistic.csv"), "--response", "y",
          "--covariates", "x1,x2,x3,x4,x5", "--trials", "trials"]
_GAUSS = ["--family", "gaussian-identity-log", "--data", str(DATA / "gaussian.csv"), "--response", "y",
          "--covariates", "x1,x2,x3"]

CASES = {
    "fit_logistic.json": ["fit", *_LOGIT],
    "fit_gaussian_varying.json": ["fit", *_GAUSS, "--dispersion-covariates", "x1,x2,x3"],
    "sample_rnd_logistic.json": ["sample", *_LOGIT, "--prior-sd", "1000", "--rnd", "--nsmp", "400", "--seed", "11"],
    "check_logistic.json": ["check", *_LOGIT],
}


def regenerate() -> None:
    from glmfab.cli import main

    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        code = main([*argv, "--out", str(GOLDEN / name)])
        if code != 0:
            raise SystemExit(f"{name}: exit {code}")


if __name__ == "__main__":
    regenerate()
