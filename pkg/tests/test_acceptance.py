"""Acceptance suite: one PASS/FAIL line per criterion.

Lines are printed as they are produced and repeated in the terminal
summary under "acceptance criteria".
"""
import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ramseyfringe.analysis import find_first_zero, fwhm
from ramseyfringe.analytic import (
    central_zero_estimate,
    p12_equal,
    p12_general,
    p12_opposite,
    p12_opposite_phases,
)
from ramseyfringe.cli import main
from ramseyfringe.core import SequenceConfig
from ramseyfringe.ensemble import PhaseSpaceGaussian, SpatialConfig, averaged_p12_closed, averaged_p12_quadrature
from ramseyfringe.estimators import EnsembleFringeModel, RamseyFringeModel
from ramseyfringe.numeric import IntegratorParams, PictureTag, p12_numeric, p12_numeric_many
from ramseyfringe.pulses import SIN_FOURTH

HALF_PI = math.pi / 2
SEED = 20061019


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_central_peak_stable():
    t0s = np.arange(21.0)
    err_a = float(np.max(np.abs(p12_opposite(0.0, entrance=t0s) - 1.0)))
    p = p12_numeric_many("i1", [SequenceConfig.opposite(0.0, entrance_time=t) for t in t0s])
    err_n = float(np.max(np.abs(p - 1.0)))
    report(1, "central peak stable over t0 = 0..20", err_a < 1e-12 and err_n < 1e-8,
           f"analytic err {err_a:.1e} (<1e-12), numeric err {err_n:.1e} (<1e-8)")


def test_02_outer_zero_fixed():
    d = math.pi * math.sqrt(3.75)
    worst = float(np.max(p12_opposite(d, entrance=np.linspace(0, 20, 201))))
    report(2, "outer zero at pi*sqrt(3.75) independent of t0", worst < 1e-10, f"max P12 {worst:.1e} (<1e-10)")


def test_03_narrowing_law():
    rng = np.random.default_rng(SEED)
    worst_zero = worst_ratio = 0.0
    n = 0
    while n < 50:
        tau, gap, t0 = rng.uniform(0.5, 2.0), rng.uniform(0.0, 10.0), rng.uniform(0.0, 20.0)
        rabi = math.pi / (2 * tau)
        expected = math.pi / (gap + 2 * (t0 + tau))
        sin_zero = math.sqrt((2 * math.pi / tau) ** 2 - rabi**2)
        if expected >= sin_zero:
            continue
        n += 1
        curve = lambda x: p12_opposite(x, rabi, tau, gap, t0)  # noqa: E731
        zero = find_first_zero(curve, min(2 * expected, 0.999 * sin_zero), n_scan=400)
        worst_zero = max(worst_zero, abs(zero - expected))
        worst_ratio = max(worst_ratio, abs(central_zero_estimate(tau, gap, t0) / zero - 2 / math.pi))
    report(3, "first zero pi/(T+2(t0+tau)), estimate ratio 2/pi",
           worst_zero < 1e-6 and worst_ratio < 1e-6,
           f"50 draws, max zero err {worst_zero:.1e}, max ratio err {worst_ratio:.1e} (<1e-6)")


def test_04_t0_periodicity():
    worst = 0.0
    for d in (2.5, 5.0, 7.5, 10.0):
        t0 = np.linspace(0.0, 3 * math.pi / d, 601)
        worst = max(worst, float(np.max(np.abs(p12_opposite(d, entrance=t0)
                                               - p12_opposite(d, entrance=t0 + math.pi / d)))))
    report(4, "t0 period pi/Delta", worst < 1e-12, f"max residual {worst:.1e} (<1e-12)")


def test_05_equal_detuning_regression():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(100):
        d, rabi, tau, gap = rng.uniform(-8, 8), rng.uniform(0, 3), rng.uniform(0.2, 2), rng.uniform(0, 10)
        t0 = rng.uniform(0, 20, 5)
        p = p12_general(d, d, rabi, tau, gap, t0)
        worst = max(worst, float(np.max(np.abs(p - p12_equal(d, rabi, tau, gap)))))
    report(5, "equal detunings reproduce the standard fringe", worst < 1e-12,
           f"100 draws, max diff {worst:.1e} (<1e-12)")


def test_06_phase_equivalence():
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    for _ in range(100):
        d, rabi, tau, gap, t0 = (rng.uniform(-8, 8), rng.uniform(0, 3), rng.uniform(0.2, 2),
                                 rng.uniform(0, 10), rng.uniform(0, 20))
        phi1 = rng.uniform(-math.pi, math.pi)
        a = p12_opposite_phases(d, rabi, tau, gap, phi1, phi1 + d * t0)
        worst = max(worst, abs(float(a) - float(p12_opposite(d, rabi, tau, gap, t0))))
    report(6, "entrance time equals a phase offset", worst < 1e-12, f"100 draws, max diff {worst:.1e} (<1e-12)")


def test_07_numeric_oracle():
    deltas = np.linspace(-8, 8, 41)
    t0s = np.linspace(0, 20, 21)
    T, D = np.meshgrid(t0s, deltas, indexing="ij")
    X = np.column_stack([D.ravel(), T.ravel()])
    num = RamseyFringeModel(engine="numeric", n_jobs=-1).fit().predict(X)
    grid_err = float(np.max(np.abs(num - p12_general(-X[:, 0], X[:, 0], HALF_PI, 1.0, 5.0, X[:, 1]))))
    seqs = [SequenceConfig.opposite(d, entrance_time=3.0) for d in np.linspace(-8, 8, 21)]
    pics = np.array([p12_numeric_many(pic, seqs) for pic in PictureTag])
    pic_err = float(np.max(pics.max(axis=0) - pics.min(axis=0)))
    report(7, "numeric vs closed form, picture independence", grid_err < 1e-8 and pic_err < 1e-8,
           f"41x21 grid err {grid_err:.1e}, I1/I2/I3 spread {pic_err:.1e} (<1e-8)")


def test_08_integrator_order():
    seq = SequenceConfig.opposite(2.5, entrance_time=2.0)
    exact = p12_opposite(2.5, entrance=2.0)
    errs = [abs(p12_numeric("i1", seq, IntegratorParams(step=h)) - exact) for h in (0.02, 0.01, 0.005, 0.0025)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    report(8, "fourth-order convergence", all(12 <= r <= 20 for r in ratios),
           "halving ratios " + ", ".join(f"{r:.2f}" for r in ratios) + " (in [12, 20])")


def test_09_ensemble_oracle():
    dist = PhaseSpaceGaussian(1.0, 0.1, 5.0)
    space = SpatialConfig.pi_half_for(1.0, 1.0, 5.0)
    worst = 0.0
    for t0c in (0.0, 5.0, 10.0):
        d = PhaseSpaceGaussian(dist.k_mean, dist.dk, dist.dx, t0c)
        for delta in np.linspace(-1, 1, 81):
            worst = max(worst, abs(averaged_p12_closed(delta, d, space) - averaged_p12_quadrature(delta, d, space)))
    report(9, "ensemble closed form vs 2D quadrature", worst < 1e-6, f"81 points x 3 t0c, max diff {worst:.1e} (<1e-6)")


def test_10_ensemble_pedestal():
    model = EnsembleFringeModel(k_mean=1.0, dk=0.1).fit()
    widths = [fwhm(model.curve(t), 1.5, n_scan=300) for t in (0.0, 5.0, 10.0)]
    central = model.curve(0.0)(0.0)
    outer = np.linspace(0.5, 1.0, 51)
    reduced = []
    for t in (0.0, 5.0, 10.0):
        avg = model.curve(t)(outer)
        mono = p12_opposite(outer, entrance=t)
        reduced.append(np.ptp(avg) < np.ptp(mono))
    ok = widths[0] > widths[1] > widths[2] and abs(central - 1.0) < 0.05 and all(reduced)
    report(10, "ensemble narrowing with pedestal", ok,
           "FWHM " + " > ".join(f"{w:.4f}" for w in widths)
           + f", centre {central:.4f} (mono 1), outer contrast reduced {all(reduced)}")


def test_11_sin_fourth():
    model = RamseyFringeModel(engine="numeric", envelope=SIN_FOURTH, n_jobs=-1).fit()
    grid = np.linspace(-8, 8, 321)
    widths, asym, peak_ok = [], 0.0, True
    for t0 in (0.0, 5.0, 10.0):
        curve = model.curve(t0)
        p = curve(grid)
        asym = max(asym, float(np.max(np.abs(p - p[::-1]))))
        peak_ok &= bool(np.argmax(p) == 160 and np.max(p) == p[160])
        widths.append(fwhm(curve, 2.0, n_scan=200, tol=1e-9))
    ok = peak_ok and asym < 1e-8 and widths[0] > widths[1] > widths[2]
    report(11, "sin^4 pulses: centred, even, narrowing", ok,
           f"max at 0 {peak_ok}, asymmetry {asym:.1e} (<1e-8), FWHM " + " > ".join(f"{w:.4f}" for w in widths))


@pytest.fixture(scope="module")
def cli_small():
    return ["--set", "sweep.delta_points=41", "--set", "sweep.t0_points=11", "--engine", "numeric"]


def test_12_cli_determinism(tmp_path, cli_small):
    results = {}
    for cmd in ("fringe", "contour", "ensemble", "width", "pulse"):
        extra = cli_small if cmd in ("fringe", "contour") else ["--set", "sweep.delta_points=41"]
        if cmd == "pulse":
            extra = ["--set", "sweep.delta_points=301"]  # several work chunks
        elif cmd == "width":
            extra = ["--set", "sweep.delta_min=-1", "--set", "sweep.delta_max=1"]
        outs = []
        for i, threads in enumerate(("1", "1", "8")):
            path = tmp_path / f"{cmd}{i}.csv"
            assert main([cmd, *extra, "--threads", threads, "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        results[cmd] = outs[0] == outs[1] == outs[2]
    report(12, "CLI output byte-identical across runs and thread counts", all(results.values()),
           ", ".join(f"{k} {'same' if v else 'DIFFERENT'}" for k, v in results.items()))
