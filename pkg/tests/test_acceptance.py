"""Exit criteria for the whole package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary. Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hadamard_dse import cli, dse
from hadamard_dse.analog import ARRAY_PRESETS, CapacitorArraySpec
from hadamard_dse.chain import AdcModel, SweepConfig, quantize, run_analog_chain, run_digital_chain
from hadamard_dse.transform import (
    CodeVector,
    FixedPointFormat,
    TransformSpec,
    fht_fixed,
    fht_real,
    hadamard_matrix,
)

DIGITAL_BITS = (5, 6, 7, 8, 9, 10)
DEFAULT_SNRS = [float(v) for v in range(0, 85, 5)]
SWEEP_BUDGET_S = 600.0


@pytest.fixture
def record(request):
    name = request.node.name
    notes = []
    yield notes.append
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"{status}  {name}" + (f"  ({'; '.join(notes)})" if notes else ""))


def test_criterion_1_digital_cost_arithmetic(record):
    worst = 0.0
    for bits, (area_eff, energy_eff) in dse.DIGITAL_TABLE_DERIVED.items():
        p = dse.evaluate_design(dse.digital_preset(bits), dse.AdcRecord.stub())
        for got, want in ((p.area_eff, area_eff), (p.energy_eff, energy_eff)):
            dev = abs(got / want - 1)
            worst = max(worst, dev)
            assert dev <= 0.005, (bits, got, want)
    record(f"worst deviation {100 * worst:.2f}% <= 0.5%")


def test_criterion_2_transform_correctness(record):
    rng = np.random.default_rng(2024)
    worst_abs = worst_parseval = worst_inv = 0.0
    for m in range(0, 11):
        spec = TransformSpec(m)
        H = hadamard_matrix(spec)
        X = rng.standard_normal((100, spec.M))
        Y = fht_real(X, spec)
        worst_abs = max(worst_abs, float(np.max(np.abs(Y - X @ H.T))))
        norms = np.linalg.norm(X, axis=1)
        worst_parseval = max(worst_parseval, float(np.max(np.abs(np.linalg.norm(Y, axis=1) - norms) / norms)))
        worst_inv = max(worst_inv, float(np.max(np.linalg.norm(fht_real(Y, spec) - X, axis=1) / norms)))
    assert worst_abs < 1e-10
    assert worst_parseval < 1e-9
    assert worst_inv < 1e-9
    record(f"max|err|={worst_abs:.1e}, parseval={worst_parseval:.1e}, involution={worst_inv:.1e}")


def test_criterion_3_bit_true_width_law(record):
    for m in range(1, 13):
        spec = TransformSpec(m)
        fmt = FixedPointFormat(6)
        codes = np.random.default_rng(m).integers(fmt.min_code, fmt.max_code + 1, spec.M)
        assert fht_fixed(CodeVector(codes, fmt), spec).format.total_bits == 6 + math.ceil(m / 2)
    spec7 = TransformSpec(7)
    widths = {}
    for bits in DIGITAL_BITS:
        fmt = FixedPointFormat(bits)
        codes = np.full(128, fmt.max_code)
        widths[bits] = fht_fixed(CodeVector(codes, fmt), spec7).format.total_bits
    assert widths == {5: 9, 6: 10, 7: 11, 8: 12, 9: 13, 10: 14}
    record("m=7: 5b..10b -> 9b..14b")


def test_criterion_4_quantizer_calibration(record):
    n = 100_000
    v = np.sin(2 * np.pi * 12347 * np.arange(n) / n)  # coherent, prime cycle count
    devs = []
    for bits in (6, 8, 10, 12):
        q = quantize(v, AdcModel(bits, full_scale=1.0))
        sqnr = 10 * np.log10(0.5 / np.mean((q - v) ** 2))
        devs.append(sqnr - (6.02 * bits + 1.76))
    record("deviations " + ", ".join(f"{d:+.2f}" for d in devs) + " dB (limit 0.3)")
    assert max(abs(d) for d in devs) <= 0.3


@pytest.fixture(scope="module")
def default_sweep():
    """Full default sweep: 400 mismatch x 400 noise trials per point."""
    spec = TransformSpec(7)
    t0 = time.perf_counter()
    digital_cfg = SweepConfig(DEFAULT_SNRS)
    analog_cfg = SweepConfig(DEFAULT_SNRS, chain_kind="analog")
    digital = {b: run_digital_chain(digital_cfg, AdcModel(b), spec) for b in DIGITAL_BITS}
    # the analog chain's ADC carries the 12 dB (2 bit) insertion-loss compensation
    analog = {
        b: run_analog_chain(analog_cfg, AdcModel(b + 2), ARRAY_PRESETS["0.68fF"], spec)
        for b in DIGITAL_BITS
    }
    elapsed = time.perf_counter() - t0
    return digital, analog, elapsed


def test_criterion_5a_impairment_free_chain_preserves_snr(record):
    spec = TransformSpec(7)
    ideal = CapacitorArraySpec(1.0, 1.0, 0.1, 1e9, 0.0, insertion_loss_db=0.0)
    d = run_digital_chain(SweepConfig(DEFAULT_SNRS), None, spec)
    a = run_analog_chain(SweepConfig(DEFAULT_SNRS, chain_kind="analog"), None, ideal, spec)
    worst = max(np.max(np.abs(c.mean_db - c.input_snr_db)) for c in (d, a))
    record(f"max |out - in| = {worst:.3f} dB (limit 0.2)")
    assert worst < 0.2


def test_criterion_5b_digital_monotone_and_saturating(default_sweep, record):
    digital, _, _ = default_sweep
    spreads = []
    for bits, curve in digital.items():
        band = 3 * np.hypot(curve.stderr_db[:-1], curve.stderr_db[1:])
        assert np.all(np.diff(curve.mean_db) >= -band), bits
        top = curve.mean_db[-3:]
        spreads.append(float(top.max() - top.min()))
        assert spreads[-1] < 0.5, bits
    record("top-3 spread " + ", ".join(f"{b}b:{s:.2f}" for b, s in zip(digital, spreads)) + " dB")


def test_criterion_5c_analog_mismatch_spread(default_sweep, record):
    _, analog, _ = default_sweep
    i = DEFAULT_SNRS.index(20.0)
    spreads = []
    for curve in analog.values():
        assert curve.samples_db.shape[0] == 400
        assert curve.max_db[i] - curve.min_db[i] > 0
        assert curve.min_db[i] <= curve.p10_db[i] <= curve.mean_db[i]
        spreads.append(curve.max_db[i] - curve.min_db[i])
    record(f"0.68fF @20 dB: min-max spread {min(spreads):.3f}..{max(spreads):.3f} dB, p10 within [min, mean]")


def test_criterion_5d_crossover(default_sweep, record):
    digital, analog, _ = default_sweep
    # compare where quantization matters: input SNR >= 20 dB
    idx = [k for k, s in enumerate(DEFAULT_SNRS) if s >= 20.0]
    top = DEFAULT_SNRS.index(80.0)
    for bits in (5, 6):
        assert np.all(analog[bits].mean_db[idx] > digital[bits].mean_db[idx]), bits
    for bits in (8, 9, 10):
        assert np.all(digital[bits].mean_db[idx] > analog[bits].p10_db[idx]), bits
    record("@80 dB in: " + ", ".join(
        f"{b}b D{digital[b].mean_db[top]:.1f}/A{analog[b].mean_db[top]:.1f}" for b in DIGITAL_BITS))


def test_criterion_5e_default_sweep_runtime(default_sweep, record):
    _, _, elapsed = default_sweep
    record(f"12 curves x 17 points, 400x400 trials in {elapsed:.1f} s (limit {SWEEP_BUDGET_S:.0f} s)")
    assert elapsed < SWEEP_BUDGET_S


def test_criterion_6_adc_requirement_compensation(record):
    for target in (20.0, 40.0, 55.5):
        a = dse.adc_requirements("analog", target, 1e9, 11.3).required_sndr_db
        d = dse.adc_requirements("digital", target, 1e9).required_sndr_db
        assert a - d == 12.0
    record("analog - digital = 12 dB exactly")


def test_criterion_7a_area_efficiency_without_adc_area(record):
    analog = [dse.evaluate_design(dse.analog_preset(n), dse.AdcRecord.stub(), include_adc_area=False)
              for n in ARRAY_PRESETS]
    digital = [dse.evaluate_design(dse.digital_preset(b), dse.AdcRecord.stub(), include_adc_area=False)
               for b in DIGITAL_BITS]
    worst_analog = max(analog, key=lambda p: p.area_eff)
    best_digital = min(digital, key=lambda p: p.area_eff)
    record(f"worst analog {worst_analog.label} {worst_analog.area_eff:.3f} vs best digital "
           f"{best_digital.label} {best_digital.area_eff:.3f} mm^2/GT/s")
    assert all(a.area_eff < d.area_eff for a in analog for d in digital)


def test_criterion_7b_no_dominant_design_with_adc_area(record):
    transforms = [dse.analog_preset(n) for n in ARRAY_PRESETS] + [dse.digital_preset(b) for b in DIGITAL_BITS]
    points = dse.explore(transforms, dse.load_adc_survey(dse.SYNTHETIC_SURVEY_PATH),
                         [float(t) for t in range(10, 50, 5)])
    front = dse.pareto_front([p for p in points if p.feasible])
    designs = sorted({p.label.split("@")[0] for p in front})
    record(f"front has {len(front)} points from {len(designs)} designs: {', '.join(designs)}")
    assert len(designs) > 1


def test_criterion_8_determinism(tmp_path, record):
    config = {
        "m": 7,
        "digital_bits": [6, 9],
        "analog_presets": ["0.68fF"],
        "input_snrs_db": [0, 20, 40, 60],
        "n_mismatch_trials": 40,
        "n_noise_trials_per_snr": 100,
        "master_seed": 11,
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(config))
    runs = []
    for name, extra in (("a", []), ("b", []), ("par", None)):
        out = tmp_path / name
        if extra is None:
            par_cfg = tmp_path / "par.json"
            par_cfg.write_text(json.dumps({**config, "workers": 2}))
            args = ["sweep-snr", "--config", str(par_cfg), "--out", str(out)]
        else:
            manifest = tmp_path / "a" / "manifest.json"
            src = str(manifest) if name == "b" else str(cfg_path)
            args = ["sweep-snr", "--config", src, "--out", str(out)]
        assert cli.main(args) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    for extra_cmd in (["dse"], ["dse", "--exclude-adc-area"]):
        outs = []
        for k in range(2):
            out = tmp_path / f"{'_'.join(extra_cmd)}_{k}"
            assert cli.main(extra_cmd + ["--out", str(out)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
        assert outs[0] == outs[1]
    assert runs[0] == runs[1] == runs[2]
    record(f"{len(runs[0])} SNR CSVs identical across serial, manifest replay and 2-worker runs")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
