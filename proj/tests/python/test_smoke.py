import math

import numpy as np
import pytest

import qst_chain as q


def fig5_ed():
    h = q.to_single_excitation(q.build_chain(8, a=0.5, p=2.0))
    return h, q.decompose(h)


def test_spectrum_matches_numpy():
    h, ed = fig5_ed()
    assert np.allclose(ed.values, np.linalg.eigvalsh(h.dense()), atol=1e-10)
    assert ed.vectors.shape == (8, 8)
    assert np.allclose(ed.vectors @ ed.vectors.T, np.eye(8), atol=1e-12)
    assert set(ed.parity) == {"even", "odd"}


def test_uniform_chain_drop():
    ed = q.decompose(q.to_single_excitation(q.build_chain(8)))
    expected = math.sqrt(2 / 9) * math.sin(4 * math.pi / 9) - 1 / math.sqrt(2)
    assert q.qst_drop(ed) == pytest.approx(expected, abs=1e-12)


def test_evolve_against_oracle():
    h, ed = fig5_ed()
    times = np.linspace(0.0, 20.0, 201)
    a = q.evolve(ed, 1, times)
    b = q.integrate_oracle(h, 1, times)
    assert a["populations"].shape == (201, 8)
    assert np.max(np.abs(a["populations"] - b["populations"])) < 1e-6
    assert np.allclose(a["populations"].sum(axis=1), 1.0, atol=1e-12)


def test_report_and_modes():
    _, ed = fig5_ed()
    modes = q.identify_dimer_modes(ed)
    assert modes["ov_plus"] > 0.95 and modes["ov_minus"] > 0.95
    r = q.make_report(ed, dynamics=False)
    assert r["t_est"] == pytest.approx(math.pi / abs(modes["E_plus"] - modes["E_minus"]))
    assert r["t_thr"] is None


def test_scalars_and_errors():
    assert q.p_threshold(8, 0.5, 1.0, (2, 3)) == pytest.approx(1.45890120101375, abs=1e-9)
    ratio = q.experimental_ratio(omega_trap=2 * math.pi * 103, lattice_spacing=532e-9, hopping=940)
    assert ratio == pytest.approx(0.0863, abs=1e-3)
    with pytest.raises(ValueError):
        q.build_fields(1, 0.5, 2.0)
    with pytest.raises(q.NumericalError):
        q.p_threshold(8, 1e-40, 1.0, (1, 2))


def test_cli_roundtrip():
    code, out, err = q.run_cli(["fields", "--n", "3", "--format", "jsonl"])
    assert code == 0, err
    assert out.count("\n") == 3
    code, _, err = q.run_cli(["report", "--nope"])
    assert code == 2 and err
