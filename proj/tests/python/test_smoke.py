import math

import numpy as np
import pytest

import pwstab


def test_elliptic():
    assert abs(pwstab.complete_elliptic_k(0.0) - math.pi / 2) < 1e-15
    sn, cn, dn = pwstab.jacobi_elliptic(0.7, 0.5)
    assert abs(sn * sn + cn * cn - 1) < 1e-12
    assert abs(dn * dn + 0.25 * sn * sn - 1) < 1e-12


def test_kdv_pipeline():
    system = pwstab.SystemSpec.kdv([1.0, 1.0, 0.0, 0.0])
    roots, all_mu = pwstab.coupling_roots(system)
    assert not all_mu
    mu = roots[0]
    red = pwstab.coupling_reduction(system, mu)
    l1, l2 = pwstab.coupling_eigenvalues(red)
    assert abs(l1 - 1) < 1e-10 and abs(l2 - red.det) < 1e-10

    wave = pwstab.build_cnoidal_wave(system, mu, 2 * math.pi, 0.5, 128)
    assert wave.residual < 1e-8
    phi = np.asarray(wave.values)
    assert phi.shape == (2, 128)
    np.testing.assert_array_equal(phi[1], mu * phi[0])

    op = pwstab.linearized_operator(wave)
    assert op.shape == (256, 256)
    assert np.sum(np.linalg.eigvalsh(op) < -1e-8) == 1

    h1 = pwstab.check_h1(wave)
    assert h1["negative_count"] == 1 and h1["h1_verdict"]
    h2 = pwstab.check_h2_kdv(system, mu, 2 * math.pi, 0.5, 128)
    assert h2["I"] < 0 and h2["h2_verdict"]


def test_evolution_and_distance():
    system = pwstab.SystemSpec.kdv([0.5, 0.0, 0.0, 0.0])
    wave = pwstab.build_cnoidal_wave(system, 0.0, 2 * math.pi, 0.5, 64)
    cfg = pwstab.StabilityConfig()
    cfg.delta = 1e-3
    cfg.horizon = 1.0
    result = pwstab.stability_experiment(wave, cfg)
    assert result["bounded"] and not result["blew_up"]
    assert result["history"][0][0] == 0.0
    e, f, m = pwstab.conserved_quantities(wave.values, system, wave.length)
    assert f > 0
    assert pwstab.orbital_distance(wave.values, wave.values, 2.0, wave.length) < 1e-12


def test_other_systems():
    lw = pwstab.build_logkdv_wave(1.0, 2.0, 128)
    assert lw.params["above_one"] == 1.0
    assert pwstab.check_h2_logkdv(1.0, 2.0, 128)["h2_verdict"]
    bo = pwstab.build_bo_wave(2.0, 2 * math.pi, 128)
    assert pwstab.check_h2_lkk(2.0, 0.0, 2 * math.pi, 128)["I"] < 0
    assert pwstab.theta_symbol(3.0, 0.0) == 3.0
    assert bo.to_json()["system"] == "lkk"


def test_errors_map_to_python():
    with pytest.raises(pwstab.DomainError):
        pwstab.complete_elliptic_k(1.0)
    assert issubclass(pwstab.DomainError, pwstab.Error)
