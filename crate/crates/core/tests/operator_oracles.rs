//! Spectral quantities against finite truncations of the operators.

mod oracles;

use num_complex::Complex64;
use pj_core::measure::OrthogonalityMeasure;
use pj_core::quadrature::QuadOptions;
use pj_core::spectral::{plemelj_extract, ClosedForm, Entry, SpectralDensities};
use pj_core::RecurrenceSpec;

fn spec(a: f64, n: usize) -> RecurrenceSpec {
    RecurrenceSpec::new(a, n).unwrap()
}

fn entries(cf: &ClosedForm, z: Complex64) -> [Complex64; 3] {
    let r = cf.resolvent(z).unwrap();
    [r.r00, r.r01, r.r11]
}

#[test]
fn center_resolvent_matches_large_truncation() {
    for (a, n) in [(0.5, 2), (0.9, 3), (0.9, 4), (1.5, 5), (0.7, 7)] {
        let cf = ClosedForm::new(&spec(a, n)).unwrap();
        for u in [-1.2, -0.3, 0.0, 0.4, 1.1] {
            let z = Complex64::new(u, 0.5);
            let want = oracles::truncated_resolvent(a, n, z, 400);
            let got = entries(&cf, z);
            for k in 0..3 {
                assert!((got[k] - want[k]).norm() < 1e-6, "a={} N={} z={} entry {}", a, n, z, k);
            }
        }
    }
}

#[test]
fn truncation_error_decreases_with_size() {
    // In-band Re z and small Im z, so the truncation error decays slowly
    // enough to be visible above rounding.
    let (a, n) = (0.9, 3);
    let cf = ClosedForm::new(&spec(a, n)).unwrap();
    let z = Complex64::new(1.2, 0.005);
    let exact = entries(&cf, z);
    let errs: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&m| {
            let t = oracles::truncated_resolvent(a, n, z, m);
            (0..3).map(|k| (t[k] - exact[k]).norm()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{:?}", errs);
}

#[test]
fn moments_match_operator_powers() {
    for (a, n) in [(0.5, 1), (0.9, 3), (1.5, 4), (0.9, 5), (-0.7, 6)] {
        let m = OrthogonalityMeasure::new(&spec(a, n)).unwrap();
        let got = m.moments(6).unwrap();
        let want = oracles::operator_moments(a, n, 6);
        for k in 0..=6 {
            assert!((got[k] - want[k]).abs() < 1e-8, "a={} N={} k={}: {} vs {}", a, n, k, got[k], want[k]);
        }
        assert!((got[1] - a).abs() < 1e-8);
    }
}

#[test]
fn stieltjes_transform_of_measure_is_phi() {
    for (a, n) in [(0.9, 3), (1.5, 4), (0.5, 6)] {
        let m = OrthogonalityMeasure::new(&spec(a, n)).unwrap();
        let cf = ClosedForm::new(&spec(a, n)).unwrap();
        for z in [Complex64::new(0.3, 0.7), Complex64::new(-1.0, 1.5)] {
            assert!((m.stieltjes(z).unwrap() - cf.phi(z).unwrap()).norm() < 1e-8);
        }
    }
}

#[test]
fn density_moments() {
    let opts = QuadOptions::default();
    for n in 1..=6 {
        for a in [0.5, 0.9, 1.5] {
            let d = SpectralDensities::new(&spec(a, n)).unwrap();
            let m0 = d.integrate(&[Entry::D00, Entry::D11, Entry::D01], |_| 1.0, &opts).unwrap();
            let m1 = d.integrate(&[Entry::D01], |x| x, &opts).unwrap();
            assert!((m0[0] - 1.0).abs() < 1e-8, "N={} a={} {:?}", n, a, m0);
            assert!((m0[1] - 1.0).abs() < 1e-8, "N={} a={} {:?}", n, a, m0);
            assert!(m0[2].abs() < 1e-8);
            assert!((m1[0] - 0.5).abs() < 1e-8);
        }
    }
}

#[test]
fn plemelj_recovers_densities() {
    for (a, n) in [(0.5, 2), (0.9, 3), (0.9, 4), (1.5, 5)] {
        let s = spec(a, n);
        let cf = ClosedForm::new(&s).unwrap();
        let d = SpectralDensities::new(&s).unwrap();
        let bands = d.bands().bands();
        let mut points = Vec::new();
        for (lo, hi) in &bands {
            for i in 1..=3 {
                points.push(lo + (hi - lo) * i as f64 / 4.0);
            }
        }
        for &x in points.iter().take(10) {
            let want = d.direct(x).unwrap();
            for (k, pick) in [0usize, 1, 2].iter().enumerate() {
                let got = plemelj_extract(
                    |z| {
                        let r = cf.resolvent(z)?;
                        Ok([r.r00, r.r01, r.r11][*pick])
                    },
                    x,
                )
                .unwrap();
                let w = [want[0], want[1], want[2]][k];
                assert!((got - w).abs() < 1e-6, "a={} N={} x={} entry {}: {} vs {}", a, n, x, k, got, w);
            }
        }
    }
}

