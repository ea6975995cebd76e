//! Normalization and orthogonality of the measure across a sweep of specs.

use std::f64::consts::PI;

use pj_core::measure::{gram_summary, poly_values, OrthogonalityMeasure};
use pj_core::recurrence::discriminant_value;
use pj_core::RecurrenceSpec;

fn spec(a: f64, n: usize) -> RecurrenceSpec {
    RecurrenceSpec::new(a, n).unwrap()
}

#[test]
fn total_mass_is_one() {
    for n in 1..=6 {
        for a in [0.5, 0.9, 1.5] {
            let m = OrthogonalityMeasure::new(&spec(a, n)).unwrap();
            let total = m.total_mass().unwrap();
            assert!((total - 1.0).abs() < 1e-9, "N={} a={}: {}", n, a, total);
            // The same identity read as continuous mass = 1 − point masses.
            assert!((m.continuous_mass().unwrap() - (1.0 - m.discrete_mass())).abs() < 1e-9);
        }
    }
}

#[test]
fn gram_matrix_is_diagonal_up_to_degree_twelve() {
    for n in 1..=6 {
        for a in [0.5, 0.9, 1.5] {
            let m = OrthogonalityMeasure::new(&spec(a, n)).unwrap();
            let g = m.gram_matrix(12, true).unwrap();
            let (off, diag) = gram_summary(&g);
            assert!(off < 1e-8, "N={} a={}: off-diagonal {:e}", n, a, off);
            assert!(diag > 0.0);
        }
    }
}

#[test]
fn dropping_a_positive_mass_breaks_orthogonality() {
    let m = OrthogonalityMeasure::new(&spec(0.9, 3)).unwrap();
    assert!(m.masses().iter().any(|p| p.1 > 0.0));
    let (off, _) = gram_summary(&m.gram_matrix(6, false).unwrap());
    assert!(off > 1e-4, "off-diagonal only {:e}", off);
}

#[test]
fn weight_times_polynomial_gives_sine() {
    // P_{jN−1} w = ±(2/π) sin jθ with θ = arccos g_N; the sign is that of
    // P_{N−1} on the band.
    let mut count = 0;
    for (a, n) in [(0.9, 3), (0.5, 4), (1.5, 5), (0.9, 2)] {
        let s = spec(a, n);
        let m = OrthogonalityMeasure::new(&s).unwrap();
        let bands = m.bands().bands();
        for (lo, hi) in bands {
            for i in 1..=13 {
                let x = lo + (hi - lo) * i as f64 / 14.0;
                let w = m.weight(x).unwrap();
                let theta = discriminant_value(&s, x).acos();
                let p = poly_values(&s, 8 * n, x);
                let sign = p[n - 1].signum();
                for j in 1..=8 {
                    let got = p[j * n - 1] * w;
                    let want = sign * 2.0 / PI * (j as f64 * theta).sin();
                    assert!((got - want).abs() < 1e-8, "a={} N={} x={} j={}", a, n, x, j);
                }
                count += 1;
            }
        }
    }
    assert!(count >= 50);
}
