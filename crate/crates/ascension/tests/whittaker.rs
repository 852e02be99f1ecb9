use ascension::whittaker::*;
use std::time::Instant;

#[test]
fn ascension_figure_peaks() {
    let start = Instant::now();
    let expected = [(1.884, 2.488e-34), (1.922, 2.499e-34), (1.962, 2.510e-34)];
    let mut xs = vec![];
    for (tau, (x, y)) in expected.iter().enumerate() {
        let p = WhittakerParams::new(tau as u32, 50.0, 25.0).unwrap();
        let peak = main_peak(&p, 1.5, 2.5, 400).unwrap().unwrap();
        assert!((peak.abscissa - x).abs() < 0.002, "tau {tau}: {peak:?}");
        assert!((peak.ordinate - y).abs() < 0.01 * y, "tau {tau}: {peak:?}");
        xs.push(peak.abscissa);
    }
    for w in xs.windows(2) {
        assert!((w[1] - w[0] - 0.04).abs() < 0.005);
    }
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn contiguous_relation_holds() {
    let zs: Vec<f64> = (0..=40).map(|k| 1.0 + 2.0 * k as f64 / 40.0).collect();
    for tau in 0..=2 {
        for s1 in [25.0, 50.0] {
            let p = WhittakerParams::new(tau, s1, 1.0).unwrap();
            let worst = contiguous_residual(&p, &zs).unwrap().into_iter().fold(0.0, f64::max);
            assert!(worst < 1e-8, "tau {tau} s1 {s1}: {worst}");
        }
    }
}

#[test]
fn ode_residual_on_samples() {
    // second differences of W against the equation, in log-safe units
    let p = WhittakerParams::new(1, 25.0, 1.0).unwrap();
    let h = 1e-3;
    for z in [1.5, 10.0, 40.0, 80.0] {
        let t = whittaker_table(&p, &[z - 2.0 * h, z - h, z, z + h, z + 2.0 * h]).unwrap();
        let r = t.w[2].log_abs;
        let v: Vec<f64> = t.w.iter().map(|w| w.sign * (w.log_abs - r).exp()).collect();
        let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
        let k = -0.25 + 1.0 / z + (625.0 + 0.25) / (z * z);
        let scale = k.abs().max(d2.abs()).max(1e-3);
        assert!((d2 + k * v[2]).abs() < 1e-6 * scale, "z {z}: {}", (d2 + k * v[2]).abs() / scale);
    }
}

#[test]
fn normalisation_at_large_argument() {
    let p = WhittakerParams::new(2, 3.0, 1.0).unwrap();
    let z = 4000.0;
    let t = whittaker_table(&p, &[z]).unwrap();
    let lead = -z / 2.0 + 2.0 * z.ln();
    assert!((t.w[0].log_abs - lead).abs() < 1e-2);
    assert_eq!(t.w[0].sign, 1.0);
}
