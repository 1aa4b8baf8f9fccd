use np_spectra::fredholm::{
    determinant_coeffs, determinant_product, iterated_traces, traces_from_spectrum, write_csv,
};
use np_spectra::geometry::Contour2D;
use np_spectra::operator::assemble_k2d_deflated;
use np_spectra::spectral::{eigenpairs, DEFAULT_REALNESS_TOL};

#[test]
fn matrix_and_eigenvalue_traces_agree() {
    for c in [Contour2D::ellipse(2.0, 1.0).unwrap(), Contour2D::kite().unwrap()] {
        let op = assemble_k2d_deflated(&c.sample(256).unwrap()).unwrap();
        let a = iterated_traces(&op, 6).unwrap();
        let sp = eigenpairs(&op, DEFAULT_REALNESS_TOL).unwrap();
        let b = traces_from_spectrum(&sp, 6, 128).unwrap();
        for n in 1..=6 {
            let (x, y) = (a.q_f64(n), b.q_f64(n));
            assert!((x - y).abs() < 1e-10 * x, "n={n} {x} {y}");
        }
    }
}

#[test]
fn ellipse_q2_oracle() {
    // sum over k of 2 * 3^(-2k) = 1/4.
    let op = assemble_k2d_deflated(&Contour2D::ellipse(2.0, 1.0).unwrap().sample(256).unwrap()).unwrap();
    let t = iterated_traces(&op, 3).unwrap();
    assert!((t.q_f64(1) - 0.25).abs() < 1e-12);
    assert!((t.q_f64(2) - 2.0 / 80.0).abs() < 1e-12);
}

#[test]
fn genus_zero_series_continues_past_first_zero() {
    let op = assemble_k2d_deflated(&Contour2D::kite().unwrap().sample(256).unwrap()).unwrap();
    let sp = eigenpairs(&op, DEFAULT_REALNESS_TOL).unwrap();
    let traces = traces_from_spectrum(&sp, 60, 256).unwrap();
    let coeffs = determinant_coeffs(&traces, 60).unwrap();
    let l1 = sp.modes[0].lambda.abs();
    assert!(coeffs.eval(sp.modes[0].lambda).abs() < 1e-12);
    for j in 0..=40 {
        let x = 2.0 * l1 * j as f64 / 40.0;
        let d = determinant_product(&sp, x).unwrap();
        assert!((coeffs.eval(x) - d).abs() < 1e-10, "lambda={x}");
    }
}

#[test]
fn csv_rows_match_traces() {
    let op = assemble_k2d_deflated(&Contour2D::ellipse(2.0, 1.0).unwrap().sample(64).unwrap()).unwrap();
    let t = iterated_traces(&op, 4).unwrap();
    let d = determinant_coeffs(&t, 4).unwrap();
    let mut out = Vec::new();
    write_csv(&mut out, &t, &d).unwrap();
    let text = String::from_utf8(out).unwrap();
    let row: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    let q2: f64 = row[1].parse().unwrap();
    assert_eq!(q2, t.q_f64(1));
}
