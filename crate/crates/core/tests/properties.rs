use cfdim::assembly::{assemble, Correction, OperatorSpec, WeightFamily};
use cfdim::maps::{fold_to_upper, Symmetry};
use cfdim::mesh::{MeshDomain, Region};
use cfdim::solver::{bracket_dimension, radius_bounds, special_example_alphabet, SolveConfig};
use cfdim::spectral::{power_method, verify_certificate, Direction};
use cfdim::Alphabet;
use num_complex::Complex64;
use proptest::prelude::*;

fn ratio_gap(n: i64, s: f64) -> f64 {
    let cfg = SolveConfig::new(Alphabet::i3(), n, f64::INFINITY);
    let rb = radius_bounds(&cfg, s).unwrap();
    rb.r_upper() / rb.r_lower() - 1.0
}

#[test]
fn radius_gap_shrinks_like_h_squared() {
    let coarse = ratio_gap(24, 1.5377);
    let fine = ratio_gap(48, 1.5377);
    let ratio = coarse / fine;
    assert!(coarse > 0.0 && fine > 0.0);
    assert!((4.0 * 0.7..=4.0 * 1.3).contains(&ratio), "gap ratio {ratio}");
}

fn special_residual(n: i64) -> f64 {
    let mesh = MeshDomain::build(n, Region::HalfDisk).unwrap();
    let mut spec = OperatorSpec::new(special_example_alphabet(), 1.0, f64::INFINITY, 0.0, Correction::None);
    spec.weights = WeightFamily::SpecialExample;
    let m = assemble(&mesh, &spec).unwrap();
    let f: Vec<f64> = mesh
        .points()
        .iter_coords()
        .map(|(x, y)| 1.0 / Complex64::new(x + 1.0, y).norm_sqr())
        .collect();
    let mf = m.apply(&f).unwrap();
    mf.iter().zip(&f).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs() / b))
}

#[test]
fn known_eigenfunction_residual_is_second_order() {
    let scaled = |n: i64| special_residual(n) * (n * n) as f64;
    let c = scaled(26);
    assert!(scaled(50) <= 1.2 * c, "C(26) = {c}, C(50) = {}", scaled(50));
    for n in [12, 16, 32, 64, 96] {
        assert!(scaled(n) <= 0.4, "N = {n}: residual / h^2 = {}", scaled(n));
    }
    assert!(special_residual(50) <= 10.0 / 2500.0);
}

#[test]
fn radius_bounds_straddle_the_i3_bracket() {
    let cfg = SolveConfig::new(Alphabet::i3(), 50, f64::INFINITY);
    assert!(radius_bounds(&cfg, 1.5380).unwrap().r_upper() <= 1.0);
    assert!(radius_bounds(&cfg, 1.5370).unwrap().r_lower() >= 1.0);
}

#[test]
fn i1_radius_sandwich_on_fine_mesh() {
    let cfg = SolveConfig::new(Alphabet::i1(), 100, 100.0);
    let rb = radius_bounds(&cfg, 1.8558).unwrap();
    assert!(rb.lower.cw_upper <= rb.upper.cw_lower);
}

#[test]
fn computed_eigenvector_certifies_radius_below_one() {
    let cfg = SolveConfig::new(Alphabet::i3(), 50, f64::INFINITY);
    let mesh = cfg.mesh().unwrap();
    let s = 1.53797;
    let b = assemble(&mesh, &OperatorSpec::new(Alphabet::i3(), s, f64::INFINITY, 0.0, Correction::Upper)).unwrap();
    let r = power_method(&b, 1e-10, 100_000).unwrap();
    assert!(r.cw_upper < 1.0 && r.cw_upper > 0.999);
    assert!(verify_certificate(&b, &r.vector, Direction::UpperDominates, 0.0));
    assert!(!verify_certificate(&b, &r.vector, Direction::LowerDominates, 0.0));
}

#[test]
fn brackets_narrow_with_the_mesh() {
    for alphabet in [Alphabet::i1(), Alphabet::i2()] {
        let width = |n| {
            bracket_dimension(&SolveConfig::new(alphabet.clone(), n, 40.0))
                .unwrap()
                .width()
        };
        let (coarse, fine) = (width(50), width(100));
        assert!(fine < coarse, "{}: {fine} >= {coarse}", alphabet.label());
    }
}

#[test]
fn i2_bracket_reverifies() {
    let b = bracket_dimension(&SolveConfig::new(Alphabet::i2(), 20, 30.0)).unwrap();
    assert!(b.alpha_lower > 0.0 && b.alpha_lower < b.alpha_upper);
    assert_eq!(b.verify().unwrap(), (true, true));
}

fn half_disk_point() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::PI, 0.0..1.0f64).prop_map(|(t, r)| {
        let rho = 0.5 * r.sqrt();
        (0.5 + rho * t.cos(), rho * t.sin())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bilinear_functions_interpolate_exactly(
        (x, y) in half_disk_point(),
        c in prop::array::uniform4(-3.0..3.0f64),
        n in prop::sample::select(vec![2i64, 6, 10, 24, 50]),
    ) {
        let mesh = MeshDomain::build(n, Region::HalfDisk).unwrap();
        let f = |x: f64, y: f64| c[0] + c[1] * x + c[2] * y + c[3] * x * y;
        let st = mesh.bilinear_weights(x, y).unwrap();
        let interp: f64 = st
            .corners
            .iter()
            .zip(&st.weights)
            .map(|(&k, &w)| {
                let (px, py) = mesh.point(k);
                w * f(px, py)
            })
            .sum();
        prop_assert!((interp - f(x, y)).abs() < 1e-12);
        prop_assert!((st.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        prop_assert!(st.bracket >= 0.0 && st.bracket <= mesh.h() * mesh.h() / 2.0);
    }

    #[test]
    fn folding_is_idempotent(x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let once = fold_to_upper(x, y, Symmetry::ConjugationSymmetric).unwrap();
        prop_assert_eq!(once, fold_to_upper(once.0, once.1, Symmetry::ConjugationSymmetric).unwrap());
        prop_assert!(once.1 >= 0.0);
    }

    #[test]
    fn operators_are_linear(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        s in 1.1..2.0f64,
        seed in any::<u64>(),
    ) {
        let mesh = MeshDomain::build(12, Region::HalfDisk).unwrap();
        let m = assemble(&mesh, &OperatorSpec::new(Alphabet::i3(), s, f64::INFINITY, 0.1, Correction::None)).unwrap();
        let n = mesh.len();
        let x: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64) % 97) as f64) / 97.0).collect();
        let y: Vec<f64> = (0..n).map(|i| ((seed.wrapping_mul(31).wrapping_add(7 * i as u64) % 89) as f64) / 89.0).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = m.apply(&combo).unwrap();
        let (mx, my) = (m.apply(&x).unwrap(), m.apply(&y).unwrap());
        for i in 0..n {
            let rhs = a * mx[i] + b * my[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn corrected_matrices_sandwich_the_plain_one(s in 1.05..2.5f64, n in prop::sample::select(vec![10i64, 20, 30])) {
        let mesh = MeshDomain::build(n, Region::HalfDisk).unwrap();
        let build = |c| assemble(&mesh, &OperatorSpec::new(Alphabet::i3(), s, f64::INFINITY, 0.0, c)).unwrap();
        let (a, m, b) = (build(Correction::Lower), build(Correction::None), build(Correction::Upper));
        for ((ta, tm), tb) in a.triplets().zip(m.triplets()).zip(b.triplets()) {
            prop_assert!(ta.2 <= tm.2 && tm.2 <= tb.2);
        }
        let ra = power_method(&a, 1e-10, 100_000).unwrap();
        let rb = power_method(&b, 1e-10, 100_000).unwrap();
        prop_assert!(ra.lambda <= rb.lambda);
    }
}
