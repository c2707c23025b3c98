use proptest::prelude::*;

use fracsteps::model::{parse_problem, to_problem_text, validate, DelaySystem, PolyMatrix, SolverConfig};
use fracsteps::numeric::Rational;
use fracsteps::recurrence::{build_and_iterate, choose_alpha, SegmentProblem};
use fracsteps::series::{FracSeries, Polynomial, SeriesBasis};
use fracsteps::steps::solve;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn small_rational() -> impl Strategy<Value = (i64, i64)> {
    (-50i64..=50, 1i64..=50)
}

fn nu() -> impl Strategy<Value = Rational> {
    (1i64..=6).prop_flat_map(|q| (1..=q).prop_map(move |p| r(p, q)))
}

fn poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-3.0f64..3.0, 0..=max_len).prop_map(Polynomial::new)
}

fn matrix(n: usize, max_len: usize) -> impl Strategy<Value = PolyMatrix> {
    prop::collection::vec(poly(max_len), n * n).prop_map(move |e| PolyMatrix::new(n, n, e).unwrap())
}

/// Scalar system with one delay `1/d`.
fn scalar_system() -> impl Strategy<Value = DelaySystem> {
    (nu(), 1i64..=4, matrix(1, 2), matrix(1, 2), poly(2), poly(2)).prop_map(|(nu, d, a0, a1, u, phi)| DelaySystem {
        nu,
        n: 1,
        m: 1,
        delays: vec![r(1, d)],
        a: vec![a0, a1],
        b: PolyMatrix::new(1, 1, vec![Polynomial::constant(1.0)]).unwrap(),
        u: vec![u],
        phi: vec![phi],
        horizon: r(3, d),
    })
}

fn cfg(k_max: usize) -> SolverConfig {
    SolverConfig { k_max, sample_step: r(1, 10) }
}

proptest! {
    #[test]
    fn rational_arithmetic_matches_cross_multiplication((a, b) in small_rational(), (c, d) in small_rational()) {
        let (x, y) = (r(a, b), r(c, d));
        let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
        let holds = |z: Rational, num: i128, den: i128| z.numer() as i128 * den == num * z.denom() as i128;
        prop_assert!(holds(x.checked_add(y).unwrap(), a * d + c * b, b * d));
        prop_assert!(holds(x.checked_sub(y).unwrap(), a * d - c * b, b * d));
        prop_assert!(holds(x.checked_mul(y).unwrap(), a * c, b * d));
        if c != 0 {
            prop_assert!(holds(x.checked_div(y).unwrap(), a * d, b * c));
        } else {
            prop_assert!(x.checked_div(y).is_err());
        }
        prop_assert_eq!(x.cmp(&y), (a * d).cmp(&(c * b)));
        let sum = x.checked_add(y).unwrap();
        prop_assert!(sum.denom() > 0);
        prop_assert_eq!(gcd(sum.numer().unsigned_abs(), sum.denom() as u64), 1);
    }

    #[test]
    fn problem_text_round_trip(sys in scalar_system(), k in 1usize..60) {
        let cfg = cfg(k);
        let text = to_problem_text(&sys, &cfg);
        let (back, back_cfg) = parse_problem(&text).unwrap();
        prop_assert_eq!(back, sys);
        prop_assert_eq!(back_cfg, cfg);
    }

    #[test]
    fn parsing_is_total(text in "[a-z0-9_=/,.\\[\\]\\n #*^+-]{0,200}") {
        let _ = parse_problem(&text);
    }

    #[test]
    fn validate_is_total(
        (p, q) in (-3i64..=3, 1i64..=3),
        delays in prop::collection::vec((-2i64..=4, 1i64..=3), 0..=3),
        n in 0usize..=2,
        (h, hd) in (-1i64..=3, 1i64..=3),
    ) {
        let sys = DelaySystem {
            nu: r(p, q),
            n,
            m: 1,
            delays: delays.iter().map(|&(a, b)| r(a, b)).collect(),
            a: vec![PolyMatrix::zeros(n, n)],
            b: PolyMatrix::zeros(n, 1),
            u: vec![Polynomial::zero()],
            phi: vec![Polynomial::zero(); n],
            horizon: r(h, hd),
        };
        match validate(&sys) {
            Ok(()) => prop_assert!(solve(&sys, &cfg(10)).is_ok()),
            Err(v) => prop_assert!(!v.is_empty()),
        }
    }

    #[test]
    fn recurrence_satisfies_transformed_equation(
        nu in nu(),
        t0 in -1.0f64..1.0,
        a0 in matrix(2, 2),
        f in prop::collection::vec(poly(3), 2),
        x0 in prop::collection::vec(-2.0f64..2.0, 2),
    ) {
        let choice = choose_alpha(nu).unwrap();
        let basis = SeriesBasis::new(t0, choice.alpha, 24).unwrap();
        let series = |p: &Polynomial| FracSeries::from_polynomial(p, basis).unwrap();
        let prob = SegmentProblem {
            basis,
            a0: (0..2).map(|i| (0..2).map(|j| series(a0.get(i, j))).collect()).collect(),
            forcing: f.iter().map(series).collect(),
            x0: x0.clone(),
        };
        let x = build_and_iterate(&prob, &choice).unwrap();
        for i in 0..2 {
            prop_assert_eq!(x[i].coeff(0), x0[i]);
            let lhs = x[i].caputo_transform(nu).unwrap();
            let mut rhs = prob.forcing[i].clone();
            for (a, xj) in prob.a0[i].iter().zip(&x) {
                rhs.add_scaled(1.0, &a.cauchy_product(xj).unwrap()).unwrap();
            }
            for k in 0..=lhs.reliable_index() {
                let scale = 1.0f64.max(lhs.coeff(k).abs());
                prop_assert!((lhs.coeff(k) - rhs.coeff(k)).abs() <= 1e-10 * scale, "k={} {} vs {}", k, lhs.coeff(k), rhs.coeff(k));
            }
        }
    }

    #[test]
    fn integer_order_matches_taylor(
        a in poly(3),
        f in poly(3),
        x0 in -2.0f64..2.0,
    ) {
        const K: usize = 20;
        let choice = choose_alpha(Rational::ONE).unwrap();
        let basis = SeriesBasis::new(0.0, Rational::ONE, K).unwrap();
        let prob = SegmentProblem {
            basis,
            a0: vec![vec![FracSeries::from_polynomial(&a, basis).unwrap()]],
            forcing: vec![FracSeries::from_polynomial(&f, basis).unwrap()],
            x0: vec![x0],
        };
        let x = build_and_iterate(&prob, &choice).unwrap();
        // x' = a(t) x + f(t): (k+1) c[k+1] = Σ a_l c[k−l] + f_k
        let mut c = vec![x0];
        for k in 0..K {
            let conv: f64 = (0..=k).map(|l| a.coeff(l) * c[k - l]).sum();
            c.push((conv + f.coeff(k)) / (k + 1) as f64);
        }
        for (k, want) in c.iter().enumerate() {
            prop_assert!((x[0].coeff(k) - want).abs() <= 1e-12 * want.abs().max(1.0), "k={}", k);
        }
    }

    #[test]
    fn longer_horizon_leaves_earlier_segments_unchanged(sys in scalar_system(), extra in 1i64..=3) {
        let short = solve(&sys, &cfg(20)).unwrap();
        let mut longer = sys.clone();
        longer.horizon = sys.horizon.checked_add(sys.delays[0].checked_mul_int(extra).unwrap()).unwrap();
        let long = solve(&longer, &cfg(20)).unwrap();
        prop_assert_eq!(long.segments.len(), short.segments.len() + extra as usize);
        prop_assert_eq!(&long.segments[..short.segments.len()], &short.segments[..]);
    }

    #[test]
    fn solving_is_deterministic(sys in scalar_system()) {
        let first = solve(&sys, &cfg(20)).unwrap();
        let second = solve(&sys, &cfg(20)).unwrap();
        prop_assert_eq!(first, second);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
