use orthoiso::canonical::{CanonicalSpec, SegmentSpec};
use orthoiso::isotropy::{verify, Frame};
use orthoiso::json;
use orthoiso::oracle::segment_specs;
use orthoiso::random;
use orthoiso::solver::{congruence_solve, free_shape, solution_dim_for, CongruenceProblem, FreeData};
use orthoiso::toeplitz::{congruence_form, f_block, reshuffle, unshuffle, AltToeplitzData, Parity, ToeplitzElement};
use orthoiso::{ExactScalar as X, Matrix, Rational, Scalar};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = X> {
    prop::array::uniform4((-6i64..=6, 1i64..=5))
        .prop_map(|c| X::from_components(&c.map(|(n, d)| Rational::new(n.into(), d.into()))))
}

fn small_spec(max_weight: usize) -> impl Strategy<Value = SegmentSpec> {
    let specs = segment_specs(max_weight);
    (0..specs.len()).prop_map(move |i| specs[i].clone())
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Standard), Just(Parity::Flipped)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            prop_assert_eq!(a.mul(&b).div(&a).unwrap(), b);
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn matrix_inverse_and_transpose(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = random::rng(seed);
        let a: Matrix<X> = random::invertible(&mut rng, n);
        let b: Matrix<X> = random::matrix(&mut rng, n, n);
        prop_assert!((&a * &a.inverse().unwrap()).is_identity());
        prop_assert_eq!((&a * &b).transpose(), &b.transpose() * &a.transpose());
        prop_assert_eq!(a.rank(), n);
    }

    #[test]
    fn solver_is_sound(spec in small_spec(6), parity in parity(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        if let Ok((problem, free)) = CongruenceProblem::<X>::random(&spec, parity, &mut rng) {
            let x = congruence_solve(&problem, &free).unwrap();
            let f = f_block::<X>(&spec);
            prop_assert_eq!(congruence_form(&f, &problem.b().assemble(), &x.assemble()), problem.c().assemble());
            let slots: usize = free_shape(problem.b()).iter().map(|s| s.dim).sum();
            prop_assert_eq!(slots, solution_dim_for(&spec, parity));
        }
    }

    #[test]
    fn free_data_is_recovered(spec in small_spec(6), parity in parity(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        if let Ok(b) = AltToeplitzData::<X>::random(&spec, parity, &mut rng) {
            let seeds: Vec<Matrix<X>> = (0..spec.len()).map(|r| b.get(r, 0)).collect();
            let b = AltToeplitzData::from_seeds(spec.clone(), &seeds).unwrap();
            let problem = CongruenceProblem::new(b.clone(), b).unwrap();
            let free = FreeData::random(&problem, &mut rng).unwrap();
            let x = congruence_solve(&problem, &free).unwrap();
            prop_assert_eq!(FreeData::of_solution(&problem, &x).unwrap(), free);
        }
    }

    #[test]
    fn toeplitz_closure(spec in small_spec(6), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let x = ToeplitzElement::<X>::random(&spec, &mut rng);
        let y = ToeplitzElement::<X>::random(&spec, &mut rng);
        let xy = x.product(&y).unwrap();
        prop_assert_eq!(xy.assemble(), &x.assemble() * &y.assemble());
        prop_assert!(x.inverse().unwrap().product(&x).unwrap().is_identity());
        let (d, u) = xy.semidirect_factor().unwrap();
        prop_assert!(u.is_unipotent());
        prop_assert_eq!(d.product(&u).unwrap(), xy);
        let r = unshuffle(&spec, &x.assemble()).unwrap();
        prop_assert_eq!(reshuffle(&spec, &r).unwrap(), x.assemble());
    }

    #[test]
    fn json_round_trips(spec in small_spec(5), parity in parity(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let x = ToeplitzElement::<X>::random(&spec, &mut rng);
        let back: ToeplitzElement<X> = json::toeplitz_from_json(&json::toeplitz_to_json(&x)).unwrap();
        prop_assert_eq!(back, x.clone());
        let m = x.assemble();
        let text = json::matrix_to_json(&m).to_string();
        prop_assert_eq!(json::matrix_from_json::<X>(&json::parse(&text).unwrap()).unwrap(), m);
        if let Ok((problem, free)) = CongruenceProblem::<X>::random(&spec, parity, &mut rng) {
            let p2: CongruenceProblem<X> = json::problem_from_json(&json::problem_to_json(&problem)).unwrap();
            prop_assert_eq!(p2.b(), problem.b());
            prop_assert_eq!(p2.c(), problem.c());
            prop_assert_eq!(json::free_from_json::<X>(&json::free_to_json(&free)).unwrap(), free);
        }
    }

    #[test]
    fn sampled_elements_stabilize(spec in small_spec(4), nilpotent in any::<bool>(), seed in any::<u64>()) {
        let (a, m) = (spec.alpha().to_vec(), spec.mu().to_vec());
        let spec = if nilpotent {
            CanonicalSpec::<X>::nilpotent(a, m)
        } else {
            CanonicalSpec::<X>::nonzero(X::from_frac(2, 3), a, m)
        }
        .unwrap();
        let frame = Frame::new(&spec).unwrap();
        let el = frame.sample(&mut random::rng(seed)).unwrap();
        prop_assert!(verify(frame.form(), &el.q, 0.0).unwrap().verified);
        let q2 = &el.q * &frame.sample(&mut random::rng(seed ^ 1)).unwrap().q;
        prop_assert!(verify(frame.form(), &q2, 0.0).unwrap().verified);
    }
}
