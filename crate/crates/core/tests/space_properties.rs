use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use parfait::space::Domain;
use parfait::{mutate_config, sample_uniform, HyperparameterSpace, LearnerKind, ParamDomain};

fn domain() -> impl Strategy<Value = ParamDomain> {
    prop_oneof![
        any::<bool>().prop_map(|d| ParamDomain::boolean("p", d)),
        (1usize..5, 0usize..5).prop_map(|(n, d)| {
            let cats: Vec<String> = (0..=n).map(|i| format!("v{i}")).collect();
            let refs: Vec<&str> = cats.iter().map(String::as_str).collect();
            ParamDomain::categorical("p", &refs, refs[d % refs.len()])
        }),
        (-50i64..50, 0i64..60, 0i64..60).prop_map(|(lo, w, d)| ParamDomain::integer("p", lo, lo + w, lo + d.min(w))),
        (-5.0f64..5.0, 0.01f64..10.0, 0.0f64..1.0).prop_map(|(lo, w, f)| ParamDomain::real("p", lo, lo + w, lo + f * w)),
    ]
}

fn space() -> impl Strategy<Value = HyperparameterSpace> {
    prop::collection::vec(domain(), 1..6).prop_map(|ds| {
        let params = ds
            .into_iter()
            .enumerate()
            .map(|(i, mut d)| {
                d.name = format!("p{i}");
                d
            })
            .collect();
        HyperparameterSpace::new(LearnerKind::DecisionTree, params).unwrap()
    })
}

proptest! {
    #[test]
    fn samples_are_in_domain(s in space(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            prop_assert!(s.contains(&sample_uniform(&s, &mut rng)));
        }
    }

    #[test]
    fn mutation_moves_exactly_one_coordinate(s in space(), seed in any::<u64>()) {
        prop_assume!(s.params.iter().any(|p| p.is_mutable()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = sample_uniform(&s, &mut rng);
        for _ in 0..20 {
            let next = mutate_config(&c, &s, &mut rng).unwrap();
            prop_assert!(s.contains(&next));
            prop_assert_eq!(c.hamming(&next), 1);
            c = next;
        }
    }

    #[test]
    fn space_text_round_trips(s in space()) {
        let back = HyperparameterSpace::parse(&s.to_text()).unwrap();
        prop_assert_eq!(back.params.len(), s.params.len());
        for (a, b) in back.params.iter().zip(&s.params) {
            prop_assert_eq!(&a.name, &b.name);
            prop_assert_eq!(&a.default, &b.default);
            match (&a.domain, &b.domain) {
                (Domain::Real { lo, hi, step }, Domain::Real { lo: l2, hi: h2, step: s2 }) => {
                    prop_assert_eq!((lo, hi, step), (l2, h2, s2));
                }
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }
}
