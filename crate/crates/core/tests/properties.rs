use std::collections::BTreeMap;
use std::sync::OnceLock;

use latpoly::adsorption::{PartitionPolynomial, PartitionQuery, Surface};
use latpoly::constructions::{
    attach_marks_tree, bridge_concat, detach_marks_tree, in_lex_star, tree_concat,
    tree_concat_inverse, Inverse, MarkedPolymer,
};
use latpoly::enumeration::{enumerate, Constraint, EnsembleSpec, Model};
use latpoly::io::{CountTable, TableKey};
use latpoly::lattice::{contacts, surface_sites, Polymer, Walk};
use num_bigint::BigUint;
use proptest::prelude::*;

fn polymers(spec: EnsembleSpec) -> Vec<Polymer> {
    enumerate(&spec, None)
        .unwrap()
        .into_iter()
        .map(|m| m.as_polymer().unwrap().clone())
        .collect()
}

fn lex_star(n: usize) -> &'static [Polymer] {
    static CACHE: OnceLock<Vec<Vec<Polymer>>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        (0..=5)
            .map(|n| {
                if n == 0 {
                    Vec::new()
                } else {
                    polymers(EnsembleSpec::trees(2, n, Constraint::LexStar))
                }
            })
            .collect()
    })[n]
}

fn half_space(n: usize) -> &'static [Polymer] {
    static CACHE: OnceLock<Vec<Vec<Polymer>>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        (0..=6)
            .map(|n| {
                if n == 0 {
                    Vec::new()
                } else {
                    polymers(EnsembleSpec::trees(2, n, Constraint::HalfSpace))
                }
            })
            .collect()
    })[n]
}

fn bridges(n: usize) -> Vec<Walk> {
    enumerate(&EnsembleSpec::walks(2, n, Constraint::Bridge), None)
        .unwrap()
        .into_iter()
        .map(|m| m.as_walk().unwrap().clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concat_adds_contacts_and_inverts(n in 1usize..=5, m in 1usize..=5, i in any::<usize>(), j in any::<usize>()) {
        let a = &lex_star(n)[i % lex_star(n).len()];
        let b = &lex_star(m)[j % lex_star(m).len()];
        let t = tree_concat(a, b).unwrap();
        prop_assert!(t.is_tree() && in_lex_star(&t));
        prop_assert_eq!(t.len(), n + m);
        prop_assert_eq!(contacts(&t), contacts(a) + contacts(b));
        prop_assert_eq!(tree_concat_inverse(&t, n, m).unwrap(), Inverse::Preimage((a.clone(), b.clone())));
    }

    #[test]
    fn marks_round_trip(n in 1usize..=6, i in any::<usize>(), raw in proptest::collection::vec(0u32..4, 6)) {
        let base = &half_space(n)[i % half_space(n).len()];
        let marks: BTreeMap<_, _> = surface_sites(base).into_iter().zip(raw).collect();
        let total: u32 = marks.values().sum();
        let marked = MarkedPolymer::new(base.clone(), marks).unwrap();
        let grown = attach_marks_tree(&marked).unwrap();
        prop_assert_eq!(grown.len(), n + total as usize);
        prop_assert!(grown.is_tree());
        prop_assert_eq!(detach_marks_tree(&grown).unwrap(), Inverse::Preimage(marked));
    }

    #[test]
    fn bridge_concat_is_a_bridge(n in 1usize..=4, m in 1usize..=4, i in any::<usize>(), j in any::<usize>()) {
        let (l, r) = (bridges(n), bridges(m));
        let a = &l[i % l.len()];
        let b = &r[j % r.len()];
        let w = bridge_concat(a, b).unwrap();
        prop_assert!(w.is_bridge());
        prop_assert_eq!(w.steps(), n + m);
        prop_assert_eq!(&w.points()[..=n], a.points());
    }

    #[test]
    fn log_partition_is_convex(n in 1usize..=6, b in -2.0f64..2.0, h in 0.01f64..0.5, model in 0usize..3, pen in any::<bool>()) {
        let model = [Model::Tree, Model::Animal, Model::Walk][model];
        let surface = if pen { Surface::Penetrable } else { Surface::Impenetrable };
        let p = PartitionPolynomial::for_query(&PartitionQuery::new(model, surface, 2, n, b)).unwrap();
        let second = p.ln_eval(b + h) - 2.0 * p.ln_eval(b) + p.ln_eval(b - h);
        prop_assert!(second >= -1e-12, "{}", second);
        let mean = p.mean_contacts(b);
        prop_assert!(mean >= 1.0 - 1e-12 && mean <= (n + 1) as f64 + 1e-12);
    }

    #[test]
    fn table_text_round_trips(values in proptest::collection::vec(proptest::collection::vec(any::<u32>(), 1..6), 1..8)) {
        let mut t = CountTable::default();
        for (n, digits) in values.iter().enumerate() {
            let v = BigUint::new(digits.clone());
            let key = TableKey::from(&EnsembleSpec::walks(3, n + 1, Constraint::Bridge));
            t.insert(key, v).unwrap();
        }
        prop_assert_eq!(CountTable::from_text(&t.to_text()).unwrap(), t);
    }
}
