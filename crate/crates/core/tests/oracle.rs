mod common;

use common::{Kind, WalkFilter};
use latpoly::enumeration::{count, edge_profile, span_stats, surface_profile, Constraint, EnsembleSpec};
use latpoly::lattice::AnimalConvention;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

fn u(x: &BigUint) -> u64 {
    x.to_u64().unwrap()
}

fn profile_u64(p: &latpoly::enumeration::SurfaceProfile) -> Vec<u64> {
    common::trim(p.counts.iter().map(u).collect())
}

fn spec(kind: Kind, dim: usize, n: usize, c: Constraint) -> EnsembleSpec {
    match kind {
        Kind::Tree => EnsembleSpec::trees(dim, n, c),
        Kind::SiteAnimal => EnsembleSpec::animals(dim, n, c, AnimalConvention::Site),
        Kind::SubgraphAnimal => EnsembleSpec::animals(dim, n, c, AnimalConvention::Subgraph),
    }
}

#[test]
fn polymer_ensembles_match_growth_oracle_in_three_dimensions() {
    for kind in [Kind::Tree, Kind::SiteAnimal, Kind::SubgraphAnimal] {
        for n in 1..=4 {
            let cl = common::classes(kind, 3, n);
            let k = cl.len() as u64;
            assert_eq!(u(&count(&spec(kind, 3, n, Constraint::TranslationClasses)).unwrap()), k);
            assert_eq!(u(&count(&spec(kind, 3, n, Constraint::ContainsOrigin)).unwrap()), n as u64 * k);
            assert_eq!(
                u(&count(&spec(kind, 3, n, Constraint::LexStar)).unwrap()),
                common::lex_star_count(&cl),
                "{kind:?} N={n}"
            );
            let hs = surface_profile(&spec(kind, 3, n, Constraint::HalfSpace)).unwrap();
            assert_eq!(profile_u64(&hs), common::trim(common::half_space_profile(&cl)));
        }
    }
}

#[test]
fn contact_profiles_match_in_two_dimensions() {
    for kind in [Kind::Tree, Kind::SiteAnimal, Kind::SubgraphAnimal] {
        for n in 1..=6 {
            let cl = common::classes(kind, 2, n);
            let pen = surface_profile(&spec(kind, 2, n, Constraint::ContainsOrigin)).unwrap();
            assert_eq!(profile_u64(&pen), common::trim(common::penetrable_profile(&cl)));
            let hs = surface_profile(&spec(kind, 2, n, Constraint::HalfSpace)).unwrap();
            assert_eq!(profile_u64(&hs), common::trim(common::half_space_profile(&cl)));
            let s = span_stats(&spec(kind, 2, n, Constraint::TranslationClasses)).unwrap();
            let hist = common::histogram(cl.iter().map(|g| g.span()));
            assert_eq!(common::trim(s.histogram.iter().map(u).collect()), common::trim(hist));
        }
    }
}

#[test]
fn walk_ensembles_match_step_filter() {
    for (dim, max_n) in [(2, 8), (3, 5)] {
        for n in 1..=max_n {
            let free = common::walks(dim, n, WalkFilter::Free);
            assert_eq!(u(&count(&EnsembleSpec::walks(dim, n, Constraint::ContainsOrigin)).unwrap()), free.len() as u64);
            let br = common::walks(dim, n, WalkFilter::Bridge);
            assert_eq!(u(&count(&EnsembleSpec::walks(dim, n, Constraint::Bridge)).unwrap()), br.len() as u64);
            let hs = common::walks(dim, n, WalkFilter::HalfSpace);
            let spec = EnsembleSpec::walks(dim, n, Constraint::HalfSpace);
            assert_eq!(
                profile_u64(&surface_profile(&spec).unwrap()),
                common::trim(common::histogram(hs.iter().map(|w| common::site_contacts(w))))
            );
            assert_eq!(
                profile_u64(&edge_profile(&spec).unwrap()),
                common::trim(common::histogram(hs.iter().map(|w| common::edge_contacts(w))))
            );
        }
    }
}

#[test]
fn bridge_span_fractions_match() {
    for n in 1..=8 {
        let br = common::walks(2, n, WalkFilter::Bridge);
        let s = span_stats(&EnsembleSpec::walks(2, n, Constraint::Bridge)).unwrap();
        let spans = br.iter().map(|w| {
            let lo = w.iter().map(|p| p[0]).min().unwrap();
            let hi = w.iter().map(|p| p[0]).max().unwrap();
            (hi - lo + 1) as u64
        });
        let below = spans.filter(|&sp| sp <= s.threshold).count() as u64;
        assert_eq!(u(&s.below), below, "N={n}");
        assert_eq!(u(&s.total), br.len() as u64);
    }
}
