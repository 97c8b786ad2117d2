use proptest::prelude::*;

use scan_spectra::models::{build_ising, GraphSpec};
use scan_spectra::operators::{sequence_product_kernel, SiteKernelSet};
use scan_spectra::schedules::{first_appearances, UpdateSequence};
use scan_spectra::spectral::{glauber_gap, sequence_gap_bound, PiGeometry};

fn ising(n: usize, beta: f64, field: f64) -> SiteKernelSet {
    SiteKernelSet::from_distribution(&build_ising(&GraphSpec::cycle(n).unwrap(), beta, field).unwrap()).unwrap()
}

// partial products are reducible, so go through the unchecked geometry
fn norm(k: &SiteKernelSet, seq: &[usize]) -> f64 {
    let p = sequence_product_kernel(k, seq).unwrap();
    PiGeometry::new(p.pi()).operator_norm(p.matrix())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reversed_sequence_has_the_same_norm(
        beta in -1.5f64..1.5,
        field in -0.5f64..0.5,
        seq in prop::collection::vec(0usize..4, 1..12),
    ) {
        let k = ising(4, beta, field);
        let mut rev = seq.clone();
        rev.reverse();
        prop_assert!((norm(&k, &seq) - norm(&k, &rev)).abs() < 1e-9);
    }

    #[test]
    fn appending_factors_never_raises_the_norm(
        beta in -1.5f64..1.5,
        head in prop::collection::vec(0usize..4, 1..8),
        tail in prop::collection::vec(0usize..4, 1..8),
    ) {
        let k = ising(4, beta, 0.1);
        let mut both = head.clone();
        both.extend(&tail);
        let n = norm(&k, &both);
        prop_assert!(n <= norm(&k, &head) + 1e-9);
        prop_assert!(n <= norm(&k, &tail) + 1e-9);
    }

    #[test]
    fn covering_sequences_meet_the_squared_bound(
        beta in -1.0f64..1.0,
        field in 0.0f64..0.3,
        perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle(),
        extra in prop::collection::vec(0usize..4, 0..10),
    ) {
        let k = ising(4, beta, field);
        let mut indices = extra.clone();
        indices.extend(&perm);
        let seq = UpdateSequence::new(indices, 4).unwrap();
        prop_assert!(first_appearances(&seq).covered);
        let r = sequence_gap_bound(&k, &seq, glauber_gap(&k).unwrap()).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }
}
