mod common;

use approx::assert_abs_diff_eq;
use blackwell_polar::channel::*;
use blackwell_polar::functional::{eval, eval_mixture, Functional};
use proptest::prelude::*;

use common::{mixture, transition_of};

#[test]
fn transition_examples() {
    let bsc = blackwell_from_transition(&TransitionMatrix::bsc(0.05).unwrap());
    let atoms: Vec<_> = bsc.atoms().iter().map(|a| (a.s, a.w)).collect();
    assert_eq!(atoms, vec![(0.05, 0.5), (0.95, 0.5)]);

    let bec = blackwell_from_transition(&TransitionMatrix::bec(0.12).unwrap());
    let atoms: Vec<_> = bec.atoms().iter().map(|a| (a.s, a.w)).collect();
    assert_eq!(atoms, vec![(0.0, 0.44), (0.5, 0.12), (1.0, 0.44)]);

    let id = TransitionMatrix::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
    let atoms: Vec<_> = blackwell_from_transition(&id).atoms().iter().map(|a| (a.s, a.w)).collect();
    assert_eq!(atoms, vec![(0.0, 0.5), (1.0, 0.5)]);
}

#[test]
fn unreachable_outputs_are_dropped() {
    let t = TransitionMatrix::new(vec![0.9, 0.0, 0.1], vec![0.1, 0.0, 0.9]).unwrap();
    assert_eq!(blackwell_from_transition(&t).atoms().len(), 2);
}

#[test]
fn malformed_matrices_are_rejected() {
    assert!(TransitionMatrix::new(vec![0.5, 0.5], vec![1.0]).is_err());
    assert!(TransitionMatrix::new(vec![0.5, 0.6], vec![0.5, 0.5]).is_err());
    assert!(TransitionMatrix::new(vec![1.5, -0.5], vec![0.5, 0.5]).is_err());
    assert!(TransitionMatrix::new(vec![], vec![]).is_err());
}

#[test]
fn mixture_round_trips() {
    let m = blackwell_from_mixture(&make_bec(0.12).unwrap());
    assert_eq!(mixture_from_blackwell(&m).unwrap(), make_bec(0.12).unwrap());
    let split = BscMixture::new(vec![(0.5, 0.1), (0.5, 0.1)]).unwrap();
    assert_eq!(split, make_bsc(0.1).unwrap());
}

#[test]
fn asymmetric_measure_has_no_decomposition() {
    // Mean 1/2 but mirror weights differ.
    let m = BlackwellMeasure::new(vec![(0.2, 0.25), (0.6, 0.75)]).unwrap();
    assert!(!m.symmetry().symmetric);
    assert!(matches!(mixture_from_blackwell(&m), Err(blackwell_polar::Error::Asymmetric(_))));
}

#[test]
fn measures_must_have_mean_one_half() {
    assert!(BlackwellMeasure::new(vec![(0.2, 0.6), (0.8, 0.4)]).is_err());
    assert!(BlackwellMeasure::new(vec![(0.2, 0.5), (0.8, 0.4)]).is_err());
}

#[test]
fn compound_examples() {
    let bec = compound(&[(0.88, make_bsc(0.0).unwrap()), (0.12, make_bsc(0.5).unwrap())]).unwrap();
    assert_eq!(bec, make_bec(0.12).unwrap());
    let c = make_hybrid(0.3, 0.2).unwrap();
    assert_eq!(compound(&[(1.0, c.clone())]).unwrap(), c);
    assert!(compound(&[(0.5, c.clone()), (0.4, c)]).is_err());
}

#[test]
fn hybrid_capacity() {
    let i = eval_mixture(&make_hybrid(0.12, 0.05).unwrap(), &Functional::Capacity);
    assert_abs_diff_eq!(i, 0.6280, epsilon = 5e-5);
}

#[test]
fn spec_json_forms() {
    for text in [
        r#"{"type":"bsc","p":0.05}"#,
        r#"{"type":"bec","eps":0.12}"#,
        r#"{"type":"hybrid","eps":0.12,"p":0.05}"#,
        r#"{"type":"mixture","components":[{"lambda":0.88,"p":0.05},{"lambda":0.12,"p":0.5}]}"#,
        r#"{"type":"transition","matrix":[[0.9,0.1],[0.1,0.9]]}"#,
    ] {
        let spec = ChannelSpec::from_json(text).unwrap();
        let m = spec.to_measure().unwrap();
        assert_abs_diff_eq!(m.mean(), 0.5, epsilon = 1e-12);
        spec.to_mixture().unwrap();
    }
    assert_eq!(
        ChannelSpec::from_json(r#"{"type":"hybrid","eps":0.12,"p":0.05}"#).unwrap().to_mixture().unwrap(),
        ChannelSpec::from_json(r#"{"type":"mixture","components":[{"lambda":0.88,"p":0.05},{"lambda":0.12,"p":0.5}]}"#)
            .unwrap()
            .to_mixture()
            .unwrap()
    );
    assert!(ChannelSpec::from_json(r#"{"type":"bsc","q":0.05}"#).is_err());
    assert!(ChannelSpec::from_json(r#"{"type":"bsc","p":1.5}"#).unwrap().to_mixture().is_err());
}

proptest! {
    #[test]
    fn mixture_measures_are_valid_and_symmetric(c in mixture(6)) {
        let m = blackwell_from_mixture(&c);
        prop_assert!((m.total_weight() - 1.0).abs() <= 1e-9);
        prop_assert!((m.mean() - 0.5).abs() <= 1e-9);
        prop_assert!(m.symmetry().symmetric);
        prop_assert!(m.atoms().windows(2).all(|w| w[1].s - w[0].s > 1e-12));
    }

    #[test]
    fn measure_mixture_round_trip(c in mixture(6)) {
        let m = blackwell_from_mixture(&c);
        let back = blackwell_from_mixture(&mixture_from_blackwell(&m).unwrap());
        prop_assert_eq!(m.atoms().len(), back.atoms().len());
        for (a, b) in m.atoms().iter().zip(back.atoms()) {
            prop_assert!((a.s - b.s).abs() <= 1e-12 && (a.w - b.w).abs() <= 1e-12);
        }
    }

    #[test]
    fn explicit_matrix_gives_same_measure(c in mixture(5)) {
        let direct = blackwell_from_mixture(&c);
        let via = blackwell_from_transition(&transition_of(&c));
        prop_assert!(common::measure_distance(&direct, &via) <= 1e-12);
        prop_assert!((eval(&via, &Functional::Capacity) - eval(&direct, &Functional::Capacity)).abs() <= 1e-12);
    }

    #[test]
    fn mixtures_are_canonical(c in mixture(8)) {
        let k = c.components();
        prop_assert!(k.iter().all(|x| (0.0..=0.5).contains(&x.p) && x.lambda > 0.0));
        prop_assert!(k.windows(2).all(|w| w[1].p > w[0].p));
        prop_assert!((c.total_weight() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn compound_capacity_is_weighted_sum(a in mixture(3), b in mixture(3), w in 0.05..0.95f64) {
        let c = compound(&[(w, a.clone()), (1.0 - w, b.clone())]).unwrap();
        let i = |x: &BscMixture| eval_mixture(x, &Functional::Capacity);
        prop_assert!((i(&c) - (w * i(&a) + (1.0 - w) * i(&b))).abs() <= 1e-12);
    }

    #[test]
    fn folding_is_an_equivalence(p in 0.0..=1.0f64) {
        let (a, b) = (make_bsc(p).unwrap(), make_bsc(1.0 - p).unwrap());
        prop_assert!((a.components()[0].p - b.components()[0].p).abs() <= 1e-15);
    }
}
