use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("kappa needs at least one pair")]
    EmptyInput,
}

/// Cohen's kappa for binary (predicted, truth) pairs. Returns 1 when chance
/// agreement is already perfect.
pub fn cohens_kappa(pairs: &[(bool, bool)]) -> Result<f64, KappaError> {
    if pairs.is_empty() {
        return Err(KappaError::EmptyInput);
    }
    let n = pairs.len() as f64;
    let agree = pairs.iter().filter(|(p, t)| p == t).count() as f64;
    let pred_yes = pairs.iter().filter(|(p, _)| *p).count() as f64 / n;
    let truth_yes = pairs.iter().filter(|(_, t)| *t).count() as f64 / n;
    let po = agree / n;
    let pe = pred_yes * truth_yes + (1.0 - pred_yes) * (1.0 - truth_yes);
    if pe >= 1.0 {
        return Ok(if po >= 1.0 { 1.0 } else { 0.0 });
    }
    Ok((po - pe) / (1.0 - pe))
}

pub fn truncated(kappa: f64) -> f64 {
    kappa.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_agreement_with_mixed_labels() {
        let pairs = [(true, true), (false, false), (true, true), (false, false)];
        assert_eq!(cohens_kappa(&pairs).unwrap(), 1.0);
    }

    #[test]
    fn all_yes_against_balanced_truth_is_zero() {
        let pairs = [(true, true), (true, false), (true, true), (true, false)];
        assert!(cohens_kappa(&pairs).unwrap().abs() < 1e-12);
    }

    #[test]
    fn degenerate_single_class() {
        assert_eq!(cohens_kappa(&[(false, false); 5]).unwrap(), 1.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(cohens_kappa(&[]), Err(KappaError::EmptyInput));
    }

    #[test]
    fn systematic_disagreement_is_negative() {
        let pairs = [(true, false), (false, true), (true, false), (false, true)];
        assert_eq!(cohens_kappa(&pairs).unwrap(), -1.0);
        assert_eq!(truncated(-1.0), 0.0);
    }

    proptest! {
        #[test]
        fn label_swap_invariance(pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40)) {
            let flipped: Vec<_> = pairs.iter().map(|(p, t)| (!p, !t)).collect();
            let (a, b) = (cohens_kappa(&pairs).unwrap(), cohens_kappa(&flipped).unwrap());
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn bounded(pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40)) {
            let k = cohens_kappa(&pairs).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
        }
    }
}
