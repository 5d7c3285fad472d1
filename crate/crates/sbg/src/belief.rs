//! Semantic and geometric belief types with categorical Bayesian updates.
//!
//! A semantic belief is a categorical distribution over `d_l` named terrain
//! classes plus a reserved trailing `unknown` class. The geometric belief is
//! a mean/covariance pair that is stored and validated but never filtered;
//! planning assumes accurate geometric localization.

use crate::error::{Result, SbgError};
use serde::{Deserialize, Serialize};

/// Tolerance on the probability-sum invariant after construction.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Inputs whose sum deviates by at most this much are renormalized;
/// worse deviations are rejected as malformed.
const RENORM_TOLERANCE: f64 = 1e-6;

/// Dense index of a terrain class within a [`ClassSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId(pub usize);

/// Fixed set of terrain classes. The last index is always the reserved
/// `unknown` class; the `d_l` preceding indices are the named classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSet {
    names: Vec<String>,
}

pub const UNKNOWN_NAME: &str = "unknown";

impl ClassSet {
    /// Builds a class set from named classes; `unknown` is appended automatically.
    pub fn new<S: AsRef<str>>(named: &[S]) -> Result<Self> {
        if named.is_empty() {
            return Err(SbgError::invalid(
                "class set must have at least one named class",
            ));
        }
        let mut names: Vec<String> = Vec::with_capacity(named.len() + 1);
        for n in named {
            let n = n.as_ref();
            if n == UNKNOWN_NAME {
                return Err(SbgError::invalid(
                    "`unknown` is reserved and always appended last",
                ));
            }
            if names.iter().any(|x| x == n) {
                return Err(SbgError::invalid(format!("duplicate class name `{n}`")));
            }
            names.push(n.to_string());
        }
        names.push(UNKNOWN_NAME.to_string());
        Ok(ClassSet { names })
    }

    /// Total class count, `d_l + 1`.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least flat + unknown
    }

    /// Number of named classes, `d_l`.
    pub fn named_count(&self) -> usize {
        self.names.len() - 1
    }

    pub fn unknown(&self) -> ClassId {
        ClassId(self.names.len() - 1)
    }

    pub fn is_unknown(&self, c: ClassId) -> bool {
        c == self.unknown()
    }

    pub fn name(&self, c: ClassId) -> &str {
        &self.names[c.0]
    }

    pub fn index_of(&self, name: &str) -> Option<ClassId> {
        self.names.iter().position(|n| n == name).map(ClassId)
    }

    /// Iterates the named classes (everything except `unknown`).
    pub fn named(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.named_count()).map(ClassId)
    }

    pub fn all(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.len()).map(ClassId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Categorical distribution over `d_l + 1` terrain classes; the last entry
/// is always the `unknown` class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticBelief {
    probs: Vec<f64>,
}

impl SemanticBelief {
    /// Validates (and if needed renormalizes) a probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(SbgError::invalid(
                "semantic belief needs at least one named class plus unknown",
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(SbgError::invalid(
                "belief entries must be finite and non-negative",
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > RENORM_TOLERANCE {
            return Err(SbgError::invalid(format!(
                "belief entries sum to {sum}, outside renormalization tolerance"
            )));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(SemanticBelief { probs })
    }

    /// Uniform distribution over all `d_l + 1` classes.
    pub fn uniform_prior(classes: &ClassSet) -> SemanticBelief {
        let n = classes.len();
        SemanticBelief {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Puts `unknown_mass` on `unknown` and spreads the rest uniformly over
    /// the named classes.
    pub fn unknown_prior(classes: &ClassSet, unknown_mass: f64) -> Result<SemanticBelief> {
        if !(unknown_mass > 0.0 && unknown_mass <= 1.0) {
            return Err(SbgError::invalid(format!(
                "unknown_mass must be in (0, 1], got {unknown_mass}"
            )));
        }
        let d = classes.named_count();
        let named = (1.0 - unknown_mass) / d as f64;
        let mut probs = vec![named; d];
        probs.push(unknown_mass);
        Ok(SemanticBelief { probs })
    }

    /// Mass `confidence` on `class`, residual spread uniformly over the others.
    pub fn concentrated(len: usize, class: ClassId, confidence: f64) -> Result<SemanticBelief> {
        if class.0 >= len {
            return Err(SbgError::invalid("class index out of range"));
        }
        if !(confidence > 0.0 && confidence <= 1.0) {
            return Err(SbgError::invalid("confidence must be in (0, 1]"));
        }
        let residual = (1.0 - confidence) / (len - 1) as f64;
        let mut probs = vec![residual; len];
        probs[class.0] = confidence;
        Ok(SemanticBelief { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, c: ClassId) -> f64 {
        self.probs[c.0]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Posterior `p[i] ∝ prior[i] * likelihood_row[i]`.
    pub fn bayes_update(&self, likelihood_row: &[f64]) -> Result<SemanticBelief> {
        if likelihood_row.len() != self.probs.len() {
            return Err(SbgError::invalid(format!(
                "likelihood row length {} does not match belief length {}",
                likelihood_row.len(),
                self.probs.len()
            )));
        }
        if likelihood_row.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(SbgError::invalid(
                "likelihood entries must be finite and non-negative",
            ));
        }
        let unnormalized: Vec<f64> = self
            .probs
            .iter()
            .zip(likelihood_row)
            .map(|(p, l)| p * l)
            .collect();
        let total: f64 = unnormalized.iter().sum();
        if total <= 0.0 {
            return Err(SbgError::ImpossibleObservation);
        }
        Ok(SemanticBelief {
            probs: unnormalized.into_iter().map(|p| p / total).collect(),
        })
    }

    /// Most probable class and its probability; ties break to the lowest index.
    pub fn argmax_class(&self) -> (ClassId, f64) {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = i;
            }
        }
        (ClassId(best), self.probs[best])
    }

    /// True iff the maximum *named*-class probability strictly exceeds
    /// `threshold`. Mass on `unknown` never counts as confidence.
    pub fn is_confident(&self, threshold: f64) -> bool {
        let named = &self.probs[..self.probs.len() - 1];
        named.iter().any(|p| *p > threshold)
    }

    /// Most probable named class (ignoring `unknown`), ties to lowest index.
    pub fn argmax_named(&self) -> (ClassId, f64) {
        let named = &self.probs[..self.probs.len() - 1];
        let mut best = 0;
        for (i, p) in named.iter().enumerate() {
            if *p > named[best] {
                best = i;
            }
        }
        (ClassId(best), named[best])
    }

    /// Shannon entropy in nats; used to check that scans reduce uncertainty.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// Gaussian geometric belief: mean position and covariance.
/// Stored as data; no geometric filter runs in this artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricBelief {
    mean: [f64; 3],
    covariance: [[f64; 3]; 3],
}

impl GeometricBelief {
    pub fn new(mean: [f64; 3], covariance: [[f64; 3]; 3]) -> Result<Self> {
        for row in &covariance {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(SbgError::invalid("covariance entries must be finite"));
            }
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                if (covariance[i][j] - covariance[j][i]).abs() > 1e-9 {
                    return Err(SbgError::invalid(format!(
                        "covariance is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let eigs = symmetric_eigenvalues_3x3(&covariance);
        if eigs.iter().any(|e| *e < -1e-9) {
            return Err(SbgError::invalid(format!(
                "covariance is not positive semi-definite (min eigenvalue {:.3e})",
                eigs.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(GeometricBelief { mean, covariance })
    }

    pub fn mean(&self) -> [f64; 3] {
        self.mean
    }

    pub fn covariance(&self) -> &[[f64; 3]; 3] {
        &self.covariance
    }

    pub fn distance_to(&self, other: &GeometricBelief) -> f64 {
        let d: f64 = self
            .mean
            .iter()
            .zip(&other.mean)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        d.sqrt()
    }
}

/// Eigenvalues of a symmetric 3x3 matrix via the trigonometric closed form.
fn symmetric_eigenvalues_3x3(a: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if p1 == 0.0 {
        return [a[0][0], a[1][1], a[2][2]];
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Joint geometric/semantic belief; the two factors are independent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoSemanticBelief {
    pub geometric: GeometricBelief,
    pub semantic: SemanticBelief,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classes4() -> ClassSet {
        ClassSet::new(&["flat_ground", "stair", "rubble"]).unwrap()
    }

    #[test]
    fn uniform_prior_four_classes() {
        let b = SemanticBelief::uniform_prior(&classes4());
        assert_eq!(b.probs(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn uniform_prior_two_classes() {
        let cs = ClassSet::new(&["flat_ground"]).unwrap();
        let b = SemanticBelief::uniform_prior(&cs);
        assert_eq!(b.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn empty_class_set_rejected() {
        assert!(ClassSet::new::<&str>(&[]).is_err());
    }

    #[test]
    fn unknown_prior_full_mass() {
        let b = SemanticBelief::unknown_prior(&classes4(), 1.0).unwrap();
        assert_eq!(b.probs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn unknown_prior_partial_mass() {
        let b = SemanticBelief::unknown_prior(&classes4(), 0.7).unwrap();
        for (got, want) in b.probs().iter().zip(&[0.1, 0.1, 0.1, 0.7]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_prior_coincides_with_uniform_for_one_named_class() {
        let cs = ClassSet::new(&["flat_ground"]).unwrap();
        let b = SemanticBelief::unknown_prior(&cs, 0.5).unwrap();
        assert_eq!(b.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn unknown_prior_rejects_bad_mass() {
        assert!(SemanticBelief::unknown_prior(&classes4(), 0.0).is_err());
        assert!(SemanticBelief::unknown_prior(&classes4(), 1.5).is_err());
    }

    #[test]
    fn bayes_uniform_prior_yields_normalized_likelihood() {
        let prior = SemanticBelief::uniform_prior(&classes4());
        let post = prior.bayes_update(&[0.1, 0.7, 0.1, 0.1]).unwrap();
        for (got, want) in post.probs().iter().zip(&[0.1, 0.7, 0.1, 0.1]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn bayes_dirac_prior_is_fixed_point() {
        let prior = SemanticBelief::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let post = prior.bayes_update(&[0.3, 0.4, 0.2, 0.1]).unwrap();
        assert_eq!(post.probs(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn bayes_zero_support_stays_zero() {
        let prior = SemanticBelief::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let post = prior.bayes_update(&[0.2, 0.8, 0.3, 0.3]).unwrap();
        for (got, want) in post.probs().iter().zip(&[0.2, 0.8, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn bayes_impossible_observation_errors() {
        let prior = SemanticBelief::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            prior.bayes_update(&[0.0, 1.0, 1.0, 1.0]),
            Err(SbgError::ImpossibleObservation)
        ));
    }

    #[test]
    fn argmax_examples() {
        let cs = classes4();
        let b = SemanticBelief::new(vec![0.1, 0.7, 0.1, 0.1]).unwrap();
        let (c, p) = b.argmax_class();
        assert_eq!(cs.name(c), "stair");
        assert!((p - 0.7).abs() < 1e-12);

        let b = SemanticBelief::uniform_prior(&cs);
        assert_eq!(b.argmax_class().0, ClassId(0));

        let b = SemanticBelief::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let (c, p) = b.argmax_class();
        assert!(cs.is_unknown(c));
        assert_eq!(p, 1.0);
    }

    #[test]
    fn confidence_examples() {
        let b = SemanticBelief::new(vec![0.04, 0.96, 0.0, 0.0]).unwrap();
        assert!(b.is_confident(0.95));
        let b = SemanticBelief::uniform_prior(&classes4());
        assert!(!b.is_confident(0.95));
        let b = SemanticBelief::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(!b.is_confident(0.95), "unknown mass is not confidence");
    }

    #[test]
    fn malformed_sum_rejected_and_roundoff_renormalized() {
        assert!(SemanticBelief::new(vec![0.5, 0.6, 0.0, 0.0]).is_err());
        let b = SemanticBelief::new(vec![0.25, 0.25, 0.25, 0.25 + 5e-7]).unwrap();
        assert!((b.probs().iter().sum::<f64>() - 1.0).abs() < SUM_TOLERANCE);
    }

    #[test]
    fn covariance_validation() {
        let eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(GeometricBelief::new([0.0; 3], eye).is_ok());
        let asym = [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(GeometricBelief::new([0.0; 3], asym).is_err());
        let indef = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(GeometricBelief::new([0.0; 3], indef).is_err());
    }

    fn arb_belief(n: usize) -> impl Strategy<Value = SemanticBelief> {
        proptest::collection::vec(1e-6..1.0f64, n).prop_map(|raw| {
            let s: f64 = raw.iter().sum();
            SemanticBelief::new(raw.into_iter().map(|p| p / s).collect()).unwrap()
        })
    }

    fn arb_row(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1e-6..1.0f64, n)
    }

    proptest! {
        #[test]
        fn update_preserves_invariants(b in arb_belief(4), row in arb_row(4)) {
            let post = b.bayes_update(&row).unwrap();
            prop_assert!((post.probs().iter().sum::<f64>() - 1.0).abs() < SUM_TOLERANCE);
            prop_assert!(post.probs().iter().all(|p| *p >= 0.0));
        }

        #[test]
        fn all_equal_row_is_identity(b in arb_belief(4), c in 1e-3..10.0f64) {
            let post = b.bayes_update(&[c; 4]).unwrap();
            for (x, y) in post.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn two_observations_commute(b in arb_belief(4), r1 in arb_row(4), r2 in arb_row(4)) {
            let a = b.bayes_update(&r1).unwrap().bayes_update(&r2).unwrap();
            let c = b.bayes_update(&r2).unwrap().bayes_update(&r1).unwrap();
            for (x, y) in a.probs().iter().zip(c.probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn argmax_invariant_under_scaling(b in arb_belief(4), scale in 1e-3..1e3f64) {
            let scaled: Vec<f64> = b.probs().iter().map(|p| p * scale).collect();
            let s: f64 = scaled.iter().sum();
            let rescaled = SemanticBelief::new(scaled.into_iter().map(|p| p / s).collect()).unwrap();
            prop_assert_eq!(b.argmax_class().0, rescaled.argmax_class().0);
        }
    }
}
