//! Noisy semantic observation model.
//!
//! Classification accuracy decays linearly with distance down to a floor,
//! and information-gathering scans observe at a fixed high accuracy.
//! Confusion is symmetric: the miss mass is spread uniformly over the
//! other classes, so one scalar fully determines a likelihood row.

use crate::belief::ClassId;
use crate::error::{Result, SbgError};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationModel {
    /// Classification accuracy at zero distance.
    pub accuracy_at_zero: f64,
    /// Lower clamp; chance level `1/(d_l+1)` makes far observations uninformative.
    pub accuracy_floor: f64,
    /// Accuracy lost per meter of distance.
    pub falloff_rate: f64,
    /// Accuracy of an information-gathering scan (effective distance zero).
    pub ig_accuracy: f64,
}

impl ObservationModel {
    pub fn new(
        accuracy_at_zero: f64,
        accuracy_floor: f64,
        falloff_rate: f64,
        ig_accuracy: f64,
    ) -> Result<Self> {
        let m = ObservationModel {
            accuracy_at_zero,
            accuracy_floor,
            falloff_rate,
            ig_accuracy,
        };
        m.validate()?;
        Ok(m)
    }

    /// Defaults for a class set of `class_count` labels (named + unknown):
    /// 0.95 at contact, chance-level floor, 0.05/m falloff, 0.99 scans.
    pub fn defaults_for(class_count: usize) -> Self {
        ObservationModel {
            accuracy_at_zero: 0.95,
            accuracy_floor: 1.0 / class_count as f64,
            falloff_rate: 0.05,
            ig_accuracy: 0.99,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.accuracy_floor <= self.accuracy_at_zero && self.accuracy_at_zero <= 1.0) {
            return Err(SbgError::invalid(
                "require accuracy_floor <= accuracy_at_zero <= 1",
            ));
        }
        if self.ig_accuracy < self.accuracy_at_zero || self.ig_accuracy > 1.0 {
            return Err(SbgError::invalid(
                "require accuracy_at_zero <= ig_accuracy <= 1",
            ));
        }
        if !(self.falloff_rate >= 0.0) {
            return Err(SbgError::invalid("falloff_rate must be non-negative"));
        }
        if self.accuracy_floor <= 0.0 {
            return Err(SbgError::invalid("accuracy_floor must be positive"));
        }
        Ok(())
    }

    /// Accuracy of a passive observation taken `distance` meters away.
    pub fn accuracy(&self, distance: f64) -> Result<f64> {
        if !(distance >= 0.0) {
            return Err(SbgError::invalid(format!(
                "distance must be non-negative, got {distance}"
            )));
        }
        Ok((self.accuracy_at_zero - self.falloff_rate * distance)
            .clamp(self.accuracy_floor, self.accuracy_at_zero))
    }

    /// Likelihood row `p(z = observed | true = class)` for every true class,
    /// given accuracy `acc`: the observed class gets `acc`, the remaining
    /// mass is spread uniformly over the other `class_count - 1` classes.
    pub fn row_for_accuracy(acc: f64, observed: ClassId, class_count: usize) -> Result<Vec<f64>> {
        if class_count < 2 {
            return Err(SbgError::invalid("class_count must be at least 2"));
        }
        if observed.0 >= class_count {
            return Err(SbgError::invalid(format!(
                "observed class index {} out of range for {class_count} classes",
                observed.0
            )));
        }
        let off = (1.0 - acc) / (class_count - 1) as f64;
        let mut row = vec![off; class_count];
        row[observed.0] = acc;
        Ok(row)
    }

    /// Likelihood row for a passive observation at the given distance.
    pub fn likelihood_row(
        &self,
        observed: ClassId,
        distance: f64,
        class_count: usize,
    ) -> Result<Vec<f64>> {
        Self::row_for_accuracy(self.accuracy(distance)?, observed, class_count)
    }

    /// Likelihood row for an information-gathering scan.
    pub fn ig_likelihood_row(&self, observed: ClassId, class_count: usize) -> Result<Vec<f64>> {
        Self::row_for_accuracy(self.ig_accuracy, observed, class_count)
    }

    /// Draws an observed label: the true class with probability
    /// `accuracy(distance)`, otherwise a uniformly random other class.
    pub fn sample_observation<R: Rng>(
        &self,
        true_class: ClassId,
        distance: f64,
        class_count: usize,
        rng: &mut R,
    ) -> Result<ClassId> {
        let acc = self.accuracy(distance)?;
        Ok(Self::sample_with_accuracy(
            acc,
            true_class,
            class_count,
            rng,
        ))
    }

    /// Draws an information-gathering scan label.
    pub fn sample_ig_observation<R: Rng>(
        &self,
        true_class: ClassId,
        class_count: usize,
        rng: &mut R,
    ) -> ClassId {
        Self::sample_with_accuracy(self.ig_accuracy, true_class, class_count, rng)
    }

    fn sample_with_accuracy<R: Rng>(
        acc: f64,
        true_class: ClassId,
        class_count: usize,
        rng: &mut R,
    ) -> ClassId {
        if rng.gen::<f64>() < acc {
            true_class
        } else {
            // uniform over the other class_count - 1 labels
            let k = rng.gen_range(0..class_count - 1);
            if k >= true_class.0 {
                ClassId(k + 1)
            } else {
                ClassId(k)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn defaults() -> ObservationModel {
        ObservationModel::defaults_for(4)
    }

    #[test]
    fn accuracy_endpoints_and_interior() {
        let m = defaults();
        assert_eq!(m.accuracy(0.0).unwrap(), 0.95);
        assert_eq!(m.accuracy(100.0).unwrap(), m.accuracy_floor);
        assert!((m.accuracy(4.0).unwrap() - 0.75).abs() < 1e-12);
        assert!(m.accuracy(-1.0).is_err());
    }

    #[test]
    fn accuracy_monotone_non_increasing() {
        let m = defaults();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let a = m.accuracy(i as f64 * 0.25).unwrap();
            assert!(a <= prev + 1e-15);
            prev = a;
        }
    }

    #[test]
    fn likelihood_row_shapes() {
        let row = ObservationModel::row_for_accuracy(0.7, ClassId(1), 4).unwrap();
        for (got, want) in row.iter().zip(&[0.1, 0.7, 0.1, 0.1]) {
            assert!((got - want).abs() < 1e-12);
        }
        let row = ObservationModel::row_for_accuracy(1.0, ClassId(0), 4).unwrap();
        assert_eq!(row, vec![1.0, 0.0, 0.0, 0.0]);
        let row = ObservationModel::row_for_accuracy(0.25, ClassId(2), 4).unwrap();
        assert!(row.iter().all(|p| (p - 0.25).abs() < 1e-12));
        assert!(ObservationModel::row_for_accuracy(0.7, ClassId(4), 4).is_err());
    }

    #[test]
    fn noiseless_sampling_returns_truth() {
        let m = ObservationModel::new(1.0, 0.25, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(
                m.sample_observation(ClassId(1), 3.0, 4, &mut rng).unwrap(),
                ClassId(1)
            );
        }
    }

    #[test]
    fn sampling_matches_bernoulli_law() {
        let m = ObservationModel::new(0.7, 0.25, 0.0, 0.99).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut hits = 0usize;
        for _ in 0..n {
            if m.sample_observation(ClassId(1), 0.0, 4, &mut rng).unwrap() == ClassId(1) {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.7).abs() < 0.01, "empirical frequency {freq}");
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let m = defaults();
        let draw = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32)
                .map(|_| m.sample_observation(ClassId(2), 5.0, 4, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
    }
}
