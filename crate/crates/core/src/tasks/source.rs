use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::NUM_CLASSES;
use crate::error::{Error, Result};
use crate::rng;

/// One synthetic volume: a feature vector, its source class, and the subject it belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSample {
    pub features: Vec<f64>,
    pub class: u8,
    pub subject_id: u64,
}

/// Isotropic Gaussian mixture with one component per source class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub dimension: usize,
    pub means: Vec<Vec<f64>>,
    pub sigma: f64,
    pub seed: u64,
}

/// Subject split proportions (train, validation, test).
pub const SPLIT_PROPORTIONS: [usize; 3] = [45, 13, 59];

impl SourceConfig {
    /// Class means placed so that `|mu0 - mu1| = |mu0 - mu2| = far` and
    /// `|mu1 - mu2| = near`, in a random plane of the feature space.
    pub fn with_geometry(
        dimension: usize,
        near: f64,
        far: f64,
        sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidConfig("source dimension must be >= 2".into()));
        }
        if !(near > 0.0 && far > near / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "cannot place means with near = {near}, far = {far}"
            )));
        }
        let mut rng = rng::stream_rng(seed, u64::MAX);
        let (u, w) = orthonormal_pair(&mut rng, dimension);
        let height = (far * far - near * near / 4.0).sqrt();
        let mu0 = vec![0.0; dimension];
        let mu1: Vec<f64> = (0..dimension)
            .map(|i| height * u[i] + 0.5 * near * w[i])
            .collect();
        let mu2: Vec<f64> = (0..dimension)
            .map(|i| height * u[i] - 0.5 * near * w[i])
            .collect();
        let config = SourceConfig {
            dimension,
            means: vec![mu0, mu1, mu2],
            sigma,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// Sixteen features, benign and malignant means one unit apart and
    /// three units from the no-finding mean, unit noise.
    pub fn standard(seed: u64) -> Self {
        SourceConfig::with_geometry(16, 1.0, 3.0, 1.0, seed).expect("standard geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.means.len() != NUM_CLASSES {
            return Err(Error::InvalidConfig(format!(
                "expected {NUM_CLASSES} class means, got {}",
                self.means.len()
            )));
        }
        for mean in &self.means {
            if mean.len() != self.dimension {
                return Err(Error::DimensionMismatch {
                    context: "class mean",
                    expected: self.dimension,
                    found: mean.len(),
                });
            }
        }
        for a in 0..NUM_CLASSES {
            for b in a + 1..NUM_CLASSES {
                if self.means[a] == self.means[b] {
                    return Err(Error::InvalidConfig(format!(
                        "class means {a} and {b} coincide"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn orthonormal_pair<R: Rng>(rng: &mut R, dimension: usize) -> (Vec<f64>, Vec<f64>) {
    let gaussian =
        |rng: &mut R| -> Vec<f64> { (0..dimension).map(|_| rng.sample(StandardNormal)).collect() };
    let normalize = |v: &mut Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
    };
    let mut u = gaussian(rng);
    normalize(&mut u);
    let mut w = gaussian(rng);
    let proj: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
    w.iter_mut().zip(&u).for_each(|(x, ui)| *x -= proj * ui);
    normalize(&mut w);
    (u, w)
}

/// Train, validation and test samples with disjoint subjects.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SplitDataset {
    pub train: Vec<SourceSample>,
    pub validation: Vec<SourceSample>,
    pub test: Vec<SourceSample>,
}

impl SplitDataset {
    pub fn dimension(&self) -> Option<usize> {
        self.train
            .iter()
            .chain(&self.validation)
            .chain(&self.test)
            .next()
            .map(|s| s.features.len())
    }

    pub fn splits(&self) -> [(&'static str, &[SourceSample]); 3] {
        [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ]
    }
}

/// Number of subjects per split for a cohort of `n_subjects`.
pub fn split_sizes(n_subjects: usize) -> [usize; 3] {
    let total: usize = SPLIT_PROPORTIONS.iter().sum();
    let share = |p: usize| ((n_subjects * p) as f64 / total as f64).round() as usize;
    let validation = share(SPLIT_PROPORTIONS[1]).max(2);
    let test = share(SPLIT_PROPORTIONS[2]).max(2);
    let train = n_subjects.saturating_sub(validation + test).max(2);
    let test = n_subjects - train - validation;
    [train, validation, test]
}

/// Draws a cohort from the mixture and splits it by subject.
///
/// Classes are balanced within each split: sample classes are a shuffled
/// round-robin over {0, 1, 2}, so every split with three or more samples
/// holds all classes.
pub fn generate_source(
    config: &SourceConfig,
    n_subjects: usize,
    samples_per_subject: usize,
) -> Result<SplitDataset> {
    config.validate()?;
    if n_subjects < 6 {
        return Err(Error::InvalidConfig(format!(
            "need at least 6 subjects, got {n_subjects}"
        )));
    }
    if samples_per_subject == 0 {
        return Err(Error::InvalidConfig(
            "samples_per_subject must be >= 1".into(),
        ));
    }
    let mut rng = rng::stream_rng(config.seed, 0);
    let mut subjects: Vec<u64> = (0..n_subjects as u64).collect();
    subjects.shuffle(&mut rng);

    let sizes = split_sizes(n_subjects);
    let mut dataset = SplitDataset::default();
    let mut start = 0;
    for (split, &size) in sizes.iter().enumerate() {
        let mut ids = subjects[start..start + size].to_vec();
        ids.sort_unstable();
        start += size;
        let mut classes: Vec<u8> = (0..size * samples_per_subject)
            .map(|i| (i % NUM_CLASSES) as u8)
            .collect();
        classes.shuffle(&mut rng);
        let mut samples = Vec::with_capacity(classes.len());
        for (k, class) in classes.into_iter().enumerate() {
            let mean = &config.means[class as usize];
            let features = mean
                .iter()
                .map(|m| m + config.sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            samples.push(SourceSample {
                features,
                class,
                subject_id: ids[k / samples_per_subject],
            });
        }
        match split {
            0 => dataset.train = samples,
            1 => dataset.validation = samples,
            _ => dataset.test = samples,
        }
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn standard_geometry() {
        let c = SourceConfig::standard(9);
        assert!((dist(&c.means[0], &c.means[1]) - 3.0).abs() < 1e-12);
        assert!((dist(&c.means[0], &c.means[2]) - 3.0).abs() < 1e-12);
        assert!((dist(&c.means[1], &c.means[2]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cohort_of_117_split() {
        assert_eq!(split_sizes(117), [45, 13, 59]);
        let d = generate_source(&SourceConfig::standard(1), 117, 2).unwrap();
        let count =
            |s: &[SourceSample]| s.iter().map(|x| x.subject_id).collect::<HashSet<_>>().len();
        assert_eq!(count(&d.train), 45);
        assert_eq!(count(&d.validation), 13);
        assert_eq!(count(&d.test), 59);
        assert_eq!(d.train.len(), 90);
    }

    #[test]
    fn small_cohorts_keep_two_subjects_per_split() {
        for n in 6..40 {
            let s = split_sizes(n);
            assert_eq!(s.iter().sum::<usize>(), n);
            assert!(s.iter().all(|&k| k >= 2), "{n}: {s:?}");
        }
    }

    #[test]
    fn vanishing_noise_collapses_to_means() {
        let mut c = SourceConfig::standard(4);
        c.sigma = 1e-9;
        let d = generate_source(&c, 12, 2).unwrap();
        for (_, split) in d.splits() {
            for s in split {
                assert!(dist(&s.features, &c.means[s.class as usize]) < 1e-6);
            }
        }
    }

    #[test]
    fn same_seed_same_data() {
        let c = SourceConfig::standard(77);
        assert_eq!(
            generate_source(&c, 30, 2).unwrap(),
            generate_source(&c, 30, 2).unwrap()
        );
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = SourceConfig::standard(0);
        c.sigma = 0.0;
        assert!(generate_source(&c, 20, 2).is_err());
        let mut c = SourceConfig::standard(0);
        c.means[2] = c.means[1].clone();
        assert!(c.validate().is_err());
        assert!(generate_source(&SourceConfig::standard(0), 5, 2).is_err());
    }
}
