//! Cross-validation plans with a fixed training-set size.
//!
//! The shuffled indices are cut into partitions of `n`; each partition is
//! the training set of one fold and everything else is validated. A final
//! partition shorter than `n` is topped up with indices drawn without
//! replacement from the other partitions, which stay in their own folds'
//! training sets as well.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    /// Sorted.
    pub validation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvPlan {
    pub n: usize,
    /// Number of full partitions, `⌊|D| / n⌋`.
    pub k: usize,
    pub folds: Vec<Fold>,
    pub seed: u64,
}

pub fn make_cv_plan(size: usize, n: usize, seed: u64) -> Result<CvPlan> {
    if n == 0 {
        return Err(Error::InvalidCv("training-set size must be at least 1".into()));
    }
    if n > size {
        return Err(Error::InvalidCv(format!("training-set size {n} exceeds the dataset size {size}")));
    }
    if n == size {
        return Err(Error::InvalidCv(format!("training-set size {n} leaves no validation data")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    let mut folds = Vec::new();
    for part in order.chunks(n) {
        let mut train = part.to_vec();
        if train.len() < n {
            let others: Vec<usize> = order.iter().copied().filter(|i| !part.contains(i)).collect();
            let need = n - train.len();
            train.extend(index::sample(&mut rng, others.len(), need).into_iter().map(|j| others[j]));
        }
        let mut in_train = vec![false; size];
        for &i in &train {
            in_train[i] = true;
        }
        let validation = (0..size).filter(|&i| !in_train[i]).collect();
        folds.push(Fold { train, validation });
    }
    Ok(CvPlan { n, k: size / n, folds, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split() {
        let plan = make_cv_plan(6, 2, 1).unwrap();
        assert_eq!((plan.k, plan.folds.len()), (3, 3));
        assert!(plan.folds.iter().all(|f| f.train.len() == 2 && f.validation.len() == 4));
    }

    #[test]
    fn remainder_partition_is_topped_up() {
        let plan = make_cv_plan(7, 2, 9).unwrap();
        assert_eq!(plan.k, 3);
        assert_eq!(plan.folds.len(), 4);
        for f in &plan.folds {
            assert_eq!(f.train.len(), 2);
            assert!(f.train.iter().all(|i| !f.validation.contains(i)));
            assert_eq!(f.train.len() + f.validation.len(), 7);
        }
    }

    #[test]
    fn guards() {
        assert!(make_cv_plan(5, 5, 0).is_err());
        assert!(make_cv_plan(5, 6, 0).is_err());
        assert!(make_cv_plan(5, 0, 0).is_err());
    }

    #[test]
    fn seeded() {
        assert_eq!(make_cv_plan(20, 3, 42).unwrap(), make_cv_plan(20, 3, 42).unwrap());
        assert_ne!(make_cv_plan(20, 3, 42).unwrap(), make_cv_plan(20, 3, 43).unwrap());
    }
}
