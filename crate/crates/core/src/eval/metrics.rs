//! Accuracy at a fraction of the observations.

/// Most-probable goal sets of one recognition problem for t = 0..=T.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemOutcome {
    pub true_goal: usize,
    /// `most_probable[t]` after `t` observations; empty if recognition
    /// failed.
    pub most_probable: Vec<Vec<usize>>,
}

impl ProblemOutcome {
    /// An outcome that is wrong at every observation fraction.
    pub fn failed() -> Self {
        ProblemOutcome { true_goal: usize::MAX, most_probable: Vec::new() }
    }

    pub fn is_failed(&self) -> bool {
        self.most_probable.is_empty()
    }

    /// Number of observations T.
    pub fn len(&self) -> usize {
        self.most_probable.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn at(&self, lambda: f64) -> Option<&[usize]> {
        self.most_probable.get(prefix_index(self.len(), lambda)).map(Vec::as_slice)
    }

    /// True goal is the only maximizer at `⌊T·λ⌋`.
    pub fn correct(&self, lambda: f64) -> bool {
        self.at(lambda) == Some(&[self.true_goal][..])
    }

    /// True goal is among the maximizers at `⌊T·λ⌋`.
    pub fn correct_lenient(&self, lambda: f64) -> bool {
        self.at(lambda).is_some_and(|m| m.contains(&self.true_goal))
    }
}

/// `⌊T·λ⌋`, with a small allowance so that e.g. 20 · 0.05 gives 1.
pub fn prefix_index(len: usize, lambda: f64) -> usize {
    ((len as f64 * lambda + 1e-9).floor().max(0.0) as usize).min(len)
}

fn mean(outcomes: &[ProblemOutcome], hit: impl Fn(&ProblemOutcome) -> bool) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|o| hit(o)).count() as f64 / outcomes.len() as f64
}

/// Fraction of problems whose true goal is the unique most probable goal.
pub fn accuracy(outcomes: &[ProblemOutcome], lambda: f64) -> f64 {
    mean(outcomes, |o| o.correct(lambda))
}

/// Fraction of problems whose true goal ties for most probable.
pub fn lenient_accuracy(outcomes: &[ProblemOutcome], lambda: f64) -> f64 {
    mean(outcomes, |o| o.correct_lenient(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_floors_with_allowance() {
        assert_eq!(prefix_index(20, 0.05), 1);
        assert_eq!(prefix_index(10, 0.95), 9);
        assert_eq!(prefix_index(7, 0.0), 0);
        assert_eq!(prefix_index(3, 1.0), 3);
    }

    #[test]
    fn ties_score_zero_strictly() {
        let o = ProblemOutcome { true_goal: 1, most_probable: vec![vec![0, 1, 2], vec![1], vec![1, 2]] };
        assert!(!o.correct(0.0));
        assert!(o.correct(0.5));
        assert!(!o.correct(1.0));
        assert!(o.correct_lenient(1.0));
        assert_eq!(accuracy(&[o.clone(), ProblemOutcome::failed()], 0.5), 0.5);
        assert_eq!(lenient_accuracy(&[o], 1.0), 1.0);
    }
}
