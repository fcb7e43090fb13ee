//! Grounded precondition trees.

use std::collections::BTreeSet;
use std::fmt;

/// Grounded precondition. Quantifiers are expanded during grounding, and
/// constants are folded away: `And([])` is the trivially true condition and
/// `Or([])` the unsatisfiable one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition<F = crate::problem::FactId> {
    Atom(F),
    Not(Box<Condition<F>>),
    And(Vec<Condition<F>>),
    Or(Vec<Condition<F>>),
}

impl<F> Condition<F> {
    pub fn always() -> Self {
        Condition::And(Vec::new())
    }

    pub fn conjunction(facts: impl IntoIterator<Item = F>) -> Self {
        Condition::And(facts.into_iter().map(Condition::Atom).collect())
    }

    pub fn map<G>(&self, f: &mut impl FnMut(&F) -> G) -> Condition<G> {
        match self {
            Condition::Atom(a) => Condition::Atom(f(a)),
            Condition::Not(c) => Condition::Not(Box::new(c.map(f))),
            Condition::And(cs) => Condition::And(cs.iter().map(|c| c.map(f)).collect()),
            Condition::Or(cs) => Condition::Or(cs.iter().map(|c| c.map(f)).collect()),
        }
    }

    /// Every atom in the tree, regardless of polarity.
    pub fn atoms<'a>(&'a self, out: &mut Vec<&'a F>) {
        match self {
            Condition::Atom(a) => out.push(a),
            Condition::Not(c) => c.atoms(out),
            Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|c| c.atoms(out)),
        }
    }

    /// Literals of a conjunction of (possibly negated) atoms, or `None` if the
    /// tree contains a disjunction or a negated compound.
    pub fn literals(&self) -> Option<Vec<(bool, &F)>> {
        fn walk<'a, F>(c: &'a Condition<F>, out: &mut Vec<(bool, &'a F)>) -> bool {
            match c {
                Condition::Atom(a) => {
                    out.push((true, a));
                    true
                }
                Condition::Not(inner) => match inner.as_ref() {
                    Condition::Atom(a) => {
                        out.push((false, a));
                        true
                    }
                    _ => false,
                },
                Condition::And(cs) => cs.iter().all(|c| walk(c, out)),
                Condition::Or(_) => false,
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out).then_some(out)
    }

    pub fn holds(&self, is_true: &impl Fn(&F) -> bool) -> bool {
        match self {
            Condition::Atom(a) => is_true(a),
            Condition::Not(c) => !c.holds(is_true),
            Condition::And(cs) => cs.iter().all(|c| c.holds(is_true)),
            Condition::Or(cs) => cs.iter().any(|c| c.holds(is_true)),
        }
    }

    /// Satisfaction under the delete relaxation: negative literals are
    /// dropped (treated as satisfied).
    pub fn holds_relaxed(&self, is_true: &impl Fn(&F) -> bool) -> bool {
        match self {
            Condition::Atom(a) => is_true(a),
            Condition::Not(_) => true,
            Condition::And(cs) => cs.iter().all(|c| c.holds_relaxed(is_true)),
            Condition::Or(cs) => cs.iter().any(|c| c.holds_relaxed(is_true)),
        }
    }
}

impl<F: Ord + Clone> Condition<F> {
    /// All atoms occurring with positive polarity anywhere in the tree, as if
    /// the whole condition were one conjunction. Atoms under an odd number of
    /// negations are left out.
    pub fn flatten(&self) -> BTreeSet<F> {
        fn walk<F: Ord + Clone>(c: &Condition<F>, positive: bool, out: &mut BTreeSet<F>) {
            match c {
                Condition::Atom(a) => {
                    if positive {
                        out.insert(a.clone());
                    }
                }
                Condition::Not(inner) => walk(inner, !positive, out),
                Condition::And(cs) | Condition::Or(cs) => cs.iter().for_each(|c| walk(c, positive, out)),
            }
        }
        let mut out = BTreeSet::new();
        walk(self, true, &mut out);
        out
    }
}

/// Writes the tree as an S-expression, rendering atoms with `show`.
pub fn write_condition<F>(c: &Condition<F>, f: &mut dyn fmt::Write, show: &dyn Fn(&F) -> String) -> fmt::Result {
    let group = |f: &mut dyn fmt::Write, kw: &str, cs: &[Condition<F>]| -> fmt::Result {
        f.write_str("(")?;
        f.write_str(kw)?;
        for c in cs {
            f.write_str(" ")?;
            write_condition(c, f, show)?;
        }
        f.write_str(")")
    };
    match c {
        Condition::Atom(a) => f.write_str(&show(a)),
        Condition::Not(inner) => {
            f.write_str("(not ")?;
            write_condition(inner, f, show)?;
            f.write_str(")")
        }
        Condition::And(cs) => group(f, "and", cs),
        Condition::Or(cs) => group(f, "or", cs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Condition<&'static str>;

    fn set(xs: &[&'static str]) -> BTreeSet<&'static str> {
        xs.iter().copied().collect()
    }

    #[test]
    fn flatten_conjunction() {
        let c: C = Condition::conjunction(["p", "q"]);
        assert_eq!(c.flatten(), set(&["p", "q"]));
    }

    #[test]
    fn flatten_disjunction_collects_all() {
        let c: C = Condition::Or(vec![Condition::Atom("p"), Condition::Atom("q")]);
        assert_eq!(c.flatten(), set(&["p", "q"]));
    }

    #[test]
    fn flatten_drops_negated_atoms() {
        let c: C = Condition::And(vec![Condition::Atom("p"), Condition::Not(Box::new(Condition::Atom("q")))]);
        assert_eq!(c.flatten(), set(&["p"]));
        let double: C = Condition::Not(Box::new(Condition::Not(Box::new(Condition::Atom("r")))));
        assert_eq!(double.flatten(), set(&["r"]));
    }

    #[test]
    fn relaxed_ignores_negation() {
        let c: C = Condition::And(vec![Condition::Atom("p"), Condition::Not(Box::new(Condition::Atom("p")))]);
        assert!(!c.holds(&|a| *a == "p"));
        assert!(c.holds_relaxed(&|a| *a == "p"));
        assert!(C::always().holds(&|_| false));
        assert!(!C::Or(vec![]).holds(&|_| true));
    }

    #[test]
    fn literals_only_for_conjunctions() {
        let c: C = Condition::And(vec![Condition::Atom("p"), Condition::Not(Box::new(Condition::Atom("q")))]);
        assert_eq!(c.literals(), Some(vec![(true, &"p"), (false, &"q")]));
        let d: C = Condition::Or(vec![Condition::Atom("p")]);
        assert_eq!(d.literals(), None);
    }
}
