use std::collections::BTreeSet;
use std::fmt;

/// Emerson-Lei acceptance condition over 0-based set indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AcceptanceCond {
    True,
    False,
    Fin(usize),
    Inf(usize),
    And(Box<AcceptanceCond>, Box<AcceptanceCond>),
    Or(Box<AcceptanceCond>, Box<AcceptanceCond>),
}

/// One disjunct of the DNF: all `fins` visited finitely often and all
/// `infs` visited infinitely often.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Disjunct {
    pub fins: BTreeSet<usize>,
    pub infs: BTreeSet<usize>,
}

impl Disjunct {
    pub fn holds(&self, inf: &BTreeSet<usize>) -> bool {
        self.fins.is_disjoint(inf) && self.infs.is_subset(inf)
    }
}

impl AcceptanceCond {
    pub fn and(l: AcceptanceCond, r: AcceptanceCond) -> AcceptanceCond {
        AcceptanceCond::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: AcceptanceCond, r: AcceptanceCond) -> AcceptanceCond {
        AcceptanceCond::Or(Box::new(l), Box::new(r))
    }

    /// Generalized Büchi condition `Inf(0) & ... & Inf(n-1)`; `t` for n = 0.
    pub fn generalized_buchi(n: usize) -> AcceptanceCond {
        (1..n).fold(
            if n == 0 {
                AcceptanceCond::True
            } else {
                AcceptanceCond::Inf(0)
            },
            |c, k| AcceptanceCond::and(c, AcceptanceCond::Inf(k)),
        )
    }

    /// Truth value given the sets visited infinitely often.
    pub fn eval(&self, inf: &BTreeSet<usize>) -> bool {
        match self {
            AcceptanceCond::True => true,
            AcceptanceCond::False => false,
            AcceptanceCond::Fin(k) => !inf.contains(k),
            AcceptanceCond::Inf(k) => inf.contains(k),
            AcceptanceCond::And(l, r) => l.eval(inf) && r.eval(inf),
            AcceptanceCond::Or(l, r) => l.eval(inf) || r.eval(inf),
        }
    }

    /// Disjunctive normal form. Contradictory disjuncts (a set both Fin and
    /// Inf) and duplicates are dropped; order follows the condition.
    pub fn dnf(&self) -> Vec<Disjunct> {
        let raw = match self {
            AcceptanceCond::True => vec![Disjunct::default()],
            AcceptanceCond::False => vec![],
            AcceptanceCond::Fin(k) => vec![Disjunct {
                fins: BTreeSet::from([*k]),
                infs: BTreeSet::new(),
            }],
            AcceptanceCond::Inf(k) => vec![Disjunct {
                fins: BTreeSet::new(),
                infs: BTreeSet::from([*k]),
            }],
            AcceptanceCond::Or(l, r) => {
                let mut v = l.dnf();
                v.extend(r.dnf());
                v
            }
            AcceptanceCond::And(l, r) => {
                let rd = r.dnf();
                let mut v = Vec::new();
                for a in l.dnf() {
                    for b in &rd {
                        v.push(Disjunct {
                            fins: a.fins.union(&b.fins).copied().collect(),
                            infs: a.infs.union(&b.infs).copied().collect(),
                        });
                    }
                }
                v
            }
        };
        let mut seen = BTreeSet::new();
        raw.into_iter()
            .filter(|d| d.fins.is_disjoint(&d.infs) && seen.insert(d.clone()))
            .collect()
    }

    /// Largest set index mentioned, if any.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            AcceptanceCond::True | AcceptanceCond::False => None,
            AcceptanceCond::Fin(k) | AcceptanceCond::Inf(k) => Some(*k),
            AcceptanceCond::And(l, r) | AcceptanceCond::Or(l, r) => {
                l.max_index().max(r.max_index())
            }
        }
    }

    /// Renumbers every set index by `+ by`.
    pub fn shift(&self, by: usize) -> AcceptanceCond {
        match self {
            AcceptanceCond::Fin(k) => AcceptanceCond::Fin(k + by),
            AcceptanceCond::Inf(k) => AcceptanceCond::Inf(k + by),
            AcceptanceCond::And(l, r) => AcceptanceCond::and(l.shift(by), r.shift(by)),
            AcceptanceCond::Or(l, r) => AcceptanceCond::or(l.shift(by), r.shift(by)),
            c => c.clone(),
        }
    }
}

impl fmt::Display for AcceptanceCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_acceptance(self))
    }
}

pub fn eval_acceptance(acc: &AcceptanceCond, inf: &BTreeSet<usize>) -> bool {
    acc.eval(inf)
}

pub fn dnf_acceptance(acc: &AcceptanceCond) -> Vec<Disjunct> {
    acc.dnf()
}
