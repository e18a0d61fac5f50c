use std::collections::BTreeSet;
use std::fmt;

/// A non-empty intersection of role names, `r1 ∩ … ∩ rn`.
///
/// Stored as a sorted set so that two conjunctions naming the same roles are
/// always equal, whatever order they were written in.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleConjunction(BTreeSet<String>);

impl RoleConjunction {
    /// Returns `None` for an empty iterator.
    pub fn new<I, S>(roles: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let roles: BTreeSet<String> = roles.into_iter().map(Into::into).collect();
        if roles.is_empty() {
            None
        } else {
            Some(RoleConjunction(roles))
        }
    }

    pub fn single(role: impl Into<String>) -> Self {
        RoleConjunction(std::iter::once(role.into()).collect())
    }

    pub fn roles(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `self ⊆ other` as role sets.
    pub fn is_subset(&self, other: &BTreeSet<String>) -> bool {
        self.0.is_subset(other)
    }
}

impl fmt::Display for RoleConjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// An ALC^∩ concept in its core form.
///
/// Only the five core constructors exist. `Top`, disjunction, universal
/// restriction and implication are built through the helper constructors
/// below, which expand them into these variants. Conjunctions are kept
/// flattened, sorted and duplicate-free, so derived equality is equality of
/// canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Bottom,
    Atomic(String),
    Not(Box<Concept>),
    And(Vec<Concept>),
    Exists(RoleConjunction, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    pub fn top() -> Self {
        Concept::Not(Box::new(Concept::Bottom))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Concept::Not(inner) if **inner == Concept::Bottom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    /// Canonical n-ary conjunction: nested conjunctions are flattened, `⊤`
    /// conjuncts dropped, the rest sorted and deduplicated. The empty
    /// conjunction is `⊤`.
    pub fn and<I: IntoIterator<Item = Concept>>(parts: I) -> Self {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                Concept::And(inner) => flat.extend(inner),
                c if c.is_top() => {}
                c => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => Concept::top(),
            1 => flat.pop().unwrap(),
            _ => Concept::And(flat),
        }
    }

    pub fn exists(roles: RoleConjunction, filler: Concept) -> Self {
        Concept::Exists(roles, Box::new(filler))
    }

    /// `C ⊔ D := ¬(¬C ⊓ ¬D)`
    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::not(Concept::and([Concept::not(a), Concept::not(b)]))
    }

    /// `∀R.C := ¬∃R.¬C`
    pub fn forall(roles: RoleConjunction, filler: Concept) -> Self {
        Concept::not(Concept::exists(roles, Concept::not(filler)))
    }

    /// `C → D := ¬C ⊔ D`
    pub fn implies(a: Concept, b: Concept) -> Self {
        Concept::or(Concept::not(a), b)
    }

    /// Number of constructor nodes in the term tree.
    pub fn size(&self) -> usize {
        match self {
            Concept::Bottom | Concept::Atomic(_) => 1,
            Concept::Not(c) => 1 + c.size(),
            Concept::And(cs) => 1 + cs.iter().map(Concept::size).sum::<usize>(),
            Concept::Exists(_, c) => 1 + c.size(),
        }
    }

    /// All syntactic subconcepts, including `self`.
    pub fn subconcepts(&self) -> BTreeSet<Concept> {
        let mut out = BTreeSet::new();
        self.collect_subconcepts(&mut out);
        out
    }

    fn collect_subconcepts(&self, out: &mut BTreeSet<Concept>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Concept::Bottom | Concept::Atomic(_) => {}
            Concept::Not(c) | Concept::Exists(_, c) => c.collect_subconcepts(out),
            Concept::And(cs) => cs.iter().for_each(|c| c.collect_subconcepts(out)),
        }
    }

    pub fn concept_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Concept::Bottom => {}
            Concept::Atomic(a) => {
                out.insert(a.clone());
            }
            Concept::Not(c) => c.concept_names(out),
            Concept::And(cs) => cs.iter().for_each(|c| c.concept_names(out)),
            Concept::Exists(_, c) => c.concept_names(out),
        }
    }

    pub fn role_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Concept::Bottom | Concept::Atomic(_) => {}
            Concept::Not(c) => c.role_names(out),
            Concept::And(cs) => cs.iter().for_each(|c| c.role_names(out)),
            Concept::Exists(rc, c) => {
                out.extend(rc.as_set().iter().cloned());
                c.role_names(out);
            }
        }
    }

    fn write_and(f: &mut fmt::Formatter<'_>, parts: &[Concept]) -> fmt::Result {
        match parts {
            [] => write!(f, "Top"),
            [only] => write!(f, "{only}"),
            [first, rest @ ..] => {
                write!(f, "({first} and ")?;
                Concept::write_and(f, rest)?;
                write!(f, ")")
            }
        }
    }
}

/// Prints in the KB grammar. `¬⊥` is printed as `Top` and a binary
/// `¬(¬C ⊓ ¬D)` as `(C or D)`; both parse back to the same term.
impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Bottom => write!(f, "Bot"),
            Concept::Atomic(a) => write!(f, "{a}"),
            Concept::Not(inner) => match inner.as_ref() {
                Concept::Bottom => write!(f, "Top"),
                Concept::And(parts)
                    if parts.len() == 2 && parts.iter().all(|p| matches!(p, Concept::Not(_))) =>
                {
                    let (Concept::Not(a), Concept::Not(b)) = (&parts[0], &parts[1]) else {
                        unreachable!()
                    };
                    write!(f, "({a} or {b})")
                }
                other => write!(f, "not {other}"),
            },
            Concept::And(parts) => Concept::write_and(f, parts),
            Concept::Exists(rc, c) => write!(f, "exists {rc}.{c}"),
        }
    }
}
