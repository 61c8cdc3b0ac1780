//! Clausal formulas over positive integer variables.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// CNF variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Literal packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Self {
        debug_assert!(var.0 >= 1, "variables are numbered from 1");
        Lit(var.0 << 1 | negated as u32)
    }

    /// From a signed DIMACS integer.
    pub fn from_dimacs(x: i64) -> Self {
        assert!(x != 0);
        Lit::new(Var(x.unsigned_abs() as u32), x < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Value of the literal when its variable has value `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("clause contains both polarities of variable {0}")]
    Tautology(Var),
    #[error("clauses are not resolvable on {pivot}: {reason}")]
    NotResolvable { pivot: Var, reason: String },
}

/// A clause with at most one literal per variable, sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Sorts and merges duplicate literals; opposite literals are rejected.
    pub fn new(mut lits: Vec<Lit>) -> Result<Self, ClauseError> {
        lits.sort_by_key(|l| (l.var(), l.is_negated()));
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(ClauseError::Tautology(w[0].var()));
        }
        Ok(Clause { lits })
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Self, ClauseError> {
        Clause::new(lits.iter().map(|&x| Lit::from_dimacs(x)).collect())
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// The literal of `v` in this clause, if any.
    pub fn lit_of(&self, v: Var) -> Option<Lit> {
        self.lits
            .binary_search_by_key(&v, |l| l.var())
            .ok()
            .map(|i| self.lits[i])
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.lit_of(v).is_some()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    /// Resolvent of `self` and `other` on `pivot`.
    ///
    /// The clauses must contain opposite literals of `pivot` and no other
    /// variable with opposite literals.
    pub fn resolve(&self, other: &Clause, pivot: Var) -> Result<Clause, ClauseError> {
        let not_resolvable = |reason: String| ClauseError::NotResolvable { pivot, reason };
        let (a, b) = match (self.lit_of(pivot), other.lit_of(pivot)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(not_resolvable("pivot missing from a parent".into())),
        };
        if a != !b {
            return Err(not_resolvable("pivot has the same sign in both parents".into()));
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (x, y) = (&self.lits, &other.lits);
        while i < x.len() || j < y.len() {
            let take = match (x.get(i), y.get(j)) {
                (Some(&l), Some(&m)) => {
                    if l.var() == m.var() {
                        i += 1;
                        j += 1;
                        if l.var() == pivot {
                            continue;
                        }
                        if l != m {
                            return Err(not_resolvable(format!(
                                "variable {} has opposite literals",
                                l.var()
                            )));
                        }
                        l
                    } else if l.var() < m.var() {
                        i += 1;
                        l
                    } else {
                        j += 1;
                        m
                    }
                }
                (Some(&l), None) => {
                    i += 1;
                    l
                }
                (None, Some(&m)) => {
                    j += 1;
                    m
                }
                (None, None) => unreachable!(),
            };
            out.push(take);
        }
        Ok(Clause { lits: out })
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// What a CNF variable stands for in the circuit encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    /// Present-state bit of latch `i`.
    PresentState(usize),
    /// Next-state bit of latch `i`.
    NextState(usize),
    /// Primary input `index` in time frame `frame`.
    Input { index: usize, frame: usize },
    /// Gate output or other auxiliary variable.
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    clauses: Vec<Clause>,
    /// `roles[v]` for `v` in `1..=var_count`; index 0 unused.
    roles: Vec<VarRole>,
}

impl Cnf {
    pub fn new() -> Self {
        Cnf {
            clauses: Vec::new(),
            roles: vec![VarRole::Internal],
        }
    }

    /// Formula over `var_count` internal variables.
    pub fn with_vars(var_count: usize) -> Self {
        let mut f = Cnf::new();
        for _ in 0..var_count {
            f.new_var(VarRole::Internal);
        }
        f
    }

    pub fn new_var(&mut self, role: VarRole) -> Var {
        self.roles.push(role);
        Var(self.roles.len() as u32 - 1)
    }

    pub fn var_count(&self) -> usize {
        self.roles.len() - 1
    }

    pub fn role(&self, v: Var) -> VarRole {
        self.roles[v.index()]
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.var_count() as u32).map(Var)
    }

    pub fn add_clause(&mut self, clause: Clause) {
        debug_assert!(
            clause.vars().all(|v| v.index() <= self.var_count()),
            "clause mentions undeclared variable"
        );
        self.clauses.push(clause);
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Same variables and roles, clauses replaced.
    pub fn with_clauses(&self, clauses: Vec<Clause>) -> Cnf {
        Cnf {
            clauses,
            roles: self.roles.clone(),
        }
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.var_count(), self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS CNF. All variables get the internal role.
    pub fn from_dimacs(text: &str) -> Result<Cnf, String> {
        let mut f: Option<Cnf> = None;
        let mut pending: Vec<i64> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf") {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| format!("line {}: bad header", lineno + 1)))
                    .collect::<Result<_, _>>()?;
                if nums.len() != 2 {
                    return Err(format!("line {}: bad header", lineno + 1));
                }
                f = Some(Cnf::with_vars(nums[0]));
                continue;
            }
            let cnf = f.as_mut().ok_or("clause before header")?;
            for tok in line.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| format!("line {}: bad literal {tok:?}", lineno + 1))?;
                if x == 0 {
                    let c = Clause::from_dimacs(&pending).map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    if c.vars().any(|v| v.index() > cnf.var_count()) {
                        return Err(format!("line {}: variable out of range", lineno + 1));
                    }
                    cnf.add_clause(c);
                    pending.clear();
                } else {
                    pending.push(x);
                }
            }
        }
        if !pending.is_empty() {
            return Err("unterminated clause".into());
        }
        f.ok_or_else(|| "missing header".into())
    }
}

impl Default for Cnf {
    fn default() -> Self {
        Cnf::new()
    }
}

/// Complete assignment to the variables of a formula.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    /// `values[v]` for `v` in `1..=n`; index 0 is unused and always false.
    values: Vec<bool>,
}

impl Point {
    pub fn new(var_count: usize) -> Self {
        Point {
            values: vec![false; var_count + 1],
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = bool>) -> Self {
        let mut v = vec![false];
        v.extend(values);
        Point { values: v }
    }

    pub fn var_count(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn set(&mut self, v: Var, value: bool) {
        self.values[v.index()] = value;
    }

    /// Neighbour point differing only in `v`.
    pub fn flip(&self, v: Var) -> Point {
        let mut p = self.clone();
        p.values[v.index()] ^= true;
        p
    }

    #[inline]
    pub fn lit_value(&self, l: Lit) -> bool {
        l.eval(self.value(l.var()))
    }

    pub fn satisfies(&self, c: &Clause) -> bool {
        c.lits().iter().any(|&l| self.lit_value(l))
    }

    pub fn falsifies(&self, c: &Clause) -> bool {
        !self.satisfies(c)
    }

    pub fn satisfies_all(&self, f: &Cnf) -> bool {
        f.clauses().iter().all(|c| self.satisfies(c))
    }

    /// Indices of clauses of `f` falsified by this point.
    pub fn falsified<'a>(&'a self, f: &'a Cnf) -> impl Iterator<Item = usize> + 'a {
        f.clauses()
            .iter()
            .enumerate()
            .filter(|(_, c)| self.falsifies(c))
            .map(|(i, _)| i)
    }

    /// Variables on which two points differ.
    pub fn diff<'a>(&'a self, other: &'a Point) -> impl Iterator<Item = Var> + 'a {
        assert_eq!(self.values.len(), other.values.len());
        (1..self.values.len())
            .filter(|&i| self.values[i] != other.values[i])
            .map(|i| Var(i as u32))
    }

    /// Signed DIMACS literals, one per variable.
    pub fn to_lits(&self) -> Vec<Lit> {
        (1..self.values.len())
            .map(|i| Lit::new(Var(i as u32), !self.values[i]))
            .collect()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point[")?;
        for i in 1..self.values.len() {
            write!(f, "{}", self.values[i] as u8)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(l: &[i64]) -> Clause {
        Clause::from_dimacs(l).unwrap()
    }

    #[test]
    fn resolve_examples() {
        // (a v v), (b v -v) on v -> (a v b)
        assert_eq!(c(&[1, 3]).resolve(&c(&[2, -3]), Var(3)).unwrap(), c(&[1, 2]));
        assert_eq!(c(&[3]).resolve(&c(&[-3]), Var(3)).unwrap(), Clause::empty());
        // (a v v), (-a v -v): would produce a tautology
        assert!(c(&[1, 3]).resolve(&c(&[-1, -3]), Var(3)).is_err());
        assert!(c(&[1, 3]).resolve(&c(&[1, 3]), Var(3)).is_err());
        assert!(c(&[1]).resolve(&c(&[-3]), Var(3)).is_err());
        // duplicates merge
        assert_eq!(c(&[1, 2, 3]).resolve(&c(&[1, -3]), Var(3)).unwrap(), c(&[1, 2]));
    }

    #[test]
    fn clause_canonical() {
        assert_eq!(c(&[3, -1, 3]).lits(), &[Lit::from_dimacs(-1), Lit::from_dimacs(3)]);
        assert!(Clause::from_dimacs(&[1, -1]).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let f = Cnf::from_dimacs("c hi\np cnf 3 2\n1 -2 0\n3\n0\n").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.to_dimacs(), "p cnf 3 2\n1 -2 0\n3 0\n");
        assert_eq!(Cnf::from_dimacs(&f.to_dimacs()).unwrap(), f);
        assert!(Cnf::from_dimacs("p cnf 1 1\n2 0\n").is_err());
    }

    #[test]
    fn point_queries() {
        let f = Cnf::from_dimacs("p cnf 2 3\n1 0\n-1 2 0\n-2 0\n").unwrap();
        let p = Point::from_values([true, false]);
        assert_eq!(p.falsified(&f).collect::<Vec<_>>(), vec![1]);
        assert_eq!(p.flip(Var(2)).falsified(&f).collect::<Vec<_>>(), vec![2]);
        assert_eq!(p.diff(&p.flip(Var(1))).collect::<Vec<_>>(), vec![Var(1)]);
    }
}
