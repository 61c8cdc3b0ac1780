//! Point encodings of resolution proofs.
//!
//! For a resolution step with resolvent `C` and pivot `v`, a `v`-boundary
//! point of `F` falsifying `C` is found by solving `(F \ F^v) ∪ ¬C`, where
//! `F^v` are the clauses of `F` containing `v`. Such a point and its
//! neighbour across `v` make the step legal. The points' input projections
//! are the extracted tests.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use crate::bits::{InputVector, State};
use crate::cnf::{Clause, Cnf, Point, Var};
use crate::encode::VarMap;
use crate::sat::{solve_with, PhasePolicy, ResolutionProof, SatResult, SolveOptions};

/// A point falsifying `F` such that every falsified clause contains `pivot`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundaryPoint {
    point: Point,
    pivot: Var,
}

impl BoundaryPoint {
    /// `None` unless `point` is a `pivot`-boundary point of `f`.
    pub fn new(f: &Cnf, point: Point, pivot: Var) -> Option<Self> {
        is_boundary_point(f, &point, pivot).then_some(BoundaryPoint { point, pivot })
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn pivot(&self) -> Var {
        self.pivot
    }

    /// The neighbour across the pivot; it falsifies the same resolvent.
    pub fn flipped(&self) -> Point {
        self.point.flip(self.pivot)
    }

    pub fn into_point(self) -> Point {
        self.point
    }
}

pub fn is_boundary_point(f: &Cnf, p: &Point, v: Var) -> bool {
    let mut falsified_any = false;
    for c in f.clauses() {
        if p.falsifies(c) {
            if !c.contains_var(v) {
                return false;
            }
            falsified_any = true;
        }
    }
    falsified_any
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EncodeLimits {
    /// Conflict cap per boundary-point search.
    pub max_conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

impl EncodeLimits {
    pub const DEFAULT_CONFLICTS: u64 = 10_000;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncClauseOutcome {
    Found(BoundaryPoint),
    /// `(F \ F^v) ∪ ¬C` is unsatisfiable.
    NoPoint,
    /// The candidate stopped being a boundary point after the pivot was
    /// forced to the current-state value.
    Rejected(Point),
    BudgetExceeded,
}

impl EncClauseOutcome {
    pub fn boundary_point(self) -> Option<BoundaryPoint> {
        match self {
            EncClauseOutcome::Found(bp) => Some(bp),
            _ => None,
        }
    }
}

/// Searches a `v`-boundary point of `f` falsifying `c`.
///
/// A pivot that is a present-state variable is set to its value in `curr`,
/// so the point stays consistent with the state being expanded.
pub fn enc_clause(
    f: &Cnf,
    c: &Clause,
    v: Var,
    curr: &State,
    vm: &VarMap,
    policy: &mut dyn PhasePolicy,
    limits: EncodeLimits,
) -> EncClauseOutcome {
    let mut relaxed: Vec<Clause> = f.clauses().iter().filter(|cl| !cl.contains_var(v)).cloned().collect();
    relaxed.extend(c.lits().iter().map(|&l| Clause::new(vec![!l]).unwrap()));
    let g = f.with_clauses(relaxed);
    let opts = SolveOptions {
        proof: false,
        trim: false,
        max_conflicts: limits.max_conflicts,
        deadline: limits.deadline,
    };
    let mut p = match solve_with(&g, &[], policy, opts) {
        SatResult::Sat(p) => p,
        SatResult::Unsat(_) => return EncClauseOutcome::NoPoint,
        SatResult::BudgetExceeded => {
            log::warn!("boundary point search for pivot {v} hit its conflict budget");
            return EncClauseOutcome::BudgetExceeded;
        }
    };
    if let Some(i) = vm.is_present_state(v) {
        p.set(v, curr.get(i));
    }
    if p.falsifies(c) && is_boundary_point(f, &p, v) {
        EncClauseOutcome::Found(BoundaryPoint { point: p, pivot: v })
    } else {
        EncClauseOutcome::Rejected(p)
    }
}

/// A materialized point together with the steps it legalizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPoint {
    pub point: Point,
    pub pivot: Var,
    /// Proof steps (indices into `ResolutionProof::steps`) this point was found for.
    pub steps: Vec<usize>,
    /// Whether the neighbour across `pivot` belongs to the encoding implicitly.
    pub flip_implied: bool,
}

/// Deduplicated set of points encoding (part of) a proof.
#[derive(Debug, Clone, Default)]
pub struct PointEncoding {
    points: Vec<EncodedPoint>,
    index: HashMap<Point, usize>,
}

impl PointEncoding {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a point; returns `false` (and only records the step) if present.
    pub fn insert(&mut self, point: Point, pivot: Var, step: usize, flip_implied: bool) -> bool {
        if let Some(&i) = self.index.get(&point) {
            let e = &mut self.points[i];
            if !e.steps.contains(&step) {
                e.steps.push(step);
            }
            return false;
        }
        self.index.insert(point.clone(), self.points.len());
        self.points.push(EncodedPoint {
            point,
            pivot,
            steps: vec![step],
            flip_implied,
        });
        true
    }

    pub fn points(&self) -> &[EncodedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Materialized points plus the implied neighbours.
    pub fn expanded(&self) -> HashSet<Point> {
        let mut set: HashSet<Point> = self.points.iter().map(|e| e.point.clone()).collect();
        for e in &self.points {
            if e.flip_implied {
                set.insert(e.point.flip(e.pivot));
            }
        }
        set
    }
}

/// Whether resolving `c1` and `c2` on `v` is legal with respect to the
/// encoding: two of its points falsify `c1` and `c2` respectively and
/// differ only in `v`.
pub fn is_legal_resolution(enc: &PointEncoding, c1: &Clause, c2: &Clause, v: Var) -> bool {
    let set = enc.expanded();
    set.iter()
        .filter(|p| p.falsifies(c1))
        .any(|p| {
            let q = p.flip(v);
            q.falsifies(c2) && set.contains(&q)
        })
}

/// Deduplicated input projections (transition inputs) of the encoding.
pub fn project_tests(enc: &PointEncoding, vm: &VarMap) -> BTreeSet<InputVector> {
    enc.points.iter().map(|e| vm.decode_inputs(&e.point, 0)).collect()
}

#[derive(Debug, Clone, Default)]
pub struct EncodeReport {
    pub encoding: PointEncoding,
    /// Steps for which a boundary point was searched.
    pub steps_encoded: usize,
    /// Steps skipped because their pivot is a present-state variable.
    pub skipped_state_pivots: usize,
    pub no_point: usize,
    /// Candidates discarded because the boundary property failed after the
    /// present-state overwrite.
    pub rejected: usize,
    pub budget_hits: usize,
}

/// Encodes the steps of `proof` in proof order. `on_point` is called once
/// for each new (deduplicated) boundary point with the index of the step
/// it was found for.
pub fn enc_resolutions(
    f: &Cnf,
    proof: &ResolutionProof,
    vm: &VarMap,
    curr: &State,
    policy: &mut dyn PhasePolicy,
    limits: EncodeLimits,
    mut on_point: impl FnMut(&BoundaryPoint, usize),
) -> EncodeReport {
    let mut report = EncodeReport::default();
    for (k, step) in proof.steps.iter().enumerate() {
        if let Some(deadline) = limits.deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        if vm.is_present_state(step.pivot).is_some() {
            report.skipped_state_pivots += 1;
            continue;
        }
        report.steps_encoded += 1;
        match enc_clause(f, &step.resolvent, step.pivot, curr, vm, policy, limits) {
            EncClauseOutcome::Found(bp) => {
                debug_assert!(is_boundary_point(f, bp.point(), bp.pivot()));
                if report.encoding.insert(bp.point.clone(), bp.pivot, k, true) {
                    on_point(&bp, k);
                }
            }
            EncClauseOutcome::NoPoint => report.no_point += 1,
            EncClauseOutcome::Rejected(_) => report.rejected += 1,
            EncClauseOutcome::BudgetExceeded => report.budget_hits += 1,
        }
    }
    if report.skipped_state_pivots > 0 {
        log::debug!("{} steps on present-state pivots left unencoded", report.skipped_state_pivots);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{solve, DefaultPhase};

    fn all_points(n: usize) -> impl Iterator<Item = Point> {
        (0..1u32 << n).map(move |b| Point::from_values((0..n).map(|i| b >> i & 1 == 1)))
    }

    /// Boundary points of `f` for `v` that falsify `c`, by enumeration.
    fn brute_boundary(f: &Cnf, c: &Clause, v: Var) -> Vec<Point> {
        all_points(f.var_count())
            .filter(|p| p.falsifies(c) && is_boundary_point(f, p, v))
            .collect()
    }

    fn empty_vm() -> VarMap {
        VarMap::default()
    }

    #[test]
    fn classifier_matches_enumeration() {
        let f = Cnf::from_dimacs("p cnf 2 3\n1 0\n-1 2 0\n-2 0\n").unwrap();
        let cases = [(vec![-1], 1), (vec![1], 2), (vec![], 1), (vec![], 2), (vec![2], 1), (vec![-2], 2)];
        for (c, v) in cases {
            let c = Clause::from_dimacs(&c).unwrap();
            let v = Var(v);
            let expected = brute_boundary(&f, &c, v);
            let got = enc_clause(&f, &c, v, &State::zeros(0), &empty_vm(), &mut DefaultPhase, EncodeLimits::default());
            match got {
                EncClauseOutcome::Found(bp) => assert!(expected.contains(bp.point()), "{c:?} {v}"),
                EncClauseOutcome::NoPoint => assert!(expected.is_empty(), "{c:?} {v}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn complementary_units() {
        let f = Cnf::from_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let bp = enc_clause(
            &f,
            &Clause::empty(),
            Var(1),
            &State::zeros(0),
            &empty_vm(),
            &mut DefaultPhase,
            EncodeLimits::default(),
        )
        .boundary_point()
        .unwrap();
        assert!(!bp.point().value(Var(1)));
        assert_eq!(bp.point().falsified(&f).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn no_point_when_every_relaxed_solution_satisfies_c() {
        let f = Cnf::from_dimacs("p cnf 3 4\n1 2 0\n-1 0\n3 0\n-2 0\n").unwrap();
        let c = Clause::from_dimacs(&[3]).unwrap();
        assert!(brute_boundary(&f, &c, Var(1)).is_empty());
        let r = enc_clause(&f, &c, Var(1), &State::zeros(0), &empty_vm(), &mut DefaultPhase, EncodeLimits::default());
        assert_eq!(r, EncClauseOutcome::NoPoint);
    }

    #[test]
    fn present_state_pivot_takes_current_value() {
        // x1 is a present-state variable fixed to 1 in the current state
        let f = Cnf::from_dimacs("p cnf 2 3\n1 0\n-1 2 0\n-2 0\n").unwrap();
        let vm = VarMap {
            present: vec![Some(Var(1))],
            ..Default::default()
        };
        let curr: State = "1".parse().unwrap();
        // relaxed formula {(-x2)} gives x1=0, x2=0; overwrite x1=1 falsifies (-x1 v x2)
        let r = enc_clause(&f, &Clause::empty(), Var(1), &curr, &vm, &mut DefaultPhase, EncodeLimits::default());
        let bp = r.boundary_point().unwrap();
        assert!(bp.point().value(Var(1)));
        let curr: State = "0".parse().unwrap();
        let r = enc_clause(
            &f,
            &Clause::from_dimacs(&[2]).unwrap(),
            Var(1),
            &curr,
            &vm,
            &mut DefaultPhase,
            EncodeLimits::default(),
        );
        // candidate x1=0,x2=0 falsifies (x1) only: still a boundary point
        assert!(matches!(r, EncClauseOutcome::Found(_)));
    }

    #[test]
    fn one_step_proof_one_point() {
        let f = Cnf::from_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let SatResult::Unsat(Some(proof)) = solve(&f, &[], &mut DefaultPhase) else { panic!() };
        let mut calls = 0;
        let report = enc_resolutions(&f, &proof, &empty_vm(), &State::zeros(0), &mut DefaultPhase, EncodeLimits::default(), |_, _| calls += 1);
        assert_eq!(calls, 1);
        assert_eq!(report.encoding.len(), 1);
        // the point and its flip legalize the step
        let c1 = &proof.input_clauses[0];
        let c2 = &proof.input_clauses[1];
        assert!(is_legal_resolution(&report.encoding, c1, c2, Var(1)));
    }

    #[test]
    fn legality_needs_the_flip() {
        let c1 = Clause::from_dimacs(&[1, 2]).unwrap();
        let c2 = Clause::from_dimacs(&[-1, 2]).unwrap();
        let p = Point::from_values([false, false]);
        let mut with_flip = PointEncoding::new();
        with_flip.insert(p.clone(), Var(1), 0, true);
        assert!(is_legal_resolution(&with_flip, &c1, &c2, Var(1)));
        let mut without = PointEncoding::new();
        without.insert(p.clone(), Var(1), 0, false);
        assert!(!is_legal_resolution(&without, &c1, &c2, Var(1)));
        without.insert(p.flip(Var(1)), Var(1), 0, false);
        assert!(is_legal_resolution(&without, &c1, &c2, Var(1)));
    }

    #[test]
    fn projection_dedups_inputs() {
        // var 1 is input 0; var 2 internal
        let vm = VarMap {
            inputs: vec![vec![Some(Var(1))]],
            ..Default::default()
        };
        let mut enc = PointEncoding::new();
        enc.insert(Point::from_values([true, false]), Var(2), 0, true);
        enc.insert(Point::from_values([true, true]), Var(2), 1, true);
        let tests = project_tests(&enc, &vm);
        assert_eq!(tests.len(), 1);
        assert!(project_tests(&PointEncoding::new(), &vm).is_empty());
    }
}
