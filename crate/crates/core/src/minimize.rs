//! Iterated rewrite search over gasket markings.
//!
//! 1. Start from a valid marking (minterms, a Reed-Muller form or disjoint cubes).
//! 2. Rewrite to a local fixpoint: duplicate cancellation and distance-1
//!    merges, then distance-2 reshapes that enable further reductions.
//! 3. Score the marking by the configured cost metric and keep the best.
//! 4. Escape with seeded split/reshape perturbations; after `patience`
//!    attempts without a new best, backtrack to the best marking and restart.
//!
//! Every rewrite is an identity of the XOR algebra, so the working marking is
//! a valid ESOP of the input after each single step.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::{LogicSpec, MAX_DENSE_VARS};
use crate::error::{Error, Result};
use crate::esop::{
    self, differing_vars, merged, reshaped, verify, CostReport, Esop, Reference, ReshapeAlt, Term,
    Verdict, VerifyMode,
};

pub use crate::esop::InitStrategy;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CostMetric {
    Terms,
    Literals,
    /// Terms first, literals as tie-break.
    #[default]
    Lexicographic,
}

impl CostMetric {
    /// Ordering key; smaller is better.
    pub fn key(self, c: CostReport) -> (usize, usize) {
        match self {
            CostMetric::Terms => (c.term_count, 0),
            CostMetric::Literals => (c.literal_count, c.term_count),
            CostMetric::Lexicographic => (c.term_count, c.literal_count),
        }
    }
}

impl std::str::FromStr for CostMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "terms" => Ok(CostMetric::Terms),
            "literals" => Ok(CostMetric::Literals),
            "lex" | "lexicographic" => Ok(CostMetric::Lexicographic),
            _ => Err(Error::Invalid(format!("unknown cost metric {s:?}"))),
        }
    }
}

/// Which initial marking to start from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InitChoice {
    /// The cheapest of the PPRM, minterm and disjoint-cube markings that are
    /// available for the reference, compared after the first local fixpoint.
    #[default]
    Auto,
    Strategy(InitStrategy),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizeConfig {
    pub cost_metric: CostMetric,
    pub init: InitChoice,
    /// Total perturbation attempts across all restarts.
    pub max_iterations: usize,
    pub restarts: usize,
    /// Random split/reshape moves per escape attempt.
    pub perturbation_budget: usize,
    /// Attempts without a new best before backtracking.
    pub patience: usize,
    pub rng_seed: u64,
    pub time_limit: Option<Duration>,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            cost_metric: CostMetric::Lexicographic,
            init: InitChoice::Auto,
            max_iterations: 10_000,
            restarts: 8,
            perturbation_budget: 4,
            patience: 200,
            rng_seed: 1,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Init,
    Cancel,
    Merge,
    Split,
    Reshape,
    /// End of a local fixpoint.
    Fixpoint,
    NewBest,
    Backtrack,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Init => "init",
            Rule::Cancel => "cancel",
            Rule::Merge => "merge",
            Rule::Split => "split",
            Rule::Reshape => "reshape",
            Rule::Fixpoint => "fixpoint",
            Rule::NewBest => "new-best",
            Rule::Backtrack => "backtrack",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: Rule,
    pub cost: CostReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizeResult {
    pub esop: Esop,
    pub cost: CostReport,
    pub initial_cost: CostReport,
    pub iterations: usize,
    /// Coarse events: init, fixpoints, new bests and backtracks.
    pub trace: Vec<TraceEvent>,
    pub verified: Verdict,
    pub seed: u64,
    pub elapsed: Duration,
}

impl MinimizeResult {
    pub fn summary(&self) -> String {
        format!(
            "{} iterations={} seed={} verified={}",
            self.cost, self.iterations, self.seed, self.verified.valid
        )
    }

    /// Flat `key=value` report, one pair per line.
    pub fn report(&self) -> String {
        format!(
            "terms={}\nliterals={}\ninitial_terms={}\ninitial_literals={}\niterations={}\nseed={}\nverified={}\nwall_time_s={:.3}\n",
            self.cost.term_count,
            self.cost.literal_count,
            self.initial_cost.term_count,
            self.initial_cost.literal_count,
            self.iterations,
            self.seed,
            self.verified.valid,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MinimizeError {
    #[error(transparent)]
    Core(#[from] Error),
    /// The time limit expired; carries the best verified result so far.
    #[error("time limit exceeded after {} iterations; best so far {}", .0.iterations, .0.cost)]
    TimeLimit(Box<MinimizeResult>),
}

/// Called after every rule application with the current marking.
pub type Observer<'a> = &'a mut dyn FnMut(Rule, &Esop);

/// Working marking with XOR-toggle semantics (a set never holds duplicates).
pub(crate) struct Marking<'o> {
    n: usize,
    terms: BTreeSet<Term>,
    literals: usize,
    observer: Option<Observer<'o>>,
}

impl Clone for Marking<'_> {
    fn clone(&self) -> Self {
        Marking {
            n: self.n,
            terms: self.terms.clone(),
            literals: self.literals,
            observer: None,
        }
    }
}

impl<'o> Marking<'o> {
    fn new(e: &Esop) -> Self {
        let e = e.cancel_duplicates();
        Marking {
            n: e.n(),
            literals: e.cost().literal_count,
            terms: e.into_terms().into_iter().collect(),
            observer: None,
        }
    }

    fn cost(&self) -> CostReport {
        CostReport {
            term_count: self.terms.len(),
            literal_count: self.literals,
        }
    }

    fn to_esop(&self) -> Esop {
        Esop::new(self.n, self.terms.iter().cloned().collect()).expect("consistent dimensions")
    }

    fn notify(&mut self, rule: Rule) {
        if let Some(obs) = self.observer.take() {
            obs(rule, &self.to_esop());
            self.observer = Some(obs);
        }
    }

    /// XOR a term into the marking. Returns true if it cancelled.
    fn toggle(&mut self, t: Term) -> bool {
        let lits = t.literal_count();
        if self.terms.remove(&t) {
            self.literals -= lits;
            true
        } else {
            self.literals += lits;
            self.terms.insert(t);
            false
        }
    }

    fn remove(&mut self, t: &Term) {
        let removed = self.terms.remove(t);
        debug_assert!(removed);
        self.literals -= t.literal_count();
    }

    fn has_neighbor(&self, u: &Term) -> bool {
        let mut probe = u.clone();
        for var in 0..self.n {
            let d = u.digit(var);
            for o in d.others() {
                probe.set_digit(var, o);
                if self.terms.contains(&probe) {
                    return true;
                }
            }
            probe.set_digit(var, d);
        }
        false
    }

    /// Lexicographically smallest pair at distance 1.
    fn smallest_mergeable(&self) -> Option<(Term, Term, usize)> {
        for t in &self.terms {
            let mut best: Option<(Term, usize)> = None;
            let mut probe = t.clone();
            for var in 0..self.n {
                let d = t.digit(var);
                for o in d.others() {
                    probe.set_digit(var, o);
                    if probe > *t
                        && self.terms.contains(&probe)
                        && best.as_ref().is_none_or(|(b, _)| probe < *b)
                    {
                        best = Some((probe.clone(), var));
                    }
                }
                probe.set_digit(var, d);
            }
            if let Some((u, var)) = best {
                return Some((t.clone(), u, var));
            }
        }
        None
    }

    /// Distance-1 merges, smallest pair first, until none applies.
    fn local_fixpoint(&mut self) {
        while let Some((t1, t2, var)) = self.smallest_mergeable() {
            let m = merged(&t1, &t2, var);
            self.remove(&t1);
            self.remove(&t2);
            let cancelled = self.toggle(m);
            self.notify(Rule::Merge);
            if cancelled {
                self.notify(Rule::Cancel);
            }
        }
    }

    /// First distance-2 reshape (in term order) that improves the metric
    /// after the follow-up fixpoint. Returns false at a local optimum.
    fn reshape_step(&mut self, metric: CostMetric) -> bool {
        let before = metric.key(self.cost());
        let terms: Vec<Term> = self.terms.iter().cloned().collect();
        for (a, t1) in terms.iter().enumerate() {
            for t2 in &terms[a + 1..] {
                if t1.distance(t2) != 2 {
                    continue;
                }
                let diff = differing_vars(t1, t2);
                for alt in [ReshapeAlt::A, ReshapeAlt::B] {
                    let (u1, u2) = reshaped(t1, t2, diff[0], diff[1], alt);
                    let lit_gain = u1.literal_count() + u2.literal_count()
                        < t1.literal_count() + t2.literal_count();
                    self.remove(t1);
                    self.remove(t2);
                    let promising = (lit_gain && metric != CostMetric::Terms)
                        || self.terms.contains(&u1)
                        || self.terms.contains(&u2)
                        || self.has_neighbor(&u1)
                        || self.has_neighbor(&u2);
                    self.toggle(t1.clone());
                    self.toggle(t2.clone());
                    if !promising {
                        continue;
                    }
                    let mut trial = self.clone();
                    trial.remove(t1);
                    trial.remove(t2);
                    trial.toggle(u1.clone());
                    trial.toggle(u2.clone());
                    trial.local_fixpoint();
                    if metric.key(trial.cost()) < before {
                        // replay on self so the observer sees each step
                        self.remove(t1);
                        self.remove(t2);
                        self.toggle(u1);
                        self.toggle(u2);
                        self.notify(Rule::Reshape);
                        self.local_fixpoint();
                        return true;
                    }
                }
            }
        }
        false
    }

    fn improve(&mut self, metric: CostMetric) {
        self.local_fixpoint();
        while self.reshape_step(metric) {}
    }

    fn perturb(&mut self, rng: &mut ChaCha8Rng, budget: usize) {
        for _ in 0..budget {
            if self.terms.is_empty() {
                // nothing to split; introduce t ⊕ t is a no-op, so stop
                return;
            }
            let k = rng.gen_range(0..self.terms.len());
            let t = self.terms.iter().nth(k).cloned().expect("index in range");
            let partners: Vec<&Term> = if rng.gen_bool(0.5) {
                self.terms.iter().filter(|u| t.distance(u) == 2).collect()
            } else {
                Vec::new()
            };
            if partners.is_empty() {
                if self.n == 0 {
                    return;
                }
                let var = rng.gen_range(0..self.n);
                let [a, b] = t.digit(var).others();
                self.remove(&t);
                self.toggle(t.with_digit(var, a));
                self.toggle(t.with_digit(var, b));
                self.notify(Rule::Split);
            } else {
                let u = partners[rng.gen_range(0..partners.len())].clone();
                let alt = if rng.gen_bool(0.5) {
                    ReshapeAlt::A
                } else {
                    ReshapeAlt::B
                };
                let diff = differing_vars(&t, &u);
                let (u1, u2) = reshaped(&t, &u, diff[0], diff[1], alt);
                self.remove(&t);
                self.remove(&u);
                self.toggle(u1);
                self.toggle(u2);
                self.notify(Rule::Reshape);
            }
        }
    }
}

/// Cancels duplicates and applies distance-1 merges (smallest pair first)
/// until no rule applies.
pub fn local_fixpoint(e: &Esop) -> Esop {
    let mut m = Marking::new(e);
    m.local_fixpoint();
    m.to_esop()
}

/// Applies up to `budget` seeded split/reshape moves.
pub fn perturb(e: &Esop, rng: &mut ChaCha8Rng, budget: usize) -> Esop {
    let mut m = Marking::new(e);
    m.perturb(rng, budget);
    m.to_esop()
}

fn init_candidates(reference: Reference<'_>) -> Vec<InitStrategy> {
    let dense = reference.n() <= MAX_DENSE_VARS;
    let mut v = Vec::new();
    if dense {
        v.push(InitStrategy::Pprm);
        v.push(InitStrategy::Minterms);
    }
    if matches!(reference, Reference::Spec { .. }) {
        v.push(InitStrategy::DisjointCubes);
    }
    v
}

pub fn minimize(
    reference: Reference<'_>,
    cfg: &MinimizeConfig,
) -> Result<MinimizeResult, MinimizeError> {
    minimize_observed(reference, cfg, None)
}

/// [`minimize`] with a hook that sees the marking after every rule application.
pub fn minimize_observed(
    reference: Reference<'_>,
    cfg: &MinimizeConfig,
    observer: Option<Observer<'_>>,
) -> Result<MinimizeResult, MinimizeError> {
    let start = Instant::now();
    let metric = cfg.cost_metric;
    let mut trace = Vec::new();

    let strategies = match cfg.init {
        InitChoice::Strategy(s) => vec![s],
        InitChoice::Auto => init_candidates(reference),
    };
    let mut best: Option<(Marking, CostReport)> = None;
    for s in strategies {
        let e = match esop::init_marking(reference, s) {
            Ok(e) => e,
            // an oversized minterm list just drops out of the candidate set
            Err(Error::Capacity { .. }) if cfg.init == InitChoice::Auto => continue,
            Err(err) => return Err(err.into()),
        };
        let mut m = Marking::new(&e);
        let initial = m.cost();
        m.local_fixpoint();
        if best
            .as_ref()
            .is_none_or(|(b, _)| metric.key(m.cost()) < metric.key(b.cost()))
        {
            best = Some((m, initial));
        }
    }
    let (mut best, initial_cost) =
        best.ok_or_else(|| Error::Invalid("no init strategy applies".into()))?;
    trace.push(TraceEvent {
        rule: Rule::Init,
        cost: initial_cost,
    });

    best.observer = observer;
    best.notify(Rule::Init);
    best.improve(metric);
    trace.push(TraceEvent {
        rule: Rule::Fixpoint,
        cost: best.cost(),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut iterations = 0usize;
    let mut timed_out = false;
    let observer = best.observer.take();
    let mut cur = best.clone();
    cur.observer = observer;

    'phases: for _phase in 0..=cfg.restarts {
        let mut stale = 0usize;
        while stale < cfg.patience && iterations < cfg.max_iterations {
            if cfg.time_limit.is_some_and(|lim| start.elapsed() > lim) {
                timed_out = true;
                break 'phases;
            }
            iterations += 1;
            let obs = cur.observer.take();
            let mut cand = cur.clone();
            cand.observer = obs;
            cand.perturb(&mut rng, cfg.perturbation_budget);
            cand.improve(metric);
            let key = metric.key(cand.cost());
            if key < metric.key(best.cost()) {
                best = cand.clone();
                cur = cand;
                stale = 0;
                trace.push(TraceEvent {
                    rule: Rule::NewBest,
                    cost: best.cost(),
                });
            } else {
                stale += 1;
                let obs = cand.observer.take();
                if key <= metric.key(cur.cost()) {
                    cur = cand;
                }
                cur.observer = obs;
            }
        }
        if iterations >= cfg.max_iterations {
            break;
        }
        // backtrack
        let obs = cur.observer.take();
        cur = best.clone();
        cur.observer = obs;
        trace.push(TraceEvent {
            rule: Rule::Backtrack,
            cost: best.cost(),
        });
    }

    let esop = best.to_esop();
    let verified = verify(&esop, reference, VerifyMode::auto(reference.n()))?;
    if !verified.valid {
        return Err(Error::Invalid(format!(
            "minimized expression failed verification: {verified}"
        ))
        .into());
    }
    let result = MinimizeResult {
        cost: esop.cost(),
        esop,
        initial_cost,
        iterations,
        trace,
        verified,
        seed: cfg.rng_seed,
        elapsed: start.elapsed(),
    };
    if timed_out {
        return Err(MinimizeError::TimeLimit(Box::new(result)));
    }
    Ok(result)
}

/// Minimizes every output of `spec` independently.
pub fn minimize_outputs(
    spec: &LogicSpec,
    cfg: &MinimizeConfig,
) -> Result<Vec<MinimizeResult>, MinimizeError> {
    (0..spec.n_outputs)
        .map(|output| minimize(Reference::Spec { spec, output }, cfg))
        .collect()
}

/// Number of distinct terms across several per-output expressions.
pub fn distinct_terms<'a>(esops: impl IntoIterator<Item = &'a Esop>) -> usize {
    esops
        .into_iter()
        .flat_map(|e| e.terms().iter())
        .collect::<BTreeSet<_>>()
        .len()
}
