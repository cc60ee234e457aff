//! ESOP expressions as multisets of gasket coordinates.
//!
//! A [`Term`] is a product of literals written as one [`Digit`] per
//! variable, so a set of terms is also a marking of the gasket. The rewrite
//! rules in this module all follow from the per-variable identity
//! `x̄ ⊕ x = 1` (equivalently `1 ⊕ x̄ = x`, `1 ⊕ x = x̄`):
//!
//! - [`Esop::merge_distance1`]: `C·a ⊕ C·b = C·c` where `{a, b, c}` are the three states.
//! - [`Esop::split_term`]: the inverse of merge.
//! - [`Esop::reshape_distance2`]: `C·aᵢaⱼ ⊕ C·bᵢbⱼ = C·aᵢcⱼ ⊕ C·cᵢbⱼ`.
//! - [`Esop::cancel_duplicates`]: `t ⊕ t = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitsim;
use crate::boolfn::{Assignment, Cube, InputLit, LogicSpec, TruthTable, MAX_DENSE_VARS};
use crate::error::{Error, Result};
use crate::gasket::{fprm_coefficients, Coordinate, Digit, FprmCoefficients, MAX_SPECTRUM_VARS};

pub type Term = Coordinate;

/// Default number of random points for [`VerifyMode::Sampled`].
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Above this many ON-points the minterm marking is not generated.
pub const MAX_MINTERM_INIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CostReport {
    pub term_count: usize,
    pub literal_count: usize,
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "terms={} literals={}",
            self.term_count, self.literal_count
        )
    }
}

/// Per-variable polarity class across an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Only uncomplemented (also used for unused variables).
    Zero,
    /// Only complemented.
    One,
    /// Mixed.
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolarityVector(pub Vec<Polarity>);

impl fmt::Display for PolarityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('[')?;
        for p in &self.0 {
            f.write_char(match p {
                Polarity::Zero => '0',
                Polarity::One => '1',
                Polarity::D => 'd',
            })?;
        }
        f.write_char(']')
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReshapeAlt {
    A,
    B,
}

/// XOR of product terms over `n` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Esop {
    n: usize,
    terms: Vec<Term>,
}

impl Esop {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: t.n(),
            });
        }
        Ok(Esop { n, terms })
    }

    pub fn empty(n: usize) -> Self {
        Esop {
            n,
            terms: Vec::new(),
        }
    }

    /// Builds from cube strings such as `["-00", "1-1"]`.
    pub fn from_cubes(n: usize, cubes: &[&str]) -> Result<Self> {
        let terms = cubes
            .iter()
            .map(|s| {
                Term::from_cube(s).ok_or_else(|| Error::Invalid(format!("invalid cube {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Esop::new(n, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.terms.contains(t)
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.terms.iter().fold(false, |acc, t| acc ^ t.eval(x))
    }

    pub fn cost(&self) -> CostReport {
        CostReport {
            term_count: self.terms.len(),
            literal_count: self.terms.iter().map(Term::literal_count).sum(),
        }
    }

    pub fn polarity(&self) -> PolarityVector {
        PolarityVector(
            (0..self.n)
                .map(|i| {
                    let pos = self.terms.iter().any(|t| t.digit(i) == Digit::Pos);
                    let neg = self.terms.iter().any(|t| t.digit(i) == Digit::Neg);
                    match (pos, neg) {
                        (true, true) => Polarity::D,
                        (false, true) => Polarity::One,
                        _ => Polarity::Zero,
                    }
                })
                .collect(),
        )
    }

    /// Removes identical pairs; the survivors come back sorted.
    pub fn cancel_duplicates(&self) -> Esop {
        let mut counts: BTreeMap<&Term, usize> = BTreeMap::new();
        for t in &self.terms {
            *counts.entry(t).or_default() += 1;
        }
        Esop {
            n: self.n,
            terms: counts
                .into_iter()
                .filter(|(_, c)| c % 2 == 1)
                .map(|(t, _)| t.clone())
                .collect(),
        }
    }

    /// Sorted and duplicate-free; equal functions need not give equal values.
    pub fn normalized(&self) -> Esop {
        self.cancel_duplicates()
    }

    fn check_term(&self, t: &Term) -> Result<()> {
        if t.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: t.n(),
            });
        }
        Ok(())
    }

    fn take(&mut self, t: &Term) -> Result<()> {
        let pos = self
            .terms
            .iter()
            .position(|x| x == t)
            .ok_or_else(|| Error::MissingTerm(t.to_string()))?;
        self.terms.remove(pos);
        Ok(())
    }

    /// Replaces two terms at distance 1 by the one carrying the third digit.
    pub fn merge_distance1(&self, t1: &Term, t2: &Term) -> Result<Esop> {
        self.check_term(t1)?;
        self.check_term(t2)?;
        let diff = differing_vars(t1, t2);
        if diff.len() != 1 {
            return Err(Error::Distance {
                expected: 1,
                got: diff.len(),
            });
        }
        let mut out = self.clone();
        out.take(t1)?;
        out.take(t2)?;
        out.terms.push(merged(t1, t2, diff[0]));
        Ok(out)
    }

    /// Replaces `t` by the two terms with the other digits at `var`, then cancels duplicates.
    pub fn split_term(&self, t: &Term, var: usize) -> Result<Esop> {
        self.check_term(t)?;
        if var >= self.n {
            return Err(Error::VariableOutOfRange { var, n: self.n });
        }
        let mut out = self.clone();
        out.take(t)?;
        let [a, b] = t.digit(var).others();
        out.terms.push(t.with_digit(var, a));
        out.terms.push(t.with_digit(var, b));
        Ok(out.cancel_duplicates())
    }

    /// Cost-neutral exchange of two terms at distance 2.
    pub fn reshape_distance2(&self, t1: &Term, t2: &Term, alt: ReshapeAlt) -> Result<Esop> {
        self.check_term(t1)?;
        self.check_term(t2)?;
        let diff = differing_vars(t1, t2);
        if diff.len() != 2 {
            return Err(Error::Distance {
                expected: 2,
                got: diff.len(),
            });
        }
        let mut out = self.clone();
        out.take(t1)?;
        out.take(t2)?;
        let (u1, u2) = reshaped(t1, t2, diff[0], diff[1], alt);
        out.terms.push(u1);
        out.terms.push(u2);
        Ok(out)
    }

    /// Text form: `.n <vars>` followed by one cube per line.
    pub fn to_text(&self) -> String {
        let mut s = format!(".n {}\n", self.n);
        for t in &self.terms {
            s.push_str(&t.to_cube_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Esop> {
        let mut n = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(".n") {
                if n.is_some() {
                    return Err(Error::parse(line_no, "duplicate .n header"));
                }
                n =
                    Some(rest.trim().parse::<usize>().map_err(|_| {
                        Error::parse(line_no, format!("invalid .n header {line:?}"))
                    })?);
                continue;
            }
            let n = n.ok_or_else(|| Error::parse(line_no, "term before .n header"))?;
            let t = Term::from_cube(line)
                .ok_or_else(|| Error::parse(line_no, format!("invalid term {line:?}")))?;
            if t.n() != n {
                return Err(Error::parse(
                    line_no,
                    format!("term has {} digits, expected {n}", t.n()),
                ));
            }
            terms.push(t);
        }
        let n = n.ok_or_else(|| Error::parse(0, "missing .n header"))?;
        Ok(Esop { n, terms })
    }

    /// Terms of the nonzero fixed-polarity coefficients.
    pub fn from_fprm(f: &FprmCoefficients) -> Esop {
        Esop {
            n: f.n,
            terms: f.terms().collect(),
        }
    }

    /// Dense truth table of the expression.
    pub fn to_truth_table(&self) -> Result<TruthTable> {
        let mut tt = TruthTable::zeros(self.n)?;
        let mask = bitsim::lane_mask(self.n);
        for b in 0..tt.len().div_ceil(64) {
            let vars = bitsim::exhaustive_block(self.n, b);
            let w = bitsim::eval_terms(&self.terms, &vars) & mask;
            for lane in 0..64 {
                if (w >> lane) & 1 == 1 {
                    tt.set(b * 64 + lane, true);
                }
            }
        }
        Ok(tt)
    }
}

impl fmt::Debug for Esop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Esop[{}]{{", self.n)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&t.to_cube_string())?;
        }
        f.write_char('}')
    }
}

/// Algebraic form, e.g. `x1 ⊕ x̄1x̄2x̄3`; `0` when empty.
impl fmt::Display for Esop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_char('0');
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" ⊕ ")?;
            }
            if t.literal_count() == 0 {
                f.write_char('1')?;
            }
            for (i, d) in t.digits().iter().enumerate() {
                match d {
                    Digit::Absent => {}
                    Digit::Neg => write!(f, "~x{}", i + 1)?,
                    Digit::Pos => write!(f, "x{}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn differing_vars(a: &Term, b: &Term) -> Vec<usize> {
    a.digits()
        .iter()
        .zip(b.digits())
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn merged(t1: &Term, t2: &Term, var: usize) -> Term {
    t1.with_digit(var, t1.digit(var).third(t2.digit(var)))
}

pub(crate) fn reshaped(t1: &Term, t2: &Term, i: usize, j: usize, alt: ReshapeAlt) -> (Term, Term) {
    let ci = t1.digit(i).third(t2.digit(i));
    let cj = t1.digit(j).third(t2.digit(j));
    match alt {
        ReshapeAlt::A => (t1.with_digit(j, cj), t2.with_digit(i, ci)),
        ReshapeAlt::B => (t1.with_digit(i, ci), t2.with_digit(j, cj)),
    }
}

pub fn eval_esop(e: &Esop, a: &Assignment) -> Result<bool> {
    if a.len() != e.n {
        return Err(Error::Dimension {
            expected: e.n,
            got: a.len(),
        });
    }
    Ok(e.eval(a.bits()))
}

pub fn cost(e: &Esop) -> CostReport {
    e.cost()
}

pub fn polarity_of(e: &Esop) -> PolarityVector {
    e.polarity()
}

pub fn cancel_duplicates(e: &Esop) -> Esop {
    e.cancel_duplicates()
}

/// The function an ESOP is checked against.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a> {
    Table(&'a TruthTable),
    Spec { spec: &'a LogicSpec, output: usize },
}

impl<'a> Reference<'a> {
    pub fn n(&self) -> usize {
        match self {
            Reference::Table(tt) => tt.n(),
            Reference::Spec { spec, .. } => spec.n_inputs,
        }
    }

    /// A dense table when the variable count allows one.
    pub fn truth_table(&self) -> Result<std::borrow::Cow<'a, TruthTable>> {
        match *self {
            Reference::Table(tt) => Ok(std::borrow::Cow::Borrowed(tt)),
            Reference::Spec { spec, output } => {
                Ok(std::borrow::Cow::Owned(spec.to_truth_table(output)?))
            }
        }
    }

    fn check(&self) -> Result<()> {
        if let Reference::Spec { spec, output } = self {
            spec.check_output(*output)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

impl VerifyMode {
    pub fn sampled_default() -> Self {
        VerifyMode::Sampled {
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }

    /// Exhaustive when a dense table is possible, sampled otherwise.
    pub fn auto(n: usize) -> Self {
        if n <= MAX_DENSE_VARS {
            VerifyMode::Exhaustive
        } else {
            Self::sampled_default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub input: Vec<bool>,
    pub expected: bool,
    pub got: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self
            .input
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        write!(
            f,
            "input {bits}: expected {}, got {}",
            u8::from(self.expected),
            u8::from(self.got)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub points_checked: u64,
    pub mode: VerifyMode,
    pub counterexample: Option<Counterexample>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            VerifyMode::Exhaustive => "exhaustive".to_string(),
            VerifyMode::Sampled { samples, seed } => format!("sampled {samples} seed {seed}"),
        };
        match &self.counterexample {
            None => write!(f, "valid ({mode}, {} points)", self.points_checked),
            Some(cx) => write!(f, "INVALID ({mode}): {cx}"),
        }
    }
}

/// Compares `e` against `reference` on all points or on a seeded sample.
pub fn verify(e: &Esop, reference: Reference<'_>, mode: VerifyMode) -> Result<Verdict> {
    reference.check()?;
    let n = reference.n();
    if e.n != n {
        return Err(Error::Dimension {
            expected: n,
            got: e.n,
        });
    }
    match mode {
        VerifyMode::Exhaustive => {
            if n > MAX_DENSE_VARS {
                return Err(Error::Capacity {
                    what: "exhaustive verification",
                    n,
                    limit: MAX_DENSE_VARS,
                    hint: "; use sampled mode",
                });
            }
            let tt = reference.truth_table()?;
            let mask = bitsim::lane_mask(n);
            let blocks = tt.len().div_ceil(64);
            for b in 0..blocks {
                let vars = bitsim::exhaustive_block(n, b);
                let want = tt.words()[b] & mask;
                let got = bitsim::eval_terms(&e.terms, &vars) & mask;
                if want != got {
                    let lane = (want ^ got).trailing_zeros();
                    return Ok(Verdict {
                        valid: false,
                        points_checked: (b * 64 + lane as usize + 1) as u64,
                        mode,
                        counterexample: Some(Counterexample {
                            input: bitsim::lane_bits(&vars, lane),
                            expected: (want >> lane) & 1 == 1,
                            got: (got >> lane) & 1 == 1,
                        }),
                    });
                }
            }
            Ok(Verdict {
                valid: true,
                points_checked: tt.len() as u64,
                mode,
                counterexample: None,
            })
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut checked = 0u64;
            let expected = |vars: &[u64]| -> u64 {
                match reference {
                    Reference::Table(tt) => {
                        let mut w = 0u64;
                        for lane in 0..64 {
                            let idx = vars
                                .iter()
                                .fold(0usize, |acc, v| (acc << 1) | ((v >> lane) & 1) as usize);
                            if tt.get(idx) {
                                w |= 1 << lane;
                            }
                        }
                        w
                    }
                    Reference::Spec { spec, output } => {
                        bitsim::eval_spec_output(spec, output, vars)
                    }
                }
            };
            let mut check_batch = |vars: &[u64], lanes: u64| -> Option<Counterexample> {
                let mask = if lanes >= 64 { !0 } else { (1u64 << lanes) - 1 };
                let want = expected(vars) & mask;
                let got = bitsim::eval_terms(&e.terms, vars) & mask;
                checked += lanes;
                if want != got {
                    let lane = (want ^ got).trailing_zeros();
                    return Some(Counterexample {
                        input: bitsim::lane_bits(vars, lane),
                        expected: (want >> lane) & 1 == 1,
                        got: (got >> lane) & 1 == 1,
                    });
                }
                None
            };

            // cube corners first
            if let Reference::Spec { spec, .. } = reference {
                let corners: Vec<Vec<bool>> = spec.cubes.iter().flat_map(cube_corners).collect();
                for chunk in corners.chunks(64) {
                    let vars = bitsim::pack(chunk, n);
                    if let Some(cx) = check_batch(&vars, chunk.len() as u64) {
                        return Ok(invalid(checked, mode, cx));
                    }
                }
            }

            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut remaining = samples;
            while remaining > 0 {
                let lanes = remaining.min(64);
                let vars: Vec<u64> = (0..n).map(|_| rng.gen::<u64>()).collect();
                if let Some(cx) = check_batch(&vars, lanes) {
                    return Ok(invalid(checked, mode, cx));
                }
                remaining -= lanes;
            }
            Ok(Verdict {
                valid: true,
                points_checked: checked,
                mode,
                counterexample: None,
            })
        }
    }
}

fn invalid(checked: u64, mode: VerifyMode, cx: Counterexample) -> Verdict {
    Verdict {
        valid: false,
        points_checked: checked,
        mode,
        counterexample: Some(cx),
    }
}

/// Corner points of a cube: every completion of its free inputs when there
/// are at most 6 of them, otherwise the all-0 and all-1 completions.
fn cube_corners(c: &Cube) -> Vec<Vec<bool>> {
    let free: Vec<usize> = c
        .inputs
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == InputLit::DontCare)
        .map(|(i, _)| i)
        .collect();
    let base: Vec<bool> = c.inputs.iter().map(|l| *l == InputLit::One).collect();
    let fill = |mask: usize| {
        let mut p = base.clone();
        for (k, &i) in free.iter().enumerate() {
            p[i] = (mask >> k) & 1 == 1;
        }
        p
    };
    if free.len() <= 6 {
        (0..1usize << free.len()).map(fill).collect()
    } else {
        vec![fill(0), fill(usize::MAX)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitStrategy {
    Minterms,
    Pprm,
    BestFixed,
    DisjointCubes,
}

impl std::str::FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minterms" => Ok(InitStrategy::Minterms),
            "pprm" => Ok(InitStrategy::Pprm),
            "best_fixed" | "best-fixed" => Ok(InitStrategy::BestFixed),
            "disjoint_cubes" | "disjoint-cubes" | "cubes" => Ok(InitStrategy::DisjointCubes),
            _ => Err(Error::Invalid(format!("unknown init strategy {s:?}"))),
        }
    }
}

/// A valid starting marking for `reference`.
pub fn init_marking(reference: Reference<'_>, strategy: InitStrategy) -> Result<Esop> {
    reference.check()?;
    let n = reference.n();
    match (strategy, reference) {
        (InitStrategy::DisjointCubes, Reference::Spec { spec, output }) => {
            let cubes: Vec<&Cube> = spec.on_cubes(output).collect();
            Ok(sop_to_esop(n, cubes))
        }
        (InitStrategy::DisjointCubes, Reference::Table(tt))
        | (InitStrategy::Minterms, Reference::Table(tt)) => minterm_marking(tt),
        (InitStrategy::Minterms, r) => minterm_marking(&*r.truth_table()?),
        (InitStrategy::Pprm, r) => {
            let tt = r.truth_table()?;
            Ok(Esop::from_fprm(&fprm_coefficients(&tt, &vec![false; n])?))
        }
        (InitStrategy::BestFixed, r) => {
            let tt = r.truth_table()?;
            let polarity = best_fixed_polarity(&tt)?;
            Ok(Esop::from_fprm(&fprm_coefficients(&tt, &polarity)?))
        }
    }
}

fn minterm_marking(tt: &TruthTable) -> Result<Esop> {
    let ones = tt.count_ones();
    if ones > MAX_MINTERM_INIT {
        return Err(Error::Capacity {
            what: "minterm marking",
            n: tt.n(),
            limit: MAX_MINTERM_INIT,
            hint: " ON-points; use another init strategy",
        });
    }
    Ok(Esop {
        n: tt.n(),
        terms: tt.ones().map(|idx| Term::point(tt.n(), idx)).collect(),
    })
}

/// Polarity minimizing (terms, literals) of the fixed-polarity form.
///
/// Exhaustive over all `2^n` polarities for `n ≤ 16` (ties go to the lowest
/// polarity index, `x1` most significant); greedy single-variable flips above.
pub fn best_fixed_polarity(tt: &TruthTable) -> Result<Vec<bool>> {
    let n = tt.n();
    if n <= MAX_SPECTRUM_VARS {
        let values: Vec<u8> = tt.bits().map(u8::from).collect();
        let mut costs = vec![(0u32, 0u32); 1 << n];
        let mut pool = PolarityPool::new(n);
        pool.costs(&values, n, 0, &mut costs);
        let best = (0..costs.len()).min_by_key(|&p| (costs[p], p)).unwrap_or(0);
        Ok((0..n).map(|i| (best >> (n - 1 - i)) & 1 == 1).collect())
    } else {
        let eval = |pol: &[bool]| -> Result<CostReport> {
            Ok(Esop::from_fprm(&fprm_coefficients(tt, pol)?).cost())
        };
        let mut pol = vec![false; n];
        let mut best = eval(&pol)?;
        loop {
            let mut improved = false;
            for i in 0..n {
                pol[i] = !pol[i];
                let c = eval(&pol)?;
                if c < best {
                    best = c;
                    improved = true;
                } else {
                    pol[i] = !pol[i];
                }
            }
            if !improved {
                break;
            }
        }
        Ok(pol)
    }
}

/// Scratch buffers for the recursive all-polarity cost computation.
///
/// For the first variable, polarity 0 uses the cells of `f|x=d` (one extra
/// literal) and `f|x=0`; polarity 1 uses `f|x=d` and `f|x=1`. Recursing on
/// the three subfunctions costs `O(3^n)` in total.
struct PolarityPool {
    fd: Vec<Vec<u8>>,
    out: Vec<[Vec<(u32, u32)>; 3]>,
}

impl PolarityPool {
    fn new(n: usize) -> Self {
        let fd = (0..n).map(|d| vec![0u8; 1 << (n - d - 1)]).collect();
        let out = (0..n)
            .map(|d| {
                let len = 1 << (n - d - 1);
                [vec![(0, 0); len], vec![(0, 0); len], vec![(0, 0); len]]
            })
            .collect();
        PolarityPool { fd, out }
    }

    fn costs(&mut self, f: &[u8], m: usize, depth: usize, result: &mut [(u32, u32)]) {
        if m == 0 {
            result[0] = (u32::from(f[0]), 0);
            return;
        }
        let half = 1 << (m - 1);
        let (f0, f1) = f.split_at(half);
        let mut fd = std::mem::take(&mut self.fd[depth]);
        for k in 0..half {
            fd[k] = f0[k] ^ f1[k];
        }
        let [mut c0, mut c1, mut cd] = std::mem::take(&mut self.out[depth]);
        self.costs(f0, m - 1, depth + 1, &mut c0);
        self.costs(f1, m - 1, depth + 1, &mut c1);
        self.costs(&fd, m - 1, depth + 1, &mut cd);
        for p in 0..half {
            let (td, ld) = cd[p];
            let (t0, l0) = c0[p];
            let (t1, l1) = c1[p];
            result[p] = (td + t0, ld + td + l0);
            result[half + p] = (td + t1, ld + td + l1);
        }
        self.fd[depth] = fd;
        self.out[depth] = [c0, c1, cd];
    }
}

/// Disjoint-sharp conversion of an SOP cube list: each cube is sharpened
/// against all previously accepted cubes, and disjoint OR equals XOR.
pub fn sop_to_esop<'a>(n: usize, cubes: impl IntoIterator<Item = &'a Cube>) -> Esop {
    let mut accepted: Vec<Term> = Vec::new();
    for cube in cubes {
        let t = Term::new(
            cube.inputs
                .iter()
                .map(|l| match l {
                    InputLit::DontCare => Digit::Absent,
                    InputLit::Zero => Digit::Neg,
                    InputLit::One => Digit::Pos,
                })
                .collect(),
        );
        let mut pieces = vec![t];
        for a in &accepted {
            pieces = pieces
                .into_iter()
                .flat_map(|p| disjoint_sharp(&p, a))
                .collect();
            if pieces.is_empty() {
                break;
            }
        }
        accepted.extend(pieces);
    }
    Esop { n, terms: accepted }
}

/// `a # b` as pairwise-disjoint cubes covering `a \ b`.
fn disjoint_sharp(a: &Term, b: &Term) -> Vec<Term> {
    let disjoint = a
        .digits()
        .iter()
        .zip(b.digits())
        .any(|pair| matches!(pair, (Digit::Neg, Digit::Pos) | (Digit::Pos, Digit::Neg)));
    if disjoint {
        return vec![a.clone()];
    }
    let mut out = Vec::new();
    let mut cur = a.clone();
    for i in 0..a.n() {
        let bd = b.digit(i);
        if bd != Digit::Absent && cur.digit(i) == Digit::Absent {
            let opposite = if bd == Digit::Pos {
                Digit::Neg
            } else {
                Digit::Pos
            };
            out.push(cur.with_digit(i, opposite));
            cur.set_digit(i, bd);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::parse_pla;

    fn tt(s: &str) -> TruthTable {
        TruthTable::from_str_bits(s).unwrap()
    }

    fn t(s: &str) -> Term {
        Term::from_cube(s).unwrap()
    }

    fn esop(n: usize, cubes: &[&str]) -> Esop {
        Esop::from_cubes(n, cubes).unwrap()
    }

    fn example4() -> Esop {
        // (1,2,2), (3,1,3), (3,3,2)
        esop(3, &["-00", "1-1", "110"])
    }

    fn same_function(a: &Esop, b: &Esop) -> bool {
        a.to_truth_table().unwrap() == b.to_truth_table().unwrap()
    }

    #[test]
    fn eval_example4() {
        let e = example4();
        assert!(eval_esop(&e, &Assignment::from(&[1u8, 0, 1][..])).unwrap());
        assert_eq!(e.to_truth_table().unwrap(), tt("10001111"));
        assert!(!Esop::empty(3).eval(&[true, false, true]));
        assert!(esop(3, &["---"]).eval(&[false, true, false]));
    }

    #[test]
    fn verify_examples() {
        let f = tt("10001111");
        let v = verify(&example4(), Reference::Table(&f), VerifyMode::Exhaustive).unwrap();
        assert!(v.valid);
        assert_eq!(v.points_checked, 8);

        let g = tt("1011");
        let e5 = esop(2, &["--", "01"]);
        assert!(
            verify(&e5, Reference::Table(&g), VerifyMode::Exhaustive)
                .unwrap()
                .valid
        );

        let broken = esop(3, &["-00", "1-1"]);
        let v = verify(&broken, Reference::Table(&f), VerifyMode::Exhaustive).unwrap();
        assert!(!v.valid);
        let cx = v.counterexample.unwrap();
        assert_eq!(
            f.get(Assignment::new(cx.input.clone()).index()),
            cx.expected
        );
        assert_eq!(broken.eval(&cx.input), cx.got);
    }

    #[test]
    fn verify_sampled_against_spec() {
        let spec = parse_pla(".i 3\n.o 1\n1-- 1\n-00 1\n.e\n").unwrap();
        let r = Reference::Spec {
            spec: &spec,
            output: 0,
        };
        let mode = VerifyMode::Sampled {
            samples: 1000,
            seed: 7,
        };
        let v = verify(&esop(3, &["1--", "000"]), r, mode).unwrap();
        assert!(v.valid, "{v}");
        assert!(v.points_checked >= 1000);
        let v = verify(&esop(3, &["1--"]), r, mode).unwrap();
        assert!(!v.valid);
    }

    #[test]
    fn exhaustive_verify_capacity() {
        let spec = LogicSpec {
            name: String::new(),
            n_inputs: 30,
            n_outputs: 1,
            cubes: vec![],
            pla_type: Default::default(),
            input_labels: None,
            output_labels: None,
        };
        let r = Reference::Spec {
            spec: &spec,
            output: 0,
        };
        assert!(matches!(
            verify(&Esop::empty(30), r, VerifyMode::Exhaustive),
            Err(Error::Capacity { .. })
        ));
        assert!(
            verify(&Esop::empty(30), r, VerifyMode::sampled_default())
                .unwrap()
                .valid
        );
    }

    #[test]
    fn cost_examples() {
        let e1 = esop(3, &["1--", "000"]);
        assert_eq!(
            e1.cost(),
            CostReport {
                term_count: 2,
                literal_count: 4
            }
        );
        assert_eq!(Esop::empty(2).cost(), CostReport::default());
        let xor5 = esop(5, &["1----", "-1---", "--1--", "---1-", "----1"]);
        assert_eq!(
            xor5.cost(),
            CostReport {
                term_count: 5,
                literal_count: 5
            }
        );
    }

    #[test]
    fn polarity_examples() {
        assert_eq!(esop(3, &["1--", "000"]).polarity().to_string(), "[d11]");
        assert_eq!(
            esop(3, &["---", "0--", "000"]).polarity().to_string(),
            "[111]"
        );
        assert_eq!(esop(3, &["---"]).polarity().to_string(), "[000]");
    }

    #[test]
    fn init_strategies() {
        let g = tt("1011");
        let m = init_marking(Reference::Table(&g), InitStrategy::Minterms).unwrap();
        let coords: Vec<String> = m.terms().iter().map(|c| c.to_string()).collect();
        assert_eq!(coords, ["(2,2)", "(3,2)", "(3,3)"]);
        for s in [
            InitStrategy::Minterms,
            InitStrategy::Pprm,
            InitStrategy::BestFixed,
            InitStrategy::DisjointCubes,
        ] {
            let e = init_marking(Reference::Table(&g), s).unwrap();
            assert!(
                verify(&e, Reference::Table(&g), VerifyMode::Exhaustive)
                    .unwrap()
                    .valid
            );
            let zero = TruthTable::zeros(3).unwrap();
            assert!(init_marking(Reference::Table(&zero), s).unwrap().is_empty());
        }
        let p = init_marking(Reference::Table(&g), InitStrategy::Pprm).unwrap();
        assert!(p
            .terms()
            .iter()
            .all(|t| t.digits().iter().all(|&d| d != Digit::Neg)));
    }

    #[test]
    fn best_fixed_polarity_matches_brute_force() {
        let f = tt("10001111");
        let pol = best_fixed_polarity(&f).unwrap();
        let best = Esop::from_fprm(&fprm_coefficients(&f, &pol).unwrap()).cost();
        for p in 0..8usize {
            let q: Vec<bool> = (0..3).map(|i| (p >> (2 - i)) & 1 == 1).collect();
            let c = Esop::from_fprm(&fprm_coefficients(&f, &q).unwrap()).cost();
            assert!(best <= c);
        }
    }

    #[test]
    fn sop_conversion() {
        let c = |s: &str| Cube::parse(s, "1").unwrap();
        assert_eq!(sop_to_esop(2, [&c("1-")]), esop(2, &["1-"]));
        let or = [c("1-"), c("-1")];
        let e = sop_to_esop(2, &or);
        assert_eq!(e.to_truth_table().unwrap(), tt("0111"));
        assert_eq!(e, esop(2, &["1-", "01"]));
        assert!(sop_to_esop(3, std::iter::empty()).is_empty());
    }

    #[test]
    fn merge_examples() {
        let e = esop(2, &["10", "11"]);
        assert_eq!(
            e.merge_distance1(&t("10"), &t("11")).unwrap(),
            esop(2, &["1-"])
        );
        let e = esop(1, &["-", "0"]);
        assert_eq!(
            e.merge_distance1(&t("-"), &t("0")).unwrap(),
            esop(1, &["1"])
        );
        let e = esop(2, &["-0", "-1"]);
        assert_eq!(
            e.merge_distance1(&t("-0"), &t("-1")).unwrap(),
            esop(2, &["--"])
        );
        assert!(matches!(
            esop(2, &["00", "11"]).merge_distance1(&t("00"), &t("11")),
            Err(Error::Distance {
                expected: 1,
                got: 2
            })
        ));
        assert!(esop(2, &["00"])
            .merge_distance1(&t("00"), &t("01"))
            .is_err());
    }

    #[test]
    fn split_examples() {
        let e = esop(2, &["1-"]);
        let s = e.split_term(&t("1-"), 1).unwrap();
        assert_eq!(s, esop(2, &["10", "11"]));
        let c = esop(1, &["-"]).split_term(&t("-"), 0).unwrap();
        assert_eq!(c, esop(1, &["0", "1"]));
        assert_eq!(s.merge_distance1(&t("10"), &t("11")).unwrap(), e);
        assert!(e.split_term(&t("1-"), 2).is_err());
        // split product cancels against an existing term
        let e = esop(2, &["1-", "10"]);
        assert_eq!(e.split_term(&t("1-"), 1).unwrap(), esop(2, &["11"]));
    }

    #[test]
    fn reshape_examples() {
        let e = esop(2, &["00", "11"]);
        let a = e
            .reshape_distance2(&t("00"), &t("11"), ReshapeAlt::A)
            .unwrap();
        assert_eq!(a, esop(2, &["0-", "-1"]));
        let b = e
            .reshape_distance2(&t("00"), &t("11"), ReshapeAlt::B)
            .unwrap();
        assert_eq!(b, esop(2, &["-0", "1-"]));
        assert!(same_function(&e, &a) && same_function(&e, &b));
        assert_eq!(a.len(), e.len());
        assert!(e
            .reshape_distance2(&t("00"), &t("01"), ReshapeAlt::A)
            .is_err());
    }

    #[test]
    fn cancel_examples() {
        assert_eq!(
            esop(2, &["1-", "1-", "-1"]).cancel_duplicates(),
            esop(2, &["-1"])
        );
        assert!(esop(2, &["1-", "1-"]).cancel_duplicates().is_empty());
        let e = esop(2, &["-1", "1-"]);
        assert_eq!(e.cancel_duplicates(), e);
        assert_eq!(
            esop(2, &["1-", "1-", "1-"]).cancel_duplicates(),
            esop(2, &["1-"])
        );
    }

    #[test]
    fn text_format() {
        let e = example4();
        let text = e.to_text();
        assert_eq!(text, ".n 3\n-00\n1-1\n110\n");
        assert_eq!(Esop::parse(&text).unwrap(), e);
        assert_eq!(
            Esop::parse("# c\n.n 2\n\n1- # x1\n").unwrap(),
            esop(2, &["1-"])
        );
        assert!(Esop::parse("1-\n").is_err());
        assert!(Esop::parse(".n 2\n1\n").is_err());
        assert!(Esop::parse(".n 2\n1x\n").is_err());
        assert_eq!(Esop::parse(".n 4\n").unwrap(), Esop::empty(4));
    }

    #[test]
    fn display_algebraic() {
        assert_eq!(esop(3, &["1--", "000"]).to_string(), "x1 ⊕ ~x1~x2~x3");
        assert_eq!(esop(2, &["--"]).to_string(), "1");
        assert_eq!(Esop::empty(2).to_string(), "0");
    }
}
