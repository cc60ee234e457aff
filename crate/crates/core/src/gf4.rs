//! GF(4) arithmetic, one-variable expansions, fixed-polarity spectra and
//! GFSOP minimization for 4-valued functions.
//!
//! Field elements are encoded as 2-bit polynomials over GF(2) modulo
//! `x² + x + 1`: `2 ↦ x`, `3 ↦ x + 1`. Addition is XOR of the encodings.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, MulAssign};
use std::sync::OnceLock;

use crate::boolfn::LogicSpec;
use crate::error::{Error, Result};
use crate::esop::CostReport;
use crate::minimize::CostMetric;

/// Largest variable count for a dense [`QuaternaryFunction`].
pub const MAX_QUATERNARY_VARS: usize = 12;
/// Largest variable count accepted by [`gf4_spectrum`] and [`minimize_gfsop`].
pub const MAX_SPECTRUM_VARS: usize = 8;
/// Up to this many variables the polarity search is exhaustive.
pub const EXHAUSTIVE_POLARITY_VARS: usize = 5;

const MUL: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gf4(u8);

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    pub const ALL: [Gf4; 4] = [Gf4(0), Gf4(1), Gf4(2), Gf4(3)];

    pub fn new(v: u8) -> Option<Gf4> {
        (v < 4).then_some(Gf4(v))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `self^e`, with `0^0 = 1`.
    pub fn pow(self, e: u32) -> Gf4 {
        let mut acc = Gf4::ONE;
        for _ in 0..e {
            acc *= self;
        }
        acc
    }

    pub fn inv(self) -> Option<Gf4> {
        // v³ = 1 for v ≠ 0
        (!self.is_zero()).then(|| self.pow(2))
    }
}

impl fmt::Debug for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Gf4 {
    type Output = Gf4;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf4) -> Gf4 {
        Gf4(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf4 {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Gf4) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Gf4 {
    type Output = Gf4;
    #[inline]
    fn mul(self, rhs: Gf4) -> Gf4 {
        Gf4(MUL[self.0 as usize][rhs.0 as usize])
    }
}

impl MulAssign for Gf4 {
    fn mul_assign(&mut self, rhs: Gf4) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Gf4 {
    fn sum<I: Iterator<Item = Gf4>>(iter: I) -> Gf4 {
        iter.fold(Gf4::ZERO, Add::add)
    }
}

/// Shorthand used heavily in tests and tables.
pub const fn g(v: u8) -> Gf4 {
    Gf4(v & 3)
}

/// Dense table of an `n`-variable 4-valued function, index `Σ X_i·4^(n−i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuaternaryFunction {
    n: usize,
    values: Vec<Gf4>,
}

impl QuaternaryFunction {
    pub fn new(n: usize, values: Vec<Gf4>) -> Result<Self> {
        if n > MAX_QUATERNARY_VARS {
            return Err(Error::Capacity {
                what: "quaternary function",
                n,
                limit: MAX_QUATERNARY_VARS,
                hint: "",
            });
        }
        if values.len() != 1 << (2 * n) {
            return Err(Error::Dimension {
                expected: 1 << (2 * n),
                got: values.len(),
            });
        }
        Ok(QuaternaryFunction { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(&[Gf4]) -> Gf4) -> Result<Self> {
        let values = (0..1usize << (2 * n))
            .map(|idx| f(&decode_point(n, idx)))
            .collect();
        Self::new(n, values)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, vec![Gf4::ZERO; 1 << (2 * n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Gf4] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> Gf4 {
        self.values[idx]
    }

    pub fn eval(&self, x: &[Gf4]) -> Gf4 {
        self.values[encode_point(x)]
    }

    /// `f|x_var = v` as an `(n−1)`-variable function; `var` is 0-based.
    pub fn cofactor(&self, var: usize, v: Gf4) -> Result<QuaternaryFunction> {
        if var >= self.n {
            return Err(Error::VariableOutOfRange { var, n: self.n });
        }
        let shift = 2 * (self.n - 1 - var);
        let low = (1usize << shift) - 1;
        let values = (0..1usize << (2 * (self.n - 1)))
            .map(|idx| {
                let full =
                    ((idx >> shift) << (shift + 2)) | ((v.0 as usize) << shift) | (idx & low);
                self.values[full]
            })
            .collect();
        Ok(QuaternaryFunction {
            n: self.n - 1,
            values,
        })
    }

    fn combine(&self, other: &QuaternaryFunction, k: Gf4) -> QuaternaryFunction {
        QuaternaryFunction {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + k * b)
                .collect(),
        }
    }

    /// Text form: `.v n`, `.r 4`, then the `4^n` values as digits in index order.
    pub fn to_text(&self) -> String {
        let mut s = format!(".v {}\n.r 4\n", self.n);
        for v in &self.values {
            s.push(char::from(b'0' + v.0));
        }
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<QuaternaryFunction> {
        let mut n = None;
        let mut values = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(".v") {
                n = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse(line_no, "invalid .v header"))?,
                );
                continue;
            }
            if let Some(rest) = line.strip_prefix(".r") {
                if rest.trim() != "4" {
                    return Err(Error::parse(
                        line_no,
                        format!("unsupported radix {:?}", rest.trim()),
                    ));
                }
                continue;
            }
            if n.is_none() {
                return Err(Error::parse(line_no, "values before .v header"));
            }
            for c in line.chars().filter(|c| !c.is_whitespace()) {
                let v = c
                    .to_digit(4)
                    .ok_or_else(|| Error::parse(line_no, format!("invalid GF(4) digit {c:?}")))?;
                values.push(Gf4(v as u8));
            }
        }
        let n = n.ok_or_else(|| Error::parse(0, "missing .v header"))?;
        Self::new(n, values)
    }
}

impl fmt::Debug for QuaternaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuaternaryFunction({}: ", self.n)?;
        for v in self.values.iter().take(64) {
            write!(f, "{}", v.0)?;
        }
        if self.values.len() > 64 {
            f.write_str("…")?;
        }
        f.write_char(')')
    }
}

pub fn decode_point(n: usize, idx: usize) -> Vec<Gf4> {
    (0..n)
        .map(|i| Gf4(((idx >> (2 * (n - 1 - i))) & 3) as u8))
        .collect()
}

pub fn encode_point(x: &[Gf4]) -> usize {
    x.iter().fold(0, |acc, v| (acc << 2) | v.0 as usize)
}

/// The factor `(x + shift)^power`; `power == 0` means the factor is absent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gf4Literal {
    pub shift: Gf4,
    pub power: u8,
}

impl Gf4Literal {
    pub const ABSENT: Gf4Literal = Gf4Literal {
        shift: Gf4::ZERO,
        power: 0,
    };

    /// Normalizes the shift of an absent factor to 0.
    pub fn new(shift: Gf4, power: u8) -> Gf4Literal {
        assert!(power < 4, "power must be 0..=3");
        if power == 0 {
            Gf4Literal::ABSENT
        } else {
            Gf4Literal { shift, power }
        }
    }

    #[inline]
    pub fn eval(self, x: Gf4) -> Gf4 {
        (x + self.shift).pow(u32::from(self.power))
    }

    pub fn is_present(self) -> bool {
        self.power > 0
    }

    /// Values at x = 0..3.
    fn table(self) -> [Gf4; 4] {
        Gf4::ALL.map(|x| self.eval(x))
    }
}

pub fn literal_eval(l: Gf4Literal, x: Gf4) -> Gf4 {
    l.eval(x)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gf4Term {
    pub coef: Gf4,
    pub literals: Vec<Gf4Literal>,
}

impl Gf4Term {
    pub fn eval(&self, x: &[Gf4]) -> Gf4 {
        self.literals
            .iter()
            .zip(x)
            .fold(self.coef, |acc, (l, &v)| acc * l.eval(v))
    }

    pub fn literal_count(&self) -> usize {
        self.literals.iter().filter(|l| l.is_present()).count()
    }
}

/// GF(4) sum of products of shifted-literal powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gfsop {
    n: usize,
    terms: Vec<Gf4Term>,
}

impl Gfsop {
    /// Drops zero-coefficient terms.
    pub fn new(n: usize, terms: Vec<Gf4Term>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.literals.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: t.literals.len(),
            });
        }
        Ok(Gfsop {
            n,
            terms: terms.into_iter().filter(|t| !t.coef.is_zero()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Gf4Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[Gf4]) -> Gf4 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn cost(&self) -> CostReport {
        CostReport {
            term_count: self.terms.len(),
            literal_count: self.terms.iter().map(Gf4Term::literal_count).sum(),
        }
    }

    /// Adds up terms with identical literal vectors; result sorted by literals.
    pub fn normalized(&self) -> Gfsop {
        let mut acc: BTreeMap<&[Gf4Literal], Gf4> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry(&t.literals).or_default() += t.coef;
        }
        Gfsop {
            n: self.n,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, coef)| Gf4Term {
                    coef,
                    literals: l.to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_function(&self) -> Result<QuaternaryFunction> {
        QuaternaryFunction::from_fn(self.n, |x| self.eval(x))
    }

    /// Text form: `.v n` then one `c : s1.p1 … sn.pn` line per term.
    pub fn to_text(&self) -> String {
        let mut s = format!(".v {}\n", self.n);
        for t in &self.terms {
            let _ = write!(s, "{} :", t.coef);
            for l in &t.literals {
                let _ = write!(s, " {}.{}", l.shift, l.power);
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Gfsop> {
        let mut n = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(".v") {
                n = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse(line_no, "invalid .v header"))?,
                );
                continue;
            }
            let (coef, lits) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, "expected `c : s.p …`"))?;
            let coef = parse_digit(coef.trim(), line_no)?;
            if coef.is_zero() {
                return Err(Error::parse(line_no, "zero coefficient"));
            }
            let literals = lits
                .split_whitespace()
                .map(|tok| {
                    let (s, p) = tok.split_once('.').ok_or_else(|| {
                        Error::parse(line_no, format!("expected shift.power, got {tok:?}"))
                    })?;
                    let shift = parse_digit(s, line_no)?;
                    let power = parse_digit(p, line_no)?.0;
                    if power == 0 && !shift.is_zero() {
                        return Err(Error::parse(line_no, "absent factor must be written 0.0"));
                    }
                    Ok(Gf4Literal { shift, power })
                })
                .collect::<Result<Vec<_>>>()?;
            match n {
                Some(n) if n != literals.len() => {
                    return Err(Error::parse(
                        line_no,
                        format!("term has {} factors, expected {n}", literals.len()),
                    ))
                }
                None => n = Some(literals.len()),
                _ => {}
            }
            terms.push(Gf4Term { coef, literals });
        }
        let n = n.ok_or_else(|| Error::parse(0, "empty GFSOP without .v header"))?;
        Ok(Gfsop { n, terms })
    }
}

fn parse_digit(s: &str, line: usize) -> Result<Gf4> {
    match s {
        "0" => Ok(Gf4(0)),
        "1" => Ok(Gf4(1)),
        "2" => Ok(Gf4(2)),
        "3" => Ok(Gf4(3)),
        _ => Err(Error::parse(line, format!("invalid GF(4) digit {s:?}"))),
    }
}

impl fmt::Display for Gfsop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_char('0');
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", t.coef)?;
            for (i, l) in t.literals.iter().enumerate() {
                if !l.is_present() {
                    continue;
                }
                f.write_char('·')?;
                if !l.shift.is_zero() {
                    write!(f, "({}x{})", l.shift, i + 1)?;
                } else {
                    write!(f, "x{}", i + 1)?;
                }
                if l.power > 1 {
                    write!(f, "^{}", l.power)?;
                }
            }
        }
        Ok(())
    }
}

pub fn gfsop_eval(g: &Gfsop, x: &[Gf4]) -> Gf4 {
    g.eval(x)
}

pub fn gfsop_cost(g: &Gfsop) -> CostReport {
    g.cost()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf4Verdict {
    pub valid: bool,
    pub points_checked: usize,
    /// `(point, expected, got)` for the first mismatch.
    pub counterexample: Option<(Vec<Gf4>, Gf4, Gf4)>,
}

/// Compares `g` with `f` on all `4^n` points.
pub fn gfsop_verify(g: &Gfsop, f: &QuaternaryFunction) -> Result<Gf4Verdict> {
    if g.n != f.n {
        return Err(Error::Dimension {
            expected: f.n,
            got: g.n,
        });
    }
    for (idx, &want) in f.values.iter().enumerate() {
        let x = decode_point(f.n, idx);
        let got = g.eval(&x);
        if got != want {
            return Ok(Gf4Verdict {
                valid: false,
                points_checked: idx + 1,
                counterexample: Some((x, want, got)),
            });
        }
    }
    Ok(Gf4Verdict {
        valid: true,
        points_checked: f.values.len(),
        counterexample: None,
    })
}

/// One-variable expansions over GF(4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionKind4 {
    /// `f = Σ J_i(x)·f|x=i`, `J_i` the 0/1 indicator of `x = i`.
    Shannon,
    /// `f = c0 + c1·x + c2·x² + c3·x³`.
    PositiveDavio,
    /// `f = c0 + c1·ⁱx + c2·(ⁱx)² + c3·(ⁱx)³` for shift `i ∈ {1,2,3}`.
    NegativeDavio(u8),
}

impl ExpansionKind4 {
    pub const ALL: [ExpansionKind4; 5] = [
        ExpansionKind4::Shannon,
        ExpansionKind4::PositiveDavio,
        ExpansionKind4::NegativeDavio(1),
        ExpansionKind4::NegativeDavio(2),
        ExpansionKind4::NegativeDavio(3),
    ];

    /// The Davio kind with the given literal shift.
    pub fn davio(shift: Gf4) -> ExpansionKind4 {
        if shift.is_zero() {
            ExpansionKind4::PositiveDavio
        } else {
            ExpansionKind4::NegativeDavio(shift.0)
        }
    }

    fn shift(self) -> Option<Gf4> {
        match self {
            ExpansionKind4::Shannon => None,
            ExpansionKind4::PositiveDavio => Some(Gf4::ZERO),
            ExpansionKind4::NegativeDavio(i) => Some(Gf4(i)),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            ExpansionKind4::NegativeDavio(i) if !(1..=3).contains(&i) => Err(Error::Invalid(
                format!("negative Davio shift {i} is not in 1..=3"),
            )),
            _ => Ok(()),
        }
    }

    /// Basis function `k` of this expansion evaluated at `x`.
    pub fn basis(self, k: usize, x: Gf4) -> Gf4 {
        match self.shift() {
            None => {
                if x.0 as usize == k {
                    Gf4::ONE
                } else {
                    Gf4::ZERO
                }
            }
            Some(s) => (x + s).pow(k as u32),
        }
    }
}

/// Davio coefficients of a univariate function given by its values at 0..3.
///
/// With `g(y) = f(y + shift)` this is the interpolation
/// `c0 = g0`, `c1 = g1 + 3g2 + 2g3`, `c2 = g1 + 2g2 + 3g3`, `c3 = g0 + g1 + g2 + g3`.
pub fn davio_coefficients(values: [Gf4; 4], shift: Gf4) -> [Gf4; 4] {
    let gv = |j: u8| values[(j ^ shift.0) as usize];
    let (g0, g1, g2, g3) = (gv(0), gv(1), gv(2), gv(3));
    [
        g0,
        g1 + g(3) * g2 + g(2) * g3,
        g1 + g(2) * g2 + g(3) * g3,
        g0 + g1 + g2 + g3,
    ]
}

/// The four coefficient subfunctions of `f` with respect to `var`.
pub fn expand(
    f: &QuaternaryFunction,
    var: usize,
    kind: ExpansionKind4,
) -> Result<[QuaternaryFunction; 4]> {
    kind.validate()?;
    let cof = [
        f.cofactor(var, g(0))?,
        f.cofactor(var, g(1))?,
        f.cofactor(var, g(2))?,
        f.cofactor(var, g(3))?,
    ];
    let Some(s) = kind.shift() else {
        return Ok(cof);
    };
    let at = |j: u8| &cof[(j ^ s.0) as usize];
    let c0 = at(0).clone();
    let c1 = at(1).combine(at(2), g(3)).combine(at(3), g(2));
    let c2 = at(1).combine(at(2), g(2)).combine(at(3), g(3));
    let c3 = at(0)
        .combine(at(1), g(1))
        .combine(at(2), g(1))
        .combine(at(3), g(1));
    Ok([c0, c1, c2, c3])
}

/// Recombines the output of [`expand`] into an `n`-variable function.
pub fn reconstruct(
    coeffs: &[QuaternaryFunction; 4],
    var: usize,
    kind: ExpansionKind4,
) -> Result<QuaternaryFunction> {
    kind.validate()?;
    let n = coeffs[0].n + 1;
    if var >= n {
        return Err(Error::VariableOutOfRange { var, n });
    }
    QuaternaryFunction::from_fn(n, |x| {
        let mut rest = x.to_vec();
        let xv = rest.remove(var);
        let idx = encode_point(&rest);
        (0..4)
            .map(|k| kind.basis(k, xv) * coeffs[k].values[idx])
            .sum()
    })
}

/// Fixed-polarity Reed-Muller spectrum: coefficient `k` (digits `k_i` base 4)
/// multiplies `∏ (X_i + polarity_i)^(k_i)`.
pub fn gf4_spectrum(f: &QuaternaryFunction, polarity: &[Gf4]) -> Result<Vec<Gf4>> {
    let n = f.n;
    if n > MAX_SPECTRUM_VARS {
        return Err(Error::Capacity {
            what: "GF(4) spectrum",
            n,
            limit: MAX_SPECTRUM_VARS,
            hint: "",
        });
    }
    if polarity.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: polarity.len(),
        });
    }
    let mut v = f.values.clone();
    for (i, &s) in polarity.iter().enumerate() {
        let stride = 1usize << (2 * (n - 1 - i));
        for block in (0..v.len()).step_by(4 * stride) {
            for j in block..block + stride {
                let vals = [v[j], v[j + stride], v[j + 2 * stride], v[j + 3 * stride]];
                let c = davio_coefficients(vals, s);
                for (k, ck) in c.into_iter().enumerate() {
                    v[j + k * stride] = ck;
                }
            }
        }
    }
    Ok(v)
}

/// The GFSOP read off a fixed-polarity spectrum (nonzero coefficients only).
pub fn spectrum_to_gfsop(n: usize, polarity: &[Gf4], spectrum: &[Gf4]) -> Gfsop {
    let terms = spectrum
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, &coef)| Gf4Term {
            coef,
            literals: (0..n)
                .map(|i| {
                    let p = ((k >> (2 * (n - 1 - i))) & 3) as u8;
                    Gf4Literal::new(polarity[i], p)
                })
                .collect(),
        })
        .collect();
    Gfsop { n, terms }
}

fn spectrum_cost(n: usize, spectrum: &[Gf4]) -> CostReport {
    let mut c = CostReport::default();
    for (k, v) in spectrum.iter().enumerate() {
        if !v.is_zero() {
            c.term_count += 1;
            c.literal_count += (0..n).filter(|i| (k >> (2 * i)) & 3 != 0).count();
        }
    }
    c
}

/// Pairs binary inputs and outputs into 4-valued ones.
///
/// Inputs `(x_{2j−1}, x_{2j})` form `X_j = 2·x_{2j−1} + x_{2j}`; an odd
/// trailing input takes the low bit alone (a constant-0 high bit), so its
/// quaternary variable only depends on `X_j mod 2`. Outputs are paired the
/// same way. Returns one function per output pair.
pub fn pair_binary(spec: &LogicSpec) -> Result<Vec<QuaternaryFunction>> {
    let nq = spec.n_inputs.div_ceil(2);
    if nq > MAX_QUATERNARY_VARS {
        return Err(Error::Capacity {
            what: "paired quaternary function",
            n: nq,
            limit: MAX_QUATERNARY_VARS,
            hint: "",
        });
    }
    let tables = (0..spec.n_outputs)
        .map(|o| spec.to_truth_table(o))
        .collect::<Result<Vec<_>>>()?;
    let n_in = spec.n_inputs;
    let binary_index = |qidx: usize| -> usize {
        let mut bidx = 0usize;
        for j in 0..nq {
            let xq = (qidx >> (2 * (nq - 1 - j))) & 3;
            let hi = 2 * j;
            if hi + 1 < n_in {
                bidx |= (xq >> 1) << (n_in - 1 - hi);
                bidx |= (xq & 1) << (n_in - 2 - hi);
            } else {
                bidx |= (xq & 1) << (n_in - 1 - hi);
            }
        }
        bidx
    };
    let mut out = Vec::new();
    for k in 0..spec.n_outputs.div_ceil(2) {
        let hi = 2 * k;
        let values = (0..1usize << (2 * nq))
            .map(|qidx| {
                let b = binary_index(qidx);
                let v = if hi + 1 < spec.n_outputs {
                    (u8::from(tables[hi].get(b)) << 1) | u8::from(tables[hi + 1].get(b))
                } else {
                    u8::from(tables[hi].get(b))
                };
                Gf4(v)
            })
            .collect();
        out.push(QuaternaryFunction::new(nq, values)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfsopConfig {
    pub cost_metric: CostMetric,
    /// Exhaustive polarity search up to this many variables, greedy above.
    pub exhaustive_limit: usize,
}

impl Default for GfsopConfig {
    fn default() -> Self {
        GfsopConfig {
            cost_metric: CostMetric::Lexicographic,
            exhaustive_limit: EXHAUSTIVE_POLARITY_VARS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfsopResult {
    pub gfsop: Gfsop,
    pub cost: CostReport,
    /// Cost of the best fixed-polarity spectrum, before refactoring.
    pub fixed_polarity_cost: CostReport,
    pub polarity: Vec<Gf4>,
    pub refactor_moves: usize,
    pub verified: Gf4Verdict,
}

/// Univariate expression as `(coefficient, literal)` monomials.
type Rep = Vec<(Gf4, Gf4Literal)>;

/// Minimum-cost representation of every univariate function as a sum of
/// `c·(x + s)^p` monomials, indexed by the packed values `Σ f(i)·4^i`.
fn univariate_table() -> &'static [Rep; 256] {
    static TABLE: OnceLock<[Rep; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let pack = |v: [Gf4; 4]| {
            v.iter()
                .enumerate()
                .fold(0usize, |acc, (i, x)| acc | (x.0 as usize) << (2 * i))
        };
        let mut monomials = Vec::new();
        for coef in [g(1), g(2), g(3)] {
            monomials.push((coef, Gf4Literal::ABSENT));
            for s in Gf4::ALL {
                for p in 1..4 {
                    monomials.push((coef, Gf4Literal::new(s, p)));
                }
            }
        }
        let values = |m: &(Gf4, Gf4Literal)| m.1.table().map(|v| m.0 * v);
        // layer-by-layer search: cost (terms, literals), ties to the first found
        let mut best: Vec<Option<(usize, usize, Rep)>> = vec![None; 256];
        best[0] = Some((0, 0, Vec::new()));
        let mut frontier: Vec<([Gf4; 4], usize, Rep)> = vec![([Gf4::ZERO; 4], 0, Vec::new())];
        for layer in 1..=4 {
            let mut next: BTreeMap<usize, ([Gf4; 4], usize, Rep)> = BTreeMap::new();
            for (vals, lits, rep) in &frontier {
                for m in &monomials {
                    let mv = values(m);
                    let nv = [
                        vals[0] + mv[0],
                        vals[1] + mv[1],
                        vals[2] + mv[2],
                        vals[3] + mv[3],
                    ];
                    let nl = lits + usize::from(m.1.is_present());
                    let key = pack(nv);
                    if next.get(&key).is_none_or(|(_, l, _)| nl < *l) {
                        let mut r = rep.clone();
                        r.push(*m);
                        next.insert(key, (nv, nl, r));
                    }
                }
            }
            for (key, (_, lits, rep)) in &next {
                if best[*key].is_none() {
                    best[*key] = Some((layer, *lits, rep.clone()));
                }
            }
            frontier = next.into_values().collect();
        }
        std::array::from_fn(|k| {
            best[k]
                .as_ref()
                .expect("every univariate function has ≤ 4 terms")
                .2
                .clone()
        })
    })
}

/// Searches fixed-polarity spectra, then refactors groups of terms that agree
/// outside one variable into a cheaper univariate form.
pub fn minimize_gfsop(f: &QuaternaryFunction, cfg: &GfsopConfig) -> Result<GfsopResult> {
    minimize_gfsop_observed(f, cfg, None)
}

pub fn minimize_gfsop_observed(
    f: &QuaternaryFunction,
    cfg: &GfsopConfig,
    mut observer: Option<&mut dyn FnMut(&Gfsop)>,
) -> Result<GfsopResult> {
    let n = f.n;
    if n > MAX_SPECTRUM_VARS {
        return Err(Error::Capacity {
            what: "GFSOP minimization",
            n,
            limit: MAX_SPECTRUM_VARS,
            hint: "",
        });
    }
    let metric = cfg.cost_metric;
    let cost_of =
        |pol: &[Gf4]| -> Result<CostReport> { Ok(spectrum_cost(n, &gf4_spectrum(f, pol)?)) };

    let polarity: Vec<Gf4> = if n <= cfg.exhaustive_limit {
        let mut best: Option<(CostReport, Vec<Gf4>)> = None;
        for p in 0..1usize << (2 * n) {
            let pol = decode_point(n, p);
            let c = cost_of(&pol)?;
            if best
                .as_ref()
                .is_none_or(|(b, _)| metric.key(c) < metric.key(*b))
            {
                best = Some((c, pol));
            }
        }
        best.map(|(_, p)| p).unwrap_or_default()
    } else {
        let mut pol = vec![Gf4::ZERO; n];
        let mut best = cost_of(&pol)?;
        loop {
            let mut improved = false;
            for i in 0..n {
                let keep = pol[i];
                for s in Gf4::ALL {
                    if s == keep {
                        continue;
                    }
                    pol[i] = s;
                    let c = cost_of(&pol)?;
                    if metric.key(c) < metric.key(best) {
                        best = c;
                        improved = true;
                    } else {
                        pol[i] = keep;
                    }
                    if pol[i] != keep {
                        break;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        pol
    };

    let spectrum = gf4_spectrum(f, &polarity)?;
    let mut current = spectrum_to_gfsop(n, &polarity, &spectrum);
    let fixed_polarity_cost = current.cost();
    if let Some(obs) = observer.as_mut() {
        obs(&current);
    }

    let table = univariate_table();
    let mut moves = 0;
    loop {
        let mut improved = false;
        for var in 0..n {
            while let Some(next) = refactor_once(&current, var, metric, table) {
                current = next;
                moves += 1;
                improved = true;
                if let Some(obs) = observer.as_mut() {
                    obs(&current);
                }
            }
        }
        if !improved {
            break;
        }
    }

    let verified = gfsop_verify(&current, f)?;
    if !verified.valid {
        return Err(Error::Invalid(
            "GFSOP minimization produced an invalid expression".into(),
        ));
    }
    Ok(GfsopResult {
        cost: current.cost(),
        gfsop: current,
        fixed_polarity_cost,
        polarity,
        refactor_moves: moves,
        verified,
    })
}

/// One improving refactor of the group of terms sharing all literals except `var`.
fn refactor_once(
    g_in: &Gfsop,
    var: usize,
    metric: CostMetric,
    table: &[Rep; 256],
) -> Option<Gfsop> {
    let mut groups: BTreeMap<Vec<Gf4Literal>, Vec<usize>> = BTreeMap::new();
    for (i, t) in g_in.terms.iter().enumerate() {
        let mut rest = t.literals.clone();
        rest[var] = Gf4Literal::ABSENT;
        groups.entry(rest).or_default().push(i);
    }
    for (rest, members) in groups {
        if members.len() < 2 {
            continue;
        }
        let rest_lits = rest.iter().filter(|l| l.is_present()).count();
        let mut h = [Gf4::ZERO; 4];
        let mut old = CostReport::default();
        for &i in &members {
            let t = &g_in.terms[i];
            for (x, hx) in h.iter_mut().enumerate() {
                *hx += t.coef * t.literals[var].eval(Gf4(x as u8));
            }
            old.term_count += 1;
            old.literal_count += t.literal_count();
        }
        let mut candidates: Vec<Rep> = (0..4u8)
            .map(|s| {
                davio_coefficients(h, Gf4(s))
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(p, &c)| (c, Gf4Literal::new(Gf4(s), p as u8)))
                    .collect()
            })
            .collect();
        let key = h
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, x)| acc | (x.0 as usize) << (2 * i));
        candidates.push(table[key].clone());
        let cost_of = |rep: &[(Gf4, Gf4Literal)]| CostReport {
            term_count: rep.len(),
            literal_count: rep
                .iter()
                .map(|(_, l)| usize::from(l.is_present()) + rest_lits)
                .sum(),
        };
        let Some(best) = candidates
            .into_iter()
            .min_by_key(|r| metric.key(cost_of(r)))
        else {
            continue;
        };
        if metric.key(cost_of(&best)) < metric.key(old) {
            let mut terms: Vec<Gf4Term> = g_in
                .terms
                .iter()
                .enumerate()
                .filter(|(i, _)| !members.contains(i))
                .map(|(_, t)| t.clone())
                .collect();
            for (coef, lit) in best {
                let mut literals = rest.clone();
                literals[var] = lit;
                terms.push(Gf4Term { coef, literals });
            }
            return Some(Gfsop { n: g_in.n, terms });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::parse_pla;

    fn qf(n: usize, digits: &str) -> QuaternaryFunction {
        QuaternaryFunction::new(
            n,
            digits
                .chars()
                .map(|c| g(c.to_digit(4).unwrap() as u8))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn field_examples() {
        assert_eq!(g(2) + g(3), g(1));
        assert_eq!(g(2) * g(2), g(3));
        for v in Gf4::ALL {
            assert_eq!(g(0) * v, g(0));
            if !v.is_zero() {
                assert_eq!(v.pow(3), g(1));
                assert_eq!(v * v.inv().unwrap(), g(1));
            }
        }
        assert_eq!(g(0).pow(3), g(0));
        assert_eq!(g(0).pow(0), g(1));
        assert!(g(0).inv().is_none());
    }

    #[test]
    fn literal_examples() {
        assert_eq!(Gf4Literal::new(g(1), 1).eval(g(3)), g(2));
        assert_eq!(Gf4Literal::new(g(0), 3).eval(g(2)), g(1));
        for s in Gf4::ALL {
            for x in Gf4::ALL {
                assert_eq!(Gf4Literal::new(s, 0).eval(x), g(1));
            }
        }
    }

    #[test]
    fn davio_of_identity_and_square() {
        let id = qf(1, "0123");
        let c = expand(&id, 0, ExpansionKind4::PositiveDavio).unwrap();
        let flat: Vec<Gf4> = c.iter().map(|q| q.get(0)).collect();
        assert_eq!(flat, [g(0), g(1), g(0), g(0)]);

        let sq = QuaternaryFunction::from_fn(1, |x| x[0] * x[0]).unwrap();
        let c = expand(&sq, 0, ExpansionKind4::PositiveDavio).unwrap();
        let flat: Vec<Gf4> = c.iter().map(|q| q.get(0)).collect();
        assert_eq!(flat, [g(0), g(0), g(1), g(0)]);

        let k = qf(1, "2222");
        let c = expand(&k, 0, ExpansionKind4::PositiveDavio).unwrap();
        let flat: Vec<Gf4> = c.iter().map(|q| q.get(0)).collect();
        assert_eq!(flat, [g(2), g(0), g(0), g(0)]);
        assert!(expand(&k, 0, ExpansionKind4::NegativeDavio(4)).is_err());
    }

    #[test]
    fn expansions_reconstruct_small() {
        let f =
            QuaternaryFunction::from_fn(2, |x| x[0] * x[1] + g(2) * x[1].pow(2) + g(1)).unwrap();
        for kind in ExpansionKind4::ALL {
            for var in 0..2 {
                let c = expand(&f, var, kind).unwrap();
                assert_eq!(reconstruct(&c, var, kind).unwrap(), f, "{kind:?} var {var}");
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let id = qf(1, "0123");
        assert_eq!(
            gf4_spectrum(&id, &[g(0)]).unwrap(),
            [g(0), g(1), g(0), g(0)]
        );
        let two = qf(1, "2222");
        for s in Gf4::ALL {
            assert_eq!(gf4_spectrum(&two, &[s]).unwrap(), [g(2), g(0), g(0), g(0)]);
        }
    }

    #[test]
    fn gfsop_examples() {
        let x1 = Gfsop::new(
            1,
            vec![Gf4Term {
                coef: g(1),
                literals: vec![Gf4Literal::new(g(0), 1)],
            }],
        )
        .unwrap();
        assert_eq!(x1.eval(&[g(3)]), g(3));
        let t = Gfsop::new(
            1,
            vec![Gf4Term {
                coef: g(2),
                literals: vec![Gf4Literal::new(g(1), 2)],
            }],
        )
        .unwrap();
        assert_eq!(t.eval(&[g(0)]), g(2));
        assert_eq!(
            t.cost(),
            CostReport {
                term_count: 1,
                literal_count: 1
            }
        );
    }

    #[test]
    fn pairing_examples() {
        let and = parse_pla(".i 2\n.o 1\n11 1\n.e").unwrap();
        let q = pair_binary(&and).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0], qf(1, "0001"));

        let id = parse_pla(".i 1\n.o 1\n1 1\n.e").unwrap();
        assert_eq!(pair_binary(&id).unwrap()[0], qf(1, "0101"));

        let empty = parse_pla(".i 4\n.o 2\n.e").unwrap();
        let q = pair_binary(&empty).unwrap();
        assert_eq!(q[0], QuaternaryFunction::zero(2).unwrap());

        // full output pair: y1 = x1, y2 = x2 gives Y = X
        let pass = parse_pla(".i 2\n.o 2\n1- 10\n-1 01\n.e").unwrap();
        assert_eq!(pair_binary(&pass).unwrap()[0], qf(1, "0123"));
    }

    #[test]
    fn minimize_small() {
        let id = qf(1, "0123");
        let r = minimize_gfsop(&id, &GfsopConfig::default()).unwrap();
        assert_eq!(
            r.cost,
            CostReport {
                term_count: 1,
                literal_count: 1
            }
        );
        let z = QuaternaryFunction::zero(2).unwrap();
        assert!(minimize_gfsop(&z, &GfsopConfig::default())
            .unwrap()
            .gfsop
            .is_empty());
    }

    #[test]
    fn univariate_table_is_exact() {
        let table = univariate_table();
        for (key, rep) in table.iter().enumerate() {
            let want: [Gf4; 4] = std::array::from_fn(|i| g(((key >> (2 * i)) & 3) as u8));
            for (x, &w) in want.iter().enumerate() {
                let got: Gf4 = rep.iter().map(|(c, l)| *c * l.eval(g(x as u8))).sum();
                assert_eq!(got, w);
            }
            assert!(rep.len() <= 4);
        }
    }

    #[test]
    fn text_formats() {
        let q = qf(2, "0123012301230123");
        let text = q.to_text();
        assert_eq!(text, ".v 2\n.r 4\n0123012301230123\n");
        assert_eq!(QuaternaryFunction::parse(&text).unwrap(), q);
        assert!(QuaternaryFunction::parse(".v 1\n.r 4\n012\n").is_err());
        assert!(QuaternaryFunction::parse(".v 1\n.r 3\n012\n").is_err());

        let r = minimize_gfsop(&q, &GfsopConfig::default()).unwrap();
        let text = r.gfsop.to_text();
        assert_eq!(Gfsop::parse(&text).unwrap(), r.gfsop);
        assert!(Gfsop::parse("1 : 0.0 1.1\n2 : 0.1\n").is_err());
        assert!(Gfsop::parse("0 : 0.1\n").is_err());
        assert_eq!(Gfsop::parse(".v 3\n").unwrap().n(), 3);
    }
}
