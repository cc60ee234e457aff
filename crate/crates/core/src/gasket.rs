//! The Sierpinski-gasket spectrum of a Boolean function.
//!
//! Cells are addressed by ternary coordinates, one [`Digit`] per variable.
//! The value stored at a cell is the XOR of the function over the subcube the
//! coordinate selects: `NEG` fixes the variable to 0, `POS` fixes it to 1 and
//! `ABSENT` lets it range over both values. Unfolding
//! `SG(f) = SG(f|x=0) ∪ SG(f|x=1) ∪ SG(f|x=d)` with `f|x=d = f|x=0 ⊕ f|x=1`
//! gives exactly this closed form, and the three cells that differ in a single
//! digit always XOR to zero.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::boolfn::TruthTable;
use crate::error::{Error, Result};

/// Largest variable count with a materialized `3^n` spectrum.
pub const MAX_SPECTRUM_VARS: usize = 16;
/// Largest variable count accepted by the renderers.
pub const MAX_RENDER_VARS: usize = 6;

/// State of one variable in a coordinate (equivalently, in a product term).
///
/// The numeric codes satisfy `1 ^ 2 ^ 3 == 0`, so the third state of a
/// variable is the XOR of the other two codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Digit {
    /// Variable absent (`d`).
    Absent = 1,
    /// Complemented literal `x̄`; selects the `x = 0` half.
    Neg = 2,
    /// Uncomplemented literal `x`; selects the `x = 1` half.
    Pos = 3,
}

impl Digit {
    pub const ALL: [Digit; 3] = [Digit::Absent, Digit::Neg, Digit::Pos];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Digit> {
        match code {
            1 => Some(Digit::Absent),
            2 => Some(Digit::Neg),
            3 => Some(Digit::Pos),
            _ => None,
        }
    }

    /// The remaining state given two distinct ones (triangle rule).
    #[inline]
    pub fn third(self, other: Digit) -> Digit {
        debug_assert_ne!(self, other);
        Digit::from_code(self.code() ^ other.code()).expect("distinct digits")
    }

    /// The two states other than `self`, in increasing order.
    pub fn others(self) -> [Digit; 2] {
        match self {
            Digit::Absent => [Digit::Neg, Digit::Pos],
            Digit::Neg => [Digit::Absent, Digit::Pos],
            Digit::Pos => [Digit::Absent, Digit::Neg],
        }
    }

    /// Value of the literal at `x`.
    #[inline]
    pub fn literal(self, x: bool) -> bool {
        match self {
            Digit::Absent => true,
            Digit::Neg => !x,
            Digit::Pos => x,
        }
    }

    /// Cube-notation character: `-`, `0` or `1`.
    pub fn cube_char(self) -> char {
        match self {
            Digit::Absent => '-',
            Digit::Neg => '0',
            Digit::Pos => '1',
        }
    }

    pub fn from_cube_char(c: char) -> Option<Digit> {
        match c {
            '-' => Some(Digit::Absent),
            '0' => Some(Digit::Neg),
            '1' => Some(Digit::Pos),
            _ => None,
        }
    }

    #[inline]
    fn base3(self) -> usize {
        self as usize - 1
    }
}

/// An `n`-digit gasket address. A product term and its coordinate are the same value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate(Vec<Digit>);

impl Coordinate {
    pub fn new(digits: Vec<Digit>) -> Self {
        Coordinate(digits)
    }

    /// The all-absent coordinate (the constant-1 term).
    pub fn constant(n: usize) -> Self {
        Coordinate(vec![Digit::Absent; n])
    }

    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        codes
            .iter()
            .map(|&c| {
                Digit::from_code(c).ok_or_else(|| Error::Invalid(format!("invalid digit code {c}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Coordinate)
    }

    /// Parses cube notation such as `-01`.
    pub fn from_cube(s: &str) -> Option<Self> {
        s.chars()
            .map(Digit::from_cube_char)
            .collect::<Option<Vec<_>>>()
            .map(Coordinate)
    }

    /// Point coordinate of a truth-table index (`x1` most significant).
    pub fn point(n: usize, idx: usize) -> Self {
        Coordinate(
            (0..n)
                .map(|i| {
                    if (idx >> (n - 1 - i)) & 1 == 1 {
                        Digit::Pos
                    } else {
                        Digit::Neg
                    }
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn digit(&self, var: usize) -> Digit {
        self.0[var]
    }

    pub fn with_digit(&self, var: usize, d: Digit) -> Coordinate {
        let mut c = self.clone();
        c.0[var] = d;
        c
    }

    pub(crate) fn set_digit(&mut self, var: usize, d: Digit) {
        self.0[var] = d;
    }

    pub fn codes(&self) -> Vec<u8> {
        self.0.iter().map(|d| d.code()).collect()
    }

    /// Flat base-3 index `Σ (digit_i − 1)·3^(n−i)`.
    pub fn base3_index(&self) -> usize {
        self.0.iter().fold(0, |acc, d| acc * 3 + d.base3())
    }

    pub fn from_base3_index(n: usize, mut idx: usize) -> Self {
        let mut digits = vec![Digit::Absent; n];
        for slot in digits.iter_mut().rev() {
            *slot = Digit::ALL[idx % 3];
            idx /= 3;
        }
        Coordinate(digits)
    }

    /// Number of non-absent digits (literals of the term).
    pub fn literal_count(&self) -> usize {
        self.0.iter().filter(|&&d| d != Digit::Absent).count()
    }

    /// Number of positions where the digits differ.
    pub fn distance(&self, other: &Coordinate) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// True if every digit is `NEG` or `POS`.
    pub fn is_point(&self) -> bool {
        self.0.iter().all(|&d| d != Digit::Absent)
    }

    /// Evaluates the coordinate as a product term.
    pub fn eval(&self, x: &[bool]) -> bool {
        self.0.iter().zip(x).all(|(d, &b)| d.literal(b))
    }

    pub fn to_cube_string(&self) -> String {
        self.0.iter().map(|d| d.cube_char()).collect()
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{}", d.code())?;
        }
        f.write_char(')')
    }
}

impl fmt::Debug for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Coordinate {
    type Err = Error;

    /// Accepts `(1,2,3)`, `1,2,3` or `123`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let codes: Vec<u8> = inner
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Invalid(format!("invalid coordinate {s:?}")))
            })
            .collect::<Result<_>>()?;
        Coordinate::from_codes(&codes)
    }
}

/// One-variable decomposition types. The coefficient vector `[C0 C1 Cd]`
/// flags which of the literals `x̄`, `x` and `1` carry a subfunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionKind {
    /// `f = x̄·f0 ⊕ x·f1`
    Shannon,
    /// `f = f0 ⊕ x·(f0 ⊕ f1)`
    PositiveDavio,
    /// `f = f1 ⊕ x̄·(f0 ⊕ f1)`
    NegativeDavio,
}

impl ExpansionKind {
    pub const ALL: [ExpansionKind; 3] = [
        ExpansionKind::Shannon,
        ExpansionKind::PositiveDavio,
        ExpansionKind::NegativeDavio,
    ];

    pub fn coefficients(self) -> [bool; 3] {
        match self {
            ExpansionKind::Shannon => [true, true, false],
            ExpansionKind::PositiveDavio => [false, true, true],
            ExpansionKind::NegativeDavio => [true, false, true],
        }
    }

    /// The pair of (literal, subfunction) products whose XOR reconstructs `f`.
    pub fn expand(self, tt: &TruthTable, var: usize) -> Result<[(Digit, TruthTable); 2]> {
        let f0 = tt.cofactor(var, false)?;
        let f1 = tt.cofactor(var, true)?;
        Ok(match self {
            ExpansionKind::Shannon => [(Digit::Neg, f0), (Digit::Pos, f1)],
            ExpansionKind::PositiveDavio => {
                let fd = f0.xor(&f1)?;
                [(Digit::Absent, f0), (Digit::Pos, fd)]
            }
            ExpansionKind::NegativeDavio => {
                let fd = f0.xor(&f1)?;
                [(Digit::Absent, f1), (Digit::Neg, fd)]
            }
        })
    }

    /// Recombines the output of [`ExpansionKind::expand`] into an `n`-variable table.
    pub fn reconstruct(parts: &[(Digit, TruthTable); 2], var: usize) -> Result<TruthTable> {
        let n = parts[0].1.n() + 1;
        if var >= n {
            return Err(Error::VariableOutOfRange { var, n });
        }
        let shift = n - 1 - var;
        let low_mask = (1usize << shift) - 1;
        TruthTable::from_fn(n, |idx| {
            let x = (idx >> shift) & 1 == 1;
            let sub = ((idx >> (shift + 1)) << shift) | (idx & low_mask);
            parts
                .iter()
                .fold(false, |acc, (lit, g)| acc ^ (lit.literal(x) && g.get(sub)))
        })
    }
}

/// The `3^n` subcube-XOR spectrum plus a marking (the current ESOP terms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gasket {
    n: usize,
    spectrum: Vec<u64>,
    marking: BTreeSet<Coordinate>,
}

impl Gasket {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of addressable cells, `3^n`.
    pub fn cell_count(&self) -> usize {
        3usize.pow(self.n as u32)
    }

    pub fn value(&self, c: &Coordinate) -> bool {
        self.value_at(c.base3_index())
    }

    #[inline]
    pub fn value_at(&self, idx: usize) -> bool {
        (self.spectrum[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    /// Count of cells holding 1.
    pub fn ones(&self) -> usize {
        self.spectrum.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn marking(&self) -> &BTreeSet<Coordinate> {
        &self.marking
    }

    pub fn set_marking(&mut self, marking: impl IntoIterator<Item = Coordinate>) -> Result<()> {
        let marking: BTreeSet<Coordinate> = marking.into_iter().collect();
        if let Some(bad) = marking.iter().find(|c| c.n() != self.n) {
            return Err(Error::Dimension {
                expected: self.n,
                got: bad.n(),
            });
        }
        self.marking = marking;
        Ok(())
    }

    /// Bytes used by the packed spectrum.
    pub fn spectrum_bytes(&self) -> usize {
        self.spectrum.len() * 8
    }

    /// Iterates `(coordinate, value)` over every cell in base-3 order.
    pub fn cells(&self) -> impl Iterator<Item = (Coordinate, bool)> + '_ {
        (0..self.cell_count())
            .map(move |i| (Coordinate::from_base3_index(self.n, i), self.value_at(i)))
    }
}

/// Builds the dense spectrum of `tt`, one variable at a time.
pub fn build_spectrum(tt: &TruthTable) -> Result<Gasket> {
    let n = tt.n();
    if n > MAX_SPECTRUM_VARS {
        return Err(Error::Capacity {
            what: "dense gasket spectrum",
            n,
            limit: MAX_SPECTRUM_VARS,
            hint: "; use spectrum_value for single cells",
        });
    }
    let mut cur: Vec<u8> = tt.bits().map(u8::from).collect();
    for k in 0..n {
        let suffix = 1usize << (n - k - 1);
        let prefixes = 3usize.pow(k as u32);
        let mut next = vec![0u8; prefixes * 3 * suffix];
        for p in 0..prefixes {
            let old = &cur[p * 2 * suffix..(p + 1) * 2 * suffix];
            let (f0, f1) = old.split_at(suffix);
            let base = p * 3 * suffix;
            for s in 0..suffix {
                next[base + s] = f0[s] ^ f1[s];
                next[base + suffix + s] = f0[s];
                next[base + 2 * suffix + s] = f1[s];
            }
        }
        cur = next;
    }
    let mut spectrum = vec![0u64; cur.len().div_ceil(64)];
    for (i, &v) in cur.iter().enumerate() {
        if v != 0 {
            spectrum[i >> 6] |= 1 << (i & 63);
        }
    }
    Ok(Gasket {
        n,
        spectrum,
        marking: BTreeSet::new(),
    })
}

/// One spectrum cell, computed directly as a subcube XOR.
pub fn spectrum_value(tt: &TruthTable, c: &Coordinate) -> Result<bool> {
    let n = tt.n();
    if c.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: c.n(),
        });
    }
    let mut base = 0usize;
    let mut free = 0usize;
    for (i, d) in c.digits().iter().enumerate() {
        let bit = 1 << (n - 1 - i);
        match d {
            Digit::Absent => free |= bit,
            Digit::Pos => base |= bit,
            Digit::Neg => {}
        }
    }
    let mut acc = false;
    let mut sub = free;
    loop {
        acc ^= tt.get(base | sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    Ok(acc)
}

/// Value at spectrum cell `cell` of the single product term `term`.
///
/// Per variable the subcube XOR of the literal vanishes exactly for the
/// (cell, term) digit pairs `(1,1)`, `(2,3)` and `(3,2)`.
pub fn term_contribution(term: &Coordinate, cell: &Coordinate) -> bool {
    term.digits().iter().zip(cell.digits()).all(|(t, c)| {
        !matches!(
            (c, t),
            (Digit::Absent, Digit::Absent) | (Digit::Neg, Digit::Pos) | (Digit::Pos, Digit::Neg)
        )
    })
}

/// Pascal-mod-2 triangle: level 0 is the truth vector, each level above
/// holds the XOR of adjacent pairs below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorTriangle {
    levels: Vec<Vec<bool>>,
}

impl XorTriangle {
    pub fn levels(&self) -> &[Vec<bool>] {
        &self.levels
    }

    pub fn n(&self) -> usize {
        self.levels[0].len().trailing_zeros() as usize
    }

    pub fn cell_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Leftmost and rightmost cell of every level, from base to top.
    pub fn sides(&self) -> (Vec<bool>, Vec<bool>) {
        let left = self.levels.iter().map(|l| l[0]).collect();
        let right = self.levels.iter().map(|l| l[l.len() - 1]).collect();
        (left, right)
    }
}

pub fn build_xor_triangle(v: &[bool]) -> Result<XorTriangle> {
    if v.is_empty() || !v.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(v.len()));
    }
    let mut levels = vec![v.to_vec()];
    while levels.last().map_or(0, Vec::len) > 1 {
        let below = levels.last().unwrap();
        let above = below.windows(2).map(|w| w[0] ^ w[1]).collect();
        levels.push(above);
    }
    Ok(XorTriangle { levels })
}

/// With `x1` as the most significant index bit, the left side holds the
/// polarity-`[0…0]` Reed-Muller coefficients and the right side the
/// polarity-`[1…1]` ones, both ordered by subset code.
pub fn triangle_sides(t: &XorTriangle) -> (Vec<bool>, Vec<bool>) {
    t.sides()
}

/// Fixed-polarity Reed-Muller coefficients indexed by subset code.
///
/// Bit `n−1−i` of a subset code stands for variable `x_{i+1}`, matching the
/// truth-table index convention. `polarity[i] == true` means the variable
/// appears complemented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FprmCoefficients {
    pub n: usize,
    pub polarity: Vec<bool>,
    pub coeffs: Vec<bool>,
}

impl FprmCoefficients {
    /// Gasket coordinate of the term for `subset`.
    pub fn coordinate(&self, subset: usize) -> Coordinate {
        Coordinate::new(
            (0..self.n)
                .map(|i| {
                    if (subset >> (self.n - 1 - i)) & 1 == 1 {
                        if self.polarity[i] {
                            Digit::Neg
                        } else {
                            Digit::Pos
                        }
                    } else {
                        Digit::Absent
                    }
                })
                .collect(),
        )
    }

    /// Terms with a nonzero coefficient, by increasing subset code.
    pub fn terms(&self) -> impl Iterator<Item = Coordinate> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(s, _)| self.coordinate(s))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c).count()
    }
}

/// In-place butterfly over GF(2).
pub fn fprm_coefficients(tt: &TruthTable, polarity: &[bool]) -> Result<FprmCoefficients> {
    let n = tt.n();
    if polarity.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: polarity.len(),
        });
    }
    let mut v: Vec<bool> = tt.bits().collect();
    for (i, &neg) in polarity.iter().enumerate() {
        let stride = 1usize << (n - 1 - i);
        for block in (0..v.len()).step_by(2 * stride) {
            for j in block..block + stride {
                let (a, b) = (v[j], v[j + stride]);
                // slot j keeps the cofactor, slot j+stride the XOR of both halves
                v[j] = if neg { b } else { a };
                v[j + stride] = a ^ b;
            }
        }
    }
    Ok(FprmCoefficients {
        n,
        polarity: polarity.to_vec(),
        coeffs: v,
    })
}

/// Exact and reported sizes of the gasket layout for `n` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuralCounts {
    pub n: usize,
    /// `3^n` addressable vertices.
    pub vertex_count: u128,
    /// `2^(n−1)·(2^n+1)` cells of the full XOR triangle.
    pub triangle_cells: u128,
    /// `triangle_cells − vertex_count`.
    pub empty_cells: u128,
    /// The closed form `4^n/2 − 2^n/2`, reported alongside the exact count.
    pub reported_memory: i128,
    /// `4^n/2 − 2^n/2 − 3^n`.
    pub reported_empty: i128,
}

pub fn structural_counts(n: usize) -> StructuralCounts {
    assert!(
        (1..=60).contains(&n),
        "structural counts are defined for 1 ≤ n ≤ 60"
    );
    let p2 = 1u128 << n;
    let p4 = p2 * p2;
    let p3 = 3u128.pow(n as u32);
    let triangle_cells = p2 / 2 * (p2 + 1);
    let reported_memory = (p4 / 2) as i128 - (p2 / 2) as i128;
    StructuralCounts {
        n,
        vertex_count: p3,
        triangle_cells,
        empty_cells: triangle_cells - p3,
        reported_memory,
        reported_empty: reported_memory - p3 as i128,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Svg,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" => Ok(RenderFormat::Text),
            "svg" => Ok(RenderFormat::Svg),
            _ => Err(Error::Invalid(format!("unknown render format {s:?}"))),
        }
    }
}

fn check_render_size(n: usize) -> Result<()> {
    if n > MAX_RENDER_VARS {
        return Err(Error::Capacity {
            what: "render layout",
            n,
            limit: MAX_RENDER_VARS,
            hint: "",
        });
    }
    Ok(())
}

/// Grid position of a vertex: `(row, col)` with the apex at `(0, 0)`.
///
/// Digit 1 recurses into the top sub-triangle, 2 into the bottom-left and 3
/// into the bottom-right; the occupied positions are the odd entries of
/// Pascal's triangle with `2^n` rows.
fn vertex_position(c: &Coordinate) -> (i64, i64) {
    let n = c.n();
    let mut row = 0i64;
    let mut col = 0i64;
    for (i, d) in c.digits().iter().enumerate() {
        let half = 1i64 << (n - 1 - i);
        match d {
            Digit::Absent => {}
            Digit::Neg => {
                row += half;
                col -= half;
            }
            Digit::Pos => {
                row += half;
                col += half;
            }
        }
    }
    (row, col)
}

pub fn render_gasket(g: &Gasket, format: RenderFormat) -> Result<String> {
    check_render_size(g.n)?;
    let rows = 1usize << g.n;
    let width = 2 * rows - 1;
    match format {
        RenderFormat::Text => {
            let mut grid = vec![vec![' '; width]; rows];
            for (c, v) in g.cells() {
                let (r, col) = vertex_position(&c);
                let ch = if g.marking.contains(&c) {
                    '#'
                } else if v {
                    '1'
                } else {
                    '0'
                };
                grid[r as usize][(col + rows as i64 - 1) as usize] = ch;
            }
            let mut out = String::new();
            for line in grid {
                let s: String = line.into_iter().collect();
                out.push_str(s.trim_end());
                out.push('\n');
            }
            if !g.marking.is_empty() {
                out.push_str("marked:");
                for c in &g.marking {
                    let _ = write!(out, " {c}");
                }
                out.push('\n');
            }
            Ok(out)
        }
        RenderFormat::Svg => {
            let step = 24.0;
            let margin = 20.0;
            let w = step * width as f64 + 2.0 * margin;
            let h = step * 1.7 * rows as f64 + 2.0 * margin;
            let x_of = |col: i64| margin + step * (col + rows as i64 - 1) as f64 + step / 2.0;
            let y_of = |row: i64| margin + step * 1.7 * row as f64 + step / 2.0;
            let mut out = String::new();
            let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
            let _ = writeln!(
                out,
                r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
            );
            let (top, left, right) = (
                (x_of(0), y_of(0)),
                (x_of(-(rows as i64 - 1)), y_of(rows as i64 - 1)),
                (x_of(rows as i64 - 1), y_of(rows as i64 - 1)),
            );
            let _ = writeln!(
                out,
                r##"  <polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="none" stroke="#999999"/>"##,
                top.0, top.1, left.0, left.1, right.0, right.1
            );
            for (c, v) in g.cells() {
                let (r, col) = vertex_position(&c);
                let marked = g.marking.contains(&c);
                let (class, fill) = if marked {
                    ("marked", "#000000")
                } else {
                    ("vertex", "#ffffff")
                };
                let _ = writeln!(
                    out,
                    r##"  <circle class="{class}" cx="{:.1}" cy="{:.1}" r="7" fill="{fill}" stroke="#000000"><title>{c} = {}</title></circle>"##,
                    x_of(col),
                    y_of(r),
                    u8::from(v)
                );
            }
            out.push_str("</svg>\n");
            Ok(out)
        }
    }
}

pub fn render_triangle(t: &XorTriangle, format: RenderFormat) -> Result<String> {
    check_render_size(t.n())?;
    let bit = |b: bool| if b { '1' } else { '0' };
    match format {
        RenderFormat::Text => {
            let mut out = String::new();
            for (k, level) in t.levels.iter().enumerate() {
                out.push_str(&" ".repeat(k));
                let row: Vec<String> = level.iter().map(|&b| bit(b).to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            Ok(out)
        }
        RenderFormat::Svg => {
            let base = t.levels[0].len();
            let cell = 28.0;
            let margin = 10.0;
            let w = cell * base as f64 + 2.0 * margin;
            let h = cell * base as f64 + 2.0 * margin;
            let mut out = String::new();
            let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
            let _ = writeln!(
                out,
                r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
            );
            for (k, level) in t.levels.iter().enumerate() {
                // level 0 at the bottom
                let y = margin + cell * (base - 1 - k) as f64;
                for (j, &b) in level.iter().enumerate() {
                    let x = margin + cell * (j as f64 + k as f64 / 2.0);
                    let fill = if b { "#333333" } else { "#ffffff" };
                    let text = if b { "#ffffff" } else { "#000000" };
                    let _ = writeln!(
                        out,
                        r##"  <rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="{fill}" stroke="#000000"/>"##
                    );
                    let _ = writeln!(
                        out,
                        r#"  <text x="{:.1}" y="{:.1}" font-family="monospace" font-size="14" text-anchor="middle" fill="{text}">{}</text>"#,
                        x + cell / 2.0,
                        y + cell * 0.68,
                        bit(b)
                    );
                }
            }
            out.push_str("</svg>\n");
            Ok(out)
        }
    }
}
