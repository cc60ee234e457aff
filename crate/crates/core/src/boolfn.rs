//! Boolean function core: dense truth tables, cofactors and espresso PLA files.
//!
//! Truth-table indexing puts `x1` in the most significant position: input
//! `(b1, …, bn)` lives at index `Σ b_i·2^(n−i)`. With this convention the
//! vector `10001111` is `x1 ∨ x̄2·x̄3`.

use std::fmt;
use std::fmt::Write as _;

use log::warn;

use crate::error::{Error, Result};

/// Largest variable count accepted for a dense [`TruthTable`].
pub const MAX_DENSE_VARS: usize = 24;

/// Dense truth table of an `n`-variable Boolean function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    /// The constant-0 function of `n` variables.
    pub fn zeros(n: usize) -> Result<Self> {
        if n > MAX_DENSE_VARS {
            return Err(Error::Capacity {
                what: "dense truth table",
                n,
                limit: MAX_DENSE_VARS,
                hint: "; use the cube-level paths instead",
            });
        }
        let len = 1usize << n;
        Ok(TruthTable {
            n,
            words: vec![0; len.div_ceil(64)],
        })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        let mut tt = Self::zeros(n)?;
        if value {
            for idx in 0..tt.len() {
                tt.set(idx, true);
            }
        }
        Ok(tt)
    }

    /// Builds a table by calling `f` on every index in order.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut tt = Self::zeros(n)?;
        for idx in 0..tt.len() {
            if f(idx) {
                tt.set(idx, true);
            }
        }
        Ok(tt)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let n = log2_exact(bits.len())?;
        Self::from_fn(n, |i| bits[i])
    }

    /// Parses a vector written as a string of `0`/`1` characters, e.g. `"10001111"`.
    pub fn from_str_bits(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Invalid(format!(
                    "invalid truth-table character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        (self.words[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, idx: usize, value: bool) {
        let mask = 1u64 << (idx & 63);
        if value {
            self.words[idx >> 6] |= mask;
        } else {
            self.words[idx >> 6] &= !mask;
        }
    }

    /// Packed storage; bit `i % 64` of word `i / 64` is entry `i`.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Indices of the ON-set in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.get(i))
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        if a.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: a.len(),
            });
        }
        Ok(self.get(a.index()))
    }

    /// The `(n−1)`-variable cofactor `f|x_var = value`; `var` is 0-based (`x1` is 0).
    pub fn cofactor(&self, var: usize, value: bool) -> Result<TruthTable> {
        if var >= self.n {
            return Err(Error::VariableOutOfRange { var, n: self.n });
        }
        let shift = self.n - 1 - var;
        let low_mask = (1usize << shift) - 1;
        TruthTable::from_fn(self.n - 1, |idx| {
            let high = idx >> shift;
            let low = idx & low_mask;
            let full = (((high << 1) | value as usize) << shift) | low;
            self.get(full)
        })
    }

    /// Pointwise XOR.
    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(TruthTable {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_char(if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 8 {
            write!(f, "TruthTable({}: {})", self.n, self)
        } else {
            write!(f, "TruthTable({} vars, {} ones)", self.n, self.count_ones())
        }
    }
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// An input point `(x1, …, xn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    /// Decodes a truth-table index (x1 most significant).
    pub fn from_index(n: usize, idx: usize) -> Self {
        Assignment((0..n).map(|i| (idx >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl From<&[u8]> for Assignment {
    fn from(v: &[u8]) -> Self {
        Assignment(v.iter().map(|&b| b != 0).collect())
    }
}

/// Input plane character of a PLA cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputLit {
    Zero,
    One,
    DontCare,
}

impl InputLit {
    fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(InputLit::Zero),
            '1' => Some(InputLit::One),
            '-' => Some(InputLit::DontCare),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            InputLit::Zero => '0',
            InputLit::One => '1',
            InputLit::DontCare => '-',
        }
    }
}

/// Output plane character of a PLA cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputBit {
    Zero,
    One,
    /// `-`
    DontCare,
    /// `~`
    NotUsed,
}

impl OutputBit {
    fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(OutputBit::Zero),
            '1' => Some(OutputBit::One),
            '-' => Some(OutputBit::DontCare),
            '~' => Some(OutputBit::NotUsed),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            OutputBit::Zero => '0',
            OutputBit::One => '1',
            OutputBit::DontCare => '-',
            OutputBit::NotUsed => '~',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cube {
    pub inputs: Vec<InputLit>,
    pub outputs: Vec<OutputBit>,
}

impl Cube {
    /// Builds a cube from its two textual planes, e.g. `Cube::parse("1-0", "1")`.
    pub fn parse(inputs: &str, outputs: &str) -> Option<Cube> {
        Some(Cube {
            inputs: inputs
                .chars()
                .map(InputLit::from_char)
                .collect::<Option<_>>()?,
            outputs: outputs
                .chars()
                .map(OutputBit::from_char)
                .collect::<Option<_>>()?,
        })
    }

    pub fn covers(&self, a: &[bool]) -> bool {
        self.inputs.iter().zip(a).all(|(lit, &b)| match lit {
            InputLit::DontCare => true,
            InputLit::One => b,
            InputLit::Zero => !b,
        })
    }

    /// `(care, value)` masks over a truth-table index (x1 most significant).
    pub(crate) fn masks(&self) -> (usize, usize) {
        let n = self.inputs.len();
        let mut care = 0;
        let mut value = 0;
        for (i, lit) in self.inputs.iter().enumerate() {
            let bit = 1 << (n - 1 - i);
            match lit {
                InputLit::DontCare => {}
                InputLit::One => {
                    care |= bit;
                    value |= bit;
                }
                InputLit::Zero => care |= bit,
            }
        }
        (care, value)
    }

    fn intersects(&self, other: &Cube) -> bool {
        self.inputs.iter().zip(&other.inputs).all(|pair| {
            !matches!(
                pair,
                (InputLit::Zero, InputLit::One) | (InputLit::One, InputLit::Zero)
            )
        })
    }

    fn input_string(&self) -> String {
        self.inputs.iter().map(|l| l.as_char()).collect()
    }

    fn output_string(&self) -> String {
        self.outputs.iter().map(|l| l.as_char()).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PlaType {
    F,
    #[default]
    Fd,
    Fr,
}

impl PlaType {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaType::F => "f",
            PlaType::Fd => "fd",
            PlaType::Fr => "fr",
        }
    }
}

/// A parsed espresso PLA: a multi-output cube list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicSpec {
    pub name: String,
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub cubes: Vec<Cube>,
    pub pla_type: PlaType,
    pub input_labels: Option<Vec<String>>,
    pub output_labels: Option<Vec<String>>,
}

/// Parses espresso PLA text.
///
/// Supported directives are `.i .o .p .type .ilb .ob .e/.end`; others are
/// skipped with a warning. Cube lines may separate the planes with
/// whitespace or run them together.
pub fn parse_pla(text: &str) -> Result<LogicSpec> {
    let mut n_inputs = None;
    let mut n_outputs = None;
    let mut declared_p = None;
    let mut pla_type = PlaType::default();
    let mut input_labels: Option<Vec<String>> = None;
    let mut output_labels: Option<Vec<String>> = None;
    let mut cubes = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(directive) = line.strip_prefix('.') {
            let mut parts = directive.split_whitespace();
            let key = parts.next().unwrap_or("");
            let args: Vec<&str> = parts.collect();
            let count = |args: &[&str]| -> Result<usize> {
                match args {
                    [v] => v.parse().map_err(|_| {
                        Error::parse(line_no, format!(".{key} expects an integer, got {v:?}"))
                    }),
                    _ => Err(Error::parse(
                        line_no,
                        format!(".{key} expects one integer argument"),
                    )),
                }
            };
            match key {
                "i" => n_inputs = Some(count(&args)?),
                "o" => n_outputs = Some(count(&args)?),
                "p" => declared_p = Some((count(&args)?, line_no)),
                "type" => {
                    pla_type = match args.as_slice() {
                        ["f"] => PlaType::F,
                        ["fd"] => PlaType::Fd,
                        ["fr"] => PlaType::Fr,
                        _ => {
                            return Err(Error::parse(
                                line_no,
                                format!("unsupported .type {args:?}"),
                            ))
                        }
                    }
                }
                "ilb" => input_labels = Some(args.iter().map(|s| s.to_string()).collect()),
                "ob" => output_labels = Some(args.iter().map(|s| s.to_string()).collect()),
                "e" | "end" => break,
                "" => return Err(Error::parse(line_no, "empty directive")),
                other => warn!("line {line_no}: ignoring unknown directive .{other}"),
            }
            continue;
        }

        let (ni, no) = match (n_inputs, n_outputs) {
            (Some(i), Some(o)) => (i, o),
            _ => return Err(Error::parse(line_no, "cube line before .i and .o")),
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (inp, out) = if tokens.len() == 2 {
            (tokens[0].to_string(), tokens[1].to_string())
        } else {
            let joined: String = tokens.concat();
            if joined.len() != ni + no {
                return Err(Error::parse(
                    line_no,
                    format!("cube has {} characters, expected {}", joined.len(), ni + no),
                ));
            }
            let (a, b) = joined.split_at(ni);
            (a.to_string(), b.to_string())
        };
        if inp.chars().count() != ni {
            return Err(Error::parse(
                line_no,
                format!(
                    "input plane has length {}, expected {ni}",
                    inp.chars().count()
                ),
            ));
        }
        if out.chars().count() != no {
            return Err(Error::parse(
                line_no,
                format!(
                    "output plane has length {}, expected {no}",
                    out.chars().count()
                ),
            ));
        }
        let cube = Cube::parse(&inp, &out)
            .ok_or_else(|| Error::parse(line_no, format!("invalid cube characters in {line:?}")))?;
        cubes.push(cube);
    }

    let n_inputs = n_inputs.ok_or_else(|| Error::parse(0, "missing .i directive"))?;
    let n_outputs = n_outputs.ok_or_else(|| Error::parse(0, "missing .o directive"))?;
    if let Some((p, line)) = declared_p {
        if p != cubes.len() {
            return Err(Error::parse(
                line,
                format!(".p declares {p} cubes, found {}", cubes.len()),
            ));
        }
    }
    if let Some(labels) = &input_labels {
        if labels.len() != n_inputs {
            return Err(Error::parse(
                0,
                format!(".ilb has {} names for {n_inputs} inputs", labels.len()),
            ));
        }
    }
    if let Some(labels) = &output_labels {
        if labels.len() != n_outputs {
            return Err(Error::parse(
                0,
                format!(".ob has {} names for {n_outputs} outputs", labels.len()),
            ));
        }
    }

    let spec = LogicSpec {
        name: String::new(),
        n_inputs,
        n_outputs,
        cubes,
        pla_type,
        input_labels,
        output_labels,
    };
    if spec.pla_type == PlaType::Fr {
        spec.check_on_off_disjoint()?;
    }
    Ok(spec)
}

impl LogicSpec {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Writes the spec back as PLA text; `parse_pla` of the result yields an equal value.
    pub fn to_pla(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, ".i {}", self.n_inputs);
        let _ = writeln!(s, ".o {}", self.n_outputs);
        if let Some(l) = &self.input_labels {
            let _ = writeln!(s, ".ilb {}", l.join(" "));
        }
        if let Some(l) = &self.output_labels {
            let _ = writeln!(s, ".ob {}", l.join(" "));
        }
        let _ = writeln!(s, ".type {}", self.pla_type.as_str());
        let _ = writeln!(s, ".p {}", self.cubes.len());
        for c in &self.cubes {
            let _ = writeln!(s, "{} {}", c.input_string(), c.output_string());
        }
        s.push_str(".e\n");
        s
    }

    fn check_on_off_disjoint(&self) -> Result<()> {
        for out in 0..self.n_outputs {
            let on: Vec<&Cube> = self.on_cubes(out).collect();
            for off in self
                .cubes
                .iter()
                .filter(|c| c.outputs[out] == OutputBit::Zero)
            {
                if on.iter().any(|c| c.intersects(off)) {
                    return Err(Error::parse(
                        0,
                        format!(
                            "output {out}: ON-set and OFF-set intersect at cube {}",
                            off.input_string()
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Cubes that put a 1 on `output`. Don't-care outputs contribute nothing.
    pub fn on_cubes(&self, output: usize) -> impl Iterator<Item = &Cube> + '_ {
        self.cubes
            .iter()
            .filter(move |c| c.outputs[output] == OutputBit::One)
    }

    /// Cube-level evaluation of one output.
    pub fn eval_output(&self, output: usize, a: &[bool]) -> bool {
        self.on_cubes(output).any(|c| c.covers(a))
    }

    pub fn check_output(&self, output: usize) -> Result<()> {
        if output >= self.n_outputs {
            return Err(Error::OutputOutOfRange {
                index: output,
                n_outputs: self.n_outputs,
            });
        }
        Ok(())
    }

    /// Dense truth table of one output. `-`/`~` output bits count as 0.
    pub fn to_truth_table(&self, output: usize) -> Result<TruthTable> {
        self.check_output(output)?;
        let mut tt = TruthTable::zeros(self.n_inputs)?;
        let full = tt.len() - 1;
        for cube in self.on_cubes(output) {
            let (care, value) = cube.masks();
            let free = full & !care;
            // enumerate all submasks of `free`
            let mut sub = free;
            loop {
                tt.set(value | sub, true);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        }
        Ok(tt)
    }
}

pub fn eval_truth(tt: &TruthTable, a: &Assignment) -> Result<bool> {
    tt.eval(a)
}

pub fn cofactor(tt: &TruthTable, var: usize, value: bool) -> Result<TruthTable> {
    tt.cofactor(var, value)
}
