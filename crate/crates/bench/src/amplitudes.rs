//! Amplitude tables and sample files.
//!
//! Both are line-oriented text. A bitstring is either binary text, most significant qubit first
//! (`0101` is index 5, qubit 0 rightmost), or hexadecimal with a `0x` prefix. `#` starts a comment,
//! and a `# n=<int>` comment pins the qubit count. Without it, binary entries fix the width and
//! hex-only files use the smallest width holding every entry.
//!
//! Amplitude lines are `<bitstring> <re> <im>` or `<bitstring> <prob>`; a file must use one form.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rcslab::sim::StateVector;

use crate::config::read_text;
use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Amplitude,
    Probability,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTable {
    n: usize,
    format: TableFormat,
    /// False when the width was inferred from hex entries alone.
    explicit_width: bool,
    probs: HashMap<u64, f64>,
    amps: HashMap<u64, Complex64>,
}

impl AmplitudeTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_explicit_width(&self) -> bool {
        self.explicit_width
    }

    pub fn format(&self) -> TableFormat {
        self.format
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of `bitstring`; `|a|²` for amplitude tables.
    pub fn probability(&self, bitstring: u64) -> Option<f64> {
        self.probs.get(&bitstring).copied()
    }

    pub fn amplitude(&self, bitstring: u64) -> Option<Complex64> {
        self.amps.get(&bitstring).copied()
    }

    /// Table holding every amplitude of `state`.
    pub fn from_state(state: &StateVector) -> Self {
        let mut probs = HashMap::with_capacity(state.dim());
        let mut amps = HashMap::with_capacity(state.dim());
        for (i, a) in state.amplitudes().iter().enumerate() {
            probs.insert(i as u64, a.norm_sqr());
            amps.insert(i as u64, *a);
        }
        Self { n: state.n(), format: TableFormat::Amplitude, explicit_width: true, probs, amps }
    }

    /// Uniform probability table over all `2^n` bitstrings.
    pub fn uniform(n: usize) -> Self {
        let p = 1.0 / (1u64 << n) as f64;
        let probs = (0..1u64 << n).map(|i| (i, p)).collect();
        Self { n, format: TableFormat::Probability, explicit_width: true, probs, amps: HashMap::new() }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut declared_n: Option<usize> = None;
        let mut binary_width: Option<usize> = None;
        let mut format: Option<(TableFormat, usize)> = None;
        let mut probs = HashMap::new();
        let mut amps = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let (body, comment) = split_comment(raw);
            if let Some(n) = width_directive(comment).transpose().map_err(|e| format!("line {line_no}: {e}"))? {
                declared_n = Some(n);
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let err = |msg: String| format!("line {line_no}: {msg}");
            let this = match fields.len() {
                2 => TableFormat::Probability,
                3 => TableFormat::Amplitude,
                c => return Err(err(format!("expected 2 or 3 columns, found {c}"))),
            };
            match format {
                None => format = Some((this, line_no)),
                Some((f, first)) if f != this => {
                    return Err(err(format!(
                        "mixed formats: {} columns here but line {first} has {}",
                        fields.len(),
                        if f == TableFormat::Amplitude { 3 } else { 2 }
                    )))
                }
                Some(_) => {}
            }
            let (index, width) = parse_bitstring(fields[0]).map_err(err)?;
            if let Some(w) = width {
                match binary_width {
                    Some(bw) if bw != w => {
                        return Err(err(format!("bitstring {:?} has width {w}, earlier entries have {bw}", fields[0])))
                    }
                    _ => binary_width = Some(w),
                }
            }
            let num = |s: &str| -> Result<f64, String> {
                let v: f64 = s.parse().map_err(|_| err(format!("malformed number {s:?}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(format!("non-finite value {s:?}")))
                }
            };
            let p = if this == TableFormat::Amplitude {
                let a = Complex64::new(num(fields[1])?, num(fields[2])?);
                amps.insert(index, a);
                a.norm_sqr()
            } else {
                let p = num(fields[1])?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(err(format!("probability {p} is outside [0, 1]")));
                }
                p
            };
            if probs.insert(index, p).is_some() {
                return Err(err(format!("duplicate entry for bitstring {:?}", fields[0])));
            }
        }
        let format = format.map_or(TableFormat::Probability, |(f, _)| f);
        let max_index = probs.keys().copied().max().unwrap_or(0);
        let needed = (u64::BITS - max_index.leading_zeros()).max(1) as usize;
        let n = match (declared_n, binary_width) {
            (Some(d), Some(b)) if d != b => return Err(format!("`# n={d}` conflicts with {b}-bit binary entries")),
            (Some(d), _) => d,
            (None, Some(b)) => b,
            (None, None) => needed,
        };
        if needed > n {
            return Err(format!("entry {max_index:#x} does not fit in {n} qubits"));
        }
        let explicit_width = declared_n.is_some() || binary_width.is_some();
        Ok(Self { n, format, explicit_width, probs, amps })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::parse(&read_text(path)?)
            .map_err(|message| HarnessError::Format { path: path.display().to_string(), message })
    }
}

fn split_comment(line: &str) -> (&str, &str) {
    match line.find('#') {
        Some(i) => (&line[..i], &line[i + 1..]),
        None => (line, ""),
    }
}

/// `Some(Ok(n))` for a `n=<int>` comment.
fn width_directive(comment: &str) -> Option<Result<usize, String>> {
    let rest = comment.trim().strip_prefix("n=")?;
    Some(
        rest.trim()
            .parse::<usize>()
            .ok()
            .filter(|n| (1..=63).contains(n))
            .ok_or_else(|| format!("bad width directive `n={}`", rest.trim())),
    )
}

/// Index of a bitstring token and, for binary text, its width.
pub fn parse_bitstring(tok: &str) -> Result<(u64, Option<usize>), String> {
    if let Some(hex) = tok.strip_prefix("0x").or_else(|| tok.strip_prefix("0X")) {
        if hex.is_empty() || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(format!("malformed hex bitstring {tok:?}"));
        }
        return u64::from_str_radix(hex, 16).map(|v| (v, None)).map_err(|_| format!("hex bitstring {tok:?} is too large"));
    }
    if tok.is_empty() || !tok.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(format!("malformed bitstring {tok:?}"));
    }
    if tok.len() > 63 {
        return Err(format!("bitstring {tok:?} is longer than 63 bits"));
    }
    Ok((u64::from_str_radix(tok, 2).expect("validated binary"), Some(tok.len())))
}

/// Binary text of `index` over `n` qubits, most significant qubit first.
pub fn format_bitstring(index: u64, n: usize) -> String {
    format!("{index:0n$b}")
}

/// Amplitude file for `state`. Floats use the shortest representation that reads back exactly.
pub fn write_amplitudes(state: &StateVector) -> String {
    let n = state.n();
    let mut out = format!("# n={n}\n");
    for (i, a) in state.amplitudes().iter().enumerate() {
        let _ = writeln!(out, "{} {:?} {:?}", format_bitstring(i as u64, n), a.re, a.im);
    }
    out
}

/// Newline-delimited binary bitstrings.
pub fn write_samples(bitstrings: &[u64], n: usize) -> String {
    let mut out = String::with_capacity(bitstrings.len() * (n + 1));
    for &b in bitstrings {
        out.push_str(&format_bitstring(b, n));
        out.push('\n');
    }
    out
}

/// Reads a sample file. The result's width is the declared or binary width, if any.
pub fn parse_samples(text: &str) -> Result<(Vec<u64>, Option<usize>), String> {
    let mut out = Vec::new();
    let mut width: Option<usize> = None;
    let mut declared: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let (body, comment) = split_comment(raw);
        if let Some(n) = width_directive(comment).transpose().map_err(|e| format!("line {}: {e}", i + 1))? {
            declared = Some(n);
        }
        let mut fields = body.split_whitespace();
        let Some(tok) = fields.next() else { continue };
        if fields.next().is_some() {
            return Err(format!("line {}: expected one bitstring per line", i + 1));
        }
        let (v, w) = parse_bitstring(tok).map_err(|e| format!("line {}: {e}", i + 1))?;
        if let Some(w) = w {
            if width.is_some_and(|prev| prev != w) {
                return Err(format!("line {}: bitstring {tok:?} has width {w}, earlier samples have {}", i + 1, width.unwrap()));
            }
            width = Some(w);
        }
        out.push(v);
    }
    if let (Some(d), Some(w)) = (declared, width) {
        if d != w {
            return Err(format!("`# n={d}` conflicts with {w}-bit samples"));
        }
    }
    Ok((out, declared.or(width)))
}

pub fn load_samples(path: &Path) -> Result<(Vec<u64>, Option<usize>), HarnessError> {
    parse_samples(&read_text(path)?).map_err(|message| HarnessError::Format { path: path.display().to_string(), message })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_format() {
        let t = AmplitudeTable::parse("00 1.0 0.0\n01 0.0 0.0\n10 0 0\n11 0.0 0.0\n").unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.format(), TableFormat::Amplitude);
        assert_eq!(t.probability(0), Some(1.0));
        assert_eq!(t.probability(3), Some(0.0));
    }

    #[test]
    fn probability_and_hex() {
        let t = AmplitudeTable::parse("# header\n0x0 0.25 # trailing\n0x5 0.75\n").unwrap();
        assert_eq!(t.format(), TableFormat::Probability);
        assert_eq!(t.n(), 3);
        assert_eq!(t.probability(5), Some(0.75));
        let t = AmplitudeTable::parse("# n=10\n0x5 1\n").unwrap();
        assert_eq!(t.n(), 10);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = AmplitudeTable::parse("00 1.0 0.0\n0b01 0.0 0.0\n").unwrap_err();
        assert!(e.starts_with("line 2:"), "{e}");
        let e = AmplitudeTable::parse("00 0.5\n01 0.5 0.0\n").unwrap_err();
        assert!(e.starts_with("line 2:") && e.contains("mixed"), "{e}");
        let e = AmplitudeTable::parse("00 0.5\n01 x\n").unwrap_err();
        assert!(e.starts_with("line 2:"), "{e}");
        let e = AmplitudeTable::parse("00 0.5\n011 0.5\n").unwrap_err();
        assert!(e.contains("width"), "{e}");
        assert!(AmplitudeTable::parse("00 1.5\n").is_err());
        assert!(AmplitudeTable::parse("00 0.5\n00 0.5\n").is_err());
        assert!(AmplitudeTable::parse("# n=2\n0x7 0.5\n").is_err());
        assert!(AmplitudeTable::parse("00 nan 0\n").is_err());
    }

    #[test]
    fn bitstring_text_is_msb_first() {
        assert_eq!(parse_bitstring("0101").unwrap(), (5, Some(4)));
        assert_eq!(format_bitstring(5, 4), "0101");
        assert_eq!(parse_bitstring("0xff").unwrap(), (255, None));
        assert!(parse_bitstring("0x").is_err());
        assert!(parse_bitstring("012").is_err());
    }

    #[test]
    fn samples_round_trip() {
        let bits = vec![0, 5, 15, 7];
        let (back, w) = parse_samples(&write_samples(&bits, 4)).unwrap();
        assert_eq!((back, w), (bits, Some(4)));
        assert!(parse_samples("01\n011\n").is_err());
        assert_eq!(parse_samples("0x3\n# n=5\n").unwrap(), (vec![3], Some(5)));
    }
}
