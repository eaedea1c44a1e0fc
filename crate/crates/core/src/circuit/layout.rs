//! Device coupling graphs with edges labeled by coupler-pattern letters `A`–`H`.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! layout n=4
//! 0 1 G
//! 2 3 H
//! 0 2 E
//! 1 3 F
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("grid {rows}x{cols} has fewer than two qubits")]
    DegenerateGrid { rows: usize, cols: usize },
    #[error("edge ({a}, {b}) references a qubit outside 0..{n}")]
    QubitOutOfRange { a: usize, b: usize, n: usize },
    #[error("edge ({a}, {b}) is a self-loop")]
    SelfLoop { a: usize, b: usize },
    #[error("edge ({a}, {b}) appears twice")]
    DuplicateEdge { a: usize, b: usize },
    #[error("pattern {letter} uses qubit {qubit} in more than one edge")]
    NotAMatching { letter: PatternLetter, qubit: usize },
    #[error("invalid pattern letter {0:?} (expected A-H)")]
    BadLetter(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Coupler-pattern label, one of `A`..=`H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternLetter(u8);

impl PatternLetter {
    pub const ALL: [PatternLetter; 8] = [
        PatternLetter(b'A'),
        PatternLetter(b'B'),
        PatternLetter(b'C'),
        PatternLetter(b'D'),
        PatternLetter(b'E'),
        PatternLetter(b'F'),
        PatternLetter(b'G'),
        PatternLetter(b'H'),
    ];

    pub fn new(c: char) -> Result<Self, LayoutError> {
        let u = c.to_ascii_uppercase();
        if ('A'..='H').contains(&u) {
            Ok(Self(u as u8))
        } else {
            Err(LayoutError::BadLetter(c.to_string()))
        }
    }

    pub fn as_char(self) -> char {
        self.0 as char
    }

    /// Parses a schedule string such as `"EFGH"` or `"ABCDCDAB"`; whitespace is ignored.
    pub fn parse_schedule(s: &str) -> Result<Vec<PatternLetter>, LayoutError> {
        s.chars().filter(|c| !c.is_whitespace()).map(PatternLetter::new).collect()
    }
}

impl fmt::Display for PatternLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Letter set used to color the four staggered nearest-neighbour matchings of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GridScheme {
    Abcd,
    Efgh,
}

impl GridScheme {
    /// Letters for (vertical even, vertical odd, horizontal even, horizontal odd).
    fn letters(self) -> [PatternLetter; 4] {
        let base = match self {
            GridScheme::Abcd => 0,
            GridScheme::Efgh => 4,
        };
        std::array::from_fn(|i| PatternLetter::ALL[base + i])
    }
}

impl FromStr for GridScheme {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ABCD" => Ok(GridScheme::Abcd),
            "EFGH" => Ok(GridScheme::Efgh),
            _ => Err(LayoutError::BadLetter(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub letter: PatternLetter,
}

/// Qubit coupling graph; each pattern letter's edge set is a matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviceLayout {
    n: usize,
    edges: Vec<Edge>,
    coordinates: Option<Vec<(usize, usize)>>,
}

impl DeviceLayout {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, LayoutError> {
        let mut seen_pairs = std::collections::HashSet::new();
        let mut used = std::collections::HashSet::new();
        for e in &edges {
            if e.a >= n || e.b >= n {
                return Err(LayoutError::QubitOutOfRange { a: e.a, b: e.b, n });
            }
            if e.a == e.b {
                return Err(LayoutError::SelfLoop { a: e.a, b: e.b });
            }
            if !seen_pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(LayoutError::DuplicateEdge { a: e.a, b: e.b });
            }
            for q in [e.a, e.b] {
                if !used.insert((e.letter, q)) {
                    return Err(LayoutError::NotAMatching { letter: e.letter, qubit: q });
                }
            }
        }
        Ok(Self { n, edges, coordinates: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coordinates(&self) -> Option<&[(usize, usize)]> {
        self.coordinates.as_deref()
    }

    /// Edges labeled `letter`, in layout order.
    pub fn pattern(&self, letter: PatternLetter) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().filter(move |e| e.letter == letter).map(|e| (e.a, e.b))
    }

    pub fn pattern_len(&self, letter: PatternLetter) -> usize {
        self.pattern(letter).count()
    }

    pub fn has_letter(&self, letter: PatternLetter) -> bool {
        self.edges.iter().any(|e| e.letter == letter)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("layout n={}\n", self.n);
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.a, e.b, e.letter));
        }
        out
    }
}

impl FromStr for DeviceLayout {
    type Err = LayoutError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| LayoutError::Syntax { line: line_no, message };
            if n.is_none() {
                let rest = line
                    .strip_prefix("layout")
                    .map(str::trim)
                    .and_then(|r| r.strip_prefix("n="))
                    .ok_or_else(|| syntax("expected header `layout n=<int>`".into()))?;
                n = Some(rest.trim().parse::<usize>().map_err(|e| syntax(format!("bad qubit count: {e}")))?);
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(syntax(format!("expected `<q1> <q2> <letter>`, got {line:?}")));
            }
            let q = |s: &str| s.parse::<usize>().map_err(|e| syntax(format!("bad qubit {s:?}: {e}")));
            let mut letter_chars = fields[2].chars();
            let letter = match (letter_chars.next(), letter_chars.next()) {
                (Some(c), None) => PatternLetter::new(c)?,
                _ => return Err(LayoutError::BadLetter(fields[2].to_string())),
            };
            edges.push(Edge { a: q(fields[0])?, b: q(fields[1])?, letter });
        }
        let n = n.ok_or(LayoutError::Syntax { line: 0, message: "missing `layout n=<int>` header".into() })?;
        DeviceLayout::new(n, edges)
    }
}

/// Rectangular grid with the four nearest-neighbour matchings labeled by `scheme`.
///
/// Qubit `(r, c)` has index `r·cols + c`. Vertical edges `(r,c)–(r+1,c)` are split by the parity of
/// `r + c` into the first two letters, horizontal edges `(r,c)–(r,c+1)` by the same parity into
/// the last two.
pub fn grid_layout(rows: usize, cols: usize, scheme: GridScheme) -> Result<DeviceLayout, LayoutError> {
    if rows.saturating_mul(cols) < 2 {
        return Err(LayoutError::DegenerateGrid { rows, cols });
    }
    let [v_even, v_odd, h_even, h_odd] = scheme.letters();
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let even = (r + c) % 2 == 0;
            if r + 1 < rows {
                let letter = if even { v_even } else { v_odd };
                edges.push(Edge { a: idx(r, c), b: idx(r + 1, c), letter });
            }
            if c + 1 < cols {
                let letter = if even { h_even } else { h_odd };
                edges.push(Edge { a: idx(r, c), b: idx(r, c + 1), letter });
            }
        }
    }
    let mut layout = DeviceLayout::new(rows * cols, edges)?;
    layout.coordinates = Some((0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect());
    Ok(layout)
}

/// Most nearly square `rows × cols` factorization of `n` with `rows ≤ cols`.
pub fn near_square_grid(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt() as usize;
    while rows > 1 && !n.is_multiple_of(rows) {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, n / rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_matching(layout: &DeviceLayout, letter: PatternLetter) -> bool {
        let mut used = vec![false; layout.n()];
        for (a, b) in layout.pattern(letter) {
            if used[a] || used[b] {
                return false;
            }
            used[a] = true;
            used[b] = true;
        }
        true
    }

    #[test]
    fn one_by_two_has_single_edge() {
        let l = grid_layout(1, 2, GridScheme::Efgh).unwrap();
        assert_eq!(l.edges().len(), 1);
        let counts: Vec<usize> = "EFGH".chars().map(|c| l.pattern_len(PatternLetter::new(c).unwrap())).collect();
        assert_eq!(counts.iter().sum::<usize>(), 1);
        assert_eq!(counts.iter().filter(|&&c| c == 0).count(), 3);
    }

    #[test]
    fn two_by_two_exhaustive() {
        let l = grid_layout(2, 2, GridScheme::Efgh).unwrap();
        let mut all: Vec<(usize, usize)> = l.edges().iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect();
        all.sort();
        assert_eq!(all, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        for c in "EFGH".chars() {
            let letter = PatternLetter::new(c).unwrap();
            assert!(is_matching(&l, letter));
            assert_eq!(l.pattern_len(letter), 1);
        }
    }

    #[test]
    fn every_grid_letter_is_a_matching_and_edges_are_nearest_neighbour() {
        for rows in 1..=6 {
            for cols in 1..=6 {
                if rows * cols < 2 {
                    continue;
                }
                for scheme in [GridScheme::Abcd, GridScheme::Efgh] {
                    let l = grid_layout(rows, cols, scheme).unwrap();
                    for letter in PatternLetter::ALL {
                        assert!(is_matching(&l, letter));
                    }
                    let expected = rows * (cols - 1) + (rows - 1) * cols;
                    assert_eq!(l.edges().len(), expected);
                    let coords = l.coordinates().unwrap();
                    for e in l.edges() {
                        let (ra, ca) = coords[e.a];
                        let (rb, cb) = coords[e.b];
                        assert_eq!(ra.abs_diff(rb) + ca.abs_diff(cb), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_grid_rejected() {
        assert_eq!(grid_layout(1, 1, GridScheme::Abcd), Err(LayoutError::DegenerateGrid { rows: 1, cols: 1 }));
        assert!(grid_layout(0, 5, GridScheme::Abcd).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let l = grid_layout(3, 3, GridScheme::Abcd).unwrap();
        let back: DeviceLayout = l.to_text().parse().unwrap();
        assert_eq!(back.edges(), l.edges());
        assert_eq!(back.n(), 9);

        let parsed: DeviceLayout = "# comment\nlayout n=3\n0 1 A # trailing\n\n1 2 B\n".parse().unwrap();
        assert_eq!(parsed.edges().len(), 2);

        assert!(matches!("0 1 A".parse::<DeviceLayout>(), Err(LayoutError::Syntax { line: 1, .. })));
        assert!(matches!(
            "layout n=3\n0 1 A\n1 2 A\n".parse::<DeviceLayout>(),
            Err(LayoutError::NotAMatching { qubit: 1, .. })
        ));
        assert!(matches!("layout n=2\n0 5 A\n".parse::<DeviceLayout>(), Err(LayoutError::QubitOutOfRange { .. })));
        assert!(matches!("layout n=2\n0 1 Z\n".parse::<DeviceLayout>(), Err(LayoutError::BadLetter(_))));
        assert!(matches!("layout n=2\n0 1\n".parse::<DeviceLayout>(), Err(LayoutError::Syntax { line: 2, .. })));
    }

    #[test]
    fn near_square() {
        assert_eq!(near_square_grid(16), (4, 4));
        assert_eq!(near_square_grid(12), (3, 4));
        assert_eq!(near_square_grid(14), (2, 7));
        assert_eq!(near_square_grid(13), (1, 13));
    }
}
