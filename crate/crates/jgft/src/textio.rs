//! Text formats: square matrices, signals, and weighted edge lists.
//!
//! Matrix files are `N` on the first significant line followed by `N` rows of
//! `N` whitespace-separated complex entries. Complex entries use the forms
//! `a`, `a+bi`, `a-bi`, `bi`, where each component is a decimal number or an
//! exact rational `p/q`. Blank lines and `#` comments are permitted.
//!
//! Every successfully parsed value is also captured exactly (decimals are
//! finite rationals), so parsing yields both a float matrix and an exact
//! rational matrix; printing exact values round-trips bit-for-bit.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::scalar::ExactScalar;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use num_complex::Complex64;
use std::str::FromStr;

/// A parsed matrix: float view plus, when every entry was expressible
/// exactly, the exact rational view.
#[derive(Clone, Debug)]
pub struct ParsedMatrix {
    pub dense: DenseMatrix,
    pub exact: Option<ExactMatrix>,
}

/// A parsed signal vector with the same dual view.
#[derive(Clone, Debug)]
pub struct ParsedSignal {
    pub values: Vec<Complex64>,
    pub exact: Option<Vec<ExactScalar>>,
}

// ───────────────────────── scalar parsing ─────────────────────────

/// One complex entry; `exact` is `None` only for components that cannot be
/// represented as a rational (e.g. out-of-range exponents).
#[derive(Clone, Debug)]
pub struct ParsedScalar {
    pub value: Complex64,
    pub exact: Option<ExactScalar>,
}

/// Parse a single complex entry token.
pub fn parse_complex_entry(token: &str) -> Option<ParsedScalar> {
    let s = token.trim();
    if s.is_empty() {
        return None;
    }
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // Either `bi` or `a±bi`: find the sign separating the two components.
        if let Some(k) = split_point(body) {
            let (re_str, im_str) = body.split_at(k);
            let re = parse_component(re_str)?;
            let im = parse_imag_coeff(im_str)?;
            return Some(combine(re, im));
        }
        let im = parse_imag_coeff(body)?;
        return Some(combine(Component::zero(), im));
    }
    let re = parse_component(s)?;
    Some(combine(re, Component::zero()))
}

/// Index of the `+`/`-` separating real and imaginary components, if any.
/// Signs at position 0, inside exponent markers (`e`/`E`), or following `/`
/// do not split.
fn split_point(body: &str) -> Option<usize> {
    let bytes = body.as_bytes();
    for k in (1..bytes.len()).rev() {
        let b = bytes[k];
        if b == b'+' || b == b'-' {
            let prev = bytes[k - 1];
            if prev == b'e' || prev == b'E' || prev == b'+' || prev == b'-' || prev == b'/' {
                continue;
            }
            return Some(k);
        }
    }
    None
}

/// A real-valued numeric component in both views.
struct Component {
    value: f64,
    exact: Option<BigRational>,
}

impl Component {
    fn zero() -> Self {
        Self {
            value: 0.0,
            exact: Some(BigRational::zero()),
        }
    }

    fn one_signed(negative: bool) -> Self {
        Self {
            value: if negative { -1.0 } else { 1.0 },
            exact: Some(if negative {
                -BigRational::one()
            } else {
                BigRational::one()
            }),
        }
    }
}

fn combine(re: Component, im: Component) -> ParsedScalar {
    let exact = match (re.exact, im.exact) {
        (Some(r), Some(i)) => Some(ExactScalar::new(r, i)),
        _ => None,
    };
    ParsedScalar {
        value: Complex64::new(re.value, im.value),
        exact,
    }
}

/// The coefficient of `i`: empty or a bare sign means ±1.
fn parse_imag_coeff(s: &str) -> Option<Component> {
    match s {
        "" | "+" => Some(Component::one_signed(false)),
        "-" => Some(Component::one_signed(true)),
        _ => parse_component(s),
    }
}

/// Rational `p/q` or decimal (optionally scientific) component.
fn parse_component(s: &str) -> Option<Component> {
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let p = BigInt::from_str(num.trim()).ok()?;
        let q = BigInt::from_str(den.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        let r = BigRational::new(p, q);
        let value = crate::scalar::rational_to_f64(&r);
        return Some(Component {
            value,
            exact: Some(r),
        });
    }
    let value = f64::from_str(s).ok()?;
    if !value.is_finite() {
        return None;
    }
    Some(Component {
        value,
        exact: decimal_to_rational(s),
    })
}

/// Exact rational value of a decimal literal like `-2.5e3` (here `-2500`).
fn decimal_to_rational(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, i32::from_str(e).ok()?),
        None => (s, 0i32),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = frac_part.len() as i32 - exp;
    if scale.abs() > 10_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::new(numer, ten.pow(scale as u32))
    } else {
        BigRational::from_integer(numer * ten.pow((-scale) as u32))
    };
    Some(r)
}

// ───────────────────────── file parsing ─────────────────────────

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, line)| {
        let stripped = match line.find('#') {
            Some(k) => &line[..k],
            None => line,
        };
        let trimmed = stripped.trim();
        if trimmed.is_empty() {
            None
        } else {
            Some((idx + 1, trimmed))
        }
    })
}

/// Parse a square matrix file (see module docs for the format).
pub fn parse_matrix(text: &str) -> Result<ParsedMatrix> {
    let mut lines = significant_lines(text);
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input: expected matrix dimension N".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: header_line,
        msg: format!("expected matrix dimension N, got {header:?}"),
    })?;
    let mut dense = DenseMatrix::zeros(n, n);
    let mut exact_rows: Option<Vec<Vec<ExactScalar>>> = Some(Vec::with_capacity(n));
    for i in 0..n {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: header_line,
            msg: format!("expected {n} matrix rows, found {i}"),
        })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {n} entries in row, found {}", tokens.len()),
            });
        }
        let mut exact_row = Vec::with_capacity(n);
        for (j, tok) in tokens.iter().enumerate() {
            let parsed = parse_complex_entry(tok).ok_or(Error::Parse {
                line: line_no,
                msg: format!("invalid complex entry {tok:?} (column {})", j + 1),
            })?;
            dense[(i, j)] = parsed.value;
            match (parsed.exact, exact_rows.is_some()) {
                (Some(e), true) => exact_row.push(e),
                _ => exact_rows = None,
            }
        }
        if let Some(rows) = exact_rows.as_mut() {
            rows.push(exact_row);
        }
    }
    Ok(ParsedMatrix {
        dense,
        exact: exact_rows.map(ExactMatrix::from_rows),
    })
}

/// Parse a signal file: one complex entry per significant line. If
/// `expected_len` is given, the count must match.
pub fn parse_signal(text: &str, expected_len: Option<usize>) -> Result<ParsedSignal> {
    let mut values = Vec::new();
    let mut exact: Option<Vec<ExactScalar>> = Some(Vec::new());
    let mut last_line = 0;
    for (line_no, line) in significant_lines(text) {
        last_line = line_no;
        let parsed = parse_complex_entry(line).ok_or(Error::Parse {
            line: line_no,
            msg: format!("invalid complex entry {line:?}"),
        })?;
        values.push(parsed.value);
        match (parsed.exact, exact.as_mut()) {
            (Some(e), Some(v)) => v.push(e),
            _ => exact = None,
        }
    }
    if let Some(n) = expected_len {
        if values.len() != n {
            return Err(Error::Parse {
                line: last_line,
                msg: format!("expected {n} signal entries, found {}", values.len()),
            });
        }
    }
    Ok(ParsedSignal { values, exact })
}

/// Parse a weighted edge list: one `u v w` triple per significant line with
/// 1-based node indices. The edge `u -> v` with weight `w` is stored at row
/// `v`, column `u`, so that applying the matrix to a signal sums each node's
/// in-neighbors. Parallel edges accumulate. The node count is the largest
/// index seen.
pub fn parse_edgelist(text: &str) -> Result<ParsedMatrix> {
    struct Edge {
        from: usize,
        to: usize,
        weight: ParsedScalar,
    }
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (line_no, line) in significant_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `u v w`, found {} fields", tokens.len()),
            });
        }
        let parse_node = |tok: &str| -> Result<usize> {
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid node index {tok:?}"),
            })?;
            if v == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "node indices are 1-based".into(),
                });
            }
            Ok(v)
        };
        let from = parse_node(tokens[0])?;
        let to = parse_node(tokens[1])?;
        let weight = parse_complex_entry(tokens[2]).ok_or(Error::Parse {
            line: line_no,
            msg: format!("invalid edge weight {:?}", tokens[2]),
        })?;
        n = n.max(from).max(to);
        edges.push(Edge { from, to, weight });
    }
    let mut dense = DenseMatrix::zeros(n, n);
    let mut exact: Option<ExactMatrix> = Some(ExactMatrix::zeros(n, n));
    for e in &edges {
        let (i, j) = (e.to - 1, e.from - 1);
        dense[(i, j)] += e.weight.value;
        match (&e.weight.exact, exact.as_mut()) {
            (Some(w), Some(m)) => m[(i, j)] = &m[(i, j)] + w,
            _ => exact = None,
        }
    }
    Ok(ParsedMatrix { dense, exact })
}

// ───────────────────────── formatting ─────────────────────────

/// Format a float complex value in the entry syntax (`a`, `bi`, `a±bi`).
/// Uses the shortest decimal that round-trips the doubles.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Matrix text for a float matrix.
pub fn format_matrix_dense(a: &DenseMatrix) -> String {
    let mut out = format!("{}\n", a.rows());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| format_complex(a[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Matrix text for an exact matrix; parses back to the identical values.
pub fn format_matrix_exact(a: &ExactMatrix) -> String {
    let mut out = format!("{}\n", a.rows());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| a[(i, j)].to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Signal text (one entry per line) for float values.
pub fn format_signal(values: &[Complex64]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&format_complex(*v));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_forms() {
        let cases = [
            ("3", Complex64::new(3.0, 0.0)),
            ("-2.5", Complex64::new(-2.5, 0.0)),
            ("1/3", Complex64::new(1.0 / 3.0, 0.0)),
            ("3+4i", Complex64::new(3.0, 4.0)),
            ("3-1/2i", Complex64::new(3.0, -0.5)),
            ("4i", Complex64::new(0.0, 4.0)),
            ("-i", Complex64::new(0.0, -1.0)),
            ("i", Complex64::new(0.0, 1.0)),
            ("2+i", Complex64::new(2.0, 1.0)),
            ("1e2", Complex64::new(100.0, 0.0)),
            ("1.5e-2+2e1i", Complex64::new(0.015, 20.0)),
            ("-5/3-7/2i", Complex64::new(-5.0 / 3.0, -3.5)),
        ];
        for (tok, expect) in cases {
            let p = parse_complex_entry(tok).unwrap_or_else(|| panic!("failed on {tok}"));
            assert_eq!(p.value, expect, "token {tok}");
            assert!(p.exact.is_some(), "token {tok} should parse exactly");
        }
        for bad in ["", "x", "1//2", "3+", "1/0", "nan", "inf", "2i3"] {
            assert!(parse_complex_entry(bad).is_none(), "accepted {bad:?}");
        }
    }

    #[test]
    fn rational_entries_round_trip_exactly() {
        let m = ExactMatrix::from_rows(vec![
            vec![ExactScalar::from_ratio(5, 3), ExactScalar::from_int(-2)],
            vec![
                ExactScalar::new(
                    BigRational::new(1.into(), 2.into()),
                    BigRational::new((-4).into(), 7.into()),
                ),
                ExactScalar::from_int(0),
            ],
        ]);
        let text = format_matrix_exact(&m);
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back.exact.unwrap(), m);
    }

    #[test]
    fn dense_matrix_text_round_trips() {
        let m = DenseMatrix::from_rows(&[
            vec![Complex64::new(0.1, -2.25), Complex64::new(3.0, 0.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(-7.5, 0.125)],
        ]);
        let back = parse_matrix(&format_matrix_dense(&m)).unwrap();
        assert_eq!(back.dense, m);
    }

    #[test]
    fn matrix_errors_carry_line_numbers() {
        let err = parse_matrix("2\n1 2\n1").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_matrix("x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored ()
    {
        let text = "# a 2x2 example\n\n2\n1 0 # row 1\n0 1\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.dense, DenseMatrix::identity(2));
    }

    #[test]
    fn edgelist_builds_in_neighbor_matrix() {
        // 1 -> 2 with weight 3: applying A to a signal puts 3*s_1 at node 2,
        // so A[2][1] (1-based) must be 3.
        let m = parse_edgelist("1 2 3\n3 1 -1/2\n").unwrap();
        assert_eq!(m.dense[(1, 0)], Complex64::new(3.0, 0.0));
        assert_eq!(m.dense[(0, 2)], Complex64::new(-0.5, 0.0));
        assert_eq!(m.dense.rows(), 3);
        // parallel edges accumulate
        let dup = parse_edgelist("1 2 1\n1 2 2\n").unwrap();
        assert_eq!(dup.dense[(1, 0)], Complex64::new(3.0, 0.0));
    }

    #[test]
    fn signal_length_is_checked() {
        assert!(parse_signal("1\n2\n", Some(3)).is_err());
        let s = parse_signal("1\n2i\n-1/4\n", Some(3)).unwrap();
        assert_eq!(s.values[1], Complex64::new(0.0, 2.0));
        assert!(s.exact.is_some());
    }
}
