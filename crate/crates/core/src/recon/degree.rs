//! Multi-edge-type degree distributions.
//!
//! Notation, one polynomial per node side:
//!
//! ```text
//! v = 0.0775 r1 x1^2 x2^20 + 0.0475 r1 x1^3 x2^22 + 0.875 r1 x3
//! u = 0.0025 x1^11 + 0.0225 x1^12 + 0.03 x2^2 x3 + 0.845 x2^3 x3
//! ```
//!
//! A term `f r1 x1^a x2^b` is a class holding a fraction `f` of all variable
//! nodes, observed through the channel (`r1`), with `a` sockets of edge type
//! 1 and `b` of edge type 2. Check-side fractions are also relative to the
//! number of variable nodes, so they sum to `1 − R`. Edge counts of every
//! type must balance between the two sides. LaTeX forms such as `r_1`,
//! `x^2_1` and `x_2^{34}` are accepted.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeClass {
    pub fraction: f64,
    /// Socket count per edge type; index 0 is type 1.
    pub degrees: Vec<u32>,
    /// Whether the nodes carry a channel observation.
    pub received: bool,
}

impl DegreeClass {
    pub fn total_degree(&self) -> u32 {
        self.degrees.iter().sum()
    }

    fn degree(&self, edge_type: usize) -> u32 {
        self.degrees.get(edge_type).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub code_rate: f64,
    /// Fractions sum to 1 over variable nodes.
    pub variable_spec: Vec<DegreeClass>,
    /// Fractions sum to 1 over check nodes.
    pub check_spec: Vec<DegreeClass>,
    /// Density-evolution threshold, informational.
    pub threshold: Option<f64>,
}

impl DegreeDistribution {
    pub fn parse(text: &str) -> Result<Self> {
        let mut v = None;
        let mut u = None;
        let mut threshold = None;
        for (line_no, line) in text.lines().enumerate() {
            for part in line.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (key, value) = part.split_once('=').ok_or_else(|| {
                    Error::parse("degree distribution", line_no + 1, format!("expected `key = value`, got `{part}`"))
                })?;
                let err = |m: String| Error::parse("degree distribution", line_no + 1, m);
                match key.trim() {
                    "v" => v = Some(parse_polynomial(value).map_err(err)?),
                    "u" => u = Some(parse_polynomial(value).map_err(err)?),
                    "threshold" => {
                        threshold = Some(
                            value
                                .trim()
                                .parse::<f64>()
                                .map_err(|e| err(format!("threshold: {e}")))?,
                        )
                    }
                    other => return Err(err(format!("unknown key `{other}`"))),
                }
            }
        }
        let v = v.ok_or_else(|| Error::parse("degree distribution", 0, "missing `v = ...`"))?;
        let u = u.ok_or_else(|| Error::parse("degree distribution", 0, "missing `u = ...`"))?;
        Self::from_raw(v, u, threshold)
    }

    /// Builds a distribution from variable fractions (summing to 1) and
    /// check fractions relative to the variable count.
    pub fn from_raw(variable: Vec<DegreeClass>, check_raw: Vec<DegreeClass>, threshold: Option<f64>) -> Result<Self> {
        if variable.is_empty() || check_raw.is_empty() {
            return Err(Error::invalid("degree distribution", "both sides need at least one class"));
        }
        for c in variable.iter().chain(&check_raw) {
            if !(c.fraction > 0.0 && c.fraction.is_finite()) {
                return Err(Error::invalid("degree distribution", format!("fraction {} is not positive", c.fraction)));
            }
            if c.total_degree() == 0 {
                return Err(Error::invalid("degree distribution", "a class has no sockets"));
            }
        }
        let v_sum: f64 = variable.iter().map(|c| c.fraction).sum();
        if (v_sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(
                "degree distribution",
                format!("variable fractions sum to {v_sum}, not 1"),
            ));
        }
        let ratio: f64 = check_raw.iter().map(|c| c.fraction).sum();
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::invalid(
                "degree distribution",
                format!("check fractions sum to {ratio}; the code rate 1 - sum must lie in (0, 1)"),
            ));
        }
        let types = variable.iter().chain(&check_raw).map(|c| c.degrees.len()).max().unwrap_or(0);
        for j in 0..types {
            let ev: f64 = variable.iter().map(|c| c.fraction * c.degree(j) as f64).sum();
            let ec: f64 = check_raw.iter().map(|c| c.fraction * c.degree(j) as f64).sum();
            if (ev - ec).abs() > SUM_TOLERANCE * ev.max(ec).max(1.0) {
                return Err(Error::invalid(
                    "degree distribution",
                    format!("edge type {} unbalanced: {ev} variable sockets vs {ec} check sockets per node", j + 1),
                ));
            }
        }
        let check_spec = check_raw
            .into_iter()
            .map(|c| DegreeClass {
                fraction: c.fraction / ratio,
                ..c
            })
            .collect();
        Ok(Self {
            code_rate: 1.0 - ratio,
            variable_spec: variable,
            check_spec,
            threshold,
        })
    }

    /// Regular `(dv, dc)` ensemble.
    pub fn regular(dv: u32, dc: u32) -> Result<Self> {
        if dv == 0 || dc <= dv {
            return Err(Error::invalid("degree distribution", "regular ensemble needs 0 < dv < dc"));
        }
        Self::from_raw(
            vec![DegreeClass { fraction: 1.0, degrees: vec![dv], received: true }],
            vec![DegreeClass { fraction: dv as f64 / dc as f64, degrees: vec![dc], received: false }],
            None,
        )
    }

    /// Check nodes per variable node, `1 − R`.
    pub fn check_ratio(&self) -> f64 {
        1.0 - self.code_rate
    }

    pub fn edge_types(&self) -> usize {
        self.variable_spec
            .iter()
            .chain(&self.check_spec)
            .map(|c| c.degrees.len())
            .max()
            .unwrap_or(0)
    }

    pub fn max_variable_degree(&self) -> u32 {
        self.variable_spec.iter().map(DegreeClass::total_degree).max().unwrap_or(0)
    }
}

impl FromStr for DegreeDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ratio = self.check_ratio();
        let side = |classes: &[DegreeClass], scale: f64| {
            classes
                .iter()
                .map(|c| {
                    let mut term = format!("{}", c.fraction * scale);
                    if c.received {
                        term.push_str(" r1");
                    }
                    for (j, &d) in c.degrees.iter().enumerate() {
                        match d {
                            0 => {}
                            1 => term.push_str(&format!(" x{}", j + 1)),
                            _ => term.push_str(&format!(" x{}^{d}", j + 1)),
                        }
                    }
                    term
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(f, "v = {}; u = {}", side(&self.variable_spec, 1.0), side(&self.check_spec, ratio))?;
        if let Some(t) = self.threshold {
            write!(f, "; threshold = {t}")?;
        }
        Ok(())
    }
}

/* ---------- parsing ---------- */

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Self { chars: text.char_indices().peekable(), text }
    }

    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        self.chars.next_if(|&(_, c)| c == want).is_some()
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.chars.peek().map(|&(i, _)| i).unwrap_or(self.text.len());
        let mut end = start;
        while let Some((i, c)) = self.chars.next_if(|&(_, c)| pred(c)) {
            end = i + c.len_utf8();
        }
        &self.text[start..end]
    }

    /// Integer, optionally braced.
    fn integer(&mut self, what: &str) -> std::result::Result<u32, String> {
        let braced = self.eat('{');
        let digits = self.take_while(|c| c.is_ascii_digit());
        if braced && !self.eat('}') {
            return Err(format!("unclosed brace in {what}"));
        }
        digits.parse().map_err(|_| format!("expected an integer for {what}"))
    }
}

fn parse_polynomial(text: &str) -> std::result::Result<Vec<DegreeClass>, String> {
    let mut s = Scanner::new(text);
    let mut classes = Vec::new();
    loop {
        classes.push(parse_term(&mut s)?);
        match s.peek() {
            None => break,
            Some('+') => {
                s.eat('+');
            }
            Some(c) => return Err(format!("unexpected `{c}`")),
        }
    }
    Ok(classes)
}

fn parse_term(s: &mut Scanner<'_>) -> std::result::Result<DegreeClass, String> {
    let coef = s.take_while(|c| c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || c == '-');
    let fraction = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().map_err(|_| format!("bad coefficient `{coef}`"))?
    };
    let _ = s.eat('*');
    let mut class = DegreeClass { fraction, degrees: Vec::new(), received: false };
    let mut any_factor = false;
    loop {
        match s.peek() {
            Some('r') => {
                s.eat('r');
                let _ = s.eat('_');
                let idx = s.integer("r index")?;
                if idx != 1 {
                    return Err(format!("only r1 is supported, found r{idx}"));
                }
                class.received = true;
            }
            Some('x') => {
                s.eat('x');
                let mut index = None;
                let mut exp = None;
                if s.peek().is_some_and(|c| c.is_ascii_digit()) {
                    index = Some(s.integer("edge type")?);
                }
                loop {
                    if s.eat('_') {
                        index = Some(s.integer("edge type")?);
                    } else if s.eat('^') {
                        exp = Some(s.integer("exponent")?);
                    } else {
                        break;
                    }
                }
                let index = index.ok_or("x without an edge-type index")? as usize;
                if index == 0 {
                    return Err("edge types are numbered from 1".into());
                }
                let exp = exp.unwrap_or(1);
                if class.degrees.len() < index {
                    class.degrees.resize(index, 0);
                }
                class.degrees[index - 1] += exp;
            }
            _ => break,
        }
        any_factor = true;
    }
    if !any_factor {
        return Err("term has no r or x factors".into());
    }
    Ok(class)
}

/* ---------- published ensembles ---------- */

/// Multi-edge-type ensembles for rates 0.05, 0.1 and 0.15, with their
/// thresholds in the same units as `V_A`.
pub const PUBLISHED_ENSEMBLES: [(f64, &str); 3] = [
    (
        0.05,
        "v = 0.04 r1 x1^2 x2^34 + 0.03 r1 x1^3 x2^34 + 0.93 r1 x3; \
         u = 0.01 x1^8 + 0.01 x1^9 + 0.41 x2^2 x3 + 0.52 x2^3 x3; threshold = 3.674",
    ),
    (
        0.1,
        "v = 0.0775 r1 x1^2 x2^20 + 0.0475 r1 x1^3 x2^22 + 0.875 r1 x3; \
         u = 0.0025 x1^11 + 0.0225 x1^12 + 0.03 x2^2 x3 + 0.845 x2^3 x3; threshold = 2.541",
    ),
    (
        0.15,
        "v = 0.0858 r1 x1^2 x2^12 + 0.0996 r1 x1^3 x2^14 + 0.8146 r1 x3; \
         u = 0.0160 x1^10 + 0.0194 x1^16 + 0.0198 x2^2 x3 + 0.7948 x2^3 x3; threshold = 2.038",
    ),
];

/// Published ensemble for `rate` (0.05, 0.1 or 0.15).
pub fn published_ensemble(rate: f64) -> Result<DegreeDistribution> {
    PUBLISHED_ENSEMBLES
        .iter()
        .find(|(r, _)| (r - rate).abs() < 1e-9)
        .map(|(_, text)| DegreeDistribution::parse(text))
        .unwrap_or_else(|| Err(Error::invalid("rate", format!("no published ensemble for rate {rate}"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_ensembles_parse_and_balance() {
        for (rate, _) in PUBLISHED_ENSEMBLES {
            let d = published_ensemble(rate).unwrap();
            assert!((d.code_rate - rate).abs() < 1e-9, "{rate}: {}", d.code_rate);
            let s: f64 = d.check_spec.iter().map(|c| c.fraction).sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert_eq!(d.edge_types(), 3);
        }
        assert!(published_ensemble(0.2).is_err());
    }

    #[test]
    fn latex_and_plain_agree() {
        let latex = DegreeDistribution::parse(
            "v=0.0775r_1 x^2_1 x_2^{20}+0.0475r_1x_1^3x_2^{22}+0.875r_1x_3\n\
             u=0.0025x_1^{11}+0.0225x_1^{12}+0.03x_2^2 x_3+0.845x_2^3 x_3",
        )
        .unwrap();
        let plain = published_ensemble(0.1).unwrap();
        assert_eq!(latex.variable_spec, plain.variable_spec);
        assert_eq!(latex.check_spec, plain.check_spec);
    }

    #[test]
    fn regular_and_display_round_trip() {
        let d = DegreeDistribution::parse("v = r1 x1^3; u = 0.5 x1^6").unwrap();
        assert_eq!(d, DegreeDistribution::regular(3, 6).unwrap());
        assert!((d.code_rate - 0.5).abs() < 1e-12);
        let back = DegreeDistribution::parse(&published_ensemble(0.15).unwrap().to_string()).unwrap();
        assert_eq!(back.variable_spec, published_ensemble(0.15).unwrap().variable_spec);
    }

    #[test]
    fn rejects_unbalanced_or_malformed() {
        assert!(DegreeDistribution::parse("v = x1^3; u = 0.5 x1^5").is_err());
        assert!(DegreeDistribution::parse("v = 0.9 x1^3; u = 0.45 x1^6").is_err());
        assert!(DegreeDistribution::parse("v = x1^3").is_err());
        assert!(DegreeDistribution::parse("v = x1^3 ? ; u = 0.5 x1^6").is_err());
    }
}
