//! Self-contained certificate bundles.
//!
//! ```text
//! opstat-certificate-bundle v1
//! indeterminates <n>
//! <name>                              n lines, in id order
//! order <name> ...                    precedence, smallest first
//! elimination <name> ...              possibly empty
//! clauses <m>
//! clause <label>                      m records of this shape
//! generators <g>
//! <polynomial>                        g lines
//! target <polynomial>
//! summands <s>
//! <coefficient> <left> <index> <right>   s lines; words '*'-joined, 1 if empty
//! end
//! ```
//!
//! Polynomials are written highest degree first, e.g. `2*x*y - x + 3`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_bigint::BigInt;
use opstat_core::idealise::{ClauseVerdict, SentenceIdealisation};
use opstat_core::membership::{check_certificate, IdealPresentation, MembershipCertificate, MonomialOrder, Summand};
use opstat_core::ncpoly::{parse_word, render_word, IndeterminateTable, Letter, NCPolynomial};
use thiserror::Error;

pub const HEADER: &str = "opstat-certificate-bundle v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleClause {
    pub label: String,
    pub generators: Vec<NCPolynomial>,
    pub certificate: MembershipCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub table: IndeterminateTable,
    pub order: MonomialOrder,
    pub clauses: Vec<BundleClause>,
}

impl Bundle {
    /// Collects the certificates of every True clause.
    pub fn from_idealisation(s: &SentenceIdealisation) -> Self {
        let mut clauses = Vec::new();
        let mut order = MonomialOrder::deglex((0..s.table.len() as Letter).collect());
        for (i, c) in s.clauses.iter().enumerate() {
            if let ClauseVerdict::True { certificate, .. } = &c.verdict {
                order = c.ideal.order.clone();
                clauses.push(BundleClause {
                    label: format!("c{}", i + 1),
                    generators: c.ideal.generators.clone(),
                    certificate: certificate.clone(),
                });
            }
        }
        Bundle {
            table: s.table.clone(),
            order,
            clauses,
        }
    }

    pub fn render(&self) -> String {
        let t = &self.table;
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "indeterminates {}", t.len());
        for n in t.names() {
            let _ = writeln!(out, "{n}");
        }
        let names = |xs: &mut dyn Iterator<Item = Letter>| xs.map(|x| format!(" {}", t.name(x))).collect::<String>();
        let _ = writeln!(out, "order{}", names(&mut self.order.precedence().iter().copied()));
        let _ = writeln!(
            out,
            "elimination{}",
            names(&mut self.order.elimination().iter().copied())
        );
        let _ = writeln!(out, "clauses {}", self.clauses.len());
        for c in &self.clauses {
            let _ = writeln!(out, "clause {}", c.label);
            let _ = writeln!(out, "generators {}", c.generators.len());
            for g in &c.generators {
                let _ = writeln!(out, "{}", g.render(t));
            }
            let _ = writeln!(out, "target {}", c.certificate.target.render(t));
            let _ = writeln!(out, "summands {}", c.certificate.summands.len());
            for s in &c.certificate.summands {
                let _ = writeln!(
                    out,
                    "{} {} {} {}",
                    s.coeff,
                    render_word(&s.left, t),
                    s.generator,
                    render_word(&s.right, t)
                );
            }
        }
        let _ = writeln!(out, "end");
        out
    }

    /// Replays every certificate; one entry per clause.
    pub fn check(&self) -> Vec<bool> {
        self.clauses
            .iter()
            .map(|c| {
                let ideal = IdealPresentation::with_order(c.generators.clone(), self.order.clone());
                c.generators.iter().all(|g| !g.is_zero()) && check_certificate(&c.certificate, &ideal) == Ok(true)
            })
            .collect()
    }
}

struct Lines<'a> {
    it: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), BundleError> {
        match self.it.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(BundleError::Format {
                line: self.last + 1,
                msg: "unexpected end of bundle".into(),
            }),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str), BundleError> {
        let (n, l) = self.next()?;
        match l.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((n, rest.trim())),
            _ => Err(fmt_err(n, format!("expected `{key}`"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<usize, BundleError> {
        let (n, rest) = self.keyed(key)?;
        rest.parse().map_err(|_| fmt_err(n, format!("bad count `{rest}`")))
    }
}

fn fmt_err(line: usize, msg: impl Into<String>) -> BundleError {
    BundleError::Format { line, msg: msg.into() }
}

/// Parses a bundle produced by [`Bundle::render`].
pub fn parse_bundle(text: &str) -> Result<Bundle, BundleError> {
    let iter: Box<dyn Iterator<Item = (usize, &str)>> = Box::new(
        text.lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
    );
    let mut lines = Lines {
        it: iter.peekable(),
        last: 0,
    };
    let (n, h) = lines.next()?;
    if h != HEADER {
        return Err(fmt_err(n, "missing bundle header"));
    }
    let k = lines.count("indeterminates")?;
    let mut names = Vec::with_capacity(k);
    for _ in 0..k {
        names.push(lines.next()?.1.to_string());
    }
    let table = IndeterminateTable::from_names(names);
    if table.len() != k {
        return Err(fmt_err(lines.last, "duplicate indeterminate"));
    }
    let letters = |n: usize, rest: &str| -> Result<Vec<Letter>, BundleError> {
        rest.split_whitespace()
            .map(|x| {
                table
                    .get(x)
                    .ok_or_else(|| fmt_err(n, format!("unknown indeterminate `{x}`")))
            })
            .collect()
    };
    let (n, rest) = lines.keyed("order")?;
    let prec = letters(n, rest)?;
    let (n, rest) = lines.keyed("elimination")?;
    let order = MonomialOrder::deglex(prec).with_elimination(letters(n, rest)?);
    let m = lines.count("clauses")?;
    let poly = |n: usize, s: &str| NCPolynomial::parse(s, &table).map_err(|e| fmt_err(n, e.to_string()));
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let (_, label) = lines.keyed("clause")?;
        let g = lines.count("generators")?;
        let mut generators = Vec::with_capacity(g);
        for _ in 0..g {
            let (n, l) = lines.next()?;
            generators.push(poly(n, l)?);
        }
        let (n, rest) = lines.keyed("target")?;
        let target = poly(n, rest)?;
        let s = lines.count("summands")?;
        let mut summands = Vec::with_capacity(s);
        for _ in 0..s {
            let (n, l) = lines.next()?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            let [c, left, idx, right] = parts.as_slice() else {
                return Err(fmt_err(n, "a summand has four fields"));
            };
            let word = |w: &str| parse_word(w, &table).map_err(|e| fmt_err(n, e.to_string()));
            summands.push(Summand {
                coeff: c
                    .parse::<BigInt>()
                    .map_err(|_| fmt_err(n, format!("bad coefficient `{c}`")))?,
                left: word(left)?,
                generator: idx.parse().map_err(|_| fmt_err(n, format!("bad index `{idx}`")))?,
                right: word(right)?,
            });
        }
        clauses.push(BundleClause {
            label: label.to_string(),
            generators,
            certificate: MembershipCertificate { target, summands },
        });
    }
    let (n, l) = lines.next()?;
    if l != "end" {
        return Err(fmt_err(n, "expected `end`"));
    }
    if let Some((n, _)) = lines.it.next() {
        return Err(fmt_err(n, "trailing content after `end`"));
    }
    Ok(Bundle { table, order, clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Bundle {
        let table = IndeterminateTable::from_names(["a".to_string(), "b".to_string()]);
        let g = NCPolynomial::parse("a - b", &table).unwrap();
        let cert = MembershipCertificate {
            target: NCPolynomial::parse("a*a - b*b", &table).unwrap(),
            summands: vec![
                Summand {
                    coeff: 1.into(),
                    left: vec![0],
                    generator: 0,
                    right: vec![],
                },
                Summand {
                    coeff: 1.into(),
                    left: vec![],
                    generator: 0,
                    right: vec![1],
                },
            ],
        };
        Bundle {
            table,
            order: MonomialOrder::deglex(vec![0, 1]),
            clauses: vec![BundleClause {
                label: "c1".into(),
                generators: vec![g],
                certificate: cert,
            }],
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let b = sample();
        let text = b.render();
        assert_eq!(parse_bundle(&text).unwrap(), b);
        assert_eq!(b.check(), vec![true]);
    }

    #[test]
    fn tampering_is_detected() {
        let text = sample().render().replace("\n1 a 0 1\n", "\n2 a 0 1\n");
        assert_eq!(parse_bundle(&text).unwrap().check(), vec![false]);
        assert!(parse_bundle("not a bundle").is_err());
    }
}
