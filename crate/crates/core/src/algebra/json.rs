//! JSON interchange for polynomials:
//! `{"n": 1, "blocks": ["xi"], "terms": [{"coeff": "1/2", "exp": {"p1": 1, "xi_t": 1}}]}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poly::{Monomial, Poly};
use super::rational::{fmt_rational, parse_rational, Rational};
use super::vars::{Block, Var, VarTable};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: String,
    pub exp: BTreeMap<String, u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    #[serde(default)]
    pub blocks: Vec<Block>,
    pub terms: Vec<PolyTerm>,
}

impl PolyJson {
    /// Terms are emitted in descending graded-lex order, matching `Display`.
    pub fn from_poly(p: &Poly) -> PolyJson {
        let table = p.table();
        let terms = p
            .terms()
            .rev()
            .map(|(m, c)| PolyTerm {
                coeff: fmt_rational(c),
                exp: m
                    .exps()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (table.name(Var(i)), e))
                    .collect(),
            })
            .collect();
        PolyJson { n: table.n(), blocks: table.blocks().to_vec(), terms }
    }

    pub fn table(&self) -> Result<Arc<VarTable>> {
        VarTable::new(self.n, &self.blocks)
    }

    pub fn to_poly(&self) -> Result<Poly> {
        let table = self.table()?;
        self.to_poly_in(&table)
    }

    /// Reads the terms into an explicitly chosen table (which must contain
    /// every named variable).
    pub fn to_poly_in(&self, table: &Arc<VarTable>) -> Result<Poly> {
        if table.n() != self.n {
            return Err(Error::InvalidParameter(format!(
                "polynomial has n={} but n={} was requested",
                self.n,
                table.n()
            )));
        }
        let mut p = Poly::zero(table);
        for term in &self.terms {
            let c = parse_rational(&term.coeff)?;
            let mut exps = vec![0u16; table.len()];
            for (name, &e) in &term.exp {
                let v = table.lookup(name)?;
                exps[v.0] += e;
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }
}

pub fn poly_to_json(p: &Poly) -> serde_json::Value {
    serde_json::to_value(PolyJson::from_poly(p)).expect("serializable")
}

pub fn poly_from_json_str(s: &str) -> Result<Poly> {
    let doc: PolyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_poly()
}

/// Reads the text form printed by `Display`, e.g. `1/2*p1*xi_t - xi_q1^2 + 3`.
pub fn poly_from_text(table: &Arc<VarTable>, s: &str) -> Result<Poly> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |what: &str| Error::Parse(format!("cannot read `{what}` in polynomial `{s}`"));
    let mut p = Poly::zero(table);
    if src.is_empty() || src == "0" {
        return Ok(p);
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in src.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !src[..i].ends_with('^') {
            terms.push(&src[start..i]);
            start = i;
        }
    }
    terms.push(&src[start..]);
    for term in terms {
        let (neg, body) = match term.as_bytes().first() {
            Some(b'-') => (true, &term[1..]),
            Some(b'+') => (false, &term[1..]),
            _ => (false, term),
        };
        if body.is_empty() {
            return Err(bad(term));
        }
        let mut coeff = Rational::from_integer(1.into());
        let mut exps = vec![0u16; table.len()];
        for factor in body.split('*') {
            if factor.starts_with(|c: char| c.is_ascii_digit()) {
                coeff *= parse_rational(factor)?;
                continue;
            }
            let (name, e) = match factor.split_once('^') {
                Some((v, e)) => (v, e.parse::<u16>().map_err(|_| bad(factor))?),
                None => (factor, 1),
            };
            exps[table.lookup(name)?.0] += e;
        }
        if neg {
            coeff = -coeff;
        }
        p.add_term(Monomial::new(exps), coeff);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::algebra::vars::Coord;

    #[test]
    fn round_trip() {
        let t = VarTable::with_xi(2);
        let p = &Poly::var(&t, t.p(2)).scale(&rat(-3, 4))
            * &Poly::var(&t, t.fv(Block::Xi, Coord::T));
        let p = &p + &Poly::one(&t);
        let s = serde_json::to_string(&PolyJson::from_poly(&p)).unwrap();
        assert_eq!(poly_from_json_str(&s).unwrap(), p);
    }

    #[test]
    fn rejects_bad_input() {
        let unknown = r#"{"n":1,"blocks":[],"terms":[{"coeff":"1","exp":{"xi_t":1}}]}"#;
        assert!(poly_from_json_str(unknown).is_err());
        let bad_coeff = r#"{"n":1,"terms":[{"coeff":"0.5","exp":{}}]}"#;
        assert!(poly_from_json_str(bad_coeff).is_err());
        let zero_n = r#"{"n":0,"terms":[]}"#;
        assert!(poly_from_json_str(zero_n).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = VarTable::with_xi(1);
        let p = poly_from_text(&t, "1/2*p1*xi_t - xi_q1^2 + 3").unwrap();
        assert_eq!(poly_from_text(&t, &p.to_string()).unwrap(), p);
        assert_eq!(p.len(), 3);
        assert!(poly_from_text(&t, "0").unwrap().is_zero());
        assert!(poly_from_text(&t, "0.5*xi_t").is_err());
        assert!(poly_from_text(&t, "eta_t").is_err());
    }

    #[test]
    fn format_shape() {
        let t = VarTable::with_xi(1);
        let p = Poly::var(&t, t.fv(Block::Xi, Coord::T)).scale(&rat(1, 2));
        let v = poly_to_json(&p);
        assert_eq!(v["blocks"][0], "xi");
        assert_eq!(v["terms"][0]["coeff"], "1/2");
        assert_eq!(v["terms"][0]["exp"]["xi_t"], 1);
    }
}
