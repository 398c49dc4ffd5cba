//! Bundled reference coefficients and the diff against freshly computed values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    run_ft_encoding, run_gate_sequence, run_shor, run_with_perfect_ec, shor_check_acceptances, Method,
    RunSettings,
};
use crate::polynomial::ErrorPolynomial;

const BUNDLED: &str = include_str!("../golden/coefficients.json");

/// One reference polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub name: String,
    /// Published value.
    pub published: String,
    /// Value confirmed by oracle arbitration where it differs from the
    /// published one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arbitrated: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub degree: u32,
    pub entries: Vec<GoldenEntry>,
}

impl GoldenFile {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED).expect("bundled golden file is valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("golden file: {e}")))
    }

    pub fn get(&self, name: &str) -> Option<&GoldenEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Published polynomial for `name`.
    pub fn published(&self, name: &str) -> Result<ErrorPolynomial> {
        let e = self
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("no golden entry {name}")))?;
        ErrorPolynomial::parse(&e.published, self.degree)
    }

    /// Arbitrated polynomial for `name`, falling back to the published one.
    pub fn expected(&self, name: &str) -> Result<ErrorPolynomial> {
        let e = self
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("no golden entry {name}")))?;
        ErrorPolynomial::parse(e.arbitrated.as_deref().unwrap_or(&e.published), self.degree)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Computed equals published.
    Match,
    /// Computed differs from published but equals the arbitrated value.
    Deviation,
    /// Computed equals neither, or the entry is missing.
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffRow {
    pub name: String,
    pub status: Status,
    pub computed: String,
    pub published: String,
    /// `computed − published`.
    pub difference: String,
}

/// Every experiment compared against the golden file, keyed by entry name.
pub fn compute_all(settings: RunSettings) -> Result<BTreeMap<String, ErrorPolynomial>> {
    let mut out = BTreeMap::new();
    for v in 0..=2 {
        let r = run_shor(v, settings)?;
        out.insert(format!("shor_{v}.fidelity"), r.fidelity);
    }
    let checks = shor_check_acceptances(settings)?;
    out.insert("shor_1.acceptance".into(), checks[0].clone());
    out.insert("shor_2.second_check_acceptance".into(), checks[1].clone());
    let ft = run_ft_encoding(settings)?;
    out.insert("ft.seven".into(), ft.seven.fidelity);
    out.insert("ft.single".into(), ft.single.fidelity);
    let gates = run_gate_sequence(settings)?;
    out.insert("gates.seven".into(), gates.seven.fidelity);
    out.insert("gates.single".into(), gates.single.fidelity);
    for (method, key) in [(Method::Ft, "ft_ec"), (Method::Gates, "gates_ec")] {
        let r = run_with_perfect_ec(method, settings)?;
        out.insert(format!("{key}.seven"), r.seven.fidelity);
        out.insert(format!("{key}.single"), r.single.fidelity);
    }
    Ok(out)
}

/// Diffs computed polynomials against `golden`, in golden-file order.
pub fn diff(golden: &GoldenFile, computed: &BTreeMap<String, ErrorPolynomial>) -> Result<Vec<DiffRow>> {
    let mut rows = Vec::with_capacity(golden.entries.len());
    for e in &golden.entries {
        let published = golden.published(&e.name)?;
        let expected = golden.expected(&e.name)?;
        let Some(c) = computed.get(&e.name) else {
            rows.push(DiffRow {
                name: e.name.clone(),
                status: Status::Mismatch,
                computed: "missing".into(),
                published: published.to_string(),
                difference: String::new(),
            });
            continue;
        };
        let c = c.truncate(golden.degree);
        let status = if c == published {
            Status::Match
        } else if c == expected {
            Status::Deviation
        } else {
            Status::Mismatch
        };
        rows.push(DiffRow {
            name: e.name.clone(),
            status,
            computed: c.to_string(),
            published: published.to_string(),
            difference: (&c - &published).to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_parses() {
        let g = GoldenFile::bundled();
        assert_eq!(g.degree, 2);
        for e in &g.entries {
            g.published(&e.name).unwrap();
            g.expected(&e.name).unwrap();
        }
        assert!(g.get("shor_0.fidelity").is_some());
    }

    #[test]
    fn diff_classifies_rows() {
        let g = GoldenFile::from_json(
            r#"{"degree":2,"entries":[
                {"name":"a","published":"1 - x"},
                {"name":"b","published":"1 - x","arbitrated":"1 - 2*x"},
                {"name":"c","published":"1"},
                {"name":"d","published":"1"}]}"#,
        )
        .unwrap();
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), ErrorPolynomial::parse("1 - x", 2).unwrap());
        m.insert("b".to_string(), ErrorPolynomial::parse("1 - 2*x", 2).unwrap());
        m.insert("c".to_string(), ErrorPolynomial::parse("1 + y^2", 2).unwrap());
        let rows = diff(&g, &m).unwrap();
        let st: Vec<_> = rows.iter().map(|r| r.status).collect();
        assert_eq!(st, vec![Status::Match, Status::Deviation, Status::Mismatch, Status::Mismatch]);
        assert_eq!(rows[1].difference, "-px");
    }
}
