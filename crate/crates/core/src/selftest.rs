//! Fixed checks of the worked examples and structural identities. The forms
//! are passed in so that a corrupted constant is caught by name.

use serde::Serialize;

use crate::classswitch::{alpha, phi, psi};
use crate::decompose::{theorem13, verify_certificate, Quad, Witness};
use crate::forms::{image_table, in_q_h, NamedForms, TernaryForm};

const GRID: i64 = 12;
const Q_H_LIMIT: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Published decompositions, each with its witness. The third quadruple is
/// usually quoted as a decomposition of 3999999999; its squares sum to
/// 399999999, which is what is checked here.
pub const WORKED_EXAMPLES: [(u64, [i64; 4], Witness); 5] = [
    (9996, [58, 14, 6, 80], Witness::Square { root: 10 }),
    (99_999_999, [139, 19, 6866, 7269], Witness::Square { root: 14 }),
    (399_999_999, [2347, 18, 12671, 15295], Witness::Square { root: 49 }),
    (99_997, [-98, 34, 119, 274], Witness::PowerOf4 { exponent: 1 }),
    (99_999, [-29, 10, 33, 313], Witness::PowerOf4 { exponent: 0 }),
];

fn grid() -> impl Iterator<Item = [i64; 3]> {
    (-GRID..=GRID)
        .flat_map(|x| (-GRID..=GRID).flat_map(move |y| (-GRID..=GRID).map(move |z| [x, y, z])))
}

fn det(form: &TernaryForm) -> i128 {
    form.det_gram2() / 8
}

pub fn run_selftest(forms: &NamedForms) -> Vec<CheckResult> {
    let mut out = Vec::new();

    for (n, [x, y, z, w], witness) in WORKED_EXAMPLES {
        let q = Quad::new(x, y, z, w);
        let ok = q.norm() == n as u128 && witness.holds(&q);
        out.push(CheckResult::new(
            &format!("example {n}"),
            ok,
            format!("{q}, x+3y = {}", q.linear(3)),
        ));
    }

    // the value the third example is quoted for, certified afresh
    let n = 3_999_999_999;
    out.push(match theorem13(n) {
        Ok(c) => CheckResult::new(
            &format!("example {n}"),
            verify_certificate(&c),
            c.human_line(),
        ),
        Err(e) => CheckResult::new(&format!("example {n}"), false, e.to_string()),
    });

    for (label, form, want) in [("f", forms.f, 100), ("g", forms.g, 100), ("h", forms.h, 25)] {
        let d = det(&form);
        out.push(CheckResult::new(
            &format!("determinant {label}"),
            d == want && d * 8 == form.det_gram2(),
            format!("det = {d}, expected {want}"),
        ));
    }

    let bad = grid().find(|&v| forms.g.eval(alpha(v)) != forms.g.eval(v));
    out.push(CheckResult::new(
        "automorph g",
        bad.is_none(),
        bad.map_or("grid ok".into(), |v| format!("fails at {v:?}")),
    ));

    let bad = grid().find(|&v| match phi(v) {
        Some(u) => forms.g.eval(u) != forms.f.eval(v) || psi(u) != Some(v),
        None => (v[0] - v[1] - v[2]).rem_euclid(2) == 0,
    });
    out.push(CheckResult::new(
        "isometry f to g",
        bad.is_none(),
        bad.map_or("grid ok".into(), |v| format!("fails at {v:?}")),
    ));

    let bad = grid().find(|&v| match psi(v) {
        Some(u) => forms.f.eval(u) != forms.g.eval(v) || phi(u) != Some(v),
        None => (v[1] - v[2]).rem_euclid(2) == 0,
    });
    out.push(CheckResult::new(
        "isometry g to f",
        bad.is_none(),
        bad.map_or("grid ok".into(), |v| format!("fails at {v:?}")),
    ));

    out.push(match image_table(&forms.h, Q_H_LIMIT) {
        Ok(table) => {
            let bad = (0..=Q_H_LIMIT).find(|&n| table[n as usize] != in_q_h(n));
            CheckResult::new(
                "value set of h",
                bad.is_none(),
                bad.map_or(format!("closed form exact to {Q_H_LIMIT}"), |n| {
                    format!("disagrees at {n}")
                }),
            )
        }
        Err(e) => CheckResult::new("value set of h", false, e.to_string()),
    });

    // 10*1 - 2^2 = 6 is the known gap in the ternary existence statement.
    out.push(match image_table(&forms.f, 10) {
        Ok(table) => CheckResult::new(
            "gap at 6 for f",
            !table[6] && table[9] && table[10] && table[1],
            "6 unrepresented, neighbours 1, 9, 10 represented",
        ),
        Err(e) => CheckResult::new("gap at 6 for f", false, e.to_string()),
    });

    out
}

pub fn all_pass(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_forms_pass() {
        let results = run_selftest(&NamedForms::default());
        for r in &results {
            assert!(r.pass, "{}: {}", r.name, r.detail);
        }
        assert!(results.len() >= 12);
    }

    #[test]
    fn tampered_f_fails_by_name() {
        let forms = NamedForms {
            f: TernaryForm::new_unchecked(1, 10, 11, 0, 0, 0),
            ..NamedForms::default()
        };
        let failed: Vec<String> = run_selftest(&forms)
            .into_iter()
            .filter(|r| !r.pass)
            .map(|r| r.name)
            .collect();
        assert!(failed.contains(&"determinant f".to_string()));
        assert!(failed.contains(&"isometry f to g".to_string()));
        assert!(!failed.iter().any(|n| n.starts_with("example")));
    }

    #[test]
    fn tampered_h_fails() {
        let forms = NamedForms {
            h: TernaryForm::new_unchecked(1, 5, 6, 0, 0, 0),
            ..NamedForms::default()
        };
        let failed: Vec<String> = run_selftest(&forms)
            .into_iter()
            .filter(|r| !r.pass)
            .map(|r| r.name)
            .collect();
        assert!(failed.contains(&"value set of h".to_string()));
    }
}
