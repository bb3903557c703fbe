//! Finite, checkable consequences of local representability.
//!
//! Nothing here manipulates p-adic numbers. Each predicate reduces a local
//! statement to a congruence modulo a fixed modulus and decides it by
//! exhaustion, returning the witness it found.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith::ord2;
use crate::error::{Error, Result};
use crate::forms::{TernaryForm, F, G, H};

/// Modulus cap for diagonal forms.
pub const DIAGONAL_MODULUS_CAP: u64 = 1 << 24;
/// Modulus cap for forms with one variable decoupled from the other two.
pub const SPLIT_MODULUS_CAP: u64 = 1 << 12;
/// Modulus cap for forms needing a full triple enumeration.
pub const GENERAL_MODULUS_CAP: u64 = 1 << 8;
/// Largest prime accepted by [`unimodular_all_residues`].
pub const UNIMODULAR_PRIME_CAP: u64 = 10_000;

/// Above this length sumsets go through the FFT.
const DIRECT_SUMSET_LIMIT: usize = 256;

/// Outcome of one local check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalReport {
    pub prime: u64,
    pub value: u64,
    pub represented: bool,
    pub modulus: u64,
    pub witness: Option<[u64; 3]>,
    pub note: String,
}

/// A triple of residues mod `m` on which `form` takes the value `n mod m`.
pub fn represents_mod(form: &TernaryForm, n: u64, m: u64) -> Result<Option<[u64; 3]>> {
    if m == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let target = n % m;
    if form.is_diagonal() {
        check_cap(m, DIAGONAL_MODULUS_CAP)?;
        return Ok(diagonal_represents_mod(
            [form.a, form.b, form.c],
            target,
            m,
        ));
    }
    if let Some(free) = decoupled_variable(form) {
        check_cap(m, SPLIT_MODULUS_CAP)?;
        return Ok(split_represents_mod(form, free, target, m));
    }
    check_cap(m, GENERAL_MODULUS_CAP)?;
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if form.eval_mod([x, y, z], m) == target {
                    return Ok(Some([x, y, z]));
                }
            }
        }
    }
    Ok(None)
}

fn check_cap(m: u64, cap: u64) -> Result<()> {
    if m > cap {
        Err(Error::CapExceeded {
            what: "local modulus",
            value: m as u128,
            cap: cap as u128,
        })
    } else {
        Ok(())
    }
}

/// `rep[v] = Some(x)` for the least `x` with `coef * x^2 = v (mod m)`.
/// `(m - x)^2 = x^2`, so `x <= m/2` suffices.
fn square_classes(coef: i64, m: u64) -> Vec<Option<u64>> {
    let mut rep = vec![None; m as usize];
    let coef = coef.rem_euclid(m as i64) as u128;
    for x in 0..=m / 2 {
        let v = (coef * (x as u128 * x as u128) % m as u128) as usize;
        rep[v].get_or_insert(x);
    }
    rep
}

fn diagonal_represents_mod(coefs: [i64; 3], target: u64, m: u64) -> Option<[u64; 3]> {
    let [sx, sy, sz] = coefs.map(|c| square_classes(c, m));
    let ind = |s: &[Option<u64>]| s.iter().map(Option::is_some).collect::<Vec<_>>();
    let pair = cyclic_sumset(&ind(&sx), &ind(&sy));
    pair_plus_single(&pair, &sx, &sy, &sz, target, m)
}

/// Completes `target = p + u (mod m)` with `p` in the sumset of the first two
/// class tables and `u` in the third, recovering the witness.
fn pair_plus_single(
    pair: &[bool],
    s1: &[Option<u64>],
    s2: &[Option<u64>],
    s3: &[Option<u64>],
    target: u64,
    m: u64,
) -> Option<[u64; 3]> {
    let mu = m as usize;
    let t = target as usize;
    for (u, z) in s3.iter().enumerate() {
        let Some(z) = z else { continue };
        let need = (t + mu - u) % mu;
        if !pair[need] {
            continue;
        }
        for (a, x) in s1.iter().enumerate() {
            let Some(x) = x else { continue };
            if let Some(y) = s2[(need + mu - a) % mu] {
                return Some([*x, y, *z]);
            }
        }
        unreachable!("sumset entry without a decomposition");
    }
    None
}

/// Characteristic vector of `{a + b mod m}`.
pub(crate) fn cyclic_sumset(a: &[bool], b: &[bool]) -> Vec<bool> {
    assert_eq!(a.len(), b.len());
    if a.len() <= DIRECT_SUMSET_LIMIT {
        cyclic_sumset_direct(a, b)
    } else {
        cyclic_sumset_fft(a, b)
    }
}

pub(crate) fn cyclic_sumset_direct(a: &[bool], b: &[bool]) -> Vec<bool> {
    let m = a.len();
    let mut out = vec![false; m];
    for (i, _) in a.iter().enumerate().filter(|(_, &on)| on) {
        for (j, _) in b.iter().enumerate().filter(|(_, &on)| on) {
            out[(i + j) % m] = true;
        }
    }
    out
}

/// Boolean cyclic convolution through a complex FFT of length `m`. Counts
/// are at most `m <= 2^24`, far inside f64 precision, so thresholding at
/// one half is exact.
pub(crate) fn cyclic_sumset_fft(a: &[bool], b: &[bool]) -> Vec<bool> {
    let m = a.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let lift = |v: &[bool]| -> Vec<Complex<f64>> {
        v.iter()
            .map(|&on| Complex::new(if on { 1.0 } else { 0.0 }, 0.0))
            .collect()
    };
    let mut fa = lift(a);
    let mut fb = lift(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = m as f64;
    fa.iter().map(|c| c.re / scale > 0.5).collect()
}

/// Index of a variable with no cross term, if any.
fn decoupled_variable(form: &TernaryForm) -> Option<usize> {
    if form.s == 0 && form.t == 0 {
        Some(0)
    } else if form.r == 0 && form.t == 0 {
        Some(1)
    } else if form.r == 0 && form.s == 0 {
        Some(2)
    } else {
        None
    }
}

fn split_represents_mod(
    form: &TernaryForm,
    free: usize,
    target: u64,
    m: u64,
) -> Option<[u64; 3]> {
    let coef = [form.a, form.b, form.c][free];
    let free_classes = square_classes(coef, m);
    let others: Vec<usize> = (0..3).filter(|&i| i != free).collect();
    let mu = m as usize;
    // value of the binary part on (v_i, v_j), least pair first
    let mut pair_rep: Vec<Option<(u64, u64)>> = vec![None; mu];
    for p in 0..m {
        for q in 0..m {
            let mut v = [0u64; 3];
            v[others[0]] = p;
            v[others[1]] = q;
            let val = form.eval_mod(v, m) as usize;
            pair_rep[val].get_or_insert((p, q));
        }
    }
    for (u, w) in free_classes.iter().enumerate() {
        let Some(w) = w else { continue };
        let need = (target as usize + mu - u) % mu;
        if let Some((p, q)) = pair_rep[need] {
            let mut v = [0u64; 3];
            v[free] = *w;
            v[others[0]] = p;
            v[others[1]] = q;
            return Some(v);
        }
    }
    None
}

/// Two-adic test: `n` is represented over the 2-adic integers iff the form
/// hits `n` modulo `2^(r+1)` where `r = ord2(4n)`.
pub fn jones_2adic(form: &TernaryForm, n: u64) -> Result<LocalReport> {
    let r = ord2(n)? + 2;
    let modulus = 1u64 << (r + 1);
    let witness = represents_mod(form, n, modulus)?;
    Ok(LocalReport {
        prime: 2,
        value: n,
        represented: witness.is_some(),
        modulus,
        witness,
        note: format!("solvable mod 2^{} (r = ord2(4n) = {r})", r + 1),
    })
}

/// For `5 ∤ n`: `n` is represented by `x^2+10y^2+10z^2` over the 5-adic
/// integers iff `n = ±1 (mod 5)`. The `y`, `z` terms vanish mod 5, so `x^2`
/// carries the unit, and any unit square mod 5 lifts.
pub fn five_adic_unit_represents_f(n: u64) -> Result<bool> {
    if n % 5 == 0 {
        return Err(Error::Precondition(format!(
            "{n} is not a 5-adic unit"
        )));
    }
    Ok(matches!(n % 5, 1 | 4))
}

/// Every residue mod `p` is taken by `form` at a point where the gradient
/// is nonzero mod `p`, so every value lifts to the p-adic integers.
pub fn unimodular_all_residues(form: &TernaryForm, p: u64) -> Result<bool> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    if p > UNIMODULAR_PRIME_CAP {
        return Err(Error::CapExceeded {
            what: "unimodularity prime",
            value: p as u128,
            cap: UNIMODULAR_PRIME_CAP as u128,
        });
    }
    if form.det_gram2() % p as i128 == 0 {
        return Err(Error::Precondition(format!(
            "{p} divides the determinant of {form:?}"
        )));
    }
    let g = form.gram2();
    let pi = p as i128;
    let mut seen = vec![false; p as usize];
    let mut remaining = p;
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                let v = [x as i128, y as i128, z as i128];
                let singular = g.iter().all(|row| {
                    let dot: i128 = row.iter().zip(&v).map(|(&gij, &vj)| gij as i128 * vj).sum();
                    dot.rem_euclid(pi) == 0
                });
                if singular {
                    continue;
                }
                let val = form.eval_mod([x, y, z], p) as usize;
                if !seen[val] {
                    seen[val] = true;
                    remaining -= 1;
                    if remaining == 0 {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Witnesses that every odd residue class mod 8 is a value of
/// `2x^2 + 5y^2 + 5z^2` with `y` or `z` odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoAdicUnitsFact {
    pub holds: bool,
    /// `(class, witness)` for each odd class mod 8 that was attained.
    pub witnesses: Vec<(u64, [u64; 3])>,
}

/// With `y` odd the partial derivative `10y` has 2-adic order exactly 1, so
/// agreement mod 8 lifts to a 2-adic solution; the same holds for `z`.
pub fn verify_two_adic_units_fact() -> TwoAdicUnitsFact {
    let mut witnesses = Vec::new();
    for class in [1u64, 3, 5, 7] {
        let found = (0..8u64)
            .flat_map(|x| (0..8u64).flat_map(move |y| (0..8u64).map(move |z| [x, y, z])))
            .find(|&[x, y, z]| {
                (y % 2 == 1 || z % 2 == 1) && (2 * x * x + 5 * y * y + 5 * z * z) % 8 == class
            });
        if let Some(w) = found {
            witnesses.push((class, w));
        }
    }
    TwoAdicUnitsFact {
        holds: witnesses.len() == 4,
        witnesses,
    }
}

/// Local report for `n` against `F` at the primes where a finite check
/// exists: 2 always, 5 when `5 ∤ n`.
pub fn local_certificate_f(n: u64) -> Result<Vec<LocalReport>> {
    let mut reports = vec![jones_2adic(&F, n)?];
    if n % 5 != 0 {
        let represented = five_adic_unit_represents_f(n)?;
        reports.push(LocalReport {
            prime: 5,
            value: n,
            represented,
            modulus: 5,
            witness: None,
            note: "5-adic unit: needs n = ±1 (mod 5)".into(),
        });
    }
    Ok(reports)
}

/// Local report for any form. `G` shares its genus with `F`, so the two get
/// the same report; `H` has the same 5-adic unit condition as `F`; other
/// forms get the 2-adic check only.
pub fn local_certificate(form: &TernaryForm, n: u64) -> Result<Vec<LocalReport>> {
    if *form == F || *form == G {
        return local_certificate_f(n);
    }
    let mut reports = vec![jones_2adic(form, n)?];
    if *form == H && n % 5 != 0 {
        reports.push(LocalReport {
            prime: 5,
            value: n,
            represented: matches!(n % 5, 1 | 4),
            modulus: 5,
            witness: None,
            note: "5-adic unit: needs n = ±1 (mod 5)".into(),
        });
    }
    Ok(reports)
}
