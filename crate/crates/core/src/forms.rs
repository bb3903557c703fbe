//! Integral positive definite ternary quadratic forms and representation
//! solvers.
//!
//! A form `aX^2 + bY^2 + cZ^2 + rYZ + sZX + tXY` is stored by its six
//! coefficients. Its doubled Gram matrix is
//!
//! ```text
//! | 2a  t   s  |
//! | t   2b  r  |
//! | s   r   2c |
//! ```
//!
//! so that `f(v) = v^T * gram2 * v / 2`.
//!
//! Three forms are named: [`F`] = `x^2+10y^2+10z^2`, [`G`] =
//! `4x^2+5y^2+6z^2+4zx` (the other class in the genus of `F`) and [`H`] =
//! `x^2+5y^2+5z^2`.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::arith::{div_ceil, div_floor, exact_sqrt, is_square, isqrt, isqrt_u128, strip_fours};
use crate::error::{Error, Result};

/// Default cap on `N` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// Below this bound [`two_squares`] enumerates directly.
const TWO_SQUARES_ENUM_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TernaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub r: i64,
    pub s: i64,
    pub t: i64,
}

/// `x^2 + 10y^2 + 10z^2`.
pub const F: TernaryForm = TernaryForm::new_unchecked(1, 10, 10, 0, 0, 0);
/// `4x^2 + 5y^2 + 6z^2 + 4zx`.
pub const G: TernaryForm = TernaryForm::new_unchecked(4, 5, 6, 0, 4, 0);
/// `x^2 + 5y^2 + 5z^2`.
pub const H: TernaryForm = TernaryForm::new_unchecked(1, 5, 5, 0, 0, 0);

/// The three named forms, bundled so that callers (the self-test in
/// particular) can substitute their own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NamedForms {
    pub f: TernaryForm,
    pub g: TernaryForm,
    pub h: TernaryForm,
}

impl Default for NamedForms {
    fn default() -> Self {
        NamedForms { f: F, g: G, h: H }
    }
}

impl TernaryForm {
    pub const fn new_unchecked(a: i64, b: i64, c: i64, r: i64, s: i64, t: i64) -> Self {
        TernaryForm { a, b, c, r, s, t }
    }

    /// Builds a form, rejecting anything that is not positive definite.
    pub fn new(a: i64, b: i64, c: i64, r: i64, s: i64, t: i64) -> Result<Self> {
        let form = Self::new_unchecked(a, b, c, r, s, t);
        form.check_positive_definite()?;
        Ok(form)
    }

    pub fn check_positive_definite(&self) -> Result<()> {
        let g = self.gram2();
        let m1 = g[0][0] as i128;
        let m2 = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) as i128;
        let m3 = self.det_gram2();
        if m1 > 0 && m2 > 0 && m3 > 0 {
            Ok(())
        } else {
            Err(Error::InvalidForm(format!(
                "{self:?} is not positive definite (minors {m1}, {m2}, {m3})"
            )))
        }
    }

    /// Doubled Gram matrix `2 * M_f`.
    pub fn gram2(&self) -> [[i64; 3]; 3] {
        [
            [2 * self.a, self.t, self.s],
            [self.t, 2 * self.b, self.r],
            [self.s, self.r, 2 * self.c],
        ]
    }

    /// `det(gram2)`; the determinant of `M_f` is this divided by 8.
    pub fn det_gram2(&self) -> i128 {
        let g = self.gram2().map(|row| row.map(|v| v as i128));
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }

    pub fn is_diagonal(&self) -> bool {
        self.r == 0 && self.s == 0 && self.t == 0
    }

    /// Exact value of the form at `v`.
    pub fn eval(&self, v: [i64; 3]) -> i128 {
        let [x, y, z] = v.map(|c| c as i128);
        self.a as i128 * x * x
            + self.b as i128 * y * y
            + self.c as i128 * z * z
            + self.r as i128 * y * z
            + self.s as i128 * z * x
            + self.t as i128 * x * y
    }

    /// `v^T * gram2 * v / 2`; agrees with [`eval`](Self::eval).
    pub fn eval_via_gram(&self, v: [i64; 3]) -> i128 {
        let g = self.gram2();
        let mut acc = 0i128;
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] as i128 * g[i][j] as i128 * v[j] as i128;
            }
        }
        acc / 2
    }

    /// Value of the form modulo `m`, for residues `0 <= v_i < m`.
    pub(crate) fn eval_mod(&self, v: [u64; 3], m: u64) -> u64 {
        let value = self.eval(v.map(|c| c as i64));
        value.rem_euclid(m as i128) as u64
    }

    /// Visits every representation of `n` in canonical order until `visit`
    /// breaks. The order is: `|z|` ascending, then `|y|` ascending, each
    /// magnitude with its non-negative sign first, then the solutions for
    /// `x` ordered the same way.
    fn scan<B>(&self, n: u64, mut visit: impl FnMut(Rep3) -> ControlFlow<B>) -> Option<B> {
        if self.is_diagonal() {
            self.scan_diagonal(n, &mut visit)
        } else {
            self.scan_general(n, &mut visit)
        }
    }

    fn scan_diagonal<B>(
        &self,
        n: u64,
        visit: &mut impl FnMut(Rep3) -> ControlFlow<B>,
    ) -> Option<B> {
        let (a, b, c) = (self.a as u64, self.b as u64, self.c as u64);
        let z_max = isqrt(n / c);
        for zm in 0..=z_max {
            let after_z = n - c * zm * zm;
            let y_max = isqrt(after_z / b);
            for ym in 0..=y_max {
                let rem = after_z - b * ym * ym;
                if rem % a != 0 {
                    continue;
                }
                let Some(xm) = exact_sqrt(rem / a) else {
                    continue;
                };
                for z in signed(zm) {
                    for y in signed(ym) {
                        for x in signed(xm) {
                            let rep = Rep3 {
                                x,
                                y,
                                z,
                                value: n,
                                form: *self,
                            };
                            if let ControlFlow::Break(out) = visit(rep) {
                                return Some(out);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn scan_general<B>(
        &self,
        n: u64,
        visit: &mut impl FnMut(Rep3) -> ControlFlow<B>,
    ) -> Option<B> {
        let (a, b, c, r, s, t) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.r as i128,
            self.s as i128,
            self.t as i128,
        );
        let n128 = n as i128;
        let det = self.det_gram2();
        // max z^2 over the ellipsoid f <= n is 2n * adj(gram2)_zz / det(gram2)
        let adj_zz = 4 * a * b - t * t;
        let z_max = isqrt_u128((2 * n128 * adj_zz / det) as u128) as i128;
        // after minimising over x: A y^2 + B y + C <= 0
        let big_a = 4 * a * b - t * t;
        for zm in 0..=z_max {
            for z in signed_i128(zm) {
                let big_b = (4 * a * r - 2 * s * t) * z;
                let big_c = (4 * a * c - s * s) * z * z - 4 * a * n128;
                let disc = big_b * big_b - 4 * big_a * big_c;
                if disc < 0 {
                    continue;
                }
                let q = isqrt_u128(disc as u128) as i128;
                let y_lo = div_ceil(-big_b - q - 1, 2 * big_a);
                let y_hi = div_floor(-big_b + q + 1, 2 * big_a);
                let y_mag_max = y_lo.abs().max(y_hi.abs());
                for ym in 0..=y_mag_max {
                    for y in signed_i128(ym) {
                        if y < y_lo || y > y_hi {
                            continue;
                        }
                        let lin = s * z + t * y;
                        let cst = b * y * y + c * z * z + r * y * z - n128;
                        let d = lin * lin - 4 * a * cst;
                        let Some(root) = is_square(d) else {
                            continue;
                        };
                        let root = root as i128;
                        let mut xs: Vec<i128> = [-lin + root, -lin - root]
                            .into_iter()
                            .filter(|num| num.rem_euclid(2 * a) == 0)
                            .map(|num| num / (2 * a))
                            .collect();
                        xs.sort_by_key(|&x| (x.abs(), x < 0));
                        xs.dedup();
                        for x in xs {
                            let rep = Rep3 {
                                x: x as i64,
                                y: y as i64,
                                z: z as i64,
                                value: n,
                                form: *self,
                            };
                            debug_assert!(rep.is_valid());
                            if let ControlFlow::Break(out) = visit(rep) {
                                return Some(out);
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

fn signed(m: u64) -> impl Iterator<Item = i64> {
    let m = m as i64;
    std::iter::once(m).chain((m != 0).then_some(-m))
}

fn signed_i128(m: i128) -> impl Iterator<Item = i128> {
    std::iter::once(m).chain((m != 0).then_some(-m))
}

/// A triple `(x, y, z)` with `form(x, y, z) = value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rep3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub value: u64,
    pub form: TernaryForm,
}

impl Rep3 {
    pub fn triple(&self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_valid(&self) -> bool {
        self.form.eval(self.triple()) == self.value as i128
    }
}

/// First representation of `n` by `form` (in canonical order) that
/// satisfies `accept`.
pub fn represent_first(
    form: &TernaryForm,
    n: u64,
    mut accept: impl FnMut(&Rep3) -> bool,
) -> Option<Rep3> {
    form.scan(n, |rep| {
        if accept(&rep) {
            ControlFlow::Break(rep)
        } else {
            ControlFlow::Continue(())
        }
    })
}

/// All representations of `n` by `form`, in canonical order.
pub fn represent_all(form: &TernaryForm, n: u64) -> Result<Vec<Rep3>> {
    represent_all_capped(form, n, DEFAULT_ENUMERATION_CAP)
}

pub fn represent_all_capped(form: &TernaryForm, n: u64, cap: u64) -> Result<Vec<Rep3>> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "representation enumeration",
            value: n as u128,
            cap: cap as u128,
        });
    }
    let mut out = Vec::new();
    form.scan::<()>(n, |rep| {
        out.push(rep);
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// `table[v]` is true iff `v` is represented by `form`, for `v <= limit`.
/// Computed by direct enumeration of every lattice point in the ellipsoid.
pub fn image_table(form: &TernaryForm, limit: u64) -> Result<Vec<bool>> {
    if limit > DEFAULT_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "image table",
            value: limit as u128,
            cap: DEFAULT_ENUMERATION_CAP as u128,
        });
    }
    let mut table = vec![false; limit as usize + 1];
    let lim = limit as i128;
    let det = form.det_gram2();
    let g = form.gram2();
    let bound = |adj: i64| isqrt_u128((2 * lim * adj as i128 / det) as u128) as i64;
    let x_max = bound(g[1][1] * g[2][2] - g[1][2] * g[1][2]);
    let y_max = bound(g[0][0] * g[2][2] - g[0][2] * g[0][2]);
    let z_max = bound(g[0][0] * g[1][1] - g[0][1] * g[0][1]);
    let diagonal = form.is_diagonal();
    let range = |m: i64| if diagonal { 0..=m } else { -m..=m };
    for z in range(z_max) {
        for y in range(y_max) {
            for x in range(x_max) {
                let v = form.eval([x, y, z]);
                if v <= lim {
                    table[v as usize] = true;
                }
            }
        }
    }
    Ok(table)
}

/// Membership in the value set of `x^2 + 5y^2 + 5z^2`: `n` is represented
/// iff `n` is not `±2 (mod 5)` and not of the shape `4^k (8l + 7)`.
pub fn in_q_h(n: u64) -> bool {
    if n == 0 {
        return true;
    }
    if matches!(n % 5, 2 | 3) {
        return false;
    }
    strip_fours(n) % 8 != 7
}

/// `(z, w)` with `z <= w` and `z^2 + w^2 = n`, smallest `z` first.
pub fn two_squares(n: u64) -> Option<(u64, u64)> {
    if n < TWO_SQUARES_ENUM_LIMIT {
        two_squares_enumerate(n)
    } else {
        two_squares_factor(n)
    }
}

pub(crate) fn two_squares_enumerate(n: u64) -> Option<(u64, u64)> {
    let mut z = 0u64;
    while 2 * z * z <= n {
        if let Some(w) = exact_sqrt(n - z * z) {
            return Some((z, w));
        }
        z += 1;
    }
    None
}

/// Builds every representation from the Gaussian factorisation of `n` and
/// keeps the one with the smallest `z`.
pub(crate) fn two_squares_factor(n: u64) -> Option<(u64, u64)> {
    if n == 0 {
        return Some((0, 0));
    }
    let mut m = n;
    let twos = m.trailing_zeros();
    m >>= twos;
    let mut scalar: u128 = 1;
    let mut split: Vec<(u64, u32)> = Vec::new();
    let mut p = 3u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if p % 4 == 3 {
                if e % 2 == 1 {
                    return None;
                }
                scalar *= (p as u128).pow(e / 2);
            } else {
                split.push((p, e));
            }
        }
        p += 2;
    }
    if m > 1 {
        if m % 4 == 3 {
            return None;
        }
        split.push((m, 1));
    }

    // (1 + i)^twos
    let mut base = Gaussian(1, 0);
    for _ in 0..twos {
        base = base.mul(Gaussian(1, 1));
    }
    base = base.scale(scalar as i128);

    let mut candidates = vec![base];
    for &(p, e) in &split {
        let (u, v) = prime_as_two_squares(p);
        let pi = Gaussian(u as i128, v as i128);
        let pi_bar = Gaussian(u as i128, -(v as i128));
        let mut next = Vec::with_capacity(candidates.len() * (e as usize + 1));
        for j in 0..=e {
            let mut factor = Gaussian(1, 0);
            for _ in 0..j {
                factor = factor.mul(pi);
            }
            for _ in j..e {
                factor = factor.mul(pi_bar);
            }
            next.extend(candidates.iter().map(|c| c.mul(factor)));
        }
        candidates = next;
    }
    candidates
        .into_iter()
        .map(|g| {
            let (re, im) = (g.0.unsigned_abs() as u64, g.1.unsigned_abs() as u64);
            (re.min(im), re.max(im))
        })
        .min()
}

#[derive(Clone, Copy, Debug)]
struct Gaussian(i128, i128);

impl Gaussian {
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }

    fn scale(self, k: i128) -> Gaussian {
        Gaussian(self.0 * k, self.1 * k)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `(u, v)` with `u^2 + v^2 = p` for a prime `p = 1 (mod 4)`, via a square
/// root of -1 and the Euclidean descent.
fn prime_as_two_squares(p: u64) -> (u64, u64) {
    debug_assert!(p % 4 == 1);
    let mut root = 0;
    for c in 2..p {
        // c is a non-residue iff c^((p-1)/2) = -1
        if pow_mod(c, (p - 1) / 2, p) == p - 1 {
            root = pow_mod(c, (p - 1) / 4, p);
            break;
        }
    }
    let limit = isqrt(p);
    let (mut r0, mut r1) = (p, root);
    while r1 > limit {
        (r0, r1) = (r1, r0 % r1);
    }
    let _ = r0;
    let rest = p - r1 * r1;
    let other = exact_sqrt(rest).expect("descent yields a representation for p = 1 mod 4");
    (r1, other)
}
