//! Explicit maps between representations by `G` and by `F`.
//!
//! * `alpha(x, y, z) = (x + z, y, -z)` is an automorph of `G`.
//! * `phi(X, Y, Z) = ((X - Y - Z)/2, Z - Y, Y + Z)` satisfies
//!   `G(phi(v)) = F(v)` whenever `X = Y + Z (mod 2)`.
//! * `psi = phi^-1`, `psi(x, y, z) = (2x + z, (z - y)/2, (y + z)/2)`, is
//!   integral iff `y = z (mod 2)`.
//!
//! The maps carry rational matrices with denominator 2, applied only where
//! the result is integral.

use serde::Serialize;

use crate::forms::{TernaryForm, F, G};

/// Default number of alpha iterates explored by [`try_switch_to_f`].
pub const DEFAULT_SWITCH_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchName {
    AutomorphAlpha,
    IsoForwardPhi,
    IsoBackwardPsi,
}

/// A linear map `v -> (numer * v) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwitchMap {
    pub name: SwitchName,
    pub numer: [[i64; 3]; 3],
}

pub const ALPHA: SwitchMap = SwitchMap {
    name: SwitchName::AutomorphAlpha,
    numer: [[2, 0, 2], [0, 2, 0], [0, 0, -2]],
};

pub const PHI: SwitchMap = SwitchMap {
    name: SwitchName::IsoForwardPhi,
    numer: [[1, -1, -1], [0, -2, 2], [0, 2, 2]],
};

pub const PSI: SwitchMap = SwitchMap {
    name: SwitchName::IsoBackwardPsi,
    numer: [[4, 0, 2], [0, -1, 1], [0, 1, 1]],
};

impl SwitchMap {
    /// Image of `v`, or `None` when it is not integral.
    pub fn apply(&self, v: [i64; 3]) -> Option<[i64; 3]> {
        let mut out = [0i64; 3];
        for (o, row) in out.iter_mut().zip(&self.numer) {
            let num: i64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            if num % 2 != 0 {
                return None;
            }
            *o = num / 2;
        }
        Some(out)
    }

    /// Source and target forms of the map.
    pub fn forms(&self) -> (TernaryForm, TernaryForm) {
        match self.name {
            SwitchName::AutomorphAlpha => (G, G),
            SwitchName::IsoForwardPhi => (F, G),
            SwitchName::IsoBackwardPsi => (G, F),
        }
    }
}

pub fn alpha(v: [i64; 3]) -> [i64; 3] {
    let [x, y, z] = v;
    [x + z, y, -z]
}

pub fn phi(v: [i64; 3]) -> Option<[i64; 3]> {
    PHI.apply(v)
}

pub fn psi(v: [i64; 3]) -> Option<[i64; 3]> {
    PSI.apply(v)
}

/// Best-effort conversion of a `G`-representation into an `F`-representation
/// of the same value. Tries `psi` on the orbit of `v` under `alpha`, the sign
/// change of `y` and global negation, up to `depth` alpha steps.
///
/// `alpha` fixes `y` and negates `z`, so `y - z (mod 2)` is constant on the
/// orbit; when it is odd no attempt can succeed even if the value lies in
/// the image of `F`.
pub fn try_switch_to_f(v: [i64; 3]) -> Option<[i64; 3]> {
    try_switch_to_f_with_depth(v, DEFAULT_SWITCH_DEPTH)
}

pub fn try_switch_to_f_with_depth(v: [i64; 3], depth: usize) -> Option<[i64; 3]> {
    let target = G.eval(v);
    let mut frontier = vec![v];
    let mut seen = vec![v];
    for step in 0..=depth {
        for &w in &frontier {
            if let Some(out) = psi(w) {
                debug_assert_eq!(F.eval(out), target);
                return Some(out);
            }
        }
        if step == depth {
            break;
        }
        let mut next = Vec::new();
        for &w in &frontier {
            let [x, y, z] = w;
            for cand in [alpha(w), [x, -y, z], [-x, -y, -z]] {
                if !seen.contains(&cand) {
                    seen.push(cand);
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::represent_all;

    fn grid() -> impl Iterator<Item = [i64; 3]> {
        (-20i64..=20).flat_map(|x| (-20i64..=20).flat_map(move |y| (-20i64..=20).map(move |z| [x, y, z])))
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha([1, 1, 0]), [1, 1, 0]);
        assert_eq!(alpha([0, 1, 1]), [1, 1, -1]);
        assert_eq!(G.eval([1, 1, -1]), 11);
        assert_eq!(alpha([0, 0, 1]), [1, 0, -1]);
        assert_eq!(ALPHA.apply([0, 0, 1]), Some([1, 0, -1]));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi([1, 0, 1]), Some([0, 1, 1]));
        assert_eq!(G.eval([0, 1, 1]), F.eval([1, 0, 1]));
        assert_eq!(phi([3, 0, 0]), None);
        assert_eq!(phi([0, 0, 0]), Some([0, 0, 0]));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi([0, 1, 1]), Some([1, 0, 1]));
        assert_eq!(psi([1, 1, 0]), None);
        assert_eq!(psi([0, 0, 0]), Some([0, 0, 0]));
    }

    #[test]
    fn switch_examples() {
        let out = try_switch_to_f([0, 1, 1]).unwrap();
        assert_eq!(F.eval(out), 11);
        assert_eq!(try_switch_to_f([0, 0, 1]), None);
        assert!(represent_all(&F, 6).unwrap().is_empty());
        assert_eq!(try_switch_to_f([1, 1, 0]), None);
        assert!(!represent_all(&F, 9).unwrap().is_empty());
    }

    #[test]
    fn identities_on_grid() {
        for v in grid() {
            assert_eq!(G.eval(alpha(v)), G.eval(v));
            let [x, y, z] = v;
            assert_eq!((y - z).rem_euclid(2), (alpha(v)[1] - alpha(v)[2]).rem_euclid(2));
            match phi(v) {
                Some(w) => {
                    assert_eq!((x - y - z).rem_euclid(2), 0);
                    assert_eq!(G.eval(w), F.eval(v));
                    assert_eq!(psi(w), Some(v));
                }
                None => assert_ne!((x - y - z).rem_euclid(2), 0),
            }
            match psi(v) {
                Some(w) => {
                    assert_eq!((y - z).rem_euclid(2), 0);
                    assert_eq!(F.eval(w), G.eval(v));
                    assert_eq!(phi(w), Some(v));
                }
                None => assert_ne!((y - z).rem_euclid(2), 0),
            }
            if let Some(w) = try_switch_to_f(v) {
                assert_eq!(F.eval(w), G.eval(v));
            }
        }
    }

    #[test]
    fn map_forms() {
        for map in [ALPHA, PHI, PSI] {
            let (src, dst) = map.forms();
            for v in grid().step_by(97) {
                if let Some(w) = map.apply(v) {
                    assert_eq!(dst.eval(w), src.eval(v));
                }
            }
        }
    }
}
