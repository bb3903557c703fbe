use proptest::prelude::*;

use foursq::arith::{is_power_of_4, is_square, isqrt, ord2, strip_fours};
use foursq::classswitch::{alpha, phi, psi};
use foursq::decompose::{
    theorem13, theorem14, verify_certificate, Certificate, Method, Quad, Transform, Witness,
};
use foursq::forms::{two_squares, F, G, H};

fn scaled(c: &Certificate, k: i64, witness: Witness) -> Certificate {
    Certificate {
        n: c.n * (k * k) as u64,
        quad: c.quad.scale(k),
        witness,
        natural: c.natural,
        method: Method::Recursive {
            child: Box::new(c.clone()),
            transform: Transform::Scale(k),
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn isqrt_brackets(n in 0u64..(1 << 62)) {
        let r = isqrt(n) as u128;
        prop_assert!(r * r <= n as u128);
        prop_assert!((r + 1) * (r + 1) > n as u128);
    }

    #[test]
    fn squares_and_powers_recognised(k in 0u64..(1 << 30)) {
        let sq = k as i128 * k as i128;
        prop_assert_eq!(is_square(sq), Some(k));
        if sq > 1 {
            prop_assert_eq!(is_square(sq + 1), None);
        }
        let e = (k % 31) as u32;
        prop_assert_eq!(is_power_of_4(1i128 << (2 * e)), Some(e));
        prop_assert_eq!(is_power_of_4(2i128 << (2 * e)), None);
    }

    #[test]
    fn strip_fours_and_ord2(n in 1u64..(1 << 50)) {
        let s = strip_fours(n);
        prop_assert!(s % 4 != 0);
        prop_assert_eq!(n % s, 0);
        prop_assert!(is_power_of_4((n / s) as i128).is_some());
        let k = ord2(n).unwrap();
        prop_assert_eq!((n >> k) % 2, 1);
    }

    #[test]
    fn two_squares_is_sound(n in 0u64..(1 << 40)) {
        if let Some((z, w)) = two_squares(n) {
            prop_assert!(z <= w);
            prop_assert_eq!(z as u128 * z as u128 + w as u128 * w as u128, n as u128);
        }
    }

    #[test]
    fn form_value_matches_gram(v in prop::array::uniform3(-10_000i64..10_000)) {
        for form in [F, G, H] {
            prop_assert_eq!(form.eval(v), form.eval_via_gram(v));
            prop_assert!(form.eval(v) >= 0);
        }
    }

    #[test]
    fn class_switch_identities(v in prop::array::uniform3(-1_000_000i64..1_000_000)) {
        prop_assert_eq!(G.eval(alpha(v)), G.eval(v));
        if let Some(w) = phi(v) {
            prop_assert_eq!(G.eval(w), F.eval(v));
            prop_assert_eq!(psi(w), Some(v));
        }
        if let Some(w) = psi(v) {
            prop_assert_eq!(F.eval(w), G.eval(v));
            prop_assert_eq!(phi(w), Some(v));
        }
    }

    #[test]
    fn theorem13_random(n in 1u64..1_000_000_000_000) {
        let c = theorem13(n).unwrap();
        prop_assert!(verify_certificate(&c));
        prop_assert!(c.quad.is_natural());
        let square = matches!(c.witness, Witness::Square { .. });
        prop_assert!(square);
    }

    #[test]
    fn theorem14_random(n in 1u64..1_000_000_000_000) {
        let c = theorem14(n).unwrap();
        prop_assert!(verify_certificate(&c));
        let Witness::PowerOf4 { exponent } = c.witness else {
            panic!("expected a power of 4");
        };
        if n % 4 != 0 {
            prop_assert!(exponent <= 1);
        } else {
            prop_assert!(exponent >= 1);
        }
    }

    #[test]
    fn tampered_certificates_rejected(n in 2u64..10_000_000, which in 0usize..5) {
        let mut c = theorem13(n).unwrap();
        match which {
            0 => c.n += 1,
            1 => c.quad.z += 1,
            2 => c.quad = Quad::new(c.quad.y, c.quad.x, c.quad.z, c.quad.w),
            3 => {
                let Witness::Square { root } = c.witness else { unreachable!() };
                c.witness = Witness::Square { root: root + 1 };
            }
            _ => c.witness = Witness::PowerOf4 { exponent: 40 },
        }
        // swapping x and y keeps the norm but changes x + 3y unless x == y
        let unchanged = which == 2 && c.quad.x == c.quad.y;
        prop_assert_eq!(verify_certificate(&c), unchanged);
    }

    // Coordinate scaling by 2 multiplies x + 3y by 2, so a square witness
    // m^2 becomes 2m^2 for 4n; scaling by 4 gives (2m)^2 for 16n.
    #[test]
    fn scaling_identities(n in 1u64..1_000_000) {
        let c = theorem13(n).unwrap();
        let Witness::Square { root } = c.witness else { unreachable!() };
        let by4 = scaled(&c, 4, Witness::Square { root: 2 * root });
        prop_assert!(verify_certificate(&by4));
        let by2 = scaled(&c, 2, Witness::TwiceSquare { root });
        prop_assert!(verify_certificate(&by2));
        if root > 0 {
            let wrong = scaled(&c, 2, Witness::Square { root: 2 * root });
            prop_assert!(!verify_certificate(&wrong));
        }
    }
}
