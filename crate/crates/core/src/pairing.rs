//! The pairing bijection `h(x, y) = 2^x (2y + 1) - 1` between ω×ω and ω.

use std::cmp::Ordering;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("h({x}, {y}) does not fit in 64 bits")]
    EncodeOverflow { x: u64, y: u64 },
    #[error("cannot decode {0}: n + 1 overflows")]
    DecodeOverflow(u64),
}

pub fn pair_encode(x: u64, y: u64) -> Result<u64, PairingError> {
    let overflow = PairingError::EncodeOverflow { x, y };
    let odd = y
        .checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .ok_or(overflow)?;
    if x >= 64 {
        return Err(overflow);
    }
    let shifted = odd.checked_shl(x as u32).ok_or(overflow)?;
    if shifted >> x != odd {
        return Err(overflow);
    }
    Ok(shifted - 1)
}

pub fn pair_decode(n: u64) -> Result<(u64, u64), PairingError> {
    let m = n.checked_add(1).ok_or(PairingError::DecodeOverflow(n))?;
    let x = m.trailing_zeros() as u64;
    let odd = m >> x;
    Ok((x, (odd - 1) / 2))
}

/// `h(x, y)` without a size limit.
pub fn pair_encode_big(x: u64, y: u64) -> BigUint {
    let odd = BigUint::from(y) * 2u32 + 1u32;
    (odd << x as usize) - 1u32
}

/// Inverse of [`pair_encode_big`].
pub fn pair_decode_big(n: &BigUint) -> (u64, u64) {
    let m = n + 1u32;
    let x = m.trailing_zeros().expect("n + 1 is positive");
    let y: BigUint = ((m >> x as usize) - 1u32) / 2u32;
    (x, u64::try_from(y).expect("column fits in 64 bits"))
}

/// Order of grid points by their `h`-code, without requiring the code to fit
/// in 64 bits.
pub fn h_cmp(a: (u64, u64), b: (u64, u64)) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    // compare 2^xa (2ya+1) with 2^xb (2yb+1)
    let (xa, ya) = a;
    let (xb, yb) = b;
    let oa = 2 * ya as u128 + 1;
    let ob = 2 * yb as u128 + 1;
    if xa >= xb {
        shifted_cmp(oa, xa - xb, ob)
    } else {
        shifted_cmp(ob, xb - xa, oa).reverse()
    }
}

/// Compares `odd << d` with `other`.
fn shifted_cmp(odd: u128, d: u64, other: u128) -> Ordering {
    if d <= 62 {
        (odd << d).cmp(&other)
    } else {
        // shift leaves u128 range
        let lhs = BigUint::from(odd) << d as usize;
        lhs.cmp(&BigUint::from(other))
    }
}

/// Row index of a natural under `h⁻¹`.
pub fn row_of(n: u64) -> u64 {
    n.wrapping_add(1).trailing_zeros() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(pair_encode(0, 0), Ok(0));
        assert_eq!(pair_encode(2, 3), Ok(27));
        assert_eq!(pair_decode(6), Ok((0, 3)));
    }

    #[test]
    fn overflow() {
        assert!(pair_encode(64, 0).is_err());
        assert!(pair_encode(63, 1).is_err());
        assert!(pair_encode(0, u64::MAX / 2 + 1).is_err());
        assert!(pair_decode(u64::MAX).is_err());
        assert_eq!(pair_encode(63, 0), Ok((1u64 << 63) - 1));
    }

    #[test]
    fn h_cmp_matches_codes() {
        for x1 in 0..6 {
            for y1 in 0..20 {
                for x2 in 0..6 {
                    for y2 in 0..20 {
                        let c1 = pair_encode(x1, y1).unwrap();
                        let c2 = pair_encode(x2, y2).unwrap();
                        assert_eq!(h_cmp((x1, y1), (x2, y2)), c1.cmp(&c2));
                    }
                }
            }
        }
        assert_eq!(h_cmp((100, 0), (0, 5)), Ordering::Greater);
    }

    #[test]
    fn big_codes_agree() {
        assert_eq!(pair_encode_big(2, 3), BigUint::from(27u32));
        assert_eq!(pair_decode_big(&pair_encode_big(900, 1000)), (900, 1000));
        assert_eq!(pair_encode_big(63, 0), BigUint::from((1u64 << 63) - 1));
    }
}
