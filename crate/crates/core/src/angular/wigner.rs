//! Wigner 6j symbols from the Racah single-sum formula in exact arithmetic.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::halfint::HalfInt;

const CACHED_FACTORIALS: usize = 256;

fn factorial(n: u32) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(CACHED_FACTORIALS);
        let mut acc = BigInt::one();
        v.push(acc.clone());
        for k in 1..CACHED_FACTORIALS {
            acc *= k;
            v.push(acc.clone());
        }
        v
    });
    match table.get(n as usize) {
        Some(f) => f.clone(),
        None => (CACHED_FACTORIALS as u32..=n)
            .fold(table[CACHED_FACTORIALS - 1].clone(), |acc, k| acc * k),
    }
}

/// True when (a, b, c) can couple: |a - b| <= c <= a + b with a + b + c integral.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    (a + b + c) % 2 == 0 && c <= a + b && c >= a.abs_diff(b)
}

/// Δ(abc)² = (a+b-c)!(a-b+c)!(-a+b+c)! / (a+b+c+1)!, for a valid triad.
fn delta_squared(a: u32, b: u32, c: u32) -> BigRational {
    let num = factorial((a + b - c) / 2) * factorial((a + c - b) / 2) * factorial((b + c - a) / 2);
    let den = factorial((a + b + c) / 2 + 1);
    BigRational::new(num, den)
}

/// Exact signed square of a 6j symbol: returns `s` with `{...} = sign(s) * sqrt(|s|)`.
///
/// Zero whenever a triangle condition fails.
pub fn wigner_6j_signed_square(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> BigRational {
    if !(triangle(j1, j2, j3)
        && triangle(j1, j5, j6)
        && triangle(j4, j2, j6)
        && triangle(j4, j5, j3))
    {
        return BigRational::zero();
    }
    let [a, b, c, d, e, f] = [j1, j2, j3, j4, j5, j6].map(HalfInt::twice);

    // Triad sums and column-pair sums, all in doubled units and all even.
    let triads = [a + b + c, a + e + f, d + b + f, d + e + c].map(|x| x / 2);
    let pairs = [a + b + d + e, a + c + d + f, b + c + e + f].map(|x| x / 2);
    let t_min = *triads.iter().max().unwrap();
    let t_max = *pairs.iter().min().unwrap();

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let mut den = BigInt::one();
        for &s in &triads {
            den *= factorial(t - s);
        }
        for &p in &pairs {
            den *= factorial(p - t);
        }
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return sum;
    }
    let prefactor = delta_squared(a, b, c)
        * delta_squared(a, e, f)
        * delta_squared(d, b, f)
        * delta_squared(d, e, c);
    let negative = sum.is_negative();
    let square = &sum * &sum * prefactor;
    if negative {
        -square
    } else {
        square
    }
}

/// The Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
///
/// Exactly zero when a triangle condition fails; otherwise the exact value
/// rounded once on conversion.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> f64 {
    let s = wigner_6j_signed_square(j1, j2, j3, j4, j5, j6);
    if s.is_zero() {
        return 0.0;
    }
    let magnitude = s.abs().to_f64().expect("finite 6j").sqrt();
    if s.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}
