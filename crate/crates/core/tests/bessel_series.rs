use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use patchforce::numerics::bessel_j;

/// `J_n(x)` summed in exact rational arithmetic until the terms drop below 1e-40.
fn exact_series(order: u32, x: f64) -> f64 {
    let x = BigRational::from_float(x).unwrap();
    let half_sq = (&x * &x) / BigRational::from_integer(BigInt::from(4));
    let mut term = if order == 0 { BigRational::one() } else { &x / BigRational::from_integer(BigInt::from(2)) };
    let mut sum = BigRational::zero();
    let tiny = BigRational::new(BigInt::one(), BigInt::from(10).pow(40));
    let mut m: u64 = 0;
    loop {
        sum += &term;
        m += 1;
        let denom = BigInt::from(m) * BigInt::from(m + order as u64);
        term = -(&term * &half_sq) / BigRational::from_integer(denom);
        if m > 10 && term.abs() < tiny {
            break;
        }
    }
    sum.to_f64().unwrap()
}

#[test]
fn matches_exact_power_series_up_to_twenty() {
    let mut x = 0.0;
    while x <= 20.0 {
        for order in 0..2 {
            let want = exact_series(order, x);
            let got = bessel_j(order, x).unwrap();
            assert!((got - want).abs() < 1e-12, "J{order}({x}) = {got}, series {want}");
        }
        x += 0.173;
    }
}

#[test]
fn near_regime_edges() {
    for &x in &[7.999, 8.0, 8.001, 12.5, 19.99, 20.0] {
        for order in 0..2 {
            let want = exact_series(order, x);
            assert!((bessel_j(order, x).unwrap() - want).abs() < 1e-12, "J{order}({x})");
        }
    }
}

#[test]
fn first_zero_of_j0() {
    let z = 2.404825557695773;
    assert!(exact_series(0, z).abs() < 1e-14);
    assert!(bessel_j(0, z).unwrap().abs() < 1e-10);
}
