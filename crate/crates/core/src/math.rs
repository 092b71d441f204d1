//! Float helpers for `no_std`.

pub(crate) use libm::{exp, fabs, log, sqrt};

/// `x^n` by repeated squaring.
pub(crate) fn powi(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient as a float. Exact for the small arguments used here.
pub(crate) fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    // Products of ratios can drift by an ulp; snap to the nearest integer.
    libm::round(c)
}

/// Binomial pmf row `Bin(k; n, p)` for `k = 0..=n`.
pub(crate) fn binomial_row(n: usize, p: f64) -> alloc::vec::Vec<f64> {
    let q = 1.0 - p;
    (0..=n)
        .map(|k| choose(n, k) * powi(p, k as u32) * powi(q, (n - k) as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_products() {
        assert_eq!(powi(0.7, 0), 1.0);
        assert_eq!(powi(0.7, 3), 0.7 * 0.7 * 0.7);
        assert!((powi(1.1, 17) - libm::pow(1.1, 17.0)).abs() < 1e-13);
    }

    #[test]
    fn choose_small_values() {
        assert_eq!(choose(5, 2), 10.0);
        assert_eq!(choose(30, 15), 155117520.0);
        assert_eq!(choose(3, 4), 0.0);
        assert_eq!(factorial(6), 720.0);
    }

    #[test]
    fn binomial_row_sums_to_one() {
        let row = binomial_row(9, 0.37);
        let s: f64 = row.iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }
}
