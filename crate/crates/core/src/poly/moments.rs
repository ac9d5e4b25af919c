//! Exact moments of the uniform distribution on the unit ball.

use super::Polynomial;

/// `E[x^α]` for `x` uniform on the closed unit ball of dimension `alpha.len()`.
///
/// Odd exponents give 0. For `α = 2k` the moment is
///
/// ```text
/// E[x^α] = n/(|α|+n) · Γ(n/2)/Γ(n/2+|k|) · Π_i Γ(k_i+½)/Γ(½)
/// ```
///
/// which telescopes to `Π_i Π_{j<k_i} (j+½) / Π_{j=1}^{|k|} (n/2+j)`; the
/// product form is evaluated to avoid overflow in the Gamma values.
pub fn ball_monomial_moment(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let half_n = alpha.len() as f64 / 2.0;
    let mut num = 1.0;
    let mut total = 0u32;
    for &a in alpha {
        let k = a / 2;
        for j in 0..k {
            num *= j as f64 + 0.5;
        }
        total += k;
    }
    let mut den = 1.0;
    for j in 1..=total {
        den *= half_n + j as f64;
    }
    num / den
}

/// `E[p]` under the uniform distribution on the unit ball of dimension `p.num_vars()`.
pub fn expectation_uniform_ball(p: &Polynomial) -> f64 {
    p.terms().map(|(e, c)| c * ball_monomial_moment(e)).sum()
}

/// `E[p·q]` without forming the product polynomial.
pub fn expectation_product(p: &Polynomial, q: &Polynomial) -> f64 {
    assert_eq!(p.num_vars(), q.num_vars());
    let mut e = vec![0u32; p.num_vars()];
    let mut sum = 0.0;
    for (a, ca) in p.terms() {
        for (b, cb) in q.terms() {
            let mut odd = false;
            for ((ei, &ai), &bi) in e.iter_mut().zip(a).zip(b) {
                *ei = ai + bi;
                odd |= *ei % 2 == 1;
            }
            if !odd {
                sum += ca * cb * ball_monomial_moment(&e);
            }
        }
    }
    sum
}
