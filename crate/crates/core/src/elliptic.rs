//! Jacobi elliptic functions and the complete integral `K` via the
//! arithmetic-geometric mean.
//!
//! Functions here take the elliptic modulus `k`; the parameter is `m = k²`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const MAX_ITER: usize = 40;

fn check_modulus(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidModulus(k));
    }
    Ok(k * k)
}

/// Complete elliptic integral of the first kind `K(k) = ∫₀^{π/2} dθ/√(1 − k² sin²θ)`.
pub fn complete_k(k: f64) -> Result<f64> {
    let m = check_modulus(k)?;
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..MAX_ITER {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
    }
    Ok(FRAC_PI_2 / a)
}

/// `(sn, cn, dn)` of `u` for modulus `k`, by descending Landen/AGM recursion.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    let m = check_modulus(k)?;
    if m == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.len() < MAX_ITER {
        let an = *a.last().unwrap();
        let cn = *c.last().unwrap();
        if cn.abs() <= f64::EPSILON * an {
            break;
        }
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn² = (1 - m) + m cn² has no cancellation and stays accurate at cn = 0
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    Ok((sn, cn, dn))
}

/// Jacobi `cn(z; k)`.
pub fn jacobi_cn(z: f64, k: f64) -> Result<f64> {
    jacobi_sn_cn_dn(z, k).map(|(_, cn, _)| cn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cn_at_zero_is_one() {
        for k in [0.0, 0.3, 0.7, 0.99, 0.999999] {
            assert!((jacobi_cn(0.0, k).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_modulus_is_cosine() {
        for z in [-3.0, -0.4, 0.0, 1.1, 7.5] {
            assert!((jacobi_cn(z, 0.0).unwrap() - z.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_period_zero() {
        for k in [0.1, 0.5, 0.9, 0.999] {
            let kk = complete_k(k).unwrap();
            assert!(jacobi_cn(kk, k).unwrap().abs() < 1e-12, "k = {k}");
            assert!((jacobi_cn(2.0 * kk, k).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pythagorean_identities() {
        for k in [0.2f64, 0.8, 0.98] {
            let m = k * k;
            for z in [0.3, 1.7, -2.2, 5.0] {
                let (sn, cn, dn) = jacobi_sn_cn_dn(z, k).unwrap();
                assert!((sn * sn + cn * cn - 1.0).abs() < 1e-14);
                assert!((dn * dn + m * sn * sn - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn complete_k_matches_quadrature() {
        for k in [0.0f64, 0.4, 0.9] {
            // trapezoid on a periodic, even integrand converges geometrically
            let n = 2000;
            let h = FRAC_PI_2 / n as f64;
            let mut q = 0.0;
            for j in 0..=n {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let s = (j as f64 * h).sin();
                q += w * h / (1.0 - k * k * s * s).sqrt();
            }
            assert!((complete_k(k).unwrap() - q).abs() < 1e-12);
        }
    }

    #[test]
    fn dn_at_quarter_period() {
        let k: f64 = 0.985;
        let kk = complete_k(k).unwrap();
        let (_, _, dn) = jacobi_sn_cn_dn(kk, k).unwrap();
        assert!((dn - (1.0 - k * k).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn derivative_of_cn() {
        let (k, z, h) = (0.85, 0.9, 1e-5);
        let d = (jacobi_cn(z + h, k).unwrap() - jacobi_cn(z - h, k).unwrap()) / (2.0 * h);
        let (sn, _, dn) = jacobi_sn_cn_dn(z, k).unwrap();
        assert!((d + sn * dn).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(matches!(jacobi_cn(0.1, 1.0), Err(Error::InvalidModulus(_))));
        assert!(jacobi_cn(0.1, -0.1).is_err());
    }
}
