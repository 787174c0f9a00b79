use rayon::prelude::*;

use super::polynomial::{curve_residual, is_invertible};
use super::roots::quadratic_real_factors;
use super::{MotionPolynomial, RealPolynomial};
use crate::quatcore::{DualQuaternion, PluckerLine, Scalar, Vec3};
use crate::{Error, Result};

/// A revolute factor `t − h` together with its fixed axis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFactor {
    pub h: DualQuaternion<f64>,
    pub axis: PluckerLine<f64>,
}

impl LinearFactor {
    pub fn new(h: DualQuaternion<f64>) -> Result<Self> {
        let axis = axis_of_factor(&h)?;
        Ok(Self { h, axis })
    }

    /// Value of `t − h` at a finite parameter.
    pub fn at(&self, t: f64) -> DualQuaternion<f64> {
        DualQuaternion::real(t) - self.h.clone()
    }

    pub fn polynomial(&self) -> MotionPolynomial<f64> {
        MotionPolynomial::linear(&self.h)
    }
}

/// An open chain: `C = real_cofactor · leading · (t − h_1) ⋯ (t − h_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionFactorization {
    pub factors: Vec<LinearFactor>,
    pub real_cofactor: RealPolynomial<f64>,
    pub leading: DualQuaternion<f64>,
}

impl MotionFactorization {
    pub fn hs(&self) -> Vec<DualQuaternion<f64>> {
        self.factors.iter().map(|f| f.h.clone()).collect()
    }

    /// `(t − h_1) ⋯ (t − h_n)`.
    pub fn monic_product(&self) -> MotionPolynomial<f64> {
        self.factors
            .iter()
            .fold(MotionPolynomial::constant(DualQuaternion::identity()), |acc, f| &acc * &f.polynomial())
    }

    /// Full reconstruction including cofactor and leading coefficient.
    pub fn product(&self) -> MotionPolynomial<f64> {
        self.monic_product().left_mul(&self.leading).mul_real(&self.real_cofactor)
    }

    /// Projective relative residual of the reconstruction against `c`.
    pub fn residual<S: Scalar>(&self, c: &MotionPolynomial<S>) -> f64 {
        curve_residual(c, &self.product())
    }

    /// Whether two factorizations have the same factor sequence, comparing
    /// each `h` relative to its own magnitude.
    pub fn same_as(&self, o: &Self, tol: f64) -> bool {
        self.factors.len() == o.factors.len()
            && self.factors.iter().zip(&o.factors).all(|(a, b)| {
                let diff = (a.h.clone() - b.h.clone()).max_abs();
                diff <= tol * a.h.max_abs().max(1.0)
            })
    }
}

/// Fixed axis of the rotation family `t ↦ t − h`. The direction is the vector
/// part of the primal quaternion; the moment is the negated vector part of the
/// dual quaternion, projected onto the orthogonal complement of the direction.
pub fn axis_of_factor<S: Scalar>(h: &DualQuaternion<S>) -> Result<PluckerLine<S>> {
    let g = h.primal.vector();
    let g2 = g.norm_sq();
    let scale = h.coord_norm_sq().to_f64();
    let translational = if S::EXACT { g2.is_exact_zero() } else { g2.to_f64() <= 1e-20 * scale };
    if translational {
        return Err(Error::TranslationalFactor);
    }
    let m: Vec3<S> = -h.dual.vector();
    let corr = m.dot(&g) / g2;
    let m = m - g.scale(&corr);
    PluckerLine::new(g, m)
}

/// Content of `c`: for exact input the monic gcd of the eight coordinate
/// polynomials; for float input the product of norm quadratics that divide `c`.
fn strip_content<S: Scalar>(
    c: &MotionPolynomial<S>,
    quads: &mut Vec<RealPolynomial<f64>>,
) -> (MotionPolynomial<f64>, RealPolynomial<f64>) {
    if S::EXACT {
        let g = c.coordinates().iter().fold(RealPolynomial::zero(), |acc, p| acc.gcd(p));
        if g.degree().unwrap_or(0) > 0 {
            let (q, _) = c.div_rem_real(&g);
            let gf = g.to_f64();
            remove_content_quads(quads, &gf);
            return (q.to_f64(), gf);
        }
        return (c.to_f64(), RealPolynomial::one());
    }
    let mut cf = c.to_f64();
    let mut cofactor = RealPolynomial::one();
    let scale = cf.scale_f64();
    let mut k = 0;
    while k < quads.len() {
        let (q, r) = cf.div_rem_real(&quads[k]);
        let count = quads.iter().filter(|m| close_quads(m, &quads[k])).count();
        if count >= 2 && r.scale_f64() <= 1e-6 * scale {
            cofactor = &cofactor * &quads[k];
            let m = quads[k].clone();
            remove_content_quads(quads, &m);
            cf = q;
            k = 0;
        } else {
            k += 1;
        }
    }
    (cf, cofactor)
}

fn close_quads(a: &RealPolynomial<f64>, b: &RealPolynomial<f64>) -> bool {
    (a - b).max_abs_coeff() <= 1e-6 * a.max_abs_coeff().max(1.0)
}

/// Removes two copies of every quadratic dividing `g` (content appears
/// squared in the norm polynomial).
fn remove_content_quads(quads: &mut Vec<RealPolynomial<f64>>, g: &RealPolynomial<f64>) {
    let mut rest = g.clone();
    while rest.degree().unwrap_or(0) >= 2 {
        let Some(k) = quads.iter().position(|m| {
            let (_, r) = rest.div_rem(m);
            r.max_abs_coeff() <= 1e-7 * rest.max_abs_coeff()
        }) else {
            break;
        };
        let m = quads.remove(k);
        if let Some(k2) = quads.iter().position(|q| close_quads(q, &m)) {
            quads.remove(k2);
        }
        rest = rest.div_rem(&m).0;
    }
}

/// Shared preparation: content removal, monic normalization and the sorted
/// quadratic factors of the norm polynomial.
pub struct FactorizationSetup {
    pub monic: MotionPolynomial<f64>,
    pub leading: DualQuaternion<f64>,
    pub cofactor: RealPolynomial<f64>,
    pub quads: Vec<RealPolynomial<f64>>,
}

impl FactorizationSetup {
    pub fn new<S: Scalar>(c: &MotionPolynomial<S>) -> Result<Self> {
        let nu = c.norm_polynomial()?.to_f64();
        if c.degree().unwrap_or(0) == 0 {
            return Err(Error::NotAMotionPolynomial { residual: 0.0 });
        }
        let mut quads = quadratic_real_factors(&nu)?;
        let (stripped, cofactor) = strip_content(c, &mut quads);
        let leading = stripped.leading();
        if !is_invertible(&leading, stripped.scale_f64()) {
            return Err(Error::NonInvertibleLeadingCoefficient);
        }
        let inv = leading.inverse().ok_or(Error::NonInvertibleLeadingCoefficient)?;
        let monic = stripped.left_mul(&inv);
        Ok(Self { monic, leading, cofactor, quads })
    }

    /// Factorization whose `i`-th factor (left to right) has norm
    /// polynomial `quads[order[i]]`.
    pub fn factorize(&self, order: &[usize]) -> Result<MotionFactorization> {
        let n = self.quads.len();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!("order must be a permutation of 0..{n}")));
        }
        let mut a = self.monic.clone();
        let mut hs = vec![DualQuaternion::zero(); n];
        for i in (0..n).rev() {
            let (_, rem) = a.div_rem_real(&self.quads[order[i]]);
            let r1 = rem.coeff(1);
            let r0 = rem.coeff(0);
            if !is_invertible(&r1, a.scale_f64()) {
                return Err(Error::NonGenericRemainder);
            }
            let h = -(&r1.inverse().ok_or(Error::NonGenericRemainder)? * &r0);
            let (q, _) = a.right_divide(&MotionPolynomial::linear(&h))?;
            hs[i] = h;
            a = q;
        }
        let factors = hs.into_iter().map(LinearFactor::new).collect::<Result<Vec<_>>>()?;
        Ok(MotionFactorization { factors, real_cofactor: self.cofactor.clone(), leading: self.leading.clone() })
    }
}

/// Factorization of `c` with the quadratic factors of its norm polynomial
/// taken in the given order (indices into the sorted quadratic list).
pub fn factorize<S: Scalar>(c: &MotionPolynomial<S>, order: &[usize]) -> Result<MotionFactorization> {
    FactorizationSetup::new(c)?.factorize(order)
}

/// Tolerance on normalized `h` differences below which two factorizations
/// count as the same.
pub const DEDUP_TOL: f64 = 1e-6;

/// All distinct factorizations over every ordering of the quadratic factors,
/// in lexicographic order of the permutation. Fails unless at least two
/// exist.
pub fn all_factorizations<S: Scalar>(c: &MotionPolynomial<S>) -> Result<Vec<MotionFactorization>> {
    let setup = FactorizationSetup::new(c)?;
    let perms = permutations(setup.quads.len());
    let results: Vec<Result<MotionFactorization>> = perms.par_iter().map(|p| setup.factorize(p)).collect();
    let mut out: Vec<MotionFactorization> = Vec::new();
    let mut first_err = None;
    for r in results {
        match r {
            Ok(f) => {
                if !out.iter().any(|g| g.same_as(&f, DEDUP_TOL)) {
                    out.push(f);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if out.len() < 2 {
        if let (true, Some(e)) = (out.is_empty(), first_err) {
            return Err(e);
        }
        return Err(Error::FewerThanTwoFactorizations { found: out.len() });
    }
    Ok(out)
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatcore::Quaternion;

    #[test]
    fn half_turn_about_z() {
        let h = DualQuaternion::from_i64s([0, 0, 0, 1, 0, 0, 0, 0]);
        let l = axis_of_factor::<f64>(&h).unwrap();
        assert_eq!(l.dir, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(l.moment, Vec3::zero());
    }

    #[test]
    fn translation_factor_rejected() {
        let h = DualQuaternion::new(Quaternion::new(1.0, 0.0, 0.0, 0.0), Quaternion::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(axis_of_factor(&h), Err(Error::TranslationalFactor));
    }

    #[test]
    fn lexicographic_permutations() {
        assert_eq!(
            permutations(3),
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]]
        );
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn single_revolute_has_one_factorization() {
        let h = DualQuaternion::from_array([0.5, 0.0, 0.0, 1.0, 0.0, 0.3, -0.2, 0.0]);
        let c = MotionPolynomial::linear(&h);
        let f = factorize(&c, &[0]).unwrap();
        assert!((f.factors[0].h.clone() - h).max_abs() < 1e-12);
        assert_eq!(all_factorizations(&c), Err(Error::FewerThanTwoFactorizations { found: 1 }));
    }
}
