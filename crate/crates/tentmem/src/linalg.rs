//! 2x2 matrix algebra for branch derivatives: singular values, closed-form
//! sigma pairs for two-letter products, the determinant/Frobenius lower bound
//! for the smaller singular value of long products, and root finding for
//! threshold polynomials.

use crate::error::{Error, Result};
use crate::map::Alpha;
use crate::symbolic::SymbolBlock;

/// A 2x2 real matrix with finite entries, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Entries as `(m11, m12, m21, m22)`.
    pub fn entries(&self) -> (f64, f64, f64, f64) {
        (self.m11, self.m12, self.m21, self.m22)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn scale(&self, c: f64) -> Mat2 {
        Mat2::new(c * self.m11, c * self.m12, c * self.m21, c * self.m22)
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Apply to a column vector.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }
}

/// The ordered singular values of a 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPair {
    /// Larger singular value.
    pub s1: f64,
    /// Smaller singular value; `s1 * s2 = |det|`.
    pub s2: f64,
}

/// Derivative matrix of lift branch `i`:
/// `D1 = [[0,1],[2(1-a),2a]]`, `D2 = [[0,1],[-2(1-a),-2a]]`.
pub fn branch_matrix(alpha: Alpha, i: usize) -> Result<Mat2> {
    let a = alpha.value();
    match i {
        1 => Ok(Mat2::new(0.0, 1.0, 2.0 * (1.0 - a), 2.0 * a)),
        2 => Ok(Mat2::new(0.0, 1.0, -2.0 * (1.0 - a), -2.0 * a)),
        _ => Err(Error::InvalidIndex(format!("branch symbol {i}"))),
    }
}

/// Singular values via the stable rotation form: with
/// `E = (m11+m22)/2`, `F = (m11-m22)/2`, `G = (m21+m12)/2`, `H = (m21-m12)/2`,
/// `s1 = hypot(E,H) + hypot(F,G)` is subtraction-free; the smaller value is
/// recovered from `s1 * s2 = |det|` to avoid cancellation when `s2 << s1`.
pub fn singular_values(m: Mat2) -> SigmaPair {
    let e = 0.5 * (m.m11 + m.m22);
    let f = 0.5 * (m.m11 - m.m22);
    let g = 0.5 * (m.m21 + m.m12);
    let h = 0.5 * (m.m21 - m.m12);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let s1 = q + r;
    let s2 = if s1 > 0.0 { m.det().abs() / s1 } else { 0.0 };
    SigmaPair { s1, s2 }
}

/// As [`singular_values`] but with the absolute determinant supplied
/// analytically — essential for long branch-matrix products, where the
/// determinant computed from the product's entries loses all precision to
/// cancellation (`|det| << entries^2`).
pub fn singular_values_with_det(m: Mat2, abs_det: f64) -> SigmaPair {
    let e = 0.5 * (m.m11 + m.m22);
    let f = 0.5 * (m.m11 - m.m22);
    let g = 0.5 * (m.m21 + m.m12);
    let h = 0.5 * (m.m21 - m.m12);
    let s1 = e.hypot(h) + f.hypot(g);
    let s2 = if s1 > 0.0 { abs_det / s1 } else { 0.0 };
    SigmaPair { s1, s2 }
}

/// Which letter a two-letter product ends with (rightmost symbol, i.e. the
/// first map applied). Because `D1^T D1 = D2^T D2`, the singular values of a
/// two-letter product depend only on this rightmost letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Products `D_i D1` (words `11`, `21`).
    FollowsD1,
    /// Products `D_i D2` (words `12`, `22`).
    FollowsD2,
}

/// Closed-form singular values for two-letter products.
///
/// For `D_i D1`: `s^2 = c1 +- 2*sqrt(w1)` with
/// `c1 = 16a^4 - 24a^3 + 22a^2 - 8a + 4` and
/// `w1 = 64a^8 - 192a^7 + 320a^6 - 328a^5 + 245a^4 - 120a^3 + 36a^2`.
/// For `D_i D2`: `c2 = 16a^4 - 8a^3 + 6a^2 - 8a + 4` and
/// `w2 = 64a^8 - 64a^7 + 64a^6 - 88a^5 + 69a^4 - 24a^3 + 4a^2`.
/// The smaller value is evaluated subtraction-free via
/// `s1 * s2 = |det| = 4(1-a)^2`.
pub fn closed_form_sigma(kind: PairKind, alpha: Alpha) -> SigmaPair {
    let a = alpha.value();
    let (c, w) = match kind {
        PairKind::FollowsD1 => (
            poly_eval(&[4.0, -8.0, 22.0, -24.0, 16.0], a),
            poly_eval(
                &[0.0, 0.0, 36.0, -120.0, 245.0, -328.0, 320.0, -192.0, 64.0],
                a,
            ),
        ),
        PairKind::FollowsD2 => (
            poly_eval(&[4.0, -8.0, 6.0, -8.0, 16.0], a),
            poly_eval(
                &[0.0, 0.0, 4.0, -24.0, 69.0, -88.0, 64.0, -64.0, 64.0],
                a,
            ),
        ),
    };
    let w = w.max(0.0); // w vanishes at a = 0; clip stray negative roundoff
    let s1 = (c + 2.0 * w.sqrt()).sqrt();
    let abs_det = 4.0 * (1.0 - a) * (1.0 - a);
    let s2 = if s1 > 0.0 { abs_det / s1 } else { 0.0 };
    SigmaPair { s1, s2 }
}

/// Ordered product of branch matrices for a word, read left to right
/// (leftmost symbol = last map applied in time).
pub fn word_matrix(block: &SymbolBlock, alpha: Alpha) -> Result<Mat2> {
    let mut m = Mat2::identity();
    for &s in block.symbols() {
        m = m.mul(&branch_matrix(alpha, s as usize)?);
    }
    Ok(m)
}

/// The smaller singular value of the ordered product of branch matrices for
/// `block`. The absolute determinant is `(2(1-a))^len` analytically, which
/// keeps the value accurate even when it is many orders of magnitude below
/// the larger singular value.
pub fn sequence_sigma2(block: &SymbolBlock, alpha: Alpha) -> Result<f64> {
    let m = word_matrix(block, alpha)?;
    let a = alpha.value();
    let abs_det = (2.0 * (1.0 - a)).powi(block.len() as i32);
    Ok(singular_values_with_det(m, abs_det).s2)
}

/// Both singular values of a word product (analytic determinant).
pub fn sequence_sigma(block: &SymbolBlock, alpha: Alpha) -> Result<SigmaPair> {
    let m = word_matrix(block, alpha)?;
    let a = alpha.value();
    let abs_det = (2.0 * (1.0 - a)).powi(block.len() as i32);
    Ok(singular_values_with_det(m, abs_det))
}

/// Streaming accumulator for the determinant/Frobenius lower bound on the
/// smaller singular value of a long left-multiplied product.
///
/// Matrices are pushed in time order (first applied first); the running
/// product is renormalized by powers of two before it can overflow or
/// underflow, with the scale tracked in a separate exponent, and the
/// determinant is accumulated in log2 space, so the bound is available even
/// when its value overflows `f64`.
#[derive(Debug, Clone)]
pub struct ProductBound {
    prod: Mat2,
    exp2: i64,
    det_log2: f64,
    count: usize,
}

impl Default for ProductBound {
    fn default() -> Self {
        Self::new()
    }
}

impl ProductBound {
    pub fn new() -> Self {
        ProductBound {
            prod: Mat2::identity(),
            exp2: 0,
            det_log2: 0.0,
            count: 0,
        }
    }

    /// Multiply the running product on the left by `m` (i.e. `m` is applied
    /// after everything pushed so far).
    pub fn push(&mut self, m: &Mat2) -> Result<()> {
        if !m.is_finite() {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        let d = m.det().abs();
        if d == 0.0 {
            return Err(Error::Domain(
                "singular factor: determinant bound degenerates to zero".into(),
            ));
        }
        self.det_log2 += d.log2();
        self.prod = m.mul(&self.prod);
        self.count += 1;
        self.renormalize()
    }

    /// Rescale the running product by a power of two when its largest entry
    /// leaves `[2^-254, 2^254]`, so the Frobenius norm stays far from
    /// overflow and underflow; the scale lives in the exponent field.
    fn renormalize(&mut self) -> Result<()> {
        let max_abs = self
            .prod
            .m11
            .abs()
            .max(self.prod.m12.abs())
            .max(self.prod.m21.abs())
            .max(self.prod.m22.abs());
        if !max_abs.is_finite() || max_abs == 0.0 {
            return Err(Error::Domain(
                "running product left representable range".into(),
            ));
        }
        if !(2f64.powi(-254)..=2f64.powi(254)).contains(&max_abs) {
            let shift = -(max_abs.log2().round()) as i32;
            // Apply in two halves so the scale factor itself stays finite.
            let h1 = shift / 2;
            let h2 = shift - h1;
            self.prod = self.prod.scale(2f64.powi(h1)).scale(2f64.powi(h2));
            self.exp2 -= shift as i64;
        }
        Ok(())
    }

    /// Number of factors pushed.
    pub fn count(&self) -> usize {
        self.count
    }

    /// log2 of the bound `prod |det M_k| / ||prod M_k||_F`.
    pub fn bound_log2(&self) -> f64 {
        self.det_log2 - (self.prod.frobenius().log2() + self.exp2 as f64)
    }

    /// The bound itself (`+inf` if it exceeds f64 range; use
    /// [`ProductBound::bound_log2`] then).
    pub fn bound(&self) -> f64 {
        2f64.powf(self.bound_log2())
    }
}

/// Lower bound `prod |det M_k| / ||prod M_k||_F <= sigma2(prod M_k)` for a
/// nonempty sequence of matrices in time order (first applied first).
pub fn sigma2_product_bound(mats: &[Mat2]) -> Result<f64> {
    Ok(2f64.powf(sigma2_product_bound_log2(mats)?))
}

/// log2-space variant of [`sigma2_product_bound`] for products whose bound
/// overflows `f64`.
pub fn sigma2_product_bound_log2(mats: &[Mat2]) -> Result<f64> {
    if mats.is_empty() {
        return Err(Error::Domain("empty matrix sequence".into()));
    }
    let mut acc = ProductBound::new();
    for m in mats {
        acc.push(m)?;
    }
    Ok(acc.bound_log2())
}

/// Bisection root finder on `[lo, hi]`; requires a sign change, shrinks the
/// bracket to width `tol`, and returns the midpoint. Deterministic.
pub fn find_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Domain(format!("bad bracket [{lo}, {hi}] or tol {tol}")));
    }
    let mut a = lo;
    let mut b = hi;
    let fa = f(a);
    let fb = f(b);
    for (x, v) in [(a, fa), (b, fb)] {
        if !v.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut fa = fa;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // bracket at floating-point resolution
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(Error::NonFinite { at: mid });
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Real polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Coefficients in ascending degree; trailing zeros are trimmed.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        poly_eval(&self.coeffs, x)
    }

    /// Root by bisection on `[lo, hi]`.
    pub fn root_in(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        find_root(|x| self.eval(x), lo, hi, tol)
    }
}

/// Horner evaluation of ascending coefficients.
pub fn poly_eval(coeffs_ascending: &[f64], x: f64) -> f64 {
    coeffs_ascending
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x + c)
}

/// The first `alpha` in `(0, 1/2)` at which the smaller singular value of the
/// word product crosses level 1 from above: scan at step `1e-3` for the first
/// downward crossing, then bisect. Errors with [`Error::NoCrossing`] when the
/// value stays above 1 on the whole interval.
pub fn sigma2_threshold(block: &SymbolBlock) -> Result<Alpha> {
    let f = |a: f64| -> Result<f64> {
        Ok(sequence_sigma2(block, Alpha::new(a)?)? - 1.0)
    };
    let step = 1e-3;
    let mut prev_a = step;
    let mut prev_v = f(prev_a)?;
    let mut k = 2usize;
    loop {
        let a = k as f64 * step;
        if a >= 0.5 {
            break;
        }
        let v = f(a)?;
        if prev_v > 0.0 && v <= 0.0 {
            let root = find_root(
                |x| f(x).unwrap_or(f64::NAN),
                prev_a,
                a,
                1e-13,
            )?;
            return Ok(Alpha::new(root)?);
        }
        prev_a = a;
        prev_v = v;
        k += 1;
    }
    Err(Error::NoCrossing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }
    fn blk(w: &str) -> SymbolBlock {
        SymbolBlock::from_word(w).unwrap()
    }

    #[test]
    fn branch_matrix_examples() {
        assert_eq!(
            branch_matrix(a(0.5), 1).unwrap().entries(),
            (0.0, 1.0, 1.0, 1.0)
        );
        assert_eq!(
            branch_matrix(a(0.5), 2).unwrap().entries(),
            (0.0, 1.0, -1.0, -1.0)
        );
        assert_eq!(
            branch_matrix(a(0.0), 1).unwrap().entries(),
            (0.0, 1.0, 2.0, 0.0)
        );
        assert!(branch_matrix(a(0.3), 3).is_err());
    }

    #[test]
    fn singular_value_examples() {
        let sv = singular_values(Mat2::identity());
        assert!((sv.s1 - 1.0).abs() < 1e-15 && (sv.s2 - 1.0).abs() < 1e-15);
        let sv = singular_values(Mat2::new(0.0, 1.0, 2.0, 0.0));
        assert!((sv.s1 - 2.0).abs() < 1e-15 && (sv.s2 - 1.0).abs() < 1e-15);
        // D1^2 at alpha = 0 is 2*identity.
        let d1 = branch_matrix(a(0.0), 1).unwrap();
        let sv = singular_values(d1.mul(&d1));
        assert!((sv.s1 - 2.0).abs() < 1e-15 && (sv.s2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_values_match_eigen_defn_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let m = Mat2::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            );
            let sv = singular_values(m);
            // sigma1*sigma2 = |det|, sigma1^2+sigma2^2 = Frobenius^2.
            assert!((sv.s1 * sv.s2 - m.det().abs()).abs() < 1e-10 * (1.0 + m.det().abs()));
            let fro2 = m.frobenius_sq();
            assert!((sv.s1 * sv.s1 + sv.s2 * sv.s2 - fro2).abs() < 1e-10 * (1.0 + fro2));
            assert!(sv.s1 >= sv.s2 && sv.s2 >= 0.0);
        }
    }

    #[test]
    fn flip_identity_holds() {
        // sigma_i(D1 M) = sigma_i(D2 M): D1^T D1 = D2^T D2.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let al = a(rng.gen_range(0.01..0.99));
            let m = Mat2::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let d1 = branch_matrix(al, 1).unwrap();
            let d2 = branch_matrix(al, 2).unwrap();
            let s1 = singular_values(d1.mul(&m));
            let s2 = singular_values(d2.mul(&m));
            let rel = |x: f64, y: f64| (x - y).abs() / (1.0 + x.abs().max(y.abs()));
            assert!(rel(s1.s1, s2.s1) < 1e-12);
            assert!(rel(s1.s2, s2.s2) < 1e-12);
        }
    }

    #[test]
    fn closed_form_examples() {
        // alpha = 0: both pairs give (2, 2).
        for kind in [PairKind::FollowsD1, PairKind::FollowsD2] {
            let sv = closed_form_sigma(kind, a(0.0));
            assert!((sv.s1 - 2.0).abs() < 1e-12, "{kind:?}: {sv:?}");
            assert!((sv.s2 - 2.0).abs() < 1e-12);
        }
        // Crossing of level 1 for pairs ending in D1.
        let a1 = Polynomial::new(vec![-9.0, 48.0, -52.0, 16.0, 16.0])
            .root_in(0.2, 0.3, 1e-12)
            .unwrap();
        assert!((a1 - 0.24760367).abs() < 1e-7);
        let sv = closed_form_sigma(PairKind::FollowsD1, a(a1));
        assert!((sv.s2 - 1.0).abs() < 1e-6);
        // Crossing for pairs ending in D2.
        let sv = closed_form_sigma(PairKind::FollowsD2, a(0.3709557543));
        assert!((sv.s2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_agrees_with_products() {
        for k in 1..100 {
            let al = a(k as f64 / 200.0); // alpha in (0, 1/2)
            let d1 = branch_matrix(al, 1).unwrap();
            let d2 = branch_matrix(al, 2).unwrap();
            for (kind, m) in [
                (PairKind::FollowsD1, d1.mul(&d1)),
                (PairKind::FollowsD1, d2.mul(&d1)),
                (PairKind::FollowsD2, d1.mul(&d2)),
                (PairKind::FollowsD2, d2.mul(&d2)),
            ] {
                let cf = closed_form_sigma(kind, al);
                let sv = singular_values(m);
                assert!((cf.s1 - sv.s1).abs() < 1e-10, "s1 mismatch at {al}");
                assert!((cf.s2 - sv.s2).abs() < 1e-10, "s2 mismatch at {al}");
            }
        }
    }

    #[test]
    fn sequence_sigma2_examples() {
        // D2^3 has sigma2 > 1 on all of (0, 1/2).
        for k in 1..500 {
            let al = a(k as f64 / 1000.0);
            assert!(sequence_sigma2(&blk("222"), al).unwrap() > 1.0, "at {al}");
        }
        // Left-letter flip for full words.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let al = a(rng.gen_range(0.01..0.49));
            let len = rng.gen_range(1..8);
            let suffix: String = (0..len)
                .map(|_| if rng.gen_bool(0.5) { '1' } else { '2' })
                .collect();
            let w1 = blk(&format!("1{suffix}"));
            let w2 = blk(&format!("2{suffix}"));
            let v1 = sequence_sigma2(&w1, al).unwrap();
            let v2 = sequence_sigma2(&w2, al).unwrap();
            assert!((v1 - v2).abs() < 1e-12 * (1.0 + v1.abs()));
        }
        // D1D2 crosses level 1 at ~0.3709557543.
        let v = sequence_sigma2(&blk("12"), a(0.3709557543)).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn product_bound_examples() {
        // Single D1 at alpha=0: det -2, Frobenius sqrt(5).
        let d1 = branch_matrix(a(0.0), 1).unwrap();
        let b = sigma2_product_bound(&[d1]).unwrap();
        assert!((b - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!(b <= singular_values(d1).s2 + 1e-12);
        // Identity: bound 1/sqrt(2) <= 1.
        let b = sigma2_product_bound(&[Mat2::identity()]).unwrap();
        assert!((b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(sigma2_product_bound(&[]).is_err());
    }

    #[test]
    fn product_bound_below_true_sigma2() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..500 {
            let n = rng.gen_range(1..12);
            let mats: Vec<Mat2> = (0..n)
                .map(|_| {
                    Mat2::new(
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                    )
                })
                .collect();
            if mats.iter().any(|m| m.det().abs() < 1e-6) {
                continue;
            }
            let mut prod = Mat2::identity();
            for m in &mats {
                prod = m.mul(&prod);
            }
            let true_s2 = singular_values(prod).s2;
            let bound = sigma2_product_bound(&mats).unwrap();
            assert!(bound <= true_s2 * (1.0 + 1e-10) + 1e-12);
        }
    }

    #[test]
    fn product_bound_rescaling_long_products() {
        // 100k factors of 3*I: bound log2 = 100000*log2(9) - (log2(3^100000*sqrt(2)))
        // = 100000*log2(3) - 0.5. Far beyond f64 range; log2 API must survive.
        let m = Mat2::new(3.0, 0.0, 0.0, 3.0);
        let mats = vec![m; 100_000];
        let l = sigma2_product_bound_log2(&mats).unwrap();
        let expect = 100_000.0 * 3f64.log2() - 0.5;
        assert!((l - expect).abs() < 1e-6 * expect.abs());
        assert!(sigma2_product_bound(&mats).unwrap().is_infinite());
    }

    #[test]
    fn find_root_examples() {
        let r = find_root(
            |x| poly_eval(&[-9.0, 48.0, -52.0, 16.0, 16.0], x),
            0.2,
            0.3,
            1e-10,
        )
        .unwrap();
        assert!((r - 0.24760367).abs() < 1e-7);
        let r = find_root(
            |x| poly_eval(&[-0.5, 0.0, 8.0, -8.0, 8.0], x),
            0.2,
            0.3,
            1e-10,
        )
        .unwrap();
        assert!((r - 0.2797707433).abs() < 1e-7);
        let r = find_root(|x| x - 0.5, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn sigma2_threshold_examples() {
        let t = sigma2_threshold(&blk("1222")).unwrap().value();
        assert!((t - 0.3938896523).abs() < 1e-6, "got {t}");
        let t = sigma2_threshold(&blk("112")).unwrap().value();
        assert!((t - 0.3149466135).abs() < 1e-6, "got {t}");
        let t = sigma2_threshold(&blk("1221222")).unwrap().value();
        assert!((t - 0.4160029431).abs() < 1e-6, "got {t}");
        // sigma2 > 1 on all of (0, 1/2) for this word: no crossing.
        assert!(matches!(
            sigma2_threshold(&blk("122122122")),
            Err(Error::NoCrossing)
        ));
    }

    #[test]
    fn submultiplicativity_of_sigma2_reversed() {
        // sigma2(AB) >= sigma2(A) * sigma2(B) for 2x2 matrices.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let mk = |rng: &mut ChaCha8Rng| {
                Mat2::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                )
            };
            let a_ = mk(&mut rng);
            let b_ = mk(&mut rng);
            let lhs = singular_values(a_.mul(&b_)).s2;
            let rhs = singular_values(a_).s2 * singular_values(b_).s2;
            assert!(lhs >= rhs - 1e-12, "violated: {lhs} < {rhs}");
        }
    }
}
