//! Brute-force checks for many copies of `ψ½` on three parties.
//!
//! Bit strings `x ∈ {0,1}ⁿ` are stored as masks: coordinate `i` is bit `n−1−i`,
//! so the mask equals the computational-basis index on Bob's `n` qubits. The
//! Bob–Charlie space has index `b·2ⁿ + c`, hence `A ⊗ I` is `kron(A, I)`.
//!
//! `|x̃⟩` is the tensor product of `|00⟩` (where `x_i = 0`) and
//! `|Ψ⟩ = (|10⟩ + |01⟩)/√2` (where `x_i = 1`) over the `n` Bob–Charlie pairs,
//! i.e. `|x̃⟩ = 2^(−|x|/2) Σ_{t ⊆ x} |x ⊕ t⟩_B |t⟩_C`.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Largest `n` accepted by the brute-force routines (`4ⁿ = 256`).
pub const MAX_COPIES: usize = 4;

/// `(k, C(n,k)/2ⁿ)` for `k = 0..=n`.
pub fn target_distribution(n: usize) -> Vec<(usize, Rational)> {
    let denom = BigInt::from(1) << n;
    let mut binom = BigInt::from(1);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push((k, Rational::new(binom.clone(), denom.clone())));
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    out
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_COPIES {
        return Err(Error::DimensionMismatch { expected: MAX_COPIES, found: n });
    }
    Ok(())
}

fn check_operator(a: &DMatrix<Complex64>, n: usize) -> Result<()> {
    check_n(n)?;
    let dim = 1 << n;
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: a.nrows() });
    }
    Ok(())
}

fn check_bits(x: usize, n: usize) -> Result<()> {
    if x >> n != 0 {
        return Err(Error::DimensionMismatch { expected: n, found: usize::BITS as usize - x.leading_zeros() as usize });
    }
    Ok(())
}

/// Parses a bit string such as `"101"` into a mask.
pub fn bits_from_str(s: &str) -> Result<(usize, usize)> {
    let n = s.len();
    let mut mask = 0;
    for c in s.chars() {
        mask <<= 1;
        match c {
            '0' => {}
            '1' => mask |= 1,
            _ => return Err(Error::Parse(format!("not a bit string: {s:?}"))),
        }
    }
    Ok((mask, n))
}

/// `|x̃⟩` as a real vector of length `4ⁿ`.
pub fn tilde_vector(x: usize, n: usize) -> Result<DVector<f64>> {
    check_n(n)?;
    check_bits(x, n)?;
    let mut v = DVector::zeros(1 << (2 * n));
    let amp = 2f64.powf(-(x.count_ones() as f64) / 2.0);
    // iterate over all submasks t of x
    let mut t = x;
    loop {
        v[((x ^ t) << n) | t] = amp;
        if t == 0 {
            break;
        }
        t = (t - 1) & x;
    }
    Ok(v)
}

/// All `|x̃⟩` as the columns of a `4ⁿ × 2ⁿ` matrix.
pub fn tilde_matrix(n: usize) -> Result<DMatrix<f64>> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(1 << (2 * n), dim);
    for x in 0..dim {
        m.set_column(x, &tilde_vector(x, n)?);
    }
    Ok(m)
}

/// `A ⊗ I` on the Bob–Charlie space.
pub fn extend_to_bob_charlie(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = a.nrows();
    a.kronecker(&DMatrix::<Complex64>::identity(dim, dim))
}

/// Every `⟨x̃|A⊗I|ỹ⟩`, entry `(x, y)`.
pub fn tilde_elements(a: &DMatrix<Complex64>, n: usize) -> Result<DMatrix<Complex64>> {
    check_operator(a, n)?;
    let t = tilde_matrix(n)?.map(|v| Complex64::new(v, 0.0));
    Ok(t.transpose() * extend_to_bob_charlie(a) * t)
}

/// `⟨x̃|A⊗I|ỹ⟩` by explicit evaluation in the `4ⁿ`-dimensional space.
pub fn lemma2_lhs(a: &DMatrix<Complex64>, x: usize, y: usize, n: usize) -> Result<Complex64> {
    check_operator(a, n)?;
    let vx = tilde_vector(x, n)?.map(|v| Complex64::new(v, 0.0));
    let vy = tilde_vector(y, n)?.map(|v| Complex64::new(v, 0.0));
    Ok((vx.transpose() * extend_to_bob_charlie(a) * vy)[(0, 0)])
}

/// `(Σ_{b∈S} ⟨x⊕b|A|y⊕b⟩, |S|)` where `S` is the set of strings supported on
/// the coordinates with `x_i = y_i = 1`.
pub fn lemma2_rhs(a: &DMatrix<Complex64>, x: usize, y: usize, n: usize) -> Result<(Complex64, usize)> {
    check_operator(a, n)?;
    check_bits(x, n)?;
    check_bits(y, n)?;
    let overlap = x & y;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut size = 0;
    let mut b = overlap;
    loop {
        sum += a[(x ^ b, y ^ b)];
        size += 1;
        if b == 0 {
            break;
        }
        b = (b - 1) & overlap;
    }
    Ok((sum, size))
}

/// Random operator with independent complex Gaussian entries.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |_, _| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

/// Haar-random unitary (QR of a complex Gaussian matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let qr = random_operator(rng, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..u.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = u.column_mut(j);
        col *= phase;
    }
    u
}

/// Maximum absolute entry of `H − (tr H / dim) I`.
pub fn identity_deviation(h: &DMatrix<Complex64>) -> f64 {
    let dim = h.nrows();
    let mean = h.trace() / dim as f64;
    (h - DMatrix::<Complex64>::identity(dim, dim) * mean).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    pub n: usize,
    pub operators: usize,
    /// Largest relative deviation of `rhs / lhs` from the fitted constant of
    /// its `(x, y)` pattern.
    pub part_i_max_deviation: f64,
    /// The fitted constant on `x = y` equals `|S|` (to `tol`).
    pub part_i_diagonal_is_s: bool,
    /// Fitted constants depend only on `(|x|, |y|)`.
    pub part_i_pattern_consistent: bool,
    /// The map from off-diagonal entries of `A` to the off-diagonal tilde
    /// elements is injective, so vanishing tilde off-diagonals force vanishing
    /// off-diagonals of `A`.
    pub part_ii_injective: bool,
    /// Hypothesis-and-conclusion spot checks on constructed and random operators.
    pub part_ii_holds: bool,
    /// The map from the diagonal of `A` to the tilde diagonal is injective, and
    /// constants map to constants.
    pub part_iii_injective: bool,
    pub part_iii_holds: bool,
}

impl Lemma2Report {
    pub fn passed(&self) -> bool {
        self.part_i_diagonal_is_s
            && self.part_i_pattern_consistent
            && self.part_ii_injective
            && self.part_ii_holds
            && self.part_iii_injective
            && self.part_iii_holds
    }
}

fn unit(dim: usize, i: usize, j: usize) -> DMatrix<Complex64> {
    let mut e = DMatrix::zeros(dim, dim);
    e[(i, j)] = Complex64::new(1.0, 0.0);
    e
}

fn full_rank(m: &DMatrix<f64>, tol: f64) -> bool {
    let cols = m.ncols();
    if cols == 0 {
        return true;
    }
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().filter(|&&s| s > tol).count() == cols
}

/// Checks all three parts of the tilde-string lemma on the given operators.
pub fn check_lemma2<R: Rng + ?Sized>(rng: &mut R, operators: &[DMatrix<Complex64>], n: usize, tol: f64) -> Result<Lemma2Report> {
    check_n(n)?;
    let dim = 1 << n;
    for a in operators {
        check_operator(a, n)?;
    }

    // (i): fit rhs/lhs per (x, y) and compare across operators
    let mut max_dev = 0.0f64;
    let mut diagonal_is_s = true;
    let mut by_pattern: std::collections::BTreeMap<(u32, u32), f64> = Default::default();
    let mut pattern_consistent = true;
    for x in 0..dim {
        for y in 0..dim {
            let mut fitted: Option<f64> = None;
            let mut size = 0;
            for a in operators {
                let lhs = lemma2_lhs(a, x, y, n)?;
                let (rhs, s) = lemma2_rhs(a, x, y, n)?;
                size = s;
                if lhs.norm() < 1e-9 {
                    continue;
                }
                let ratio = rhs / lhs;
                max_dev = max_dev.max(ratio.im.abs());
                match fitted {
                    None => fitted = Some(ratio.re),
                    Some(k) => max_dev = max_dev.max((ratio.re - k).abs() / k.abs()),
                }
            }
            let Some(k) = fitted else { continue };
            if x == y && (k - size as f64).abs() > tol {
                diagonal_is_s = false;
            }
            let key = (x.count_ones(), y.count_ones());
            match by_pattern.get(&key) {
                Some(&prev) if (prev - k).abs() > tol * prev.abs().max(1.0) => pattern_consistent = false,
                Some(_) => {}
                None => {
                    by_pattern.insert(key, k);
                }
            }
        }
    }
    pattern_consistent &= max_dev <= tol;

    // (ii)/(iii): injectivity of the linear maps, column by column
    let off: Vec<(usize, usize)> = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let mut off_map = DMatrix::<f64>::zeros(off.len(), off.len());
    for (col, &(i, j)) in off.iter().enumerate() {
        let t = tilde_elements(&unit(dim, i, j), n)?;
        for (row, &(x, y)) in off.iter().enumerate() {
            off_map[(row, col)] = t[(x, y)].re;
        }
    }
    let mut diag_map = DMatrix::<f64>::zeros(dim, dim);
    for z in 0..dim {
        let t = tilde_elements(&unit(dim, z, z), n)?;
        for x in 0..dim {
            diag_map[(x, z)] = t[(x, x)].re;
        }
    }
    let part_ii_injective = full_rank(&off_map, 1e-9);
    let ones = DVector::from_element(dim, 1.0);
    let part_iii_injective = full_rank(&diag_map, 1e-9) && (&diag_map * &ones - &ones).amax() < tol;

    // spot checks of hypotheses and conclusions
    let mut part_ii_holds = true;
    let mut part_iii_holds = true;
    for a in operators {
        // diagonal part of a random operator: hypothesis (ii) holds, conclusion holds
        let diag = DMatrix::from_diagonal(&a.diagonal());
        let t = tilde_elements(&diag, n)?;
        let hyp_off = (0..dim).flat_map(|x| (0..dim).map(move |y| (x, y))).filter(|(x, y)| x != y).map(|(x, y)| t[(x, y)].norm()).fold(0.0, f64::max);
        part_ii_holds &= hyp_off < tol;
        // the random operator itself violates the hypothesis
        let t = tilde_elements(a, n)?;
        let rand_off = (0..dim).flat_map(|x| (0..dim).map(move |y| (x, y))).filter(|(x, y)| x != y).map(|(x, y)| t[(x, y)].norm()).fold(0.0, f64::max);
        part_ii_holds &= rand_off > tol;

        // k·I plus off-diagonal noise: hypothesis (iii) holds with the same k
        let k: f64 = rng.random_range(0.1..2.0);
        let mut b = a.clone();
        for z in 0..dim {
            b[(z, z)] = Complex64::new(k, 0.0);
        }
        let t = tilde_elements(&b, n)?;
        part_iii_holds &= (0..dim).all(|x| (t[(x, x)] - Complex64::new(k, 0.0)).norm() < tol);
        // a random diagonal is detected as non-constant
        let spread = (0..dim).map(|x| t_diag_re(a, n, x)).collect::<Result<Vec<f64>>>()?;
        let (lo, hi) = spread.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        part_iii_holds &= hi - lo > tol;
    }

    Ok(Lemma2Report {
        n,
        operators: operators.len(),
        part_i_max_deviation: max_dev,
        part_i_diagonal_is_s: diagonal_is_s,
        part_i_pattern_consistent: pattern_consistent,
        part_ii_injective,
        part_ii_holds,
        part_iii_injective,
        part_iii_holds,
    })
}

fn t_diag_re(a: &DMatrix<Complex64>, n: usize, x: usize) -> Result<f64> {
    Ok(lemma2_lhs(a, x, x, n)?.re)
}

#[derive(Clone, Debug, PartialEq)]
pub enum NogoVerdict {
    /// All `⟨x̃|M†M⊗I|x̃⟩` equal `scale > 0` and every off-diagonal element vanishes.
    UnitaryLike { scale: f64, identity_deviation: f64 },
    Violation { diag_spread: f64, offdiag_max: f64 },
}

impl NogoVerdict {
    pub fn is_unitary_like(&self) -> bool {
        matches!(self, Self::UnitaryLike { .. })
    }
}

/// Whether Bob's operator `M` keeps the tilde ensemble intact, the condition
/// forced by entropy conservation on the target ensemble.
pub fn entropy_nogo_check(m: &DMatrix<Complex64>, n: usize, tol: f64) -> Result<NogoVerdict> {
    let h = m.adjoint() * m;
    let t = tilde_elements(&h, n)?;
    let dim = 1 << n;
    let diag: Vec<f64> = (0..dim).map(|x| t[(x, x)].re).collect();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let mut offdiag_max = 0.0f64;
    for x in 0..dim {
        for y in 0..dim {
            if x != y {
                offdiag_max = offdiag_max.max(t[(x, y)].norm());
            }
        }
    }
    let diag_spread = hi - lo;
    if diag_spread <= tol && offdiag_max <= tol && lo > tol {
        Ok(NogoVerdict::UnitaryLike { scale: diag.iter().sum::<f64>() / dim as f64, identity_deviation: identity_deviation(&h) })
    } else {
        Ok(NogoVerdict::Violation { diag_spread, offdiag_max })
    }
}
