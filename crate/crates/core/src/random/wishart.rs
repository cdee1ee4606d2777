//! Bartlett factors, Wishart and inverse-Wishart log-densities, and the Jacobian
//! of `L ↦ L D_ε Lᵀ`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::matrix::LowerTriangular;

/// `K₁` with `k_jj = √χ²_{N−j+1}` (1-based `j`) and standard normal strict lower
/// part, so that `K₁K₁ᵀ ∼ Wₙ(Id, N)`.
pub fn bartlett_sample(rng: &mut impl Rng, n: usize, dof: usize) -> LowerTriangular {
    assert!(n >= 1 && dof >= n, "Bartlett factor needs N ≥ n ≥ 1");
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        let chi = ChiSquared::new((dof - j) as f64).expect("positive degrees of freedom");
        k[(j, j)] = chi.sample(rng).sqrt();
        for i in j + 1..n {
            k[(i, j)] = rng.sample(StandardNormal);
        }
    }
    // A χ² draw of exactly zero has probability zero; keep the invariant regardless.
    for j in 0..n {
        if !(k[(j, j)] > 0.0) {
            k[(j, j)] = f64::MIN_POSITIVE;
        }
    }
    LowerTriangular::new(k).expect("positive diagonal")
}

/// `log Γₙ(a) = n(n−1)/4 · log π + Σ_{j=1}^{n} log Γ(a + (1−j)/2)`.
pub fn log_multigamma(n: usize, a: f64) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) / 4.0 * std::f64::consts::PI.ln()
        + (1..=n).map(|j| ln_gamma(a + (1.0 - j as f64) / 2.0)).sum::<f64>()
}

/// `log f_{Σ,N}(X)` for positive definite `X = Y Yᵀ` given by a factor `Y`
/// (any square root works; only `log det X` is read off it).
///
/// `f_{Σ,N}(X) = |X|^{(N−n−1)/2} e^{−tr(Σ⁻¹X)/2} / (2^{Nn/2} |Σ|^{N/2} Γₙ(N/2))`.
pub(crate) fn wishart_log_pdf(
    x: &DMatrix<f64>,
    x_logdet: f64,
    sigma_inv: &DMatrix<f64>,
    sigma_logdet: f64,
    dof: usize,
) -> f64 {
    let n = x.nrows() as f64;
    let nn = dof as f64;
    let trace = sigma_inv.component_mul(x).sum();
    (nn - n - 1.0) / 2.0 * x_logdet
        - trace / 2.0
        - nn * n / 2.0 * 2f64.ln()
        - nn / 2.0 * sigma_logdet
        - log_multigamma(x.nrows(), nn / 2.0)
}

/// `log g_{Ω,N}(X)` with `g_{Ω,N}(X) = |Ω|^{N/2} |X|^{−(N+n+1)/2} e^{−tr(Ω X⁻¹)/2} / (2^{Nn/2} Γₙ(N/2))`,
/// taking `X⁻¹` and `Ω = Σ⁻¹` directly.
pub(crate) fn inverse_wishart_log_pdf(
    x_inv: &DMatrix<f64>,
    x_logdet: f64,
    omega: &DMatrix<f64>,
    sigma_logdet: f64,
    dof: usize,
) -> f64 {
    let n = x_inv.nrows() as f64;
    let nn = dof as f64;
    let trace = omega.component_mul(x_inv).sum();
    -nn / 2.0 * sigma_logdet - (nn + n + 1.0) / 2.0 * x_logdet
        - trace / 2.0
        - nn * n / 2.0 * 2f64.ln()
        - log_multigamma(x_inv.nrows(), nn / 2.0)
}

/// `log |det D Φ(L)|` for `Φ(L) = L D_ε Lᵀ` in lexicographic coordinates:
/// `n log 2 + Σ_j (n+1−j) log l_jj`. The sign pattern only affects the sign of
/// the determinant.
pub fn jacobian_logdet(l: &LowerTriangular) -> f64 {
    let n = l.dim();
    n as f64 * 2f64.ln() + (0..n).map(|j| (n - j) as f64 * l.diag(j).ln()).sum::<f64>()
}

/// `Σ_j 2 log l_jj = log det(L Lᵀ)`.
pub(crate) fn factor_logdet(l: &LowerTriangular) -> f64 {
    (0..l.dim()).map(|j| 2.0 * l.diag(j).ln()).sum()
}
