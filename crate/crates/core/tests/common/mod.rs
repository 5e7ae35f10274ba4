//! Reference computations shared by the integration tests. Each one avoids
//! the library routine it is used to check.

#![allow(dead_code)]

use std::f64::consts::PI;

use scrambler_core::tensor::{kron, nuclear_norm, ComplexMatrix};
use scrambler_core::C64;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// `E[x^m]` under the Marčenko–Pastur law of ratio `λ ∈ (0, 1]`, by
/// quadrature in the angle `x = 1 + λ − 2√λ cos θ`, where
/// `ρ(x)dx = (2/π) sin²θ / x dθ`.
pub fn mp_moment_quadrature(m: f64, lambda: f64) -> f64 {
    let s = lambda.sqrt();
    let integrand = move |t: f64| {
        let x = 1.0 + lambda - 2.0 * s * t.cos();
        if x <= 0.0 {
            return 0.0;
        }
        (2.0 / PI) * t.sin().powi(2) * x.powf(m - 1.0)
    };
    adaptive_simpson(&integrand, 0.0, PI, 1e-14)
}

/// Large-dimension Haar mean of the optimal hacking fidelity, from the
/// quadrature half-moment.
pub fn asym_p_opt_oracle(kappa: f64, d_a: usize, d_k: usize) -> f64 {
    let finite = (d_a * d_k) as f64;
    if kappa >= 1.0 {
        let i = mp_moment_quadrature(0.5, kappa.powi(-2));
        i * i + (1.0 - i * i) / finite
    } else {
        let i = mp_moment_quadrature(0.5, kappa.powi(2));
        kappa * kappa * i * i + (1.0 - i * i) / finite
    }
}

/// `‖(I_L ⊗ Z/‖Z‖₂)·U°‖₁` built with an explicit Kronecker product.
pub fn probe_trace_norm(uo: &ComplexMatrix, d_l: usize, z: &ComplexMatrix) -> f64 {
    let chi = z.scale_real(1.0 / z.frobenius_norm());
    let big = kron(&ComplexMatrix::identity(d_l), &chi).unwrap();
    nuclear_norm(&(&big * uo)).unwrap()
}

/// Central differences of `probe_trace_norm` along every real and imaginary
/// entry direction, returned as `∂/∂Re + i·∂/∂Im`.
pub fn fd_gradient(uo: &ComplexMatrix, d_l: usize, z: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let (n, m) = z.shape();
    ComplexMatrix::from_fn(n, m, |i, j| {
        let mut part = [0.0; 2];
        for (k, dir) in [C64::new(h, 0.0), C64::new(0.0, h)].into_iter().enumerate() {
            let mut plus = z.clone();
            plus[(i, j)] += dir;
            let mut minus = z.clone();
            minus[(i, j)] -= dir;
            part[k] = (probe_trace_norm(uo, d_l, &plus) - probe_trace_norm(uo, d_l, &minus)) / (2.0 * h);
        }
        C64::new(part[0], part[1])
    })
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
